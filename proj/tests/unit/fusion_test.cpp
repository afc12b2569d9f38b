#include <gtest/gtest.h>

#include "askeda/fusion.hpp"
#include "../support/oracles.hpp"

using namespace askeda;
using V = std::vector<std::string>;

TEST(Rrf, SingleSharedChunkScoresTwoOverSixtyOne) {
    const auto f = rrf_fuse({"c1"}, {"c1"}, RetrievalConfig{});
    ASSERT_EQ(f.size(), 1u);
    EXPECT_EQ(f[0].rrf_score, 2.0 / 61.0);
    EXPECT_EQ(f[0].dense_rank, 1u);
    EXPECT_EQ(f[0].sparse_rank, 1u);
}

TEST(Rrf, AbsentRankContributesNothing) {
    EXPECT_EQ(rrf_score(std::nullopt, 3, 60), 1.0 / 63);
    EXPECT_EQ(rrf_score(std::nullopt, std::nullopt, 60), 0.0);
}

TEST(Rrf, SharedChunkOutranksSingletons) {
    RetrievalConfig cfg;
    const auto f = rrf_fuse({"a", "b", "c"}, {"d", "c", "e"}, cfg);
    ASSERT_EQ(f.size(), 3u);
    EXPECT_EQ(f[0].chunk_id, "c");
    // a and d tie at 1/61: ascending id
    EXPECT_EQ(f[1].chunk_id, "a");
    EXPECT_EQ(f[2].chunk_id, "d");
}

TEST(Rrf, RandomListsAgreeWithDirectEvaluation) {
    oracle::Rng rng(2);
    for (int t = 0; t < 300; ++t) {
        V pool;
        for (std::size_t i = 0, n = oracle::pick(rng, 1, 20); i < n; ++i) pool.push_back("c" + std::to_string(i));
        auto draw = [&] {
            V v = pool;
            std::shuffle(v.begin(), v.end(), rng);
            v.resize(oracle::pick(rng, 0, v.size()));
            return v;
        };
        const auto d = draw(), s = draw();
        RetrievalConfig cfg;
        cfg.rrf_k = 1.0 + static_cast<double>(oracle::pick(rng, 0, 100));
        cfg.n_hybrid = oracle::pick(rng, 1, 25);
        const auto want = oracle::rrf(d, s, cfg.rrf_k);
        const auto got = rrf_fuse(d, s, cfg);
        EXPECT_EQ(got.size(), std::min(cfg.n_hybrid, want.size()));
        for (std::size_t i = 0; i < got.size(); ++i) {
            EXPECT_NEAR(got[i].rrf_score, want.at(got[i].chunk_id), 1e-12);
            if (i) {
                EXPECT_TRUE(fused_before(got[i - 1], got[i]));
            }
        }
        // nothing left out scores higher than the last kept candidate
        if (got.empty()) continue;
        for (const auto& [id, score] : want) {
            if (std::none_of(got.begin(), got.end(), [&](const auto& c) { return c.chunk_id == id; })) {
                EXPECT_FALSE(fused_before({id, {}, {}, score}, got.back()));
            }
        }
    }
}

TEST(Rrf, RejectsDuplicatesAndBadConfig) {
    EXPECT_THROW(rrf_fuse({"a", "a"}, {}, RetrievalConfig{}), Error);
    EXPECT_THROW(rrf_fuse({}, {}, RetrievalConfig{3, 3, 0, 60}), Error);
    EXPECT_THROW(rrf_fuse({}, {}, RetrievalConfig{3, 3, 3, 0}), Error);
    EXPECT_TRUE(rrf_fuse({}, {}, RetrievalConfig{}).empty());
}

TEST(RetrievalMode, ParsesKnownNamesOnly) {
    for (auto m : {RetrievalMode::hybrid, RetrievalMode::sparse, RetrievalMode::dense, RetrievalMode::none})
        EXPECT_EQ(parse_mode(to_string(m)), m);
    EXPECT_EQ(parse_mode("bm25"), std::nullopt);
}
