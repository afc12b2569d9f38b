#include <gtest/gtest.h>

#include "askeda/sparse_index.hpp"
#include "../support/oracles.hpp"

using namespace askeda;

namespace {

std::vector<Chunk> chunks_of(std::vector<std::pair<std::string, std::string>> rows) {
    std::vector<Chunk> out;
    for (auto& [id, text] : rows) out.push_back({id, "d", 0, text, 0, 0});
    return out;
}

}  // namespace

TEST(Bm25, MatchesBruteForceOnRandomCorpora) {
    oracle::Rng rng(99);
    for (int t = 0; t < 40; ++t) {
        const auto vocab = oracle::make_vocab(rng, oracle::pick(rng, 3, 60));
        const auto chunks = oracle::random_corpus(rng, vocab, oracle::pick(rng, 1, 80), 30);
        const auto index = build_sparse(chunks);
        for (int q = 0; q < 10; ++q) {
            const auto query = oracle::random_text(rng, vocab, 5);
            const auto n = oracle::pick(rng, 1, 10);
            const auto got = search_sparse(index, query, n);
            const auto want = oracle::bm25(chunks, query, n);
            ASSERT_EQ(got.size(), want.size()) << query;
            for (std::size_t i = 0; i < got.size(); ++i) {
                EXPECT_EQ(got[i].chunk_id, want[i].id);
                EXPECT_NEAR(got[i].score, want[i].score, 1e-9);
            }
        }
    }
}

TEST(Bm25, IdfIsNeverNegative) {
    for (std::size_t n = 1; n < 50; ++n)
        for (std::size_t df = 1; df <= n; ++df) EXPECT_GT(bm25_idf(n, df), 0.0);
}

TEST(Bm25, RepeatedQueryTermsCountOnce) {
    const auto idx = build_sparse(chunks_of({{"a", "clock skew"}, {"b", "clock tree clock"}, {"c", "power"}}));
    const auto once = idx.search("skew", 5), twice = idx.search("skew skew SKEW", 5);
    ASSERT_EQ(once.size(), 1u);
    EXPECT_EQ(once, twice);
}

TEST(Bm25, ExactTokenBeatsPieces) {
    const auto idx = build_sparse(chunks_of({{"a", "ess::get_pin returns a pin"},
                                             {"b", "ess get pin get pin get pin"},
                                             {"c", "unrelated"}}));
    const auto hits = idx.search("ess::get_pin", 3);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0].chunk_id, "a");
}

TEST(Bm25, NoMatchesAndBadArguments) {
    const auto idx = build_sparse(chunks_of({{"a", "alpha"}}));
    EXPECT_TRUE(idx.search("zeta", 3).empty());
    EXPECT_TRUE(idx.search("", 3).empty());
    EXPECT_THROW(idx.search("alpha", 0), Error);
    EXPECT_THROW(build_sparse({}), Error);
    EXPECT_THROW(build_sparse(chunks_of({{"a", "x"}, {"a", "y"}})), Error);
    EXPECT_THROW(build_sparse(chunks_of({{"a", "x"}}), Bm25Params{-1.0, 0.75}), Error);
    EXPECT_THROW(build_sparse(chunks_of({{"a", "x"}}), Bm25Params{1.2, 1.5}), Error);
}

TEST(Bm25, TiesBreakOnChunkId) {
    const auto idx = build_sparse(chunks_of({{"z", "net"}, {"m", "net"}, {"a", "net"}}));
    const auto hits = idx.search("net", 2);
    ASSERT_EQ(hits.size(), 2u);
    EXPECT_EQ(hits[0].chunk_id, "a");
    EXPECT_EQ(hits[1].chunk_id, "m");
}

TEST(Bm25, SnapshotRoundTripIsLossless) {
    oracle::Rng rng(4);
    const auto vocab = oracle::make_vocab(rng, 40);
    const auto chunks = oracle::random_corpus(rng, vocab, 60, 20);
    const auto idx = build_sparse(chunks);
    const auto text = idx.to_json().dump();
    const auto back = InvertedIndex::from_json(nlohmann::json::parse(text));
    EXPECT_EQ(back.to_json().dump(), text);
    for (int q = 0; q < 20; ++q) {
        const auto query = oracle::random_text(rng, vocab, 4);
        EXPECT_EQ(idx.search(query, 5), back.search(query, 5));
    }
    EXPECT_THROW(InvertedIndex::from_json(nlohmann::json{{"format", "other"}}), Error);
}
