#include <gtest/gtest.h>

#include <cmath>

#include "askeda/dense_index.hpp"
#include "../support/oracles.hpp"
#include "../support/tempdir.hpp"

using namespace askeda;

namespace {

// Provider returning fixed vectors keyed by text; lets tests control geometry.
class TableEmbedder final : public EmbeddingProvider {
public:
    TableEmbedder(std::string name, std::map<std::string, Embedding> table, std::size_t dim)
        : name_(std::move(name)), table_(std::move(table)), dim_(dim) {}
    std::string name() const override { return name_; }
    std::size_t dimension() const override { return dim_; }
    std::vector<Embedding> embed(std::span<const std::string> texts) const override {
        std::vector<Embedding> out;
        for (const auto& t : texts) out.push_back(table_.at(t));
        return out;
    }

private:
    std::string name_;
    std::map<std::string, Embedding> table_;
    std::size_t dim_;
};

Chunk chunk(std::string id, std::string text) { return {std::move(id), "d", 0, std::move(text), 0, 0}; }

}  // namespace

TEST(HashingEmbedder, UnitNormAndDeterministic) {
    HashingEmbedder e(64);
    const auto v = e.embed_one("Clock skew, clock tree");
    double norm = 0;
    for (double x : v) norm += x * x;
    EXPECT_NEAR(norm, 1.0, 1e-12);
    EXPECT_EQ(v, HashingEmbedder(64).embed_one("clock SKEW clock tree"));
    EXPECT_EQ(v[e.bucket("clock")] > v[e.bucket("tree")] || e.bucket("clock") == e.bucket("tree"), true);
    EXPECT_THROW(test_embedder(1), Error);
}

TEST(HashingEmbedder, EmptyTextGivesZeroVector) {
    const auto v = HashingEmbedder(16).embed_one("...");
    for (double x : v) EXPECT_EQ(x, 0.0);
}

TEST(Fnv1a, KnownVectors) {
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
}

TEST(DenseIndex, SearchMatchesBruteForceScan) {
    oracle::Rng rng(21);
    const auto vocab = oracle::make_vocab(rng, 50);
    const auto chunks = oracle::random_corpus(rng, vocab, 120, 15);
    HashingEmbedder emb(32);
    const auto built = DenseIndex::build(chunks, emb);
    for (int q = 0; q < 30; ++q) {
        const auto query = oracle::random_text(rng, vocab, 5);
        const auto qv = emb.embed_one(query);
        std::vector<ScoredChunk> want;
        for (const auto& c : chunks) {
            auto v = emb.embed_one(c.text);
            if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) v[0] = 1.0;
            double s = 0;
            for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * qv[i];
            want.push_back({c.chunk_id, s});
        }
        std::map<std::string, double> brute;
        for (const auto& w : want) brute[w.chunk_id] = w.score;
        std::sort(want.begin(), want.end(), ranks_before);
        const auto got = built.index.search(query, emb, 7);
        ASSERT_EQ(got.size(), 7u);
        for (std::size_t i = 0; i < got.size(); ++i) {
            // same score at every rank; each returned id carries its own brute-force score
            EXPECT_NEAR(got[i].score, want[i].score, 1e-12);
            EXPECT_NEAR(brute.at(got[i].chunk_id), got[i].score, 1e-12);
        }
    }
}

TEST(DenseIndex, ZeroVectorsAreReplacedWithWarning) {
    TableEmbedder emb("t", {{"a", {0, 0}}, {"b", {0, 1}}}, 2);
    const auto built = DenseIndex::build({chunk("A", "a"), chunk("B", "b")}, emb);
    EXPECT_EQ(built.warnings.size(), 1u);
    EXPECT_EQ(built.index.row(0)[0], 1.0);
}

TEST(DenseIndex, RejectsWrongDimensionAndMixedProviders) {
    TableEmbedder bad("t", {{"a", {1, 0, 0}}}, 2);
    EXPECT_THROW(DenseIndex::build({chunk("A", "a")}, bad), Error);
    TableEmbedder ok("t", {{"a", {1, 0}}}, 2);
    const auto built = DenseIndex::build({chunk("A", "a")}, ok);
    HashingEmbedder other(2);
    try {
        built.index.search("a", other, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::provider_mismatch);
    }
    EXPECT_THROW(built.index.search("a", ok, 0), Error);
}

TEST(DenseIndex, BinarySnapshotRoundTrip) {
    testing_support::TempDir dir;
    oracle::Rng rng(8);
    const auto vocab = oracle::make_vocab(rng, 30);
    const auto chunks = oracle::random_corpus(rng, vocab, 25, 10);
    HashingEmbedder emb(16);
    const auto built = DenseIndex::build(chunks, emb, 4);
    const auto path = (dir.path() / "dense.bin").string();
    built.index.save(path);
    const auto back = DenseIndex::load(path);
    ASSERT_EQ(back.size(), built.index.size());
    for (std::size_t i = 0; i < back.size(); ++i)
        EXPECT_TRUE(std::ranges::equal(back.row(i), built.index.row(i)));
    EXPECT_EQ(back.search("x y", emb, 5), built.index.search("x y", emb, 5));
    dir.write("junk.bin", "not a snapshot");
    EXPECT_THROW(DenseIndex::load((dir.path() / "junk.bin").string()), Error);
}
