#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "askeda/error.hpp"
#include "askeda/ingest.hpp"
#include "askeda/sparse_index.hpp"
#include "askeda/text.hpp"

namespace askeda {

using Embedding = std::vector<double>;

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::string name() const = 0;
    virtual std::size_t dimension() const = 0;
    /// One embedding per input, in input order.
    virtual std::vector<Embedding> embed(std::span<const std::string> texts) const = 0;
};

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Offline stand-in for a sentence embedder: L2-normalized bag of plain
/// tokens, each token hashed (FNV-1a 64) into one of `dimension` buckets
/// with weight equal to its count.
class HashingEmbedder final : public EmbeddingProvider {
public:
    explicit HashingEmbedder(std::size_t dimension) : dim_(dimension) {
        if (dim_ < 2) throw Error(Errc::invalid_argument, "test embedder dimension must be >= 2");
    }

    std::string name() const override { return "hash-bow"; }
    std::size_t dimension() const override { return dim_; }

    std::size_t bucket(std::string_view token) const { return static_cast<std::size_t>(fnv1a64(token) % dim_); }

    Embedding embed_one(std::string_view text) const {
        Embedding v(dim_, 0.0);
        for (const auto& t : tokenize(text, TokenMode::plain)) v[bucket(t)] += 1.0;
        double norm = 0.0;
        for (double x : v) norm += x * x;
        if (norm > 0.0) {
            norm = std::sqrt(norm);
            for (double& x : v) x /= norm;
        }
        return v;
    }

    std::vector<Embedding> embed(std::span<const std::string> texts) const override {
        std::vector<Embedding> out;
        out.reserve(texts.size());
        for (const auto& t : texts) out.push_back(embed_one(t));
        return out;
    }

private:
    std::size_t dim_;
};

inline std::unique_ptr<EmbeddingProvider> test_embedder(std::size_t dimension) {
    return std::make_unique<HashingEmbedder>(dimension);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Normalizes in place; returns false for a zero (or non-finite) vector.
inline bool normalize(std::span<double> v) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !std::isfinite(norm)) return false;
    for (double& x : v) x /= norm;
    return true;
}

class DenseIndex {
public:
    struct BuildResult;

    static BuildResult build(const std::vector<Chunk>& chunks, const EmbeddingProvider& provider,
                             std::size_t batch_size = 64);

    const std::vector<std::string>& chunk_ids() const { return ids_; }
    const std::string& provider_name() const { return provider_; }
    std::size_t dimension() const { return dim_; }
    std::size_t size() const { return ids_.size(); }
    std::span<const double> row(std::size_t i) const { return {matrix_.data() + i * dim_, dim_}; }

    /// Exact cosine over all rows: descending, ties by ascending chunk_id.
    std::vector<ScoredChunk> search(std::string_view query, const EmbeddingProvider& provider, std::size_t n) const {
        if (n < 1) throw Error(Errc::invalid_argument, "n_dense must be >= 1");
        check_provider(provider);
        const std::string text(query);
        auto q = provider.embed(std::span<const std::string>(&text, 1));
        if (q.size() != 1 || q[0].size() != dim_)
            throw Error(Errc::provider, "provider returned a malformed query embedding");
        normalize(q[0]);
        return search_vector(q[0], n);
    }

    std::vector<ScoredChunk> search_vector(std::span<const double> q, std::size_t n) const {
        std::vector<ScoredChunk> hits;
        hits.reserve(ids_.size());
        for (std::size_t i = 0; i < ids_.size(); ++i) hits.push_back({ids_[i], dot(row(i), q)});
        const auto keep = std::min(n, hits.size());
        std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(), ranks_before);
        hits.resize(keep);
        return hits;
    }

    void check_provider(const EmbeddingProvider& provider) const {
        if (provider.name() != provider_ || provider.dimension() != dim_)
            throw Error(Errc::provider_mismatch, "index was built with provider '" + provider_ + "' (dim " +
                                                     std::to_string(dim_) + "), query provider is '" + provider.name() +
                                                     "' (dim " + std::to_string(provider.dimension()) + ")");
    }

    /// Binary snapshot, little-endian: magic "ASKDNS01", provider name, dim,
    /// count, ids, then row-major float64 matrix.
    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::io, "cannot write '" + path + "'");
        out.write(kMagic, sizeof(kMagic) - 1);
        write_string(out, provider_);
        write_u64(out, dim_);
        write_u64(out, ids_.size());
        for (const auto& id : ids_) write_string(out, id);
        for (double x : matrix_) write_u64(out, std::bit_cast<std::uint64_t>(x));
        if (!out) throw Error(Errc::io, "write failed for '" + path + "'");
    }

    static DenseIndex load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error(Errc::io, "cannot read '" + path + "'");
        char magic[sizeof(kMagic) - 1];
        in.read(magic, sizeof(magic));
        if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
            throw Error(Errc::parse, "'" + path + "' is not an askeda dense snapshot");
        DenseIndex idx;
        idx.provider_ = read_string(in);
        idx.dim_ = read_u64(in);
        const auto count = read_u64(in);
        idx.ids_.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i) idx.ids_.push_back(read_string(in));
        idx.matrix_.resize(count * idx.dim_);
        for (double& x : idx.matrix_) x = std::bit_cast<double>(read_u64(in));
        if (!in) throw Error(Errc::parse, "'" + path + "' is truncated");
        return idx;
    }

private:
    static constexpr char kMagic[] = "ASKDNS01";

    static void write_u64(std::ostream& out, std::uint64_t v) {
        unsigned char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
        out.write(reinterpret_cast<const char*>(b), 8);
    }
    static std::uint64_t read_u64(std::istream& in) {
        unsigned char b[8] = {};
        in.read(reinterpret_cast<char*>(b), 8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        return v;
    }
    static void write_string(std::ostream& out, const std::string& s) {
        write_u64(out, s.size());
        out.write(s.data(), static_cast<std::streamsize>(s.size()));
    }
    static std::string read_string(std::istream& in) {
        const auto n = read_u64(in);
        if (n > (1u << 20)) throw Error(Errc::parse, "dense snapshot: implausible string length");
        std::string s(n, '\0');
        in.read(s.data(), static_cast<std::streamsize>(n));
        return s;
    }

    std::vector<std::string> ids_;
    std::vector<double> matrix_;
    std::string provider_;
    std::size_t dim_ = 0;
};

struct DenseIndex::BuildResult {
    DenseIndex index;
    std::vector<std::string> warnings;
};

inline DenseIndex::BuildResult DenseIndex::build(const std::vector<Chunk>& chunks, const EmbeddingProvider& provider,
                                                 std::size_t batch_size) {
    if (chunks.empty()) throw Error(Errc::invalid_argument, "cannot build a dense index over zero chunks");
    if (batch_size == 0) batch_size = chunks.size();
    BuildResult out;
    auto& idx = out.index;
    idx.provider_ = provider.name();
    idx.dim_ = provider.dimension();
    idx.matrix_.reserve(chunks.size() * idx.dim_);
    std::vector<std::string> texts;
    for (std::size_t start = 0; start < chunks.size(); start += batch_size) {
        const auto end = std::min(start + batch_size, chunks.size());
        texts.clear();
        for (auto i = start; i < end; ++i) texts.push_back(chunks[i].text);
        auto vectors = provider.embed(texts);
        if (vectors.size() != texts.size())
            throw Error(Errc::provider, "provider returned " + std::to_string(vectors.size()) + " embeddings for " +
                                            std::to_string(texts.size()) + " inputs");
        for (std::size_t k = 0; k < vectors.size(); ++k) {
            auto& v = vectors[k];
            if (v.size() != idx.dim_)
                throw Error(Errc::provider, "embedding dimension " + std::to_string(v.size()) + " != provider dimension " +
                                                std::to_string(idx.dim_));
            const auto& chunk = chunks[start + k];
            if (!normalize(v)) {
                std::fill(v.begin(), v.end(), 0.0);
                v[0] = 1.0;
                out.warnings.push_back("chunk '" + chunk.chunk_id + "' embedded to a zero vector; using basis vector e0");
            }
            idx.ids_.push_back(chunk.chunk_id);
            idx.matrix_.insert(idx.matrix_.end(), v.begin(), v.end());
        }
    }
    return out;
}

inline DenseIndex::BuildResult build_dense(const std::vector<Chunk>& chunks, const EmbeddingProvider& provider) {
    return DenseIndex::build(chunks, provider);
}

inline std::vector<ScoredChunk> search_dense(const DenseIndex& index, std::string_view query,
                                             const EmbeddingProvider& provider, std::size_t n_dense) {
    return index.search(query, provider, n_dense);
}

}  // namespace askeda
