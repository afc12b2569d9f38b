#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "askeda/dense_index.hpp"
#include "askeda/error.hpp"
#include "askeda/fusion.hpp"
#include "askeda/ingest.hpp"
#include "askeda/sparse_index.hpp"
#include "json.hpp"

namespace askeda {

struct DocumentInfo {
    std::string doc_id;
    std::string uri;
    DocFormat format = DocFormat::plain_text;
};

/// Sparse and dense indexes over one chunk set.
class HybridIndex {
public:
    HybridIndex() = default;

    HybridIndex(std::vector<DocumentInfo> docs, std::vector<Chunk> chunks, std::optional<InvertedIndex> sparse,
                std::optional<DenseIndex> dense)
        : docs_(std::move(docs)), chunks_(std::move(chunks)), sparse_(std::move(sparse)), dense_(std::move(dense)) {
        reindex();
    }

    const std::vector<DocumentInfo>& documents() const { return docs_; }
    const std::vector<Chunk>& chunks() const { return chunks_; }
    const InvertedIndex* sparse() const { return sparse_ ? &*sparse_ : nullptr; }
    const DenseIndex* dense() const { return dense_ ? &*dense_ : nullptr; }

    const Chunk* find_chunk(const std::string& id) const {
        auto it = chunk_pos_.find(id);
        return it == chunk_pos_.end() ? nullptr : &chunks_[it->second];
    }
    const DocumentInfo* find_document(const std::string& doc_id) const {
        auto it = doc_pos_.find(doc_id);
        return it == doc_pos_.end() ? nullptr : &docs_[it->second];
    }

    static constexpr const char* kChunksFile = "chunks.jsonl";
    static constexpr const char* kDocumentsFile = "documents.json";
    static constexpr const char* kSparseFile = "sparse.json";
    static constexpr const char* kDenseFile = "dense.bin";

    void save(const std::filesystem::path& dir) const {
        std::filesystem::create_directories(dir);
        auto docs = nlohmann::json::array();
        for (const auto& d : docs_) docs.push_back({{"doc_id", d.doc_id}, {"uri", d.uri}, {"format", to_string(d.format)}});
        write_file(dir / kDocumentsFile, nlohmann::json{{"format", "askeda.documents"}, {"version", 1}, {"documents", docs}}.dump(1) + "\n");
        write_file(dir / kChunksFile, chunks_to_jsonl(chunks_));
        if (sparse_) write_file(dir / kSparseFile, sparse_->to_json().dump() + "\n");
        if (dense_) dense_->save((dir / kDenseFile).string());
    }

    static HybridIndex load(const std::filesystem::path& dir) {
        if (!std::filesystem::exists(dir / kChunksFile) || !std::filesystem::exists(dir / kDocumentsFile))
            throw Error(Errc::missing_index, "no index snapshot in '" + dir.string() + "' (run ingest first)");
        std::vector<DocumentInfo> docs;
        const auto dj = parse_json(read_file(dir / kDocumentsFile), dir / kDocumentsFile);
        for (const auto& d : dj.at("documents")) {
            DocumentInfo info{d.at("doc_id").get<std::string>(), d.at("uri").get<std::string>(), DocFormat::plain_text};
            info.format = parse_format(d.at("format").get<std::string>()).value_or(DocFormat::plain_text);
            docs.push_back(std::move(info));
        }
        std::vector<Chunk> chunks;
        std::istringstream lines(read_file(dir / kChunksFile));
        for (std::string line; std::getline(lines, line);)
            if (!line.empty()) chunks.push_back(parse_json(line, dir / kChunksFile).get<Chunk>());
        std::optional<InvertedIndex> sparse;
        if (std::filesystem::exists(dir / kSparseFile))
            sparse = InvertedIndex::from_json(parse_json(read_file(dir / kSparseFile), dir / kSparseFile));
        std::optional<DenseIndex> dense;
        if (std::filesystem::exists(dir / kDenseFile)) dense = DenseIndex::load((dir / kDenseFile).string());
        return HybridIndex(std::move(docs), std::move(chunks), std::move(sparse), std::move(dense));
    }

private:
    void reindex() {
        for (std::size_t i = 0; i < chunks_.size(); ++i) chunk_pos_.emplace(chunks_[i].chunk_id, i);
        for (std::size_t i = 0; i < docs_.size(); ++i) doc_pos_.emplace(docs_[i].doc_id, i);
    }

    static std::string read_file(const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw Error(Errc::io, "cannot read '" + p.string() + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        return std::move(ss).str();
    }
    static void write_file(const std::filesystem::path& p, const std::string& data) {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        out << data;
        if (!out) throw Error(Errc::io, "cannot write '" + p.string() + "'");
    }
    static nlohmann::json parse_json(const std::string& text, const std::filesystem::path& p) {
        try {
            return nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw Error(Errc::parse, "'" + p.string() + "': " + e.what());
        }
    }

    std::vector<DocumentInfo> docs_;
    std::vector<Chunk> chunks_;
    std::optional<InvertedIndex> sparse_;
    std::optional<DenseIndex> dense_;
    std::unordered_map<std::string, std::size_t> chunk_pos_;
    std::unordered_map<std::string, std::size_t> doc_pos_;
};

struct BuildSummary {
    std::size_t documents = 0;
    std::size_t chunks = 0;
    std::size_t terms = 0;
    std::size_t dimension = 0;
    std::vector<std::string> warnings;
};

/// Ingests, then builds both indexes.
inline HybridIndex build_hybrid_index(const std::vector<ManifestEntry>& entries, const ChunkingConfig& chunking,
                                      const Bm25Params& bm25, const EmbeddingProvider& provider,
                                      BuildSummary* summary = nullptr) {
    auto ingested = ingest_corpus(entries, chunking);
    auto sparse = build_sparse(ingested.chunks, bm25);
    auto dense = DenseIndex::build(ingested.chunks, provider);
    std::vector<DocumentInfo> docs;
    for (const auto& d : ingested.documents) docs.push_back({d.doc_id, d.uri, d.format});
    if (summary) {
        summary->documents = docs.size();
        summary->chunks = ingested.chunks.size();
        summary->terms = sparse.term_count();
        summary->dimension = dense.index.dimension();
        summary->warnings = std::move(ingested.warnings);
        for (auto& w : dense.warnings) summary->warnings.push_back(std::move(w));
    }
    return HybridIndex(std::move(docs), std::move(ingested.chunks), std::move(sparse), std::move(dense.index));
}

struct Retrieval {
    /// Descending relevance; rrf_score is filled for every mode.
    std::vector<RankedCandidate> candidates;
    /// Ascending relevance: the best chunk is last.
    std::vector<Chunk> context;
};

inline Retrieval retrieve_hybrid(std::string_view question, const HybridIndex& index, const EmbeddingProvider* provider,
                                 const RetrievalConfig& cfg, RetrievalMode mode) {
    cfg.validate();
    Retrieval out;
    if (mode == RetrievalMode::none) return out;

    auto ids_of = [](const std::vector<ScoredChunk>& hits) {
        std::vector<std::string> ids;
        ids.reserve(hits.size());
        for (const auto& h : hits) ids.push_back(h.chunk_id);
        return ids;
    };
    auto need_sparse = [&]() -> const InvertedIndex& {
        if (!index.sparse()) throw Error(Errc::missing_index, "sparse index is not loaded");
        return *index.sparse();
    };
    auto need_dense = [&]() -> const DenseIndex& {
        if (!index.dense()) throw Error(Errc::missing_index, "dense index is not loaded");
        if (!provider) throw Error(Errc::missing_index, "dense retrieval needs an embedding provider");
        return *index.dense();
    };

    std::vector<std::string> dense_ids, sparse_ids;
    RetrievalConfig fuse_cfg = cfg;
    switch (mode) {
        case RetrievalMode::hybrid:
            dense_ids = ids_of(need_dense().search(question, *provider, cfg.n_dense));
            sparse_ids = ids_of(need_sparse().search(question, cfg.n_sparse));
            break;
        case RetrievalMode::sparse: sparse_ids = ids_of(need_sparse().search(question, cfg.n_hybrid)); break;
        case RetrievalMode::dense: dense_ids = ids_of(need_dense().search(question, *provider, cfg.n_hybrid)); break;
        case RetrievalMode::none: break;
    }
    out.candidates = rrf_fuse(dense_ids, sparse_ids, fuse_cfg);
    for (auto it = out.candidates.rbegin(); it != out.candidates.rend(); ++it) {
        const Chunk* c = index.find_chunk(it->chunk_id);
        if (!c) throw Error(Errc::missing_index, "index references unknown chunk '" + it->chunk_id + "'");
        out.context.push_back(*c);
    }
    return out;
}

}  // namespace askeda
