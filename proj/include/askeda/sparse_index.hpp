#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "askeda/error.hpp"
#include "askeda/ingest.hpp"
#include "askeda/text.hpp"
#include "json.hpp"

namespace askeda {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;

    void validate() const {
        if (!(k1 >= 0.0)) throw Error(Errc::invalid_argument, "bm25 k1 must be >= 0");
        if (!(b >= 0.0 && b <= 1.0)) throw Error(Errc::invalid_argument, "bm25 b must be in [0, 1]");
    }
};

struct ScoredChunk {
    std::string chunk_id;
    double score = 0.0;

    friend bool operator==(const ScoredChunk&, const ScoredChunk&) = default;
};

/// Descending score, ascending chunk_id on ties.
inline bool ranks_before(const ScoredChunk& a, const ScoredChunk& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.chunk_id < b.chunk_id;
}

/// Okapi BM25 idf with the +1 inside the log, so it is never negative.
inline double bm25_idf(std::size_t doc_count, std::size_t doc_freq) {
    const double n = static_cast<double>(doc_count);
    const double df = static_cast<double>(doc_freq);
    return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
}

inline double bm25_term(double idf, double tf, double doc_len, double avg_len, const Bm25Params& p) {
    return idf * tf * (p.k1 + 1.0) / (tf + p.k1 * (1.0 - p.b + p.b * doc_len / avg_len));
}

/// Query terms, deduplicated, in first-occurrence order.
inline std::vector<std::string> query_terms(std::string_view query) {
    std::vector<std::string> terms;
    std::unordered_set<std::string> seen;
    for (auto& t : tokenize(query, TokenMode::compound))
        if (seen.insert(t).second) terms.push_back(std::move(t));
    return terms;
}

class InvertedIndex {
public:
    struct Posting {
        std::uint32_t doc;  // position in chunk_ids()
        std::uint32_t tf;
        friend bool operator==(const Posting&, const Posting&) = default;
    };

    static InvertedIndex build(const std::vector<Chunk>& chunks, const Bm25Params& params = {}) {
        params.validate();
        if (chunks.empty()) throw Error(Errc::invalid_argument, "cannot build a sparse index over zero chunks");
        InvertedIndex idx;
        idx.params_ = params;
        std::unordered_set<std::string> ids;
        std::uint64_t total = 0;
        for (const auto& c : chunks) {
            if (!ids.insert(c.chunk_id).second)
                throw Error(Errc::duplicate_id, "duplicate chunk_id '" + c.chunk_id + "'");
            const auto doc = static_cast<std::uint32_t>(idx.ids_.size());
            idx.ids_.push_back(c.chunk_id);
            std::map<std::string, std::uint32_t> counts;
            std::uint32_t len = 0;
            for (auto& t : tokenize(c.text, TokenMode::compound)) {
                ++counts[std::move(t)];
                ++len;
            }
            idx.lengths_.push_back(len);
            total += len;
            for (auto& [term, tf] : counts) idx.postings_[term].push_back({doc, tf});
        }
        idx.avg_length_ = static_cast<double>(total) / static_cast<double>(idx.ids_.size());
        return idx;
    }

    std::size_t doc_count() const { return ids_.size(); }
    double avg_doc_length() const { return avg_length_; }
    const Bm25Params& params() const { return params_; }
    const std::vector<std::string>& chunk_ids() const { return ids_; }
    const std::vector<std::uint32_t>& doc_lengths() const { return lengths_; }
    std::size_t term_count() const { return postings_.size(); }

    const std::vector<Posting>* postings(const std::string& term) const {
        auto it = postings_.find(term);
        return it == postings_.end() ? nullptr : &it->second;
    }

    /// Top n chunks by BM25; chunks scoring zero are never returned.
    std::vector<ScoredChunk> search(std::string_view query, std::size_t n) const {
        if (n < 1) throw Error(Errc::invalid_argument, "n_sparse must be >= 1");
        std::unordered_map<std::uint32_t, double> acc;
        for (const auto& term : query_terms(query)) {
            const auto* list = postings(term);
            if (!list) continue;
            const double idf = bm25_idf(doc_count(), list->size());
            for (const auto& p : *list)
                acc[p.doc] += bm25_term(idf, p.tf, lengths_[p.doc], avg_length_, params_);
        }
        std::vector<ScoredChunk> hits;
        hits.reserve(acc.size());
        for (const auto& [doc, score] : acc)
            if (score > 0.0) hits.push_back({ids_[doc], score});
        const auto keep = std::min(n, hits.size());
        std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(), ranks_before);
        hits.resize(keep);
        return hits;
    }

    /// Snapshot: {"format":"askeda.sparse","version":1,...}; postings keyed by
    /// term in lexicographic order.
    nlohmann::json to_json() const {
        nlohmann::json postings = nlohmann::json::object();
        for (const auto& [term, list] : postings_) {
            auto arr = nlohmann::json::array();
            for (const auto& p : list) arr.push_back({ids_[p.doc], p.tf});
            postings[term] = std::move(arr);
        }
        return {{"format", "askeda.sparse"},
                {"version", kVersion},
                {"k1", params_.k1},
                {"b", params_.b},
                {"doc_count", ids_.size()},
                {"avg_doc_length", avg_length_},
                {"chunk_ids", ids_},
                {"doc_lengths", lengths_},
                {"postings", std::move(postings)}};
    }

    static InvertedIndex from_json(const nlohmann::json& j) {
        if (j.value("format", "") != "askeda.sparse" || j.value("version", 0) != kVersion)
            throw Error(Errc::parse, "not an askeda sparse snapshot (version " + std::to_string(kVersion) + ")");
        InvertedIndex idx;
        idx.params_ = {j.at("k1").get<double>(), j.at("b").get<double>()};
        idx.params_.validate();
        idx.ids_ = j.at("chunk_ids").get<std::vector<std::string>>();
        idx.lengths_ = j.at("doc_lengths").get<std::vector<std::uint32_t>>();
        idx.avg_length_ = j.at("avg_doc_length").get<double>();
        if (idx.lengths_.size() != idx.ids_.size() || j.at("doc_count").get<std::size_t>() != idx.ids_.size())
            throw Error(Errc::parse, "sparse snapshot: doc_count mismatch");
        std::unordered_map<std::string, std::uint32_t> pos;
        for (std::uint32_t i = 0; i < idx.ids_.size(); ++i) pos.emplace(idx.ids_[i], i);
        for (const auto& [term, arr] : j.at("postings").items()) {
            auto& list = idx.postings_[term];
            for (const auto& e : arr) {
                auto it = pos.find(e.at(0).get<std::string>());
                if (it == pos.end()) throw Error(Errc::parse, "sparse snapshot: posting for unknown chunk");
                list.push_back({it->second, e.at(1).get<std::uint32_t>()});
            }
        }
        return idx;
    }

private:
    static constexpr int kVersion = 1;

    Bm25Params params_;
    std::vector<std::string> ids_;
    std::vector<std::uint32_t> lengths_;
    double avg_length_ = 0.0;
    std::map<std::string, std::vector<Posting>> postings_;
};

inline InvertedIndex build_sparse(const std::vector<Chunk>& chunks, const Bm25Params& params = {}) {
    return InvertedIndex::build(chunks, params);
}

inline std::vector<ScoredChunk> search_sparse(const InvertedIndex& index, std::string_view query, std::size_t n_sparse) {
    return index.search(query, n_sparse);
}

}  // namespace askeda
