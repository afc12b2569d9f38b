#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "askeda/error.hpp"
#include "json.hpp"

namespace askeda {

struct RetrievalConfig {
    std::size_t n_dense = 3;
    std::size_t n_sparse = 3;
    std::size_t n_hybrid = 3;
    double rrf_k = 60.0;

    void validate() const {
        if (n_dense < 1 || n_sparse < 1 || n_hybrid < 1)
            throw Error(Errc::invalid_argument, "n_dense, n_sparse and n_hybrid must all be >= 1");
        if (!(rrf_k > 0.0)) throw Error(Errc::invalid_argument, "rrf_k must be > 0");
    }
};

/// Ranks are 1-based positions in each input list.
struct RankedCandidate {
    std::string chunk_id;
    std::optional<std::size_t> dense_rank;
    std::optional<std::size_t> sparse_rank;
    double rrf_score = 0.0;

    friend bool operator==(const RankedCandidate&, const RankedCandidate&) = default;
};

/// Sum of 1/(k + rank) over the rankings the chunk appears in.
inline double rrf_score(std::optional<std::size_t> dense_rank, std::optional<std::size_t> sparse_rank, double k) {
    double s = 0.0;
    if (dense_rank) s += 1.0 / (k + static_cast<double>(*dense_rank));
    if (sparse_rank) s += 1.0 / (k + static_cast<double>(*sparse_rank));
    return s;
}

/// Descending RRF score, ascending chunk_id on ties.
inline bool fused_before(const RankedCandidate& a, const RankedCandidate& b) {
    if (a.rrf_score != b.rrf_score) return a.rrf_score > b.rrf_score;
    return a.chunk_id < b.chunk_id;
}

/// Reciprocal rank fusion over the union of both lists, truncated to n_hybrid.
inline std::vector<RankedCandidate> rrf_fuse(const std::vector<std::string>& dense,
                                             const std::vector<std::string>& sparse, const RetrievalConfig& cfg) {
    cfg.validate();
    std::vector<RankedCandidate> cands;
    std::unordered_map<std::string, std::size_t> slot;
    auto collect = [&](const std::vector<std::string>& list, bool is_dense) {
        std::unordered_set<std::string> seen;
        for (std::size_t i = 0; i < list.size(); ++i) {
            const auto& id = list[i];
            if (!seen.insert(id).second)
                throw Error(Errc::duplicate_id, std::string("duplicate id '") + id + "' in " +
                                                    (is_dense ? "dense" : "sparse") + " ranking");
            auto [it, fresh] = slot.try_emplace(id, cands.size());
            if (fresh) cands.push_back({id, std::nullopt, std::nullopt, 0.0});
            auto& c = cands[it->second];
            (is_dense ? c.dense_rank : c.sparse_rank) = i + 1;
        }
    };
    collect(dense, true);
    collect(sparse, false);
    for (auto& c : cands) c.rrf_score = rrf_score(c.dense_rank, c.sparse_rank, cfg.rrf_k);
    std::sort(cands.begin(), cands.end(), fused_before);
    if (cands.size() > cfg.n_hybrid) cands.resize(cfg.n_hybrid);
    return cands;
}

enum class RetrievalMode { hybrid, sparse, dense, none };

inline const char* to_string(RetrievalMode m) {
    switch (m) {
        case RetrievalMode::hybrid: return "hybrid";
        case RetrievalMode::sparse: return "sparse";
        case RetrievalMode::dense: return "dense";
        case RetrievalMode::none: return "none";
    }
    return "hybrid";
}

inline std::optional<RetrievalMode> parse_mode(std::string_view s) {
    if (s == "hybrid") return RetrievalMode::hybrid;
    if (s == "sparse") return RetrievalMode::sparse;
    if (s == "dense") return RetrievalMode::dense;
    if (s == "none") return RetrievalMode::none;
    return std::nullopt;
}

inline nlohmann::json candidates_to_json(const std::vector<RankedCandidate>& cands) {
    auto arr = nlohmann::json::array();
    for (const auto& c : cands) {
        arr.push_back({{"chunk_id", c.chunk_id},
                       {"dense_rank", c.dense_rank ? nlohmann::json(*c.dense_rank) : nlohmann::json(nullptr)},
                       {"sparse_rank", c.sparse_rank ? nlohmann::json(*c.sparse_rank) : nlohmann::json(nullptr)},
                       {"rrf_score", c.rrf_score}});
    }
    return arr;
}

}  // namespace askeda
