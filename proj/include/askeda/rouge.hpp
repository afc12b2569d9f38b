#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "askeda/text.hpp"

namespace askeda {

struct RougeScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    friend bool operator==(const RougeScore&, const RougeScore&) = default;
};

inline RougeScore make_rouge(double precision, double recall) {
    const double denom = precision + recall;
    return {precision, recall, denom > 0.0 ? 2.0 * precision * recall / denom : 0.0};
}

namespace detail {

using Tokens = std::vector<std::string>;

/// Reference positions of one LCS between ref and cand. On a mismatch the
/// backtrack steps in the candidate when that keeps a strictly longer
/// prefix match, otherwise in the reference.
inline std::vector<std::size_t> lcs_positions(const Tokens& ref, const Tokens& cand) {
    const std::size_t n = ref.size(), m = cand.size();
    std::vector<std::size_t> table((n + 1) * (m + 1), 0);
    auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return table[i * (m + 1) + j]; };
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = 1; j <= m; ++j)
            at(i, j) = ref[i - 1] == cand[j - 1] ? at(i - 1, j - 1) + 1 : std::max(at(i - 1, j), at(i, j - 1));
    std::vector<std::size_t> pos;
    std::size_t i = n, j = m;
    while (i > 0 && j > 0) {
        if (ref[i - 1] == cand[j - 1]) {
            pos.push_back(i - 1);
            --i;
            --j;
        } else if (at(i, j - 1) > at(i - 1, j)) {
            --j;
        } else {
            --i;
        }
    }
    return {pos.rbegin(), pos.rend()};
}

inline std::vector<Tokens> sentence_tokens(std::string_view text) {
    std::vector<Tokens> out;
    for (const auto& s : split_sentences(text)) {
        auto toks = tokenize(s, TokenMode::plain);
        if (!toks.empty()) out.push_back(std::move(toks));
    }
    return out;
}

}  // namespace detail

/// Summary-level ROUGE-L. For each reference sentence, the union of LCS hit
/// positions against every candidate sentence is counted; each hit consumes
/// one occurrence of the token from both sides' unigram budgets, so the hit
/// total never exceeds either side's token count.
inline RougeScore rouge_lsum(std::string_view reference, std::string_view candidate) {
    const auto refs = detail::sentence_tokens(reference);
    const auto cands = detail::sentence_tokens(candidate);
    std::unordered_map<std::string, std::size_t> ref_budget, cand_budget;
    std::size_t ref_total = 0, cand_total = 0;
    for (const auto& s : refs)
        for (const auto& t : s) ++ref_budget[t], ++ref_total;
    for (const auto& s : cands)
        for (const auto& t : s) ++cand_budget[t], ++cand_total;
    if (ref_total == 0 || cand_total == 0) return {};

    std::size_t hits = 0;
    for (const auto& r : refs) {
        std::set<std::size_t> uni;
        for (const auto& c : cands)
            for (auto p : detail::lcs_positions(r, c)) uni.insert(p);
        for (auto p : uni) {
            const auto& tok = r[p];
            auto& rb = ref_budget[tok];
            auto& cb = cand_budget[tok];
            if (rb > 0 && cb > 0) {
                ++hits;
                --rb;
                --cb;
            }
        }
    }
    return make_rouge(static_cast<double>(hits) / static_cast<double>(cand_total),
                      static_cast<double>(hits) / static_cast<double>(ref_total));
}

}  // namespace askeda
