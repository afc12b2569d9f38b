#pragma once
// Reference implementations and generators shared by unit and acceptance tests.
// Oracles here are deliberately naive: full scans, no postings, no pruning.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "askeda/ingest.hpp"
#include "askeda/prompt.hpp"
#include "askeda/sparse_index.hpp"
#include "askeda/text.hpp"

namespace oracle {

using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// ASCII words plus a few compound forms so the BM25 tokenizer sees both kinds.
inline std::vector<std::string> make_vocab(Rng& rng, std::size_t size) {
    static const char* seps[] = {"::", ".", "-", "_"};
    std::set<std::string> words;
    while (words.size() < size) {
        std::string w;
        const auto len = pick(rng, 1, 6);
        for (std::size_t i = 0; i < len; ++i) w += static_cast<char>('a' + pick(rng, 0, 25));
        if (pick(rng, 0, 9) == 0) {
            w += seps[pick(rng, 0, 3)];
            w += static_cast<char>('a' + pick(rng, 0, 25));
            w += std::to_string(pick(rng, 0, 99));
        }
        words.insert(w);
    }
    return {words.begin(), words.end()};
}

// Zipf-ish: low indices are common, so df varies widely.
inline const std::string& draw_word(Rng& rng, const std::vector<std::string>& vocab) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const auto i = static_cast<std::size_t>(std::pow(u, 2.5) * static_cast<double>(vocab.size()));
    return vocab[std::min(i, vocab.size() - 1)];
}

inline std::string random_text(Rng& rng, const std::vector<std::string>& vocab, std::size_t max_words) {
    static const char* glue[] = {" ", " ", " ", ", ", ". ", "\n", " (", ") "};
    std::string s;
    const auto n = pick(rng, 1, max_words);
    for (std::size_t i = 0; i < n; ++i) {
        if (i) s += glue[pick(rng, 0, 7)];
        auto w = draw_word(rng, vocab);
        if (pick(rng, 0, 7) == 0) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
        s += w;
    }
    return s;
}

inline std::vector<askeda::Chunk> random_corpus(Rng& rng, const std::vector<std::string>& vocab,
                                                std::size_t n_chunks, std::size_t max_words) {
    std::vector<askeda::Chunk> chunks;
    for (std::size_t i = 0; i < n_chunks; ++i) {
        askeda::Chunk c;
        c.doc_id = "d" + std::to_string(pick(rng, 0, 999));
        c.chunk_id = c.doc_id + "#" + std::to_string(i);
        c.text = random_text(rng, vocab, max_words);
        chunks.push_back(std::move(c));
    }
    return chunks;
}

struct Hit {
    std::string id;
    double score;
};

// Full-scan BM25: for every chunk and every distinct query term, count tf
// and df by brute force.
inline std::vector<Hit> bm25(const std::vector<askeda::Chunk>& chunks, const std::string& query, std::size_t n,
                             double k1 = 1.2, double b = 0.75) {
    std::vector<std::vector<std::string>> docs;
    double total = 0;
    for (const auto& c : chunks) {
        docs.push_back(askeda::tokenize(c.text));
        total += static_cast<double>(docs.back().size());
    }
    const double N = static_cast<double>(docs.size());
    const double avg = total / N;

    std::vector<std::string> terms;
    for (const auto& t : askeda::tokenize(query))
        if (std::find(terms.begin(), terms.end(), t) == terms.end()) terms.push_back(t);

    std::vector<Hit> hits;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        double score = 0;
        bool any = false;
        for (const auto& t : terms) {
            const double tf = static_cast<double>(std::count(docs[d].begin(), docs[d].end(), t));
            if (tf == 0) continue;
            double df = 0;
            for (const auto& other : docs)
                if (std::find(other.begin(), other.end(), t) != other.end()) df += 1;
            const double idf = std::log(1.0 + (N - df + 0.5) / (df + 0.5));
            const double len = static_cast<double>(docs[d].size());
            score += idf * (tf * (k1 + 1)) / (tf + k1 * (1 - b + b * len / avg));
            any = true;
        }
        if (any && score > 0) hits.push_back({chunks[d].chunk_id, score});
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& x, const Hit& y) {
        if (x.score != y.score) return x.score > y.score;
        return x.id < y.id;
    });
    if (hits.size() > n) hits.resize(n);
    return hits;
}

// Direct reciprocal-rank evaluation over explicit 1-based positions.
inline std::map<std::string, double> rrf(const std::vector<std::string>& dense, const std::vector<std::string>& sparse,
                                         double k) {
    std::map<std::string, double> out;
    for (std::size_t r = 1; r <= dense.size(); ++r) out[dense[r - 1]] += 1.0 / (k + static_cast<double>(r));
    for (std::size_t r = 1; r <= sparse.size(); ++r) out[sparse[r - 1]] += 1.0 / (k + static_cast<double>(r));
    return out;
}

// LCS length by enumerating every subsequence of the shorter side.
// Exponential; keep inputs under ~16 tokens.
inline std::size_t brute_lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    const auto& s = a.size() <= b.size() ? a : b;
    const auto& t = a.size() <= b.size() ? b : a;
    std::size_t best = 0;
    for (std::uint32_t mask = 0; mask < (1u << s.size()); ++mask) {
        const auto bits = static_cast<std::size_t>(std::popcount(mask));
        if (bits <= best) continue;
        std::size_t j = 0;
        bool ok = true;
        for (std::size_t i = 0; i < s.size() && ok; ++i) {
            if (!(mask >> i & 1u)) continue;
            while (j < t.size() && t[j] != s[i]) ++j;
            if (j == t.size()) ok = false;
            else ++j;
        }
        if (ok) best = bits;
    }
    return best;
}

struct RougeFixture {
    const char* reference;
    const char* candidate;
    double precision, recall, f1;
};

// Expected values computed by hand and cross-checked against the rouge_score
// Python package (rougeLsum, no stemming, newline-separated sentences).
inline const std::vector<RougeFixture>& rouge_fixtures() {
    static const std::vector<RougeFixture> f = {
        {"the cat sat on the mat", "the cat sat on the mat", 1.0, 1.0, 1.0},
        {"the cat sat on the mat", "a dog lay under a rug", 0.0, 0.0, 0.0},
        {"the cat sat", "the cat ran", 2.0 / 3, 2.0 / 3, 2.0 / 3},
        {"the cat sat on the mat\nit was happy", "the mat had a cat\nthe cat was happy", 4.0 / 9, 4.0 / 9, 4.0 / 9},
        {"a b c d\ne f g", "a c e g\nb d f", 1.0, 1.0, 1.0},
        {"set the clock period\nrun timing analysis\nreport slack", "report slack after you run timing", 4.0 / 6,
         4.0 / 9, 0.5333333333333333},
        {"one two three four five six", "six five four three two one", 1.0 / 6, 1.0 / 6, 1.0 / 6},
        {"x y x y x y", "x x x\ny y y", 1.0, 1.0, 1.0},
        {"Run LVS after DRC passes\nthen tape out", "run drc then lvs\ntape out after that", 0.75, 0.75, 0.75},
        {"alpha beta gamma\ndelta epsilon\nzeta eta theta iota", "alpha gamma\nepsilon delta\ntheta iota zeta",
         5.0 / 7, 5.0 / 9, 0.6250000000000001},
    };
    return f;
}

// --- prompt bundles ---------------------------------------------------------

inline std::string words(Rng& rng, std::size_t lo, std::size_t hi) {
    static const char* pool[] = {"clock", "net", "skew", "route", "pin", "via", "cell", "ess::get_pin",
                                 "DRC",   "slack", "hold", "setup", "tap",  "fill", "lef", "macro"};
    std::string s;
    const auto n = pick(rng, lo, hi);
    for (std::size_t i = 0; i < n; ++i) {
        if (i) s += ' ';
        s += pool[pick(rng, 0, 15)];
    }
    return s;
}

inline askeda::PromptBundle random_bundle(Rng& rng) {
    askeda::PromptBundle b;
    b.system_prompt = pick(rng, 0, 4) ? words(rng, 1, 30) : std::string(askeda::kDefaultSystemPrompt);
    for (std::size_t i = 0, n = pick(rng, 0, 5); i < n; ++i)
        b.history.push_back({words(rng, 1, 12), words(rng, 1, 40)});
    for (std::size_t i = 0, n = pick(rng, 0, 6); i < n; ++i)
        b.context_blocks.push_back({"doc" + std::to_string(pick(rng, 0, 50)) + "#" + std::to_string(i),
                                    words(rng, 1, 120)});
    if (pick(rng, 0, 1)) b.abbreviation_block = "DRC is usually short for " + words(rng, 1, 5) + ".";
    b.query = words(rng, 1, 15);
    return b;
}

}  // namespace oracle
