#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "askeda/utf8.hpp"

namespace askeda {

enum class TokenMode {
    /// Keeps '.', ':', '-' runs that sit between word characters inside the
    /// token, so "ess::get_pin_capacitance" stays one term.
    compound,
    /// Word characters only; connectors split.
    plain,
};

namespace detail {

inline bool is_word(char32_t c) { return c == U'_' || utf8::is_alnum(c); }

inline bool is_connector(char32_t c) { return c == U'.' || c == U':' || c == U'-' || c == U'_'; }

}  // namespace detail

/// Lowercased word tokens. No stemming, no stopwords.
inline std::vector<std::string> tokenize(std::string_view text, TokenMode mode = TokenMode::compound) {
    const std::u32string cps = utf8::decode(text).text;
    std::vector<std::string> tokens;
    const std::size_t n = cps.size();
    std::size_t i = 0;
    while (i < n) {
        if (!detail::is_word(cps[i])) {
            ++i;
            continue;
        }
        std::string tok;
        auto take_word = [&] {
            while (i < n && detail::is_word(cps[i])) utf8::append(tok, utf8::to_lower(cps[i++]));
        };
        take_word();
        if (mode == TokenMode::compound) {
            while (i < n && detail::is_connector(cps[i])) {
                std::size_t j = i;
                while (j < n && detail::is_connector(cps[j])) ++j;
                if (j >= n || !detail::is_word(cps[j])) break;
                for (; i < j; ++i) utf8::append(tok, cps[i]);
                take_word();
            }
        }
        tokens.push_back(std::move(tok));
    }
    return tokens;
}

/// Splits on newlines and on '.', '!', '?' followed by whitespace. Returned
/// sentences are trimmed and non-empty.
inline std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        std::size_t b = 0, e = cur.size();
        while (b < e && (cur[b] == ' ' || cur[b] == '\t' || cur[b] == '\r')) ++b;
        while (e > b && (cur[e - 1] == ' ' || cur[e - 1] == '\t' || cur[e - 1] == '\r')) --e;
        if (e > b) out.emplace_back(cur.substr(b, e - b));
        cur.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '\n') {
            flush();
            continue;
        }
        cur.push_back(c);
        if ((c == '.' || c == '!' || c == '?') && i + 1 < text.size()) {
            const char next = text[i + 1];
            if (next == ' ' || next == '\t' || next == '\r' || next == '\n') flush();
        }
    }
    flush();
    return out;
}

}  // namespace askeda
