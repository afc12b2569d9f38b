#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "askeda/error.hpp"
#include "askeda/ingest.hpp"
#include "json.hpp"

namespace askeda {

struct AbbreviationEntry {
    std::string abbr;
    std::string name;
    std::optional<std::string> desc;

    friend bool operator==(const AbbreviationEntry&, const AbbreviationEntry&) = default;
};

class AbbreviationDictionary {
public:
    AbbreviationDictionary() = default;

    explicit AbbreviationDictionary(std::vector<AbbreviationEntry> entries) : entries_(std::move(entries)) {
        std::map<std::string, int> counts;
        for (const auto& e : entries_) {
            if (e.abbr.empty() || e.name.empty())
                throw Error(Errc::parse, "abbreviation entries need non-empty 'abbr' and 'name'");
            ++counts[e.abbr];
        }
        std::string dups;
        for (const auto& [abbr, n] : counts)
            if (n > 1) dups += (dups.empty() ? "" : ", ") + abbr;
        if (!dups.empty()) throw Error(Errc::duplicate_id, "duplicate abbreviation(s): " + dups);
        for (std::size_t i = 0; i < entries_.size(); ++i) lookup_.emplace(entries_[i].abbr, i);
    }

    const std::vector<AbbreviationEntry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    const AbbreviationEntry* find(const std::string& abbr) const {
        auto it = lookup_.find(abbr);
        return it == lookup_.end() ? nullptr : &entries_[it->second];
    }

private:
    std::vector<AbbreviationEntry> entries_;
    std::unordered_map<std::string, std::size_t> lookup_;
};

struct LoadedDictionary {
    AbbreviationDictionary dictionary;
    std::vector<std::string> warnings;
};

inline AbbreviationDictionary parse_dictionary(const nlohmann::json& j) {
    if (!j.is_array()) throw Error(Errc::parse, "abbreviation dictionary must be a JSON array");
    std::vector<AbbreviationEntry> entries;
    for (const auto& item : j) {
        if (!item.is_object() || !item.contains("abbr") || !item.contains("name"))
            throw Error(Errc::parse, "abbreviation entries must be objects with 'abbr' and 'name'");
        AbbreviationEntry e{item.at("abbr").get<std::string>(), item.at("name").get<std::string>(), std::nullopt};
        if (auto it = item.find("desc"); it != item.end() && !it->is_null()) e.desc = it->get<std::string>();
        entries.push_back(std::move(e));
    }
    return AbbreviationDictionary(std::move(entries));
}

inline LoadedDictionary load_dictionary(const std::string& uri) {
    std::ifstream in(uri);
    if (!in) throw Error(Errc::io, "cannot read dictionary '" + uri + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::parse, "dictionary '" + uri + "': " + e.what());
    }
    LoadedDictionary out{parse_dictionary(j), {}};
    if (out.dictionary.empty()) out.warnings.push_back("dictionary '" + uri + "' has no entries");
    return out;
}

namespace detail {

inline bool boundary_byte(std::string_view s, std::size_t i) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (c >= 0x80) return false;  // part of a non-ASCII scalar, treated as a letter
    return !std::isalnum(c);
}

/// First position where `needle` occurs as a whole token, or npos.
inline std::size_t find_whole(std::string_view hay, std::string_view needle) {
    for (std::size_t pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + 1)) {
        const bool left = pos == 0 || boundary_byte(hay, pos - 1);
        const std::size_t end = pos + needle.size();
        const bool right = end == hay.size() || boundary_byte(hay, end);
        if (left && right) return pos;
    }
    return std::string_view::npos;
}

}  // namespace detail

/// Dictionary terms occurring case-sensitively as whole tokens. Query hits
/// come first by position, then context hits by chunk order and position;
/// each entry appears once.
inline std::vector<AbbreviationEntry> find_abbreviations(std::string_view query, const std::vector<Chunk>& context,
                                                         const AbbreviationDictionary& dict) {
    std::vector<AbbreviationEntry> out;
    std::unordered_set<std::string> taken;
    auto scan = [&](std::string_view text) {
        std::vector<std::pair<std::size_t, const AbbreviationEntry*>> hits;
        for (const auto& e : dict.entries()) {
            if (taken.contains(e.abbr)) continue;
            if (auto pos = detail::find_whole(text, e.abbr); pos != std::string_view::npos) hits.emplace_back(pos, &e);
        }
        std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first < b.first;
            return a.second->abbr < b.second->abbr;
        });
        for (const auto& [pos, e] : hits)
            if (taken.insert(e->abbr).second) out.push_back(*e);
    };
    scan(query);
    for (const auto& c : context) scan(c.text);
    return out;
}

inline std::string render_snippet(const AbbreviationEntry& e) {
    std::string line = e.abbr + " is usually short for " + e.name;
    if (e.desc && !e.desc->empty()) line += ", which is " + *e.desc;
    line += '.';
    return line;
}

inline std::string render_snippets(const std::vector<AbbreviationEntry>& entries) {
    std::string out;
    for (const auto& e : entries) {
        if (!out.empty()) out += '\n';
        out += render_snippet(e);
    }
    return out;
}

}  // namespace askeda
