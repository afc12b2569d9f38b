#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "askeda/error.hpp"
#include "askeda/utf8.hpp"
#include "json.hpp"

namespace askeda {

enum class DocFormat { plain_text, markdown, json, csv, tsv };

inline const char* to_string(DocFormat f) {
    switch (f) {
        case DocFormat::plain_text: return "plain_text";
        case DocFormat::markdown: return "markdown";
        case DocFormat::json: return "json";
        case DocFormat::csv: return "csv";
        case DocFormat::tsv: return "tsv";
    }
    return "plain_text";
}

inline std::optional<DocFormat> parse_format(std::string_view s) {
    if (s == "plain_text" || s == "text" || s == "txt") return DocFormat::plain_text;
    if (s == "markdown" || s == "md") return DocFormat::markdown;
    if (s == "json") return DocFormat::json;
    if (s == "csv") return DocFormat::csv;
    if (s == "tsv") return DocFormat::tsv;
    return std::nullopt;
}

inline std::optional<DocFormat> format_from_extension(const std::filesystem::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".txt" || ext == ".text") return DocFormat::plain_text;
    if (ext == ".md" || ext == ".markdown") return DocFormat::markdown;
    if (ext == ".json") return DocFormat::json;
    if (ext == ".csv") return DocFormat::csv;
    if (ext == ".tsv") return DocFormat::tsv;
    return std::nullopt;
}

struct SourceDocument {
    std::string doc_id;
    std::string uri;
    DocFormat format = DocFormat::plain_text;
    std::string body;
    std::map<std::string, std::string> metadata;
};

struct Chunk {
    std::string chunk_id;
    std::string doc_id;
    std::size_t ordinal = 0;
    std::string text;
    /// Offsets into the normalized body, in Unicode scalar values.
    std::size_t char_start = 0;
    std::size_t char_end = 0;

    friend bool operator==(const Chunk&, const Chunk&) = default;
};

struct ChunkingConfig {
    std::size_t chunk_size = 2048;
    std::size_t chunk_overlap = 256;

    void validate() const {
        if (chunk_size == 0) throw Error(Errc::invalid_argument, "chunk_size must be positive");
        if (chunk_overlap >= chunk_size)
            throw Error(Errc::invalid_argument, "chunk_overlap must be smaller than chunk_size");
    }
};

inline void to_json(nlohmann::json& j, const Chunk& c) {
    j = nlohmann::json{{"chunk_id", c.chunk_id}, {"doc_id", c.doc_id},       {"ordinal", c.ordinal},
                       {"text", c.text},         {"char_start", c.char_start}, {"char_end", c.char_end}};
}

inline void from_json(const nlohmann::json& j, Chunk& c) {
    j.at("chunk_id").get_to(c.chunk_id);
    j.at("doc_id").get_to(c.doc_id);
    j.at("ordinal").get_to(c.ordinal);
    j.at("text").get_to(c.text);
    j.at("char_start").get_to(c.char_start);
    j.at("char_end").get_to(c.char_end);
}

inline std::string make_chunk_id(std::string_view doc_id, std::size_t ordinal) {
    std::string ord = std::to_string(ordinal);
    if (ord.size() < 4) ord.insert(0, 4 - ord.size(), '0');
    std::string id(doc_id);
    id += '#';
    id += ord;
    return id;
}

namespace detail {

inline std::vector<std::vector<std::string>> parse_delimited(std::string_view text, char sep, bool quoted) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool any = false;
    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
    };
    auto end_row = [&] {
        end_field();
        if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
        row.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        any = true;
        if (quoted && in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (quoted && c == '"' && field.empty()) {
            in_quotes = true;
        } else if (c == sep) {
            end_field();
        } else if (c == '\n') {
            end_row();
            any = false;
        } else {
            field.push_back(c);
        }
    }
    if (in_quotes) throw Error(Errc::parse, "unterminated quoted field");
    if (any) end_row();
    return rows;
}

inline std::string flatten_table(std::string_view text, char sep, bool quoted) {
    const auto rows = parse_delimited(text, sep, quoted);
    if (rows.empty()) return {};
    const auto& header = rows.front();
    std::string out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (!out.empty()) out += "\n\n";
        const auto& row = rows[r];
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out += '\n';
            const std::string key = c < header.size() ? header[c] : "column_" + std::to_string(c + 1);
            out += key;
            out += ": ";
            out += row[c];
        }
    }
    return out;
}

inline std::string scalar_text(const nlohmann::ordered_json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

inline void flatten_object(const nlohmann::ordered_json& obj, const std::string& prefix, std::string& out) {
    for (const auto& [key, value] : obj.items()) {
        const std::string name = prefix.empty() ? key : prefix + "." + key;
        if (value.is_object()) {
            flatten_object(value, name, out);
            continue;
        }
        if (!out.empty() && out.back() != '\n') out += '\n';
        out += name;
        out += ": ";
        out += scalar_text(value);
    }
}

inline std::string flatten_record(const nlohmann::ordered_json& rec) {
    std::string out;
    if (rec.is_object())
        flatten_object(rec, "", out);
    else
        out = scalar_text(rec);
    return out;
}

/// Top-level array: one paragraph per element. Anything else: one paragraph.
inline std::string flatten_json(std::string_view text) {
    nlohmann::ordered_json doc;
    try {
        doc = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::parse, std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_array()) return flatten_record(doc);
    std::string out;
    for (const auto& rec : doc) {
        std::string para = flatten_record(rec);
        if (para.empty()) continue;
        if (!out.empty()) out += "\n\n";
        out += para;
    }
    return out;
}

inline std::string normalize_newlines(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\r') {
            out.push_back('\n');
            if (i + 1 < s.size() && s[i + 1] == '\n') ++i;
        } else {
            out.push_back(s[i]);
        }
    }
    return out;
}

inline bool blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return c == ' ' || c == '\t' || c == '\n'; });
}

}  // namespace detail

struct LoadedDocument {
    SourceDocument doc;
    std::vector<std::string> warnings;
};

/// Reads and normalizes a document: invalid UTF-8 replaced by U+FFFD, BOM
/// stripped, line endings LF, structured formats flattened to "key: value"
/// lines with one record per paragraph.
inline LoadedDocument load_document(const std::string& uri, std::optional<DocFormat> format_override = std::nullopt,
                                    std::optional<std::string> doc_id = std::nullopt) {
    LoadedDocument out;
    const std::filesystem::path path(uri);
    const auto format = format_override ? format_override : format_from_extension(path);
    if (!format)
        throw Error(Errc::unsupported_format, "unsupported format for '" + uri + "' (no format override given)");

    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io, "cannot read '" + uri + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw Error(Errc::io, "read failed for '" + uri + "'");
    std::string raw = std::move(ss).str();

    auto decoded = utf8::decode(raw);
    if (decoded.invalid_sequences > 0)
        out.warnings.push_back(uri + ": replaced " + std::to_string(decoded.invalid_sequences) +
                               " invalid UTF-8 sequence(s)");
    if (!decoded.text.empty() && decoded.text.front() == 0xFEFF) decoded.text.erase(0, 1);
    std::string text = detail::normalize_newlines(utf8::encode(decoded.text));

    switch (*format) {
        case DocFormat::plain_text:
        case DocFormat::markdown: break;
        case DocFormat::json: text = detail::flatten_json(text); break;
        case DocFormat::csv: text = detail::flatten_table(text, ',', true); break;
        case DocFormat::tsv: text = detail::flatten_table(text, '\t', false); break;
    }
    if (detail::blank(text)) throw Error(Errc::empty_document, "'" + uri + "' is empty after normalization");

    out.doc.doc_id = doc_id ? *doc_id : uri;
    out.doc.uri = uri;
    out.doc.format = *format;
    out.doc.body = std::move(text);
    return out;
}

/// Fixed-width sliding window over scalar values with stride
/// chunk_size - chunk_overlap. The last window may be shorter.
inline std::vector<Chunk> chunk_document(const SourceDocument& doc, const ChunkingConfig& cfg) {
    cfg.validate();
    const std::u32string body = utf8::decode(doc.body).text;
    std::vector<Chunk> chunks;
    const std::size_t len = body.size();
    if (len == 0) return chunks;
    const std::size_t stride = cfg.chunk_size - cfg.chunk_overlap;
    for (std::size_t start = 0;; start += stride) {
        const std::size_t end = std::min(start + cfg.chunk_size, len);
        Chunk c;
        c.doc_id = doc.doc_id;
        c.ordinal = chunks.size();
        c.chunk_id = make_chunk_id(doc.doc_id, c.ordinal);
        c.char_start = start;
        c.char_end = end;
        c.text = utf8::encode(std::u32string_view(body).substr(start, end - start));
        chunks.push_back(std::move(c));
        if (end == len) break;
    }
    return chunks;
}

struct ManifestEntry {
    std::string uri;
    std::optional<DocFormat> format;
    std::optional<std::string> doc_id;
};

/// Reads a manifest (JSON array of {uri, format?, doc_id?}). Relative uris are
/// resolved against the manifest's directory; default doc_id is the uri as
/// written.
inline std::vector<ManifestEntry> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io, "cannot read manifest '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::parse, "manifest '" + path + "': " + e.what());
    }
    if (!j.is_array()) throw Error(Errc::parse, "manifest '" + path + "' must be a JSON array");
    const auto base = std::filesystem::path(path).parent_path();
    std::vector<ManifestEntry> entries;
    for (const auto& item : j) {
        ManifestEntry e;
        std::string written;
        if (item.is_string()) {
            written = item.get<std::string>();
        } else if (item.is_object() && item.contains("uri")) {
            written = item.at("uri").get<std::string>();
            if (item.contains("format")) {
                const auto name = item.at("format").get<std::string>();
                e.format = parse_format(name);
                if (!e.format) throw Error(Errc::parse, "manifest: unknown format '" + name + "'");
            }
            if (item.contains("doc_id")) e.doc_id = item.at("doc_id").get<std::string>();
        } else {
            throw Error(Errc::parse, "manifest entries must be strings or objects with a 'uri'");
        }
        const std::filesystem::path p(written);
        e.uri = p.is_absolute() ? written : (base / p).lexically_normal().string();
        if (!e.doc_id) e.doc_id = written;
        entries.push_back(std::move(e));
    }
    return entries;
}

struct IngestResult {
    std::vector<SourceDocument> documents;
    std::vector<Chunk> chunks;
    std::vector<std::string> warnings;
};

/// Loads and chunks every entry in order. Failed documents become warnings;
/// throws only when none succeed.
inline IngestResult ingest_corpus(const std::vector<ManifestEntry>& entries, const ChunkingConfig& cfg) {
    cfg.validate();
    if (entries.empty()) throw Error(Errc::invalid_argument, "no documents to ingest");
    IngestResult out;
    std::map<std::string, std::string> seen;
    for (const auto& e : entries) {
        try {
            auto loaded = load_document(e.uri, e.format, e.doc_id);
            const auto& id = loaded.doc.doc_id;
            if (auto it = seen.find(id); it != seen.end())
                throw Error(Errc::duplicate_id, "doc_id '" + id + "' already used by '" + it->second + "'");
            seen.emplace(id, e.uri);
            for (auto& w : loaded.warnings) out.warnings.push_back(std::move(w));
            auto chunks = chunk_document(loaded.doc, cfg);
            out.chunks.insert(out.chunks.end(), std::make_move_iterator(chunks.begin()),
                              std::make_move_iterator(chunks.end()));
            out.documents.push_back(std::move(loaded.doc));
        } catch (const Error& err) {
            out.warnings.push_back(e.uri + ": " + err.what());
        }
    }
    if (out.documents.empty())
        throw Error(Errc::all_documents_failed, "all " + std::to_string(entries.size()) + " document(s) failed to load");
    return out;
}

inline IngestResult ingest_corpus(const std::vector<std::string>& uris, const ChunkingConfig& cfg) {
    std::vector<ManifestEntry> entries;
    entries.reserve(uris.size());
    for (const auto& u : uris) entries.push_back({u, std::nullopt, u});
    return ingest_corpus(entries, cfg);
}

/// Debug dump, one chunk per line.
inline std::string chunks_to_jsonl(const std::vector<Chunk>& chunks) {
    std::string out;
    for (const auto& c : chunks) {
        out += nlohmann::json(c).dump();
        out += '\n';
    }
    return out;
}

}  // namespace askeda
