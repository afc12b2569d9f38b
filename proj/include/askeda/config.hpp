#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "askeda/adh.hpp"
#include "askeda/dense_index.hpp"
#include "askeda/error.hpp"
#include "askeda/fusion.hpp"
#include "askeda/http_client.hpp"
#include "askeda/ingest.hpp"
#include "askeda/pipeline.hpp"
#include "askeda/prompt.hpp"
#include "askeda/sparse_index.hpp"
#include "json.hpp"

namespace askeda {

struct EmbedderConfig {
    std::string kind = "test";  // "test" | "http"
    std::size_t dimension = 1024;
    std::string name;  // http only
    HttpOptions http;
    std::size_t batch_size = 64;
};

struct LlmConfig {
    std::string model;
    double temperature = 0.0;
    HttpOptions http;
};

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::size_t history_depth = 4;
    int session_ttl_s = 3600;
    std::string feedback_path = "feedback.jsonl";
    std::string transcript_path;  // empty = transcripts not persisted
    std::string ui_dir;           // empty = no static files
};

/// Defaults: chunk 2048/256, n_dense = n_sparse = n_hybrid = 3, rrf_k 60,
/// context 8192 with 4096 new tokens, history depth 4.
struct AppConfig {
    std::string manifest;
    std::string dictionary;
    std::string index_dir = "index";
    ChunkingConfig chunking;
    Bm25Params bm25;
    RetrievalConfig retrieval;
    GenerationConfig generation;
    std::string system_prompt = std::string(kDefaultSystemPrompt);
    EmbedderConfig embedder;
    LlmConfig llm;
    ServiceConfig service;
    unsigned eval_parallelism = 1;

    void validate() const {
        chunking.validate();
        bm25.validate();
        retrieval.validate();
        generation.validate();
        if (embedder.kind != "test" && embedder.kind != "http")
            throw Error(Errc::invalid_argument, "embedder.kind must be 'test' or 'http'");
        if (service.history_depth == 0) throw Error(Errc::invalid_argument, "service.history_depth must be >= 1");
    }

    /// Paths that must exist before serving.
    void require_paths() const {
        auto need = [](const std::string& p, const char* what) {
            if (p.empty() || !std::filesystem::exists(p))
                throw Error(Errc::io, std::string(what) + " '" + p + "' does not exist");
        };
        need(index_dir, "index directory");
        if (!dictionary.empty()) need(dictionary, "dictionary");
    }
};

namespace detail {

inline HttpOptions http_options(const nlohmann::json& j, HttpOptions o = {}) {
    o.endpoint = j.value("endpoint", o.endpoint);
    o.token_env = j.value("token_env", o.token_env);
    o.timeout_ms = j.value("timeout_ms", o.timeout_ms);
    o.retries = j.value("retries", o.retries);
    o.retry_backoff_ms = j.value("retry_backoff_ms", o.retry_backoff_ms);
    return o;
}

inline std::string resolve(const std::filesystem::path& base, const std::string& p) {
    if (p.empty()) return p;
    const std::filesystem::path path(p);
    return path.is_absolute() ? p : (base / path).lexically_normal().string();
}

}  // namespace detail

/// Relative paths resolve against `base_dir` (the config file's directory).
/// Secrets never live here: only the names of environment variables.
inline AppConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    AppConfig c;
    c.manifest = detail::resolve(base_dir, j.value("manifest", c.manifest));
    c.dictionary = detail::resolve(base_dir, j.value("dictionary", c.dictionary));
    c.index_dir = detail::resolve(base_dir, j.value("index_dir", c.index_dir));
    if (auto it = j.find("chunking"); it != j.end()) {
        c.chunking.chunk_size = it->value("chunk_size", c.chunking.chunk_size);
        c.chunking.chunk_overlap = it->value("chunk_overlap", c.chunking.chunk_overlap);
    }
    if (auto it = j.find("bm25"); it != j.end()) {
        c.bm25.k1 = it->value("k1", c.bm25.k1);
        c.bm25.b = it->value("b", c.bm25.b);
    }
    if (auto it = j.find("retrieval"); it != j.end()) {
        c.retrieval.n_dense = it->value("n_dense", c.retrieval.n_dense);
        c.retrieval.n_sparse = it->value("n_sparse", c.retrieval.n_sparse);
        c.retrieval.n_hybrid = it->value("n_hybrid", c.retrieval.n_hybrid);
        c.retrieval.rrf_k = it->value("rrf_k", c.retrieval.rrf_k);
    }
    if (auto it = j.find("generation"); it != j.end()) {
        c.generation.context_length = it->value("context_length", c.generation.context_length);
        c.generation.max_new_tokens = it->value("max_new_tokens", c.generation.max_new_tokens);
        if (it->contains("backend")) {
            const auto name = it->at("backend").get<std::string>();
            const auto kind = parse_backend(name);
            if (!kind) throw Error(Errc::invalid_argument, "unknown generation.backend '" + name + "'");
            c.generation.backend = *kind;
        }
        c.system_prompt = it->value("system_prompt", c.system_prompt);
    }
    if (auto it = j.find("embedder"); it != j.end()) {
        c.embedder.kind = it->value("kind", c.embedder.kind);
        c.embedder.dimension = it->value("dimension", c.embedder.dimension);
        c.embedder.name = it->value("name", c.embedder.name);
        c.embedder.batch_size = it->value("batch_size", c.embedder.batch_size);
        c.embedder.http = detail::http_options(*it);
    }
    if (auto it = j.find("llm"); it != j.end()) {
        c.llm.model = it->value("model", c.llm.model);
        c.llm.temperature = it->value("temperature", c.llm.temperature);
        c.llm.http = detail::http_options(*it);
    }
    if (auto it = j.find("service"); it != j.end()) {
        auto& s = c.service;
        s.host = it->value("host", s.host);
        s.port = it->value("port", s.port);
        s.history_depth = it->value("history_depth", s.history_depth);
        s.session_ttl_s = it->value("session_ttl_s", s.session_ttl_s);
        s.feedback_path = it->value("feedback_path", s.feedback_path);
        s.transcript_path = it->value("transcript_path", s.transcript_path);
        s.ui_dir = it->value("ui_dir", s.ui_dir);
    }
    c.service.feedback_path = detail::resolve(base_dir, c.service.feedback_path);
    c.service.transcript_path = detail::resolve(base_dir, c.service.transcript_path);
    c.service.ui_dir = detail::resolve(base_dir, c.service.ui_dir);
    c.eval_parallelism = j.value("eval_parallelism", c.eval_parallelism);
    c.validate();
    return c;
}

inline AppConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io, "cannot read config '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::parse, "config '" + path + "': " + e.what());
    }
    return parse_config(j, std::filesystem::path(path).parent_path());
}

inline std::unique_ptr<EmbeddingProvider> make_provider(const EmbedderConfig& c) {
    if (c.kind == "http") {
        if (c.name.empty() || c.http.endpoint.empty())
            throw Error(Errc::invalid_argument, "http embedder needs 'name' and 'endpoint'");
        return std::make_unique<HttpEmbedder>(c.name, c.dimension, c.http);
    }
    return test_embedder(c.dimension);
}

inline std::unique_ptr<CompletionBackend> make_backend(BackendKind kind, const LlmConfig& llm) {
    switch (kind) {
        case BackendKind::stub_echo: return std::make_unique<EchoBackend>();
        case BackendKind::stub_extractive: return std::make_unique<ExtractiveBackend>();
        case BackendKind::http_chat:
            if (llm.http.endpoint.empty()) throw Error(Errc::invalid_argument, "http_chat backend needs llm.endpoint");
            return std::make_unique<HttpChatBackend>(llm.model, llm.http, llm.temperature);
    }
    return std::make_unique<EchoBackend>();
}

inline PipelineConfig pipeline_config(const AppConfig& c) {
    return {c.retrieval, c.generation, c.system_prompt};
}

inline AbbreviationDictionary load_dictionary_or_empty(const std::string& path, std::vector<std::string>* warnings) {
    if (path.empty()) return {};
    auto loaded = load_dictionary(path);
    if (warnings)
        for (auto& w : loaded.warnings) warnings->push_back(std::move(w));
    return std::move(loaded.dictionary);
}

}  // namespace askeda
