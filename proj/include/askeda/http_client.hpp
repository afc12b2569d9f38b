#pragma once

#include <chrono>
#include <cstdlib>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "askeda/dense_index.hpp"
#include "askeda/error.hpp"
#include "askeda/prompt.hpp"
#include "httplib.h"
#include "json.hpp"

namespace askeda {

struct HttpEndpoint {
    std::string base;  // scheme://host[:port]
    std::string path;

    static HttpEndpoint parse(const std::string& url) {
        const auto scheme = url.find("://");
        if (scheme == std::string::npos) throw Error(Errc::invalid_argument, "endpoint '" + url + "' has no scheme");
        const auto slash = url.find('/', scheme + 3);
        if (slash == std::string::npos) return {url, "/"};
        return {url.substr(0, slash), url.substr(slash)};
    }
};

struct HttpOptions {
    std::string endpoint;
    /// Name of the environment variable holding a bearer token; empty = none.
    std::string token_env;
    int timeout_ms = 30000;
    int retries = 2;
    int retry_backoff_ms = 200;
};

/// POSTs JSON, retrying transport failures and 5xx/429 responses up to
/// `retries` extra times. 4xx fails immediately.
inline nlohmann::json post_json(const HttpOptions& opt, const nlohmann::json& body, Errc failure) {
    const auto ep = HttpEndpoint::parse(opt.endpoint);
    httplib::Client client(ep.base);
    const auto secs = opt.timeout_ms / 1000;
    const auto usecs = (opt.timeout_ms % 1000) * 1000;
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    httplib::Headers headers;
    if (!opt.token_env.empty()) {
        if (const char* tok = std::getenv(opt.token_env.c_str()); tok && *tok)
            headers.emplace("Authorization", std::string("Bearer ") + tok);
    }
    const auto payload = body.dump();
    std::string last;
    const int attempts = opt.retries + 1;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        auto res = client.Post(ep.path, headers, payload, "application/json");
        if (!res) {
            last = "transport error: " + httplib::to_string(res.error());
        } else if (res->status >= 200 && res->status < 300) {
            try {
                return nlohmann::json::parse(res->body);
            } catch (const nlohmann::json::exception& e) {
                throw Error(failure, opt.endpoint + ": malformed JSON response: " + e.what());
            }
        } else {
            last = "HTTP " + std::to_string(res->status);
            if (res->status < 500 && res->status != 429)
                throw Error(failure, opt.endpoint + ": " + last + " after " + std::to_string(attempt) + " attempt(s)");
        }
        if (attempt < attempts) std::this_thread::sleep_for(std::chrono::milliseconds(opt.retry_backoff_ms * attempt));
    }
    throw Error(failure, opt.endpoint + ": " + last + " after " + std::to_string(attempts) + " attempt(s)");
}

/// Remote embedder: POST {"texts": [...]} -> {"vectors": [[...]]}.
class HttpEmbedder final : public EmbeddingProvider {
public:
    HttpEmbedder(std::string name, std::size_t dimension, HttpOptions opt)
        : name_(std::move(name)), dim_(dimension), opt_(std::move(opt)) {}

    std::string name() const override { return name_; }
    std::size_t dimension() const override { return dim_; }

    std::vector<Embedding> embed(std::span<const std::string> texts) const override {
        nlohmann::json body{{"texts", nlohmann::json::array()}};
        for (const auto& t : texts) body["texts"].push_back(t);
        const auto res = post_json(opt_, body, Errc::provider);
        if (!res.contains("vectors") || !res["vectors"].is_array())
            throw Error(Errc::provider, opt_.endpoint + ": response has no 'vectors' array");
        std::vector<Embedding> out;
        for (const auto& v : res["vectors"]) {
            auto e = v.get<Embedding>();
            if (e.size() != dim_)
                throw Error(Errc::provider, opt_.endpoint + ": got dimension " + std::to_string(e.size()) +
                                                ", expected " + std::to_string(dim_));
            out.push_back(std::move(e));
        }
        if (out.size() != texts.size())
            throw Error(Errc::provider, opt_.endpoint + ": got " + std::to_string(out.size()) + " vectors for " +
                                            std::to_string(texts.size()) + " texts");
        return out;
    }

private:
    std::string name_;
    std::size_t dim_;
    HttpOptions opt_;
};

/// Remote LLM: POST {model, prompt, max_new_tokens, temperature} -> {text, usage}.
class HttpChatBackend final : public CompletionBackend {
public:
    HttpChatBackend(std::string model, HttpOptions opt, double temperature = 0.0)
        : model_(std::move(model)), opt_(std::move(opt)), temperature_(temperature) {}

    std::string name() const override { return "http_chat"; }

    /// Whitespace count or one token per four bytes, whichever is larger.
    std::size_t count_tokens(std::string_view text) const override {
        return std::max(whitespace_tokens(text), (text.size() + 3) / 4);
    }

    Completion complete(const PromptBundle&, const std::string& rendered, const GenerationConfig& cfg) const override {
        const nlohmann::json body{{"model", model_},
                                  {"prompt", rendered},
                                  {"max_new_tokens", cfg.max_new_tokens},
                                  {"temperature", temperature_}};
        const auto res = post_json(opt_, body, Errc::backend);
        if (!res.contains("text") || !res["text"].is_string())
            throw Error(Errc::backend, opt_.endpoint + ": response has no 'text'");
        Completion c;
        c.text = res["text"].get<std::string>();
        if (auto u = res.find("usage"); u != res.end() && u->is_object()) {
            c.usage.prompt_tokens = u->value("prompt_tokens", std::size_t{0});
            c.usage.completion_tokens = u->value("completion_tokens", std::size_t{0});
        } else {
            c.usage = {count_tokens(rendered), count_tokens(c.text)};
        }
        return c;
    }

private:
    std::string model_;
    HttpOptions opt_;
    double temperature_;
};

}  // namespace askeda
