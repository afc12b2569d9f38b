#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "askeda/error.hpp"
#include "askeda/ingest.hpp"
#include "askeda/text.hpp"

namespace askeda {

inline constexpr std::string_view kDefaultSystemPrompt =
    "You are a helpful AI language model. Your primary function is to assist users in answering questions, "
    "generating text, and engaging in conversation. Given the following extracted parts of a long document and a "
    "question, create a final answer. If asking for a command, please return the first one only.";

struct ContextBlock {
    std::string chunk_id;
    std::string text;

    friend bool operator==(const ContextBlock&, const ContextBlock&) = default;
};

struct HistoryTurn {
    std::string question;
    std::string answer;

    friend bool operator==(const HistoryTurn&, const HistoryTurn&) = default;
};

/// Everything that goes into one completion. context_blocks are in ascending
/// relevance (best last); history is oldest first.
struct PromptBundle {
    std::string system_prompt;
    std::vector<ContextBlock> context_blocks;
    std::string abbreviation_block;
    std::vector<HistoryTurn> history;
    std::string query;

    friend bool operator==(const PromptBundle&, const PromptBundle&) = default;
};

/// Labeled sections, in fixed order: System, History, Context,
/// Abbreviations, Question. Empty sections are omitted.
inline std::string render_prompt(const PromptBundle& b) {
    std::vector<std::string> sections;
    if (!b.system_prompt.empty()) sections.push_back("System: " + b.system_prompt);
    if (!b.history.empty()) {
        std::string s = "History:";
        for (const auto& h : b.history) s += "\nQ: " + h.question + "\nA: " + h.answer;
        sections.push_back(std::move(s));
    }
    if (!b.context_blocks.empty()) {
        std::string s = "Context:";
        for (const auto& c : b.context_blocks) s += "\n[" + c.chunk_id + "]\n" + c.text + "\n";
        s.pop_back();
        sections.push_back(std::move(s));
    }
    if (!b.abbreviation_block.empty()) sections.push_back("Abbreviations:\n" + b.abbreviation_block);
    sections.push_back("Question: " + b.query);
    std::string out;
    for (const auto& s : sections) {
        if (!out.empty()) out += "\n\n";
        out += s;
    }
    return out;
}

inline PromptBundle build_prompt(std::string query, const std::vector<Chunk>& context_ascending,
                                 std::string abbreviation_block, std::vector<HistoryTurn> history,
                                 std::string system_prompt = std::string(kDefaultSystemPrompt)) {
    if (std::all_of(query.begin(), query.end(), [](unsigned char c) { return std::isspace(c); }))
        throw Error(Errc::invalid_argument, "query is empty");
    PromptBundle b;
    b.system_prompt = std::move(system_prompt);
    for (const auto& c : context_ascending) b.context_blocks.push_back({c.chunk_id, c.text});
    b.abbreviation_block = std::move(abbreviation_block);
    b.history = std::move(history);
    b.query = std::move(query);
    return b;
}

enum class BackendKind { http_chat, stub_echo, stub_extractive };

inline const char* to_string(BackendKind k) {
    switch (k) {
        case BackendKind::http_chat: return "http_chat";
        case BackendKind::stub_echo: return "stub_echo";
        case BackendKind::stub_extractive: return "stub_extractive";
    }
    return "stub_echo";
}

inline std::optional<BackendKind> parse_backend(std::string_view s) {
    if (s == "http_chat") return BackendKind::http_chat;
    if (s == "stub_echo") return BackendKind::stub_echo;
    if (s == "stub_extractive") return BackendKind::stub_extractive;
    return std::nullopt;
}

struct GenerationConfig {
    std::size_t context_length = 8192;
    std::size_t max_new_tokens = 4096;
    BackendKind backend = BackendKind::stub_extractive;

    void validate() const {
        if (context_length == 0 || max_new_tokens == 0)
            throw Error(Errc::invalid_argument, "context_length and max_new_tokens must be positive");
        if (max_new_tokens >= context_length)
            throw Error(Errc::invalid_argument, "max_new_tokens must be smaller than context_length");
    }
    std::size_t prompt_budget() const { return context_length - max_new_tokens; }
};

struct Usage {
    std::size_t prompt_tokens = 0;
    std::size_t completion_tokens = 0;

    friend bool operator==(const Usage&, const Usage&) = default;
};

struct Completion {
    std::string text;
    Usage usage;
};

inline std::size_t whitespace_tokens(std::string_view s) {
    std::size_t n = 0;
    bool in_word = false;
    for (unsigned char c : s) {
        const bool space = std::isspace(c);
        if (!space && !in_word) ++n;
        in_word = !space;
    }
    return n;
}

class CompletionBackend {
public:
    virtual ~CompletionBackend() = default;
    virtual std::string name() const = 0;
    /// Per-backend prompt template hook.
    virtual std::string render(const PromptBundle& bundle) const { return render_prompt(bundle); }
    virtual std::size_t count_tokens(std::string_view text) const { return whitespace_tokens(text); }
    virtual Completion complete(const PromptBundle& bundle, const std::string& rendered,
                                const GenerationConfig& cfg) const = 0;
};

/// Drops oldest history first, then least relevant context, until the
/// rendered prompt fits context_length - max_new_tokens.
inline PromptBundle truncate_to_budget(PromptBundle bundle, const GenerationConfig& cfg,
                                       const CompletionBackend& counter) {
    cfg.validate();
    const auto budget = cfg.prompt_budget();
    auto fits = [&] { return counter.count_tokens(counter.render(bundle)) <= budget; };
    while (!fits()) {
        if (!bundle.history.empty()) {
            bundle.history.erase(bundle.history.begin());
        } else if (!bundle.context_blocks.empty()) {
            bundle.context_blocks.erase(bundle.context_blocks.begin());
        } else {
            throw Error(Errc::budget, "system prompt, abbreviations and query alone exceed the prompt budget of " +
                                          std::to_string(budget) + " tokens");
        }
    }
    return bundle;
}

/// Returns the abbreviation block and the first context block verbatim.
class EchoBackend final : public CompletionBackend {
public:
    std::string name() const override { return "stub_echo"; }
    Completion complete(const PromptBundle& b, const std::string& rendered, const GenerationConfig&) const override {
        std::string text = b.abbreviation_block;
        if (!b.context_blocks.empty()) {
            if (!text.empty()) text += '\n';
            text += b.context_blocks.front().text;
        }
        return {text, {count_tokens(rendered), count_tokens(text)}};
    }
};

/// Returns the context sentence sharing the most distinct plain tokens with
/// the query. Blocks are scanned most relevant first; the first maximum wins.
/// Empty when nothing overlaps.
class ExtractiveBackend final : public CompletionBackend {
public:
    std::string name() const override { return "stub_extractive"; }
    Completion complete(const PromptBundle& b, const std::string& rendered, const GenerationConfig&) const override {
        const auto qtoks = tokenize(b.query, TokenMode::plain);
        const std::unordered_set<std::string> query(qtoks.begin(), qtoks.end());
        std::size_t best = 0;
        std::string text;
        for (auto it = b.context_blocks.rbegin(); it != b.context_blocks.rend(); ++it) {
            for (auto& sentence : split_sentences(it->text)) {
                const auto toks = tokenize(sentence, TokenMode::plain);
                std::unordered_set<std::string> shared;
                for (const auto& t : toks)
                    if (query.contains(t)) shared.insert(t);
                if (shared.size() > best) {
                    best = shared.size();
                    text = std::move(sentence);
                }
            }
        }
        return {text, {count_tokens(rendered), count_tokens(text)}};
    }
};

struct AnswerEnvelope {
    std::string answer;
    /// Chunk ids of the prompt's context, most relevant first.
    std::vector<std::string> sources;
    Usage usage;
};

inline AnswerEnvelope generate(const PromptBundle& bundle, const CompletionBackend& backend,
                               const GenerationConfig& cfg) {
    const auto fitted = truncate_to_budget(bundle, cfg, backend);
    const auto rendered = backend.render(fitted);
    auto completion = backend.complete(fitted, rendered, cfg);
    AnswerEnvelope out;
    out.answer = std::move(completion.text);
    out.usage = completion.usage;
    for (auto it = fitted.context_blocks.rbegin(); it != fitted.context_blocks.rend(); ++it)
        out.sources.push_back(it->chunk_id);
    return out;
}

}  // namespace askeda
