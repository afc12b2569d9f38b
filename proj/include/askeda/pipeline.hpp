#pragma once

#include <string>
#include <vector>

#include "askeda/adh.hpp"
#include "askeda/dense_index.hpp"
#include "askeda/fusion.hpp"
#include "askeda/prompt.hpp"
#include "askeda/retrieval.hpp"

namespace askeda {

struct PipelineConfig {
    RetrievalConfig retrieval;
    GenerationConfig generation;
    std::string system_prompt = std::string(kDefaultSystemPrompt);
};

struct PipelineAnswer {
    AnswerEnvelope envelope;
    Retrieval retrieval;
    std::vector<AbbreviationEntry> abbreviations;
};

/// retrieve -> abbreviation lookup -> prompt -> completion. Holds references
/// only; everything it points at must outlive it and is never mutated.
class Pipeline {
public:
    Pipeline(const HybridIndex& index, const EmbeddingProvider* provider, const AbbreviationDictionary& dictionary,
             const CompletionBackend& backend, PipelineConfig cfg)
        : index_(index), provider_(provider), dict_(dictionary), backend_(backend), cfg_(std::move(cfg)) {
        cfg_.retrieval.validate();
        cfg_.generation.validate();
    }

    const PipelineConfig& config() const { return cfg_; }
    const HybridIndex& index() const { return index_; }

    PipelineAnswer answer(const std::string& question, std::vector<HistoryTurn> history, RetrievalMode mode,
                          bool adh) const {
        PipelineAnswer out;
        out.retrieval = retrieve_hybrid(question, index_, provider_, cfg_.retrieval, mode);
        if (adh) out.abbreviations = find_abbreviations(question, out.retrieval.context, dict_);
        auto bundle = build_prompt(question, out.retrieval.context, render_snippets(out.abbreviations),
                                   std::move(history), cfg_.system_prompt);
        out.envelope = generate(bundle, backend_, cfg_.generation);
        return out;
    }

private:
    const HybridIndex& index_;
    const EmbeddingProvider* provider_;
    const AbbreviationDictionary& dict_;
    const CompletionBackend& backend_;
    PipelineConfig cfg_;
};

}  // namespace askeda
