#include <gtest/gtest.h>

#include "askeda/prompt.hpp"
#include "../support/oracles.hpp"

using namespace askeda;

namespace {

PromptBundle sample() {
    PromptBundle b;
    b.system_prompt = "Be brief.";
    b.history = {{"q1", "a1"}, {"q2", "a2"}};
    b.context_blocks = {{"d#0001", "weak match"}, {"d#0000", "best match"}};
    b.abbreviation_block = "DRC is usually short for Design Rule Check.";
    b.query = "what next";
    return b;
}

}  // namespace

TEST(Prompt, RendersSectionsInFixedOrder) {
    EXPECT_EQ(render_prompt(sample()),
              "System: Be brief.\n\n"
              "History:\nQ: q1\nA: a1\nQ: q2\nA: a2\n\n"
              "Context:\n[d#0001]\nweak match\n\n[d#0000]\nbest match\n\n"
              "Abbreviations:\nDRC is usually short for Design Rule Check.\n\n"
              "Question: what next");
}

TEST(Prompt, OmitsEmptySections) {
    PromptBundle b;
    b.query = "q";
    EXPECT_EQ(render_prompt(b), "Question: q");
    b.system_prompt = "s";
    b.abbreviation_block = "X is usually short for Y.";
    EXPECT_EQ(render_prompt(b), "System: s\n\nAbbreviations:\nX is usually short for Y.\n\nQuestion: q");
}

TEST(Prompt, BuildKeepsContextOrderAndRejectsBlankQuery) {
    const std::vector<Chunk> ctx = {{"a", "d", 0, "low", 0, 0}, {"b", "d", 1, "high", 0, 0}};
    const auto b = build_prompt("q", ctx, "", {});
    ASSERT_EQ(b.context_blocks.size(), 2u);
    EXPECT_EQ(b.context_blocks.back().chunk_id, "b");
    EXPECT_EQ(b.system_prompt, kDefaultSystemPrompt);
    EXPECT_THROW(build_prompt("  \n", ctx, "", {}), Error);
}

TEST(Truncation, DropsOldestHistoryThenLeastRelevantContext) {
    EchoBackend counter;
    const auto full = sample();
    GenerationConfig cfg;
    cfg.max_new_tokens = 1;
    const auto total = whitespace_tokens(render_prompt(full));

    cfg.context_length = total + 1;
    EXPECT_EQ(truncate_to_budget(full, cfg, counter), full);

    cfg.context_length = total;  // one token over
    auto cut = truncate_to_budget(full, cfg, counter);
    ASSERT_EQ(cut.history.size(), 1u);
    EXPECT_EQ(cut.history[0].question, "q2");
    EXPECT_EQ(cut.context_blocks.size(), 2u);

    auto core = full;
    core.history.clear();
    core.context_blocks = {full.context_blocks.back()};
    cfg.context_length = whitespace_tokens(render_prompt(core)) + 1;
    cut = truncate_to_budget(full, cfg, counter);
    EXPECT_TRUE(cut.history.empty());
    ASSERT_EQ(cut.context_blocks.size(), 1u);
    EXPECT_EQ(cut.context_blocks[0].chunk_id, "d#0000");

    cfg.context_length = 3;
    try {
        truncate_to_budget(full, cfg, counter);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::budget);
    }
}

TEST(Truncation, RandomBundlesStayWithinBudget) {
    oracle::Rng rng(17);
    EchoBackend counter;
    for (int t = 0; t < 200; ++t) {
        const auto b = oracle::random_bundle(rng);
        GenerationConfig cfg;
        cfg.max_new_tokens = 1 + oracle::pick(rng, 0, 10);
        cfg.context_length = cfg.max_new_tokens + oracle::pick(rng, 1, 600);
        try {
            const auto cut = truncate_to_budget(b, cfg, counter);
            EXPECT_LE(whitespace_tokens(render_prompt(cut)), cfg.prompt_budget());
            EXPECT_EQ(cut.query, b.query);
            EXPECT_EQ(cut.system_prompt, b.system_prompt);
            EXPECT_EQ(cut.abbreviation_block, b.abbreviation_block);
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::budget);
        }
    }
}

TEST(GenerationConfig, Validates) {
    EXPECT_THROW((GenerationConfig{100, 100, BackendKind::stub_echo}).validate(), Error);
    EXPECT_EQ((GenerationConfig{}).prompt_budget(), 4096u);
}

TEST(Stubs, EchoReturnsAbbreviationsAndBestBlock) {
    EchoBackend echo;
    const auto b = sample();
    const auto out = generate(b, echo, GenerationConfig{});
    EXPECT_EQ(out.answer, "DRC is usually short for Design Rule Check.\nweak match");
    EXPECT_EQ(out.sources, (std::vector<std::string>{"d#0000", "d#0001"}));
    EXPECT_GT(out.usage.prompt_tokens, 0u);
}

TEST(Stubs, ExtractivePicksMostOverlappingSentence) {
    ExtractiveBackend ex;
    PromptBundle b;
    b.query = "what does the clock tree do";
    b.context_blocks = {{"lo", "The clock tree does things. Unrelated."}, {"hi", "Power grid. The clock matters."}};
    // four shared tokens in the weaker block beat two in the stronger one
    const auto out = ex.complete(b, render_prompt(b), GenerationConfig{});
    EXPECT_EQ(out.text, "The clock tree does things.");
    b.context_blocks = {{"x", "Nothing shared here."}};
    EXPECT_EQ(ex.complete(b, "", GenerationConfig{}).text, "");
}

TEST(Stubs, ExtractiveTieGoesToMostRelevantBlock) {
    ExtractiveBackend ex;
    PromptBundle b;
    b.query = "clock skew";
    b.context_blocks = {{"low", "Clock skew low."}, {"high", "Skew of clock high."}};
    EXPECT_EQ(ex.complete(b, "", GenerationConfig{}).text, "Skew of clock high.");
}
