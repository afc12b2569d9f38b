#include <gtest/gtest.h>

#include <sstream>

#include "askeda/cli.hpp"
#include "../support/tempdir.hpp"

using testing_support::TempDir;

namespace {

struct Run {
    int rc;
    std::string out, err;
};

Run askeda_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "askeda");
    std::vector<const char*> argv;
    for (auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int rc = askeda::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {rc, out.str(), err.str()};
}

const std::string kData = ASKEDA_DATA_DIR;
const std::string kConfig = kData + "/askeda.json";

}  // namespace

TEST(Cli, IngestWithoutManifestFails) {
    TempDir dir;
    const auto r = askeda_cli({"ingest", "--index", (dir.path() / "idx").string()});
    EXPECT_NE(r.rc, 0);
    EXPECT_NE(r.err.find("manifest"), std::string::npos);
    const auto missing = askeda_cli({"ingest", "-m", (dir.path() / "nope.json").string()});
    EXPECT_NE(missing.rc, 0);
}

TEST(Cli, IngestAskAndEvalOnShippedCorpus) {
    TempDir dir;
    const auto idx = (dir.path() / "idx").string();
    auto r = askeda_cli({"ingest", "-c", kConfig, "--index", idx});
    ASSERT_EQ(r.rc, 0) << r.err;
    EXPECT_NE(r.out.find("chunks: "), std::string::npos);

    r = askeda_cli({"ask", "-c", kConfig, "--index", idx, "What does ess::probe_net_11 report?", "--debug"});
    ASSERT_EQ(r.rc, 0) << r.err;
    EXPECT_EQ(r.out.rfind("ess::probe_net_11 will report the pin capacitance values.", 0), 0u) << r.out;
    EXPECT_NE(r.out.find("Sources:"), std::string::npos);
    EXPECT_NE(r.out.find("Candidates:"), std::string::npos);

    r = askeda_cli({"ask", "-c", kConfig, "--index", idx, "--mode", "fuzzy", "q"});
    EXPECT_NE(r.rc, 0);

    r = askeda_cli({"eval", "-c", kConfig, "--index", idx, "-d", kData + "/datasets/q2a.jsonl", "--format", "csv",
                    "--arms", "hybrid:off,none:off"});
    ASSERT_EQ(r.rc, 0) << r.err;
    EXPECT_EQ(r.out, "dataset,mode,adh,f1,recall\nq2a,hybrid,off,1.0000,1.0000\nq2a,none,off,0.0000,0.0000\n");
}

TEST(Cli, EvalRejectsEmptyDatasetAndBadFormat) {
    TempDir dir;
    const auto idx = (dir.path() / "idx").string();
    ASSERT_EQ(askeda_cli({"ingest", "-c", kConfig, "--index", idx}).rc, 0);
    const auto empty = dir.write("empty.jsonl", "");
    EXPECT_NE(askeda_cli({"eval", "-c", kConfig, "--index", idx, "-d", empty}).rc, 0);
    EXPECT_NE(askeda_cli({"eval", "-c", kConfig, "--index", idx, "-d", kData + "/datasets/q2a.jsonl", "--format", "xml"}).rc, 0);
}

TEST(Cli, AskWithoutIndexReportsMissingIndex) {
    TempDir dir;
    const auto r = askeda_cli({"ask", "-c", kConfig, "--index", (dir.path() / "none").string(), "q"});
    EXPECT_NE(r.rc, 0);
    EXPECT_NE(r.err.find("index"), std::string::npos);
}

TEST(Cli, IngestTwiceGivesIdenticalSnapshots) {
    TempDir dir;
    const auto a = dir.path() / "a", b = dir.path() / "b";
    ASSERT_EQ(askeda_cli({"ingest", "-c", kConfig, "--index", a.string()}).rc, 0);
    ASSERT_EQ(askeda_cli({"ingest", "-c", kConfig, "--index", b.string()}).rc, 0);
    for (const auto& e : std::filesystem::directory_iterator(a))
        EXPECT_EQ(testing_support::slurp(e.path()), testing_support::slurp(b / e.path().filename())) << e.path();
}
