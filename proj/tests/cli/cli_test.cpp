// Drives the intentfill binary through the whole pipeline on the fixtures.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "intentfill/completion/session.hpp"
#include "intentfill/eval/sandbox.hpp"
#include "intentfill/jsonl.hpp"

using namespace intentfill;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = INTENTFILL_FIXTURES;
const fs::path kCli = INTENTFILL_CLI;

class Cli : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = fs::temp_directory_path() / ("intentfill-cli-" + std::to_string(::getpid()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    static void TearDownTestSuite() { fs::remove_all(dir_); }

    // Exit status of `intentfill <args>`; stderr goes to <dir>/stderr.log.
    static int run(const std::string& args) {
        std::string cmd = "cd '" + dir_.string() + "' && '" + kCli.string() + "' " + args + " 2> stderr.log";
        int rc = std::system(cmd.c_str());
        return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    }
    static std::string stderr_text() { return read_file(dir_ / "stderr.log"); }
    static fs::path at(const std::string& name) { return dir_ / name; }

    static std::vector<completion::Session> sessions(const std::string& name) {
        std::vector<completion::Session> out;
        for (const auto& j : read_jsonl(at(name))) out.push_back(j.get<completion::Session>());
        return out;
    }

    static inline fs::path dir_;
};

const std::string kBench = (kFixtures / "pass1" / "benchmark.jsonl").string();
const std::string kConfig = (kFixtures / "pipeline" / "config.json").string();

}  // namespace

TEST_F(Cli, MineAnnotateFormat) {
    ASSERT_EQ(run("--config '" + kConfig + "' mine -o instances.jsonl --reports reports.jsonl"), 0) << stderr_text();
    auto instances = read_jsonl(at("instances.jsonl"));
    EXPECT_EQ(instances.size(), 26u);
    EXPECT_EQ(read_jsonl(at("reports.jsonl")).size(), 49u);
    auto manifest = json::parse(read_file(at("manifest.json")));
    for (const auto& r : instances) EXPECT_EQ(r.at("manifest"), manifest.at("hash"));

    // Same config, more workers: byte-identical output.
    auto first = read_file(at("instances.jsonl"));
    ASSERT_EQ(run("--config '" + kConfig + "' --workers 1 mine -o instances2.jsonl"), 0) << stderr_text();
    EXPECT_EQ(read_file(at("instances2.jsonl")), first);

    ASSERT_EQ(run("--config '" + kConfig + "' annotate --instances instances.jsonl -o annotated.jsonl"), 0)
        << stderr_text();
    auto annotated = read_jsonl(at("annotated.jsonl")).size();
    auto rejected = read_jsonl(at("annotated.rejects.jsonl")).size();
    EXPECT_EQ(annotated + rejected, 26u);
    EXPECT_GT(annotated, 0u);

    ASSERT_EQ(run("--config '" + kConfig + "' format --annotated annotated.jsonl -o train.jsonl"), 0) << stderr_text();
    auto train = read_jsonl(at("train.jsonl"));
    ASSERT_EQ(train.size(), annotated);
    for (const auto& r : train) {
        auto text = r.at("text").get<std::string>();
        EXPECT_EQ(text.compare(r.at("mask_boundary").get<std::size_t>(), 11, "<reasoning>"), 0);
    }
}

TEST_F(Cli, OracleModeUsesBenchmarkDocstrings) {
    ASSERT_EQ(run("complete --benchmark '" + kBench + "' --mode oracle -o oracle.jsonl"), 0) << stderr_text();
    auto bench = eval::load_benchmark(kBench);
    auto got = sessions("oracle.jsonl");
    ASSERT_EQ(got.size(), bench.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got[i].instance.id, bench[i].instance.id);
        ASSERT_TRUE(got[i].docstring);
        EXPECT_EQ(*got[i].docstring, bench[i].oracle_docstring);
        EXPECT_TRUE(got[i].candidates.empty());
    }
}

TEST_F(Cli, CompletionIsReproducible) {
    ASSERT_EQ(run("complete --benchmark '" + kBench + "' --mode reason --policy both -o a.jsonl"), 0) << stderr_text();
    ASSERT_EQ(run("--workers 1 complete --benchmark '" + kBench + "' --mode reason --policy both -o b.jsonl"), 0)
        << stderr_text();
    auto a = sessions("a.jsonl"), b = sessions("b.jsonl");
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(completion::stable_view(a[i]), completion::stable_view(b[i]));
}

TEST_F(Cli, EvalAndReport) {
    ASSERT_EQ(run("complete --benchmark '" + kBench + "' --mode direct -o direct.jsonl"), 0) << stderr_text();
    ASSERT_EQ(run("eval --sessions direct.jsonl --benchmark '" + kBench + "' -o direct.report.jsonl"), 0)
        << stderr_text();
    auto md = read_file(at("direct.report.md"));
    EXPECT_NE(md.find("| Variant | C-BLEU | ES | P@1 | Sim | N |"), std::string::npos);
    EXPECT_NE(md.find("| direct |"), std::string::npos);

    ASSERT_EQ(run("report direct.report.jsonl -o merged.md"), 0) << stderr_text();
    EXPECT_EQ(read_file(at("merged.md")), md);
}

TEST_F(Cli, MixedManifestsNeedForce) {
    ASSERT_EQ(run("complete --benchmark '" + kBench + "' --mode intent -o s1.jsonl"), 0) << stderr_text();
    ASSERT_EQ(run("--seed 7 complete --benchmark '" + kBench + "' --mode intent -o s2.jsonl"), 0) << stderr_text();
    write_file(at("mixed.jsonl"), read_file(at("s1.jsonl")) + read_file(at("s2.jsonl")));
    EXPECT_EQ(run("eval --sessions mixed.jsonl --benchmark '" + kBench + "' --metrics codebleu,es -o mixed.report.jsonl"),
              1);
    EXPECT_NE(stderr_text().find("contract violation"), std::string::npos);
    EXPECT_EQ(run("eval --force --sessions mixed.jsonl --benchmark '" + kBench +
                  "' --metrics codebleu,es -o mixed.report.jsonl"),
              0)
        << stderr_text();

    ASSERT_EQ(run("eval --sessions s1.jsonl --benchmark '" + kBench + "' --metrics es -o r1.jsonl"), 0);
    ASSERT_EQ(run("--seed 7 eval --sessions s2.jsonl --benchmark '" + kBench + "' --metrics es -o r2.jsonl"), 0);
    EXPECT_EQ(run("report r1.jsonl r2.jsonl -o both.md"), 1);
    EXPECT_EQ(run("report --force r1.jsonl r2.jsonl -o both.md"), 0) << stderr_text();
}

TEST_F(Cli, ContractViolationsExitOne) {
    write_file(at("broken.jsonl"), "{\"id\": 1}\nnot json\n");
    EXPECT_EQ(run("eval --sessions broken.jsonl --benchmark '" + kBench + "' -o x.jsonl"), 1);
    EXPECT_NE(stderr_text().find("line 1"), std::string::npos);

    // A report whose stored aggregates disagree with its instances.
    ASSERT_EQ(run("complete --benchmark '" + kBench + "' --mode direct -o t.jsonl"), 0);
    ASSERT_EQ(run("eval --sessions t.jsonl --benchmark '" + kBench + "' --metrics es -o t.report.jsonl"), 0);
    auto rows = read_jsonl(at("t.report.jsonl"));
    for (auto& r : rows) {
        if (r.at("record") == "aggregate") r["edit_sim"] = 101.0;
    }
    write_jsonl(at("t.report.jsonl"), rows);
    EXPECT_EQ(run("report t.report.jsonl -o t.md"), 1);
}

TEST_F(Cli, UsageErrors) {
    EXPECT_NE(run("complete --mode sideways"), 0);
    EXPECT_EQ(run("complete --instances /nonexistent.jsonl --mode direct -o z.jsonl"), 2);
}
