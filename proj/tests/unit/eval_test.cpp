#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "intentfill/eval/metrics.hpp"
#include "intentfill/eval/report.hpp"
#include "intentfill/eval/sandbox.hpp"
#include "intentfill/gateway/gateway.hpp"
#include "intentfill/jsonl.hpp"
#include "intentfill/parallel.hpp"
#include "intentfill/text.hpp"
#include "oracles.hpp"
#include "pygen.hpp"

using namespace intentfill;
using namespace intentfill::eval;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = INTENTFILL_FIXTURES;

}  // namespace

// ---- edit similarity -----------------------------------------------------

TEST(EditSimilarity, KittenSitting) {
    EXPECT_EQ(levenshtein(U"kitten", U"sitting"), 3u);
    EXPECT_NEAR(edit_similarity("kitten", "sitting"), 100.0 * (1.0 - 3.0 / 7.0), 1e-9);
    EXPECT_NEAR(edit_similarity("kitten", "sitting"), 57.142857, 1e-6);
}

TEST(EditSimilarity, Boundaries) {
    EXPECT_DOUBLE_EQ(edit_similarity("", ""), 100.0);
    EXPECT_DOUBLE_EQ(edit_similarity("return x", "return x"), 100.0);
    EXPECT_DOUBLE_EQ(edit_similarity("abc", ""), 0.0);
    EXPECT_DOUBLE_EQ(edit_similarity("", "abc"), 0.0);
}

TEST(EditSimilarity, NormalizesTrailingWhitespaceAndNewlines) {
    EXPECT_DOUBLE_EQ(edit_similarity("a = 1  \r\nb = 2\t\n", "a = 1\nb = 2\n"), 100.0);
}

TEST(EditSimilarity, CountsCodePointsNotBytes) {
    // One substitution over four code points, although the bytes differ by two.
    EXPECT_NEAR(edit_similarity("caf\xc3\xa9", "cafe"), 75.0, 1e-12);
}

TEST(EditSimilarity, MatchesDpOracleOnRandomPairs) {
    std::mt19937_64 rng(20240611);
    for (int i = 0; i < 1000; ++i) {
        std::string a = testsupport::random_ascii(rng, 40);
        std::string b = testsupport::random_ascii(rng, 40);
        double expect = testsupport::es_oracle(a, b);
        double got = edit_similarity(a, b);
        ASSERT_NEAR(got, expect, 1e-9) << a << " | " << b;
        ASSERT_DOUBLE_EQ(got, edit_similarity(b, a));
        ASSERT_GE(got, 0.0);
        ASSERT_LE(got, 100.0);
        ASSERT_EQ(got == 100.0, testsupport::normalize_by_hand(a) == testsupport::normalize_by_hand(b));
    }
}

// ---- CodeBLEU ------------------------------------------------------------

TEST(CodeBleu, HandComputedPairs) {
    for (const auto& p : testsupport::hand_pairs()) {
        auto r = codebleu(p.ref, p.hyp);
        EXPECT_NEAR(r.ngram, p.ngram, 1e-6) << p.ref;
        EXPECT_NEAR(r.weighted_ngram, p.weighted_ngram, 1e-6) << p.ref;
        EXPECT_NEAR(r.syntax, p.syntax, 1e-6) << p.ref;
        EXPECT_NEAR(r.dataflow, p.dataflow, 1e-6) << p.ref;
        EXPECT_NEAR(r.score, 25.0 * (p.ngram + p.weighted_ngram + p.syntax + p.dataflow), 1e-6) << p.ref;
    }
}

TEST(CodeBleu, IdenticalParseableIsHundred) {
    for (const char* code : {"return a + b", "pass", "x", "for i in range(3):\n    total += i\nreturn total",
                             "\"\"\"doc only\"\"\"", "    y = f(x)\n    return y\n"}) {
        auto r = codebleu(code, code);
        EXPECT_DOUBLE_EQ(r.score, 100.0) << code;
        EXPECT_FALSE(r.hyp_unparseable);
    }
    testsupport::BodyGenerator gen(7);
    for (int i = 0; i < 50; ++i) {
        std::string body = text::dedent(gen.body(4).text);
        ASSERT_DOUBLE_EQ(codebleu(body, body).score, 100.0) << body;
    }
}

TEST(CodeBleu, ZeroOverlapUnparseableHypothesis) {
    auto r = codebleu("return a + b", ")) ((");
    EXPECT_TRUE(r.hyp_unparseable);
    EXPECT_FALSE(r.ref_unparseable);
    // No unigram overlap: the smoothed geometric mean collapses to zero.
    EXPECT_LT(r.ngram, 1e-9);
    EXPECT_LT(r.weighted_ngram, 1e-9);
    EXPECT_EQ(r.syntax, 0.0);
    EXPECT_EQ(r.dataflow, 0.0);
    EXPECT_LT(r.score, 1e-6);
}

TEST(CodeBleu, ShortSequencesDropLongOrders) {
    EXPECT_DOUBLE_EQ(bleu({"x"}, {"x"}), 1.0);
    EXPECT_DOUBLE_EQ(bleu({"a", "b"}, {"a", "b"}), 1.0);
    EXPECT_DOUBLE_EQ(bleu({}, {}), 1.0);
    EXPECT_DOUBLE_EQ(bleu({"a"}, {}), 0.0);
}

TEST(CodeBleu, StripsCommentsAndDocstrings) {
    std::string code = "\"\"\"Doc.\"\"\"\n# note\nx = 1  # trailing\n\nreturn x\n";
    EXPECT_EQ(strip_comments_and_docstrings(code), "x = 1  \nreturn x");
}

TEST(CodeBleu, MatchesReferenceImplementationFixture) {
    auto rows = read_jsonl(kFixtures / "codebleu_reference.jsonl");
    ASSERT_EQ(rows.size(), 40u);
    for (const auto& row : rows) {
        std::string ref = row.at("ref"), hyp = row.at("hyp");
        auto r = codebleu(ref, hyp);
        EXPECT_NEAR(r.ngram, row.at("ngram").get<double>(), 1e-6) << ref;
        EXPECT_NEAR(r.weighted_ngram, row.at("weighted_ngram").get<double>(), 1e-6) << ref;
        EXPECT_NEAR(r.syntax, row.at("syntax").get<double>(), 1e-6) << ref;
        EXPECT_NEAR(r.dataflow, row.at("dataflow").get<double>(), 1e-6) << ref;
    }
}

TEST(CodeBleu, ComponentsBoundedOnFuzzPairs) {
    testsupport::BodyGenerator gen(99);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        std::string ref = text::dedent(gen.body(3 + i % 4).text);
        std::string hyp = text::dedent(gen.body(3 + i % 3).text);
        if (i % 5 == 0) hyp = hyp.substr(0, rng() % (hyp.size() + 1));  // often unparseable
        if (i % 7 == 0) std::swap(ref, hyp);
        auto r = codebleu(ref, hyp);
        for (double c : {r.ngram, r.weighted_ngram, r.syntax, r.dataflow}) {
            ASSERT_GE(c, 0.0) << ref << "\n---\n" << hyp;
            ASSERT_LE(c, 1.0) << ref << "\n---\n" << hyp;
        }
        ASSERT_GE(r.score, 0.0);
        ASSERT_LE(r.score, 100.0);
    }
}

TEST(CodeBleu, WeightsValidateAndRescale) {
    EXPECT_THROW((CodeBleuWeights{-0.1, 0.5, 0.3, 0.3}.validate()), Error);
    EXPECT_THROW((CodeBleuWeights{0, 0, 0, 0}.validate()), Error);
    EXPECT_THROW(json({{"ngram", 1}, {"bogus", 1}}).get<CodeBleuWeights>(), Error);
    auto w = json({{"ngram", 1.0}, {"weighted_ngram", 0.0}, {"syntax", 0.0}, {"dataflow", 0.0}}).get<CodeBleuWeights>();
    auto r = codebleu("return a + b", "return a - b", w);
    EXPECT_NEAR(r.score, 100.0 * r.ngram, 1e-9);
}

// ---- sandbox -------------------------------------------------------------

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("intentfill-test-" + std::to_string(::getpid()) + "-" +
                                            std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::map<std::string, std::uint64_t> tree_digest(const fs::path& root) {
    std::map<std::string, std::uint64_t> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = text::fnv1a64(read_file(e.path()));
    }
    return out;
}

const std::vector<BenchmarkInstance>& bench() {
    static const auto b = load_benchmark(kFixtures / "pass1" / "benchmark.jsonl");
    return b;
}

const BenchmarkInstance& task(const std::string& name) {
    for (const auto& b : bench()) {
        if (b.instance.function_name == name) return b;
    }
    throw Error("no task " + name);
}

}  // namespace

TEST(Benchmark, LoadsDevEvalRecords) {
    ASSERT_EQ(bench().size(), 10u);
    const auto& add = task("add");
    EXPECT_EQ(add.instance.id, "mathops.add");
    EXPECT_EQ(add.instance.file_name, "mathops.py");
    EXPECT_EQ(add.instance.signature, "def add(a, b):\n");
    EXPECT_EQ(add.instance.body, "    return a + b\n");
    EXPECT_EQ(add.oracle_docstring, "Return the sum of a and b.");
    EXPECT_DOUBLE_EQ(add.timeout_s, 3.0);
    EXPECT_TRUE(fs::is_directory(add.workdir));
}

TEST(Benchmark, GenericShapeRoundTrips) {
    json j = task("gcd");
    auto back = benchmark_from_json(j);
    EXPECT_EQ(back.instance.body, task("gcd").instance.body);
    EXPECT_EQ(back.test_command, task("gcd").test_command);
    EXPECT_EQ(back.workdir, task("gcd").workdir);
}

TEST(Benchmark, ComplexCodeEvalAdapter) {
    json rec = {{"id", "cce-1"},
                {"repo_path", "repo"},
                {"file_path", "mathops.py"},
                {"function_name", "fib"},
                {"docstring", "Fibonacci."},
                {"test_cmd", "true"}};
    auto b = from_complexcodeeval(rec, kFixtures / "pass1");
    EXPECT_EQ(b.instance.id, "cce-1");
    EXPECT_EQ(b.instance.function_name, "fib");
    EXPECT_EQ(b.oracle_docstring, "Fibonacci.");
    EXPECT_NE(b.instance.body.find("a, b = b, a + b"), std::string::npos);
}

TEST(Benchmark, RejectsBadRecordsWithLinePointer) {
    TempDir tmp;
    write_file(tmp.path / "b.jsonl", "{\"namespace\": \"m.f\", \"completion_path\": \"m.py\", \"project_path\": \"x\"}\n");
    try {
        load_benchmark(tmp.path / "b.jsonl");
        FAIL() << "expected a contract violation";
    } catch (const ContractViolation& e) {
        EXPECT_EQ(e.line(), 1u);
    }
}

TEST(Sandbox, SpliceReplacesOnlyTheTargetBody) {
    std::string src = "def a():\n    return 1\n\n\ndef b():\n    return 2\n";
    EXPECT_EQ(splice_body(src, "a", "    return 9\n"), "def a():\n    return 9\n\n\ndef b():\n    return 2\n");
    EXPECT_EQ(splice_body(src, "b", "return 3"), "def a():\n    return 1\n\n\ndef b():\n    return 3\n");
    EXPECT_THROW(splice_body(src, "c", "pass"), SandboxSetupError);
}

TEST(Sandbox, OracleBodiesPassTheirTests) {
    std::vector<std::string> excluded;
    auto kept = filter_passing(bench(), 4, excluded);
    EXPECT_EQ(kept.size(), 10u);
    EXPECT_TRUE(excluded.empty());
}

TEST(Sandbox, ClassifiesFailAndError) {
    EXPECT_EQ(execute_tests(task("add"), "    raise Exception\n").outcome, Outcome::Fail);
    EXPECT_EQ(execute_tests(task("add"), "    return a - b\n").outcome, Outcome::Fail);
    auto bad_cmd = task("add");
    bad_cmd.test_command = "definitely-not-a-command-xyz";
    EXPECT_EQ(execute_tests(bad_cmd, bad_cmd.instance.body).outcome, Outcome::Error);
}

TEST(Sandbox, LoopingBodyTimesOutNearTheLimit) {
    auto t = task("fib");
    t.timeout_s = 1.5;
    auto r = execute_tests(t, "    while True:\n        pass\n");
    EXPECT_EQ(r.outcome, Outcome::Timeout);
    EXPECT_NEAR(r.elapsed_s, t.timeout_s, 1.0);
}

TEST(Sandbox, SetupFailuresSkip) {
    auto missing = task("add");
    missing.workdir = "/nonexistent/intentfill";
    EXPECT_EQ(execute_tests(missing, "    return a + b\n").outcome, Outcome::Skip);
    auto renamed = task("add");
    renamed.instance.function_name = "no_such_function";
    auto r = execute_tests(renamed, "    return 0\n");
    EXPECT_EQ(r.outcome, Outcome::Skip);
    EXPECT_NE(r.detail.find("no_such_function"), std::string::npos);
}

TEST(Sandbox, LeavesNoResidue) {
    TempDir root;
    SandboxOptions opts;
    opts.temp_root = root.path;
    const auto& t = task("add");
    auto before = tree_digest(t.workdir);
    std::string body =
        "    with open('canary.txt', 'w') as f:\n"
        "        f.write('x')\n"
        "    with open('mathops.py', 'a') as f:\n"
        "        f.write('# touched')\n"
        "    return a + b\n";
    EXPECT_EQ(execute_tests(t, body, opts).outcome, Outcome::Pass);
    auto looping = t;
    looping.timeout_s = 1.0;
    EXPECT_EQ(execute_tests(looping, "    open('spin.txt', 'w').write('y')\n    while True:\n        pass\n", opts).outcome,
              Outcome::Timeout);
    EXPECT_EQ(tree_digest(t.workdir), before);
    EXPECT_TRUE(fs::is_empty(root.path));
}

TEST(Pass1, Counting) {
    using O = Outcome;
    auto p = pass_at_1({O::Pass, O::Fail, O::Timeout, O::Error, O::Skip, O::Pass});
    EXPECT_EQ(p.passed, 2);
    EXPECT_EQ(p.counted, 5);
    EXPECT_EQ(p.skipped, 1);
    EXPECT_DOUBLE_EQ(*p.value, 0.4);
    EXPECT_DOUBLE_EQ(*pass_at_1({O::Pass, O::Pass}).value, 1.0);
    auto none = pass_at_1({O::Skip, O::Skip});
    EXPECT_FALSE(none.value.has_value());
    EXPECT_EQ(none.skipped, 2);
}

TEST(Pass1, PlantedBenchmarkScoresPointThree) {
    // 3 correct, 4 wrong, 2 looping, 1 syntax error.
    std::map<std::string, std::string> planted = {
        {"add", task("add").instance.body},
        {"gcd", task("gcd").instance.body},
        {"fib", task("fib").instance.body},
        {"clamp", "    return x\n"},
        {"mean", "    return sum(values) / len(values)\n"},
        {"reverse_words", "    return s\n"},
        {"count_vowels", "    raise Exception\n"},
        {"is_prime", "    while True:\n        pass\n"},
        {"flatten", "    while True:\n        pass\n"},
        {"dedupe", "    return [\n"},
    };
    std::vector<Outcome> outcomes(bench().size());
    std::vector<double> elapsed(bench().size());
    parallel_for(bench().size(), 5, [&](std::size_t i) {
        auto r = execute_tests(bench()[i], planted.at(bench()[i].instance.function_name));
        outcomes[i] = r.outcome;
        elapsed[i] = r.elapsed_s;
    });
    EXPECT_DOUBLE_EQ(*pass_at_1(outcomes).value, 0.3);
    for (std::size_t i = 0; i < bench().size(); ++i) {
        const auto& name = bench()[i].instance.function_name;
        if (name == "is_prime" || name == "flatten") {
            EXPECT_EQ(outcomes[i], Outcome::Timeout) << name;
            EXPECT_NEAR(elapsed[i], bench()[i].timeout_s, 1.0) << name;
        }
    }
}

// ---- report --------------------------------------------------------------

namespace {

interaction::Embedder letters() {
    return [](const std::string& s) { return gateway::letter_frequency(s); };
}

completion::Session fake_session(const BenchmarkInstance& b, completion::Mode mode, completion::Policy policy,
                                 std::string code, std::string backend, double seconds, int tokens) {
    completion::Session s;
    s.id = b.instance.id + "/" + std::string(completion::to_string(mode)) + "/" +
           std::string(completion::to_string(policy));
    s.instance = b.instance;
    s.mode = mode;
    s.policy = policy;
    s.docstring = mode == completion::Mode::Oracle ? b.oracle_docstring : "Returns the result.";
    s.final_code = std::move(code);
    if (mode == completion::Mode::Plugin) s.events.push_back({1, "intents_generated", "", {}, "small", ""});
    s.events.push_back({3, "code_generated", "", {}, backend, ""});
    s.timings.code_s = seconds;
    s.gen_tokens = tokens;
    s.status = completion::Status::Completed;
    return s;
}

}  // namespace

TEST(Report, VariantAndModelLabels) {
    using completion::Mode;
    using completion::Policy;
    const auto& b = task("add");
    EXPECT_EQ(variant_label(fake_session(b, Mode::Direct, Policy::None, "", "m", 0, 0)), "direct");
    EXPECT_EQ(variant_label(fake_session(b, Mode::Intent, Policy::None, "", "m", 0, 0)), "intent");
    EXPECT_EQ(variant_label(fake_session(b, Mode::Reason, Policy::None, "", "m", 0, 0)), "reason");
    EXPECT_EQ(variant_label(fake_session(b, Mode::Reason, Policy::Both, "", "m", 0, 0)), "+both");
    EXPECT_EQ(variant_label(fake_session(b, Mode::Oracle, Policy::None, "", "m", 0, 0)), "oracle");
    EXPECT_EQ(variant_label(fake_session(b, Mode::Plugin, Policy::Select, "", "m", 0, 0)), "plugin:small+select");
    EXPECT_EQ(model_label(fake_session(b, Mode::Plugin, Policy::None, "", "big", 0, 0)), "big");
    EXPECT_LT(variant_order("reason"), variant_order("+select"));
    EXPECT_LT(variant_order("+both"), variant_order("oracle"));
}

TEST(Report, IntentSimilarity) {
    EXPECT_NEAR(intent_similarity("ab", "cd", letters()), 0.0, 1e-9);
    EXPECT_NEAR(intent_similarity("Return the sum", "Return the sum", letters()), 100.0, 1e-4);
}

TEST(Report, EfficiencyStats) {
    using completion::Mode;
    using completion::Policy;
    std::vector<completion::Session> s = {fake_session(task("add"), Mode::Reason, Policy::None, "", "m", 0.2, 100),
                                          fake_session(task("gcd"), Mode::Reason, Policy::None, "", "m", 0.6, 300)};
    auto e = efficiency_stats(s);
    EXPECT_EQ(e.n, 2u);
    EXPECT_DOUBLE_EQ(e.gen_tokens, 200.0);
    EXPECT_DOUBLE_EQ(e.latency_s, 0.4);
    EXPECT_DOUBLE_EQ(e.throughput, 2.5);
    EXPECT_NEAR(e.latency_s * e.throughput, 1.0, 1e-12);
}

TEST(Report, AggregatesSurviveRoundTripAndRecompute) {
    using completion::Mode;
    using completion::Policy;
    std::vector<completion::Session> sessions;
    int k = 0;
    for (const auto& b : bench()) {
        ++k;
        std::string wrong = "    return None\n";
        sessions.push_back(fake_session(b, Mode::Direct, Policy::None, k % 3 ? wrong : b.instance.body, "m", 0.1 * k,
                                        10 * k));
        sessions.push_back(fake_session(b, Mode::Reason, Policy::Select, k % 2 ? wrong : b.instance.body, "m",
                                        0.05 * k, 7 * k));
        sessions.push_back(fake_session(b, Mode::Oracle, Policy::None, b.instance.body, "m", 0.3, 50));
    }
    sessions.back().final_code.reset();
    sessions.back().status = completion::Status::Failed;

    EvalOptions opts;
    opts.workers = 6;
    opts.embedder = letters();
    auto report = evaluate(sessions, bench(), opts);
    ASSERT_EQ(report.instances.size(), 30u);
    ASSERT_EQ(report.aggregates.size(), 3u);
    EXPECT_EQ(report.aggregates[0].variant, "direct");
    EXPECT_EQ(report.aggregates[1].variant, "+select");
    EXPECT_EQ(report.aggregates[2].variant, "oracle");
    EXPECT_DOUBLE_EQ(*report.aggregates[2].pass1.value, 0.9);  // the failed session counts as a miss
    EXPECT_NEAR(*report.aggregates[2].intent_sim, 100.0, 1e-4);

    TempDir tmp;
    write_report_jsonl(tmp.path / "report.jsonl", report);
    auto back = read_report_jsonl(tmp.path / "report.jsonl");
    EXPECT_EQ(back.meta.at("edit_similarity_formula"), std::string(kEditSimilarityFormula));
    EXPECT_EQ(back.meta.at("schema_version"), kSchemaVersion);
    ASSERT_EQ(back.aggregates.size(), report.aggregates.size());
    EXPECT_EQ(back.aggregates, report.aggregates);
    EXPECT_EQ(recompute_aggregates(back.instances), back.aggregates);

    // Independent mean over the reloaded instances.
    double sum = 0;
    int n = 0;
    for (const auto& r : back.instances) {
        if (r.variant == "direct") {
            sum += *r.edit_sim;
            ++n;
        }
    }
    EXPECT_EQ(*back.aggregates[0].edit_sim, sum / n);

    std::string md = render_markdown(back);
    EXPECT_NE(md.find("| Variant | C-BLEU | ES | P@1 | Sim | N |"), std::string::npos);
    EXPECT_NE(md.find("| Model | Variant | Gen_Tokens | Latency (s/func) | Throughput (func/s) |"), std::string::npos);
}

TEST(Report, UnknownInstanceIsAnError) {
    auto s = fake_session(task("add"), completion::Mode::Direct, completion::Policy::None, "", "m", 0, 0);
    s.instance.id = "ghost";
    EXPECT_THROW(evaluate({s}, bench(), EvalOptions{}), Error);
}
