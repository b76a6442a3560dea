#include <cmath>
#include <set>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "intentfill/annotation/annotation_engine.hpp"
#include "intentfill/intent/prompts.hpp"
#include "intentfill/jsonl.hpp"
#include "intentfill/text.hpp"

using namespace intentfill;
using namespace intentfill::annotation;
using nlohmann::json;

namespace {

std::vector<AnnotatedInstance> load_seeds() {
    return read_records<AnnotatedInstance>(std::string(INTENTFILL_FIXTURES) + "/seeds.jsonl",
                                           [](const json& j) { return j.get<AnnotatedInstance>(); });
}

miner::FunctionInstance target() {
    miner::FunctionInstance f;
    f.id = "repo/pkg/mod.py::scale";
    f.file_name = "pkg/mod.py";
    f.preceding_code = "FACTOR = 3\n\n\n";
    f.signature = "def scale(values, factor=FACTOR):\n";
    f.body = "    return [v * factor for v in values]\n";
    f.function_name = "scale";
    f.arg_names = {"values", "factor"};
    return f;
}

gateway::BackendConfig cfg() {
    gateway::BackendConfig c;
    c.name = "annotator";
    c.kind = "mock";
    c.model_id = "mock-annotator";
    c.backoff_s = 0.001;
    return c;
}

const std::string kWellFormed =
    "<reasoning>\nA.1: scale suggests multiplication.\nA.2: values is a list, factor a number.\nA.3: Scales "
    "numbers.\nB.1: FACTOR is a constant.\nB.2: FACTOR is the default.\nB.3: Nothing scales yet.\nC.1: A "
    "comprehension.\nC.2: No branches.\nC.3: Return every value times factor.\n</reasoning>\n<docstring>\nScale each "
    "value by a factor.\n\nArgs:\n    values (list[float]): numbers to scale.\n    factor (float): multiplier.\nReturns:\n"
    "    list[float]: the scaled numbers.\n</docstring>";

gateway::MockScript sequence(std::vector<std::string> texts) {
    gateway::MockScript s;
    for (auto& t : texts) s.sequence.push_back({gateway::MockResponse{t, std::nullopt, ""}});
    return s;
}

}  // namespace

TEST(Seeds, FixtureHasFifteenValidSeeds) {
    auto seeds = load_seeds();
    ASSERT_EQ(seeds.size(), 15u);
    for (const auto& s : seeds) {
        EXPECT_EQ(s.annotator, "human");
        EXPECT_EQ(s.docstring.args.size(), s.instance.arg_names.size()) << s.instance.id;
        std::vector<std::string> w;
        intent::parse_reasoning(intent::render_reasoning(s.trace), &w);
        EXPECT_TRUE(w.empty()) << s.instance.id << ": " << (w.empty() ? "" : w[0]);
    }
}

TEST(PickDemos, DeterministicAndDistinct) {
    auto seeds = load_seeds();
    for (std::uint64_t r = 0; r < 50; ++r) {
        auto a = pick_demo_indices(seeds.size(), 7, r);
        EXPECT_EQ(a, pick_demo_indices(seeds.size(), 7, r));
        EXPECT_NE(a[0], a[1]);
        EXPECT_LT(a[0], 15u);
        EXPECT_LT(a[1], 15u);
    }
    EXPECT_EQ(pick_demos(seeds, 7, 3), pick_demos(seeds, 7, 3));
}

TEST(PickDemos, TwoSeedsAlwaysBoth) {
    auto seeds = load_seeds();
    seeds.resize(2);
    for (std::uint64_t r = 0; r < 20; ++r) {
        auto [a, b] = pick_demo_indices(2, r, r * 31);
        EXPECT_EQ(std::set<std::size_t>({a, b}), (std::set<std::size_t>{0, 1}));
    }
}

TEST(PickDemos, TooFewSeeds) {
    auto seeds = load_seeds();
    seeds.resize(1);
    EXPECT_THROW(pick_demos(seeds, 0), TooFewSeeds);
}

TEST(PickDemos, SelectionFrequencyIsUniform) {
    // Each seed appears in a draw with probability 2/15; counts over 10k draws
    // must stay within three binomial standard deviations of the mean.
    constexpr int kDraws = 10000;
    constexpr double p = 2.0 / 15.0;
    const double mean = kDraws * p;
    const double sigma = std::sqrt(kDraws * p * (1 - p));
    std::vector<int> counts(15, 0);
    for (int r = 0; r < kDraws; ++r) {
        auto [a, b] = pick_demo_indices(15, 12345, static_cast<std::uint64_t>(r));
        ++counts[a];
        ++counts[b];
    }
    for (int c : counts) EXPECT_LE(std::abs(c - mean), 3 * sigma) << c;
}

TEST(TruncateDemo, SmallDemoUnchanged) {
    auto seed = load_seeds()[0];
    EXPECT_LT(text::estimate_tokens(intent::render_demo(seed)), 1000u);
    EXPECT_EQ(truncate_demo(seed, 4096), seed);
}

TEST(TruncateDemo, LongContextCutFromFront) {
    auto seed = load_seeds()[0];
    std::string ctx;
    for (int i = 0; ctx.size() < 20000; ++i) ctx += "value_" + std::to_string(i) + " = " + std::to_string(i) + "\n";
    seed.instance.preceding_code = ctx + seed.instance.preceding_code;
    ASSERT_GT(text::estimate_tokens(intent::render_demo(seed)), 4096u);
    auto out = truncate_demo(seed, 4096);
    EXPECT_LE(text::estimate_tokens(intent::render_demo(out)), 4096u);
    EXPECT_TRUE(seed.instance.preceding_code.ends_with(out.instance.preceding_code));
    EXPECT_EQ(out.instance.body, seed.instance.body);
    EXPECT_EQ(out.trace, seed.trace);
    EXPECT_EQ(out.docstring, seed.docstring);
    // Maximal: one more line would not fit.
    auto first_nl = seed.instance.preceding_code.size() - out.instance.preceding_code.size();
    auto prev_start = seed.instance.preceding_code.rfind('\n', first_nl - 2);
    auto bigger = out;
    bigger.instance.preceding_code = seed.instance.preceding_code.substr(prev_start == std::string::npos ? 0 : prev_start + 1);
    EXPECT_GT(text::estimate_tokens(intent::render_demo(bigger)), 4096u);
}

TEST(TruncateDemo, BodyTooLargeThrows) {
    auto seed = load_seeds()[0];
    seed.instance.body = std::string(200, 'x') + "\n";
    EXPECT_THROW(truncate_demo(seed, 10), DemoTooLarge);
}

TEST(TruncateDemo, CustomTokenCounter) {
    auto seed = load_seeds()[1];
    auto words = [](std::string_view s) { return text::split_words(s).size(); };
    auto n = words(intent::render_demo(seed));
    auto out = truncate_demo(seed, n - 1, words);
    EXPECT_LE(words(intent::render_demo(out)), n - 1);
}

TEST(Annotate, WellFormedResponse) {
    gateway::MockBackend backend(cfg(), sequence({kWellFormed}));
    auto inst = target();
    const auto before = inst;
    auto r = annotate(inst, load_seeds(), backend, AnnotateOptions{});
    EXPECT_EQ(inst, before);
    EXPECT_EQ(r.retries, 0);
    EXPECT_EQ(r.annotated.instance, inst);
    EXPECT_EQ(r.annotated.annotator, "mock-annotator");
    EXPECT_EQ(r.annotated.trace.step(8), "Return every value times factor.");
    EXPECT_EQ(r.annotated.docstring.args.size(), 2u);
    EXPECT_EQ(json(r.annotated).get<AnnotatedInstance>(), r.annotated);
    auto reqs = backend.requests();
    ASSERT_EQ(reqs.size(), 1u);
    EXPECT_NE(reqs[0].prompt.find(inst.body), std::string::npos);
    EXPECT_DOUBLE_EQ(reqs[0].params.temperature, 0.2);
}

TEST(Annotate, RetryOnceAfterMalformed) {
    gateway::MockBackend backend(cfg(), sequence({"I think it scales things.", kWellFormed}));
    auto r = annotate(target(), load_seeds(), backend, AnnotateOptions{});
    EXPECT_EQ(r.retries, 1);
    auto reqs = backend.requests();
    ASSERT_EQ(reqs.size(), 2u);
    EXPECT_NE(reqs[1].prompt.find("could not be parsed"), std::string::npos);
    EXPECT_TRUE(reqs[1].prompt.starts_with(reqs[0].prompt));
}

TEST(Annotate, RejectedAfterSecondFailure) {
    gateway::MockBackend backend(cfg(), sequence({"first bad", "<reasoning>\nA.1: only one\n</reasoning>"}));
    try {
        annotate(target(), load_seeds(), backend, AnnotateOptions{});
        FAIL();
    } catch (const AnnotationRejected& e) {
        EXPECT_EQ(e.instance_id(), target().id);
        EXPECT_EQ(e.raw_outputs(), (std::vector<std::string>{"first bad", "<reasoning>\nA.1: only one\n</reasoning>"}));
    }
}

TEST(Annotate, SyntheticMockAnnotatesWithDemos) {
    gateway::MockBackend backend(cfg(), {});
    auto seeds = load_seeds();
    AnnotateOptions opts;
    opts.rng_seed = 99;
    auto r = annotate(target(), seeds, backend, opts, 4);
    auto [a, b] = pick_demo_indices(seeds.size(), 99, 4);
    const auto prompt = backend.requests()[0].prompt;
    EXPECT_NE(prompt.find(seeds[a].instance.body), std::string::npos);
    EXPECT_NE(prompt.find(seeds[b].instance.body), std::string::npos);
    EXPECT_LT(prompt.find(seeds[a].instance.body), prompt.find(seeds[b].instance.body));
    EXPECT_EQ(r.retries, 0);
}

TEST(AnnotateAll, StatsSumAndOrder) {
    gateway::MockScript s;
    s.rules.push_back({"def bad_one", {gateway::MockResponse{"garbage", std::nullopt, ""}}});
    s.rules.push_back({"def broken", {gateway::MockResponse{"", std::nullopt, "invalid"}}});
    gateway::MockBackend backend(cfg(), s);
    std::vector<miner::FunctionInstance> insts;
    for (int i = 0; i < 12; ++i) {
        auto t = target();
        t.id = "inst-" + std::to_string(i);
        if (i == 3) t.signature = "def bad_one(x):\n";
        if (i == 7) t.signature = "def broken(x):\n";
        insts.push_back(t);
    }
    AnnotateOptions opts;
    opts.workers = 4;
    auto run = annotate_all(insts, load_seeds(), backend, opts);
    EXPECT_EQ(run.stats.input, 12u);
    EXPECT_EQ(run.stats.annotated + run.stats.rejected, run.stats.input);
    EXPECT_EQ(run.stats.rejected, 2u);
    EXPECT_EQ(run.stats.backend_errors, 1u);
    EXPECT_EQ(run.stats.retried, 1u);
    ASSERT_EQ(run.rejected.size(), 2u);
    EXPECT_EQ(run.rejected[0].instance_id, "inst-3");
    EXPECT_EQ(run.rejected[0].raw_outputs.size(), 2u);
    EXPECT_EQ(run.rejected[1].instance_id, "inst-7");
    for (std::size_t i = 1; i < run.annotated.size(); ++i)
        EXPECT_LT(std::stoi(run.annotated[i - 1].instance.id.substr(5)), std::stoi(run.annotated[i].instance.id.substr(5)));

    // Same inputs, different worker count: identical output.
    gateway::MockBackend again(cfg(), s);
    opts.workers = 1;
    auto run1 = annotate_all(insts, load_seeds(), again, opts);
    EXPECT_EQ(run1.annotated, run.annotated);
}
