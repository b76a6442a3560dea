#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>

#include "intentfill/eval/metrics.hpp"
#include "intentfill/jsonl.hpp"
#include "intentfill/miner/corpus_miner.hpp"
#include "intentfill/python/syntax_tree.hpp"
#include "intentfill/text.hpp"

using namespace intentfill;
namespace fs = std::filesystem;

namespace {

std::string corpus_text() {
    std::string all;
    for (const auto& e : fs::recursive_directory_iterator(INTENTFILL_CORPUS)) {
        if (e.path().extension() == ".py") all += read_file(e.path()) + "\n";
    }
    return all;
}

std::vector<std::string> corpus_bodies() {
    std::vector<std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(INTENTFILL_CORPUS)) {
        if (e.path().extension() != ".py") continue;
        const auto src = read_file(e.path());
        for (const auto& fn : miner::extract_functions(py::parse_module(src))) {
            out.push_back(text::dedent(src.substr(fn.body_begin, fn.body_end - fn.body_begin)));
        }
    }
    return out;
}

void BM_ParseModule(benchmark::State& state) {
    const auto src = corpus_text();
    for (auto _ : state) benchmark::DoNotOptimize(py::parse_module(src));
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * src.size()));
}
BENCHMARK(BM_ParseModule);

void BM_ExtractFunctions(benchmark::State& state) {
    const auto tree = py::parse_module(corpus_text());
    for (auto _ : state) benchmark::DoNotOptimize(miner::extract_functions(tree));
}
BENCHMARK(BM_ExtractFunctions);

void BM_CodeBleu(benchmark::State& state) {
    const auto bodies = corpus_bodies();
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& a = bodies[i % bodies.size()];
        const auto& b = bodies[(i * 7 + 3) % bodies.size()];
        benchmark::DoNotOptimize(eval::codebleu(a, b));
        ++i;
    }
}
BENCHMARK(BM_CodeBleu);

void BM_EditSimilarity(benchmark::State& state) {
    std::mt19937_64 rng(1);
    auto make = [&] {
        std::string s(static_cast<std::size_t>(state.range(0)), ' ');
        for (auto& c : s) c = static_cast<char>('a' + rng() % 26);
        return s;
    };
    const auto a = make(), b = make();
    for (auto _ : state) benchmark::DoNotOptimize(eval::edit_similarity(a, b));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EditSimilarity)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oNSquared);

}  // namespace

BENCHMARK_MAIN();
