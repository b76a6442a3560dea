#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "intentfill/completion/session.hpp"
#include "intentfill/eval/metrics.hpp"
#include "intentfill/eval/sandbox.hpp"
#include "intentfill/interaction/interaction.hpp"

namespace intentfill::eval {

/// Table row label: direct, intent, reason, +select, +edit, +both, +human,
/// oracle; plug-in runs become "plugin:<intent model>" with the same suffixes.
std::string variant_label(const completion::Session& s);
/// Backend that produced the code (last stage-3 event), or "unknown".
std::string model_label(const completion::Session& s);

/// Position of a variant in report tables; unknown labels sort last.
int variant_order(const std::string& variant);

struct Pass1 {
    std::optional<double> value;  // nullopt when every instance was skipped
    int passed = 0;
    int counted = 0;
    int skipped = 0;
};

/// Timeout and error count as failures; skips leave the denominator.
Pass1 pass_at_1(const std::vector<Outcome>& outcomes);

/// 100 * cosine of the two embeddings.
double intent_similarity(const std::string& generated, const std::string& oracle, const interaction::Embedder& embed);

struct Efficiency {
    std::size_t n = 0;
    double gen_tokens = 0;  // mean per session
    double latency_s = 0;   // mean wall clock per session
    double throughput = 0;  // sessions / summed wall clock
};

Efficiency efficiency_stats(const std::vector<completion::Session>& sessions);

struct InstanceResult {
    std::string session_id;
    std::string instance_id;
    std::string model;
    std::string variant;
    std::string status;
    std::optional<CodeBleuResult> codebleu;
    std::optional<double> edit_sim;
    std::optional<Outcome> pass1;
    std::optional<double> intent_sim;
    double total_s = 0;
    int gen_tokens = 0;
    std::string note;
};

struct Aggregate {
    std::string model;
    std::string variant;
    std::size_t n = 0;
    std::optional<double> codebleu;
    std::optional<double> edit_sim;
    Pass1 pass1;
    std::optional<double> intent_sim;
    Efficiency efficiency;

    bool operator==(const Aggregate& o) const;
};

struct EvalReport {
    nlohmann::json meta;  // formula labels, weights, manifest
    std::vector<InstanceResult> instances;
    std::vector<Aggregate> aggregates;
};

void to_json(nlohmann::json& j, const InstanceResult& r);
void from_json(const nlohmann::json& j, InstanceResult& r);
void to_json(nlohmann::json& j, const Aggregate& a);
void from_json(const nlohmann::json& j, Aggregate& a);

struct EvalOptions {
    bool codebleu = true;
    bool edit_sim = true;
    bool pass1 = true;
    bool intent_sim = true;
    CodeBleuWeights weights;
    std::size_t workers = 1;
    SandboxOptions sandbox;
    interaction::Embedder embedder;  // intent similarity is skipped when unset
};

/// Scores each session against the benchmark instance with the same id.
/// Sessions without a final body score against an empty hypothesis and fail
/// pass@1. Throws Error for sessions whose instance is not in `bench`.
EvalReport evaluate(const std::vector<completion::Session>& sessions, const std::vector<BenchmarkInstance>& bench,
                    const EvalOptions& opts);

/// Groups per (model, variant) in table order and averages the per-instance
/// values that are present.
std::vector<Aggregate> recompute_aggregates(const std::vector<InstanceResult>& instances);

/// meta record, then instance records, then aggregate records.
void write_report_jsonl(const std::filesystem::path& path, const EvalReport& report);
EvalReport read_report_jsonl(const std::filesystem::path& path);

/// Quality table per model (C-BLEU, ES, P@1, Sim) and one efficiency table.
std::string render_markdown(const EvalReport& report);

}  // namespace intentfill::eval
