#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "intentfill/python/syntax_tree.hpp"

namespace intentfill::miner {

struct SourceFile {
    std::string repo_id;
    std::string path;  // relative to the repository root
    std::string topic;
    std::string created_at;  // ISO date, may be empty
    std::string text;
};

/// A top-level function located in a file. Offsets are byte offsets into
/// the file text: [header_begin, body_begin) is the signature and
/// [body_begin, body_end) the body.
struct RawFunction {
    std::string name;
    std::vector<std::string> arg_names;
    std::size_t header_begin = 0;
    std::size_t body_begin = 0;
    std::size_t body_end = 0;
    int def_line = 0;
};

struct FunctionInstance {
    std::string id;
    std::string file_name;
    std::string preceding_code;
    std::string signature;
    std::string body;
    std::string function_name;
    std::vector<std::string> arg_names;
    int body_line_count = 0;
    int context_line_count = 0;
    int complexity = 1;
    int quality_score = 0;
    std::string topic;
    std::optional<std::string> extra_context;

    bool operator==(const FunctionInstance&) const = default;
};

void to_json(nlohmann::json& j, const FunctionInstance& f);
void from_json(const nlohmann::json& j, FunctionInstance& f);

struct ContextSplit {
    std::string preceding_code;
    std::string signature;
    std::string body;
};

struct FilterConfig {
    int max_body_lines_exclusive = 80;
    int max_complexity = 25;
    int min_context_lines = 20;
    int max_context_lines = 800;
    int min_quality = 2;
    int generated_header_lines = 5;
    std::vector<std::string> sensitive_keywords{"password", "token", "secret", "api_key", "private_key"};
    std::vector<std::string> generated_markers{"auto-generated", "do not edit", "generated by"};
};

void to_json(nlohmann::json& j, const FilterConfig& c);
void from_json(const nlohmann::json& j, FilterConfig& c);

struct RuleVerdict {
    bool pass = true;
    std::string detail;

    bool operator==(const RuleVerdict&) const = default;
};

// Rule names as they appear in FilterReport::verdicts.
inline constexpr std::string_view kRuleLength = "length";
inline constexpr std::string_view kRuleTrivialName = "trivial-name";
inline constexpr std::string_view kRulePlaceholder = "placeholder";
inline constexpr std::string_view kRuleComplexity = "complexity";
inline constexpr std::string_view kRuleContextSize = "context-size";
inline constexpr std::string_view kRuleSensitive = "sensitive";
inline constexpr std::string_view kRuleGenerated = "auto-generated";
inline constexpr std::string_view kRuleQuality = "quality";

struct FilterReport {
    std::string instance_id;
    std::map<std::string, RuleVerdict> verdicts;
    bool accepted = false;

    std::vector<std::string> failed_rules() const;
    bool operator==(const FilterReport&) const = default;
};

void to_json(nlohmann::json& j, const FilterReport& r);
void from_json(const nlohmann::json& j, FilterReport& r);

/// Every top-level `def` (plain or decorated, sync or async) in file order.
/// Methods and nested functions are excluded. Throws py::ParseError.
std::vector<RawFunction> extract_functions(const SourceFile& file);
std::vector<RawFunction> extract_functions(const py::SyntaxTree& tree);

ContextSplit split_context(const SourceFile& file, const RawFunction& fn);

/// Decision points under `n`: if, elif, for, while, except, assert, each
/// boolean and/or, conditional expressions and comprehension if-clauses.
int decision_points(const py::Node& n);

/// 1 + decision points of a function body. Throws py::ParseError.
int cyclomatic_complexity(std::string_view body);

struct QualityIndicators {
    bool control_flow = false;
    bool helper_call = false;
    bool valued_return = false;

    int score() const { return int(control_flow) + int(helper_call) + int(valued_return); }
};

/// `body_root` must belong to `tree`; helper calls are calls whose callee is
/// a bare identifier in `helper_names`.
QualityIndicators quality_indicators(const py::SyntaxTree& tree, const py::Node& body_root,
                                     const std::set<std::string>& helper_names);

/// Quality score (0-3) of `fn`; helpers are functions and classes defined
/// before it in the same file.
int quality_score(const SourceFile& file, const RawFunction& fn);
int quality_score(std::string_view preceding_code, std::string_view body);

/// Body consisting only of pass, `...`, docstrings or raise NotImplementedError.
bool is_placeholder_body(std::string_view body);

bool is_trivial_name(std::string_view name);

/// Evaluates every rule (no short-circuit). Pure in its inputs.
FilterReport apply_filters(const FunctionInstance& candidate, const FilterConfig& cfg);

/// Topic-stratified round-robin draw; per-topic counts differ by at most one
/// until a bucket runs dry. Deterministic in `seed`. If n exceeds the pool,
/// returns everything and logs a warning.
std::vector<FunctionInstance> stratified_sample(const std::vector<FunctionInstance>& instances, std::size_t n,
                                                std::uint64_t seed);

/// Builds the instance for `fn` (all derived fields populated).
FunctionInstance make_instance(const SourceFile& file, const RawFunction& fn, const py::SyntaxTree& tree);

// ---- corpus-level driver ------------------------------------------------

struct RepoInfo {
    std::string repo_id;
    std::string topic;
    std::string created_at;
};

struct MiningOptions {
    FilterConfig filters;
    std::optional<std::size_t> sample_size;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    std::optional<std::string> created_before;  // ISO date; files from later repos are skipped
};

struct MiningStats {
    std::size_t files_seen = 0;
    std::size_t files_parsed = 0;
    std::size_t parse_errors = 0;
    std::size_t functions_extracted = 0;
    std::size_t accepted = 0;
    std::size_t sampled = 0;
    std::map<std::string, std::size_t> rejections_by_rule;
    std::vector<std::string> skipped;  // "path: reason"
};

void to_json(nlohmann::json& j, const MiningStats& s);

struct MiningResult {
    std::vector<FunctionInstance> instances;
    std::vector<FilterReport> reports;
    MiningStats stats;
};

/// Reads the optional manifest (JSON array or {"repos": [...]}) of
/// {repo_id, topic, created_at} entries.
std::map<std::string, RepoInfo> load_repo_manifest(const std::filesystem::path& path);

/// Collects *.py files. Each top-level directory of `root` is a repository;
/// loose files directly under `root` belong to a repository named after it.
std::vector<SourceFile> load_corpus(const std::filesystem::path& root, const std::map<std::string, RepoInfo>& repos);

/// Mines files in parallel; output order is (repo_id, path, offset).
MiningResult mine(const std::vector<SourceFile>& files, const MiningOptions& options);

}  // namespace intentfill::miner
