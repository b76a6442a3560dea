#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "intentfill/error.hpp"
#include "intentfill/miner/corpus_miner.hpp"

namespace intentfill::eval {

struct BenchmarkInstance {
    miner::FunctionInstance instance;  // file_name is relative to workdir
    std::string oracle_docstring;
    std::string test_command;
    std::filesystem::path workdir;
    double timeout_s = 30.0;
};

void to_json(nlohmann::json& j, const BenchmarkInstance& b);
/// Relative workdirs resolve against `base` (the benchmark file's directory).
BenchmarkInstance benchmark_from_json(const nlohmann::json& j, const std::filesystem::path& base = {});

/// Maps a DevEval-style record (namespace, signature, solution/body,
/// requirement, test command, completion_path) to a BenchmarkInstance.
BenchmarkInstance from_deveval(const nlohmann::json& j, const std::filesystem::path& base = {});
/// Maps a ComplexCodeEval-style record (function_name, function_signature,
/// function_body, docstring, file_path, test_cmd, repo_path).
BenchmarkInstance from_complexcodeeval(const nlohmann::json& j, const std::filesystem::path& base = {});

/// Reads JSONL in any of the three shapes (auto-detected per record).
std::vector<BenchmarkInstance> load_benchmark(const std::filesystem::path& path);

enum class Outcome { Pass, Fail, Timeout, Error, Skip };

std::string_view to_string(Outcome o);
Outcome parse_outcome(std::string_view s);

class SandboxSetupError : public Error {
public:
    using Error::Error;
};

struct ExecResult {
    Outcome outcome = Outcome::Error;
    int exit_code = -1;   // -1 when killed or not run
    int signal = 0;
    double elapsed_s = 0;
    std::string output_tail;  // last bytes of combined stdout/stderr
    std::string detail;       // setup error or classification note
};

struct SandboxOptions {
    std::filesystem::path temp_root;  // default: the system temp directory
    bool isolate_network = true;      // best effort; needs CAP_SYS_ADMIN or user namespaces
    std::size_t output_limit = 4096;
    unsigned long memory_limit_mb = 2048;
};

/// Returns `source` with the body of top-level function `name` replaced.
/// Throws SandboxSetupError when the function is absent or the file does
/// not parse.
std::string splice_body(std::string_view source, std::string_view name, std::string_view body);

/// Copies the workdir to a fresh temp dir, splices `body` into the target
/// file, runs `/bin/sh -c test_command` there in its own process group with
/// the instance timeout, and removes the copy. Setup failures yield Skip.
ExecResult execute_tests(const BenchmarkInstance& inst, std::string_view body, const SandboxOptions& opts = {});

/// Keeps instances whose oracle body passes its own tests; the rest are
/// returned in `excluded` as "id: outcome".
std::vector<BenchmarkInstance> filter_passing(const std::vector<BenchmarkInstance>& bench, std::size_t workers,
                                              std::vector<std::string>& excluded, const SandboxOptions& opts = {});

}  // namespace intentfill::eval
