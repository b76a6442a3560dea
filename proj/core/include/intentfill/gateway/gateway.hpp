#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "intentfill/error.hpp"
#include "intentfill/stage.hpp"

namespace intentfill::gateway {

struct SamplingParams {
    double top_p = 1.0;
    double temperature = 0.0;
    int n = 1;
    int max_tokens = 512;
    std::vector<std::string> stop;

    /// Throws InvalidRequest when a field is out of range.
    void validate() const;
    bool operator==(const SamplingParams&) const = default;
};

void to_json(nlohmann::json& j, const SamplingParams& p);
void from_json(const nlohmann::json& j, SamplingParams& p);

/// Intent: top_p 0.95, temperature 0.4, n 3, stop </docstring>.
/// Code: top_p 1.0, temperature 0.2, n 1, stop </code>.
SamplingParams default_params(Stage stage);

/// Applies a JSON object of overrides (any SamplingParams field). The key
/// "greedy": true forces temperature 0, top_p 1 and n 1.
SamplingParams with_overrides(SamplingParams p, const nlohmann::json& overrides);

struct Generation {
    std::string text;
    std::optional<double> mean_logprob;
    double latency_s = 0.0;
    int prompt_tokens = 0;
    int completion_tokens = 0;
    bool stopped = false;  // ended on a stop sequence or end of text, not the token limit
};

void to_json(nlohmann::json& j, const Generation& g);
void from_json(const nlohmann::json& j, Generation& g);

struct BackendConfig {
    std::string name;
    std::string kind = "openai";  // "openai" or "mock"
    std::string base_url;         // e.g. http://127.0.0.1:8000/v1
    std::string model_id;
    std::string auth_secret_ref;  // name of an environment variable, optionally "env:"-prefixed
    double timeout_s = 60.0;
    int max_retries = 3;
    int max_parallel = 4;
    double backoff_s = 0.5;      // first retry delay; doubles per attempt
    int context_window = 8192;   // tokens
    std::string embedding_model;
    std::filesystem::path mock_script;  // kind "mock": optional script file

    void validate() const;
};

void to_json(nlohmann::json& j, const BackendConfig& c);
void from_json(const nlohmann::json& j, BackendConfig& c);

class BackendError : public Error {
public:
    BackendError(const std::string& what, bool retryable, int status = 0)
        : Error(what), retryable_(retryable), status_(status) {}
    bool retryable() const noexcept { return retryable_; }
    int status() const noexcept { return status_; }

private:
    bool retryable_;
    int status_;
};

class Timeout : public BackendError {
public:
    explicit Timeout(const std::string& what) : BackendError(what, true) {}
};

class InvalidRequest : public BackendError {
public:
    explicit InvalidRequest(const std::string& what) : BackendError(what, false, 400) {}
};

/// Cuts `text` before the earliest occurrence of any stop sequence.
std::string cut_at_stop(std::string_view text, const std::vector<std::string>& stop, bool* stopped = nullptr);

/// Thread-safe client shell: bounds in-flight requests by max_parallel,
/// retries retryable failures with exponential backoff, applies stop
/// sequences and times each wire call.
class Backend {
public:
    explicit Backend(BackendConfig cfg);
    virtual ~Backend() = default;
    Backend(const Backend&) = delete;
    Backend& operator=(const Backend&) = delete;

    const BackendConfig& config() const noexcept { return cfg_; }
    const std::string& name() const noexcept { return cfg_.name; }

    std::vector<Generation> complete(const std::string& prompt, const SamplingParams& params);
    std::vector<float> embed(const std::string& text);

    std::size_t peak_in_flight() const noexcept { return peak_in_flight_.load(); }
    std::size_t retry_count() const noexcept { return retries_.load(); }

protected:
    virtual std::vector<Generation> wire_complete(const std::string& prompt, const SamplingParams& params) = 0;
    virtual std::vector<float> wire_embed(const std::string& text) = 0;

private:
    template <typename Fn>
    auto call(Fn&& fn) -> decltype(fn());

    BackendConfig cfg_;
    std::counting_semaphore<1024> slots_;
    std::atomic<std::size_t> in_flight_{0};
    std::atomic<std::size_t> peak_in_flight_{0};
    std::atomic<std::size_t> retries_{0};
};

// ---- mock -----------------------------------------------------------------

struct MockResponse {
    std::string text;
    std::optional<double> logprob;
    std::string error;  // "", "timeout", "server" (retryable) or "invalid"
};

struct MockRule {
    std::string contains;  // substring of the prompt
    std::vector<MockResponse> responses;
};

/// Resolution order per completion request: the next unconsumed sequence
/// entry, the response set keyed by request_key, the first matching rule,
/// then (if enabled) a synthetic well-formed answer derived from the prompt.
struct MockScript {
    double delay_s = 0.0;  // slept inside every wire call
    std::vector<std::vector<MockResponse>> sequence;
    std::map<std::string, std::vector<MockResponse>> by_hash;
    std::vector<MockRule> rules;
    bool synthetic = true;
};

void from_json(const nlohmann::json& j, MockScript& s);
MockScript load_mock_script(const std::filesystem::path& path);

/// 26-dimensional a-z letter counts (case-insensitive).
std::vector<float> letter_frequency(std::string_view text);

class MockBackend : public Backend {
public:
    struct Request {
        std::string kind;  // "complete" or "embed"
        std::string prompt;
        SamplingParams params;
    };

    MockBackend(BackendConfig cfg, MockScript script);

    /// Stable hash of (prompt, params) used for by_hash lookups.
    static std::string request_key(std::string_view prompt, const SamplingParams& params);

    std::vector<Request> requests() const;
    void clear_requests();

protected:
    std::vector<Generation> wire_complete(const std::string& prompt, const SamplingParams& params) override;
    std::vector<float> wire_embed(const std::string& text) override;

private:
    std::vector<MockResponse> resolve(const std::string& prompt, const SamplingParams& params);

    MockScript script_;
    mutable std::mutex mu_;
    std::size_t next_sequence_ = 0;
    std::vector<Request> log_;
};

/// Deterministic well-formed answer for prompts built by this library:
/// reasoning + docstring after "<reasoning>", docstring + code after
/// "<docstring>", code after "<code>", and annotation answers.
std::string synthetic_response(std::string_view prompt, int index);

// ---- OpenAI-compatible HTTP -----------------------------------------------

/// POST {base_url}/completions and {base_url}/embeddings. Plain HTTP only.
class OpenAIBackend : public Backend {
public:
    explicit OpenAIBackend(BackendConfig cfg);

protected:
    std::vector<Generation> wire_complete(const std::string& prompt, const SamplingParams& params) override;
    std::vector<float> wire_embed(const std::string& text) override;

private:
    nlohmann::json post(const std::string& endpoint, const nlohmann::json& body);

    std::string host_;
    int port_ = 80;
    std::string path_prefix_;
};

// ---- configuration ----------------------------------------------------------

std::shared_ptr<Backend> make_backend(const BackendConfig& cfg);

/// Named backends from {"backends": {"name": {...}}}. Relative mock script
/// paths resolve against `base_dir`.
class Registry {
public:
    Registry() = default;
    static Registry from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
    static Registry load(const std::filesystem::path& path);

    void add(std::shared_ptr<Backend> backend);
    std::shared_ptr<Backend> get(std::string_view name) const;
    bool contains(std::string_view name) const;
    std::vector<std::string> names() const;

private:
    std::map<std::string, std::shared_ptr<Backend>, std::less<>> backends_;
};

}  // namespace intentfill::gateway
