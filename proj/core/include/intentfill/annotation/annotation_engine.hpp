#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "intentfill/annotation/annotated_instance.hpp"
#include "intentfill/error.hpp"
#include "intentfill/gateway/gateway.hpp"

namespace intentfill::annotation {

class TooFewSeeds : public Error {
public:
    explicit TooFewSeeds(std::size_t have)
        : Error("need at least 2 seed annotations, have " + std::to_string(have)) {}
};

class DemoTooLarge : public Error {
public:
    using Error::Error;
};

class AnnotationRejected : public Error {
public:
    AnnotationRejected(std::string instance_id, std::string reason, std::vector<std::string> raw_outputs)
        : Error("annotation of " + instance_id + " rejected: " + reason),
          instance_id_(std::move(instance_id)),
          reason_(std::move(reason)),
          raw_outputs_(std::move(raw_outputs)) {}

    const std::string& instance_id() const noexcept { return instance_id_; }
    const std::string& reason() const noexcept { return reason_; }
    const std::vector<std::string>& raw_outputs() const noexcept { return raw_outputs_; }

private:
    std::string instance_id_;
    std::string reason_;
    std::vector<std::string> raw_outputs_;
};

using TokenCounter = std::function<std::size_t(std::string_view)>;

/// Two distinct seeds drawn uniformly; the draw depends only on
/// (rng_seed, request_index).
std::array<std::size_t, 2> pick_demo_indices(std::size_t seed_count, std::uint64_t rng_seed,
                                             std::uint64_t request_index);
std::array<AnnotatedInstance, 2> pick_demos(const std::vector<AnnotatedInstance>& seeds, std::uint64_t rng_seed,
                                            std::uint64_t request_index = 0);

/// Drops whole lines from the front of preceding_code until the rendered
/// demo fits in max_tokens. Throws DemoTooLarge if it cannot fit even with
/// no context.
AnnotatedInstance truncate_demo(const AnnotatedInstance& demo, std::size_t max_tokens = 4096,
                                const TokenCounter& count = {});

struct AnnotateOptions {
    std::uint64_t rng_seed = 0;
    std::size_t max_demo_tokens = 4096;
    double temperature = 0.2;
    int max_tokens = 1024;
    std::size_t workers = 4;
    TokenCounter count_tokens;  // defaults to text::estimate_tokens
};

struct AnnotationResult {
    AnnotatedInstance annotated;
    int retries = 0;
};

/// Parses an annotation answer into (trace, docstring). Throws
/// intent::ParseIncomplete naming the missing parts.
std::pair<intent::ReasoningTrace, intent::Docstring> parse_annotation(std::string_view raw);

/// One annotation request plus at most one format-reminder retry. Throws
/// AnnotationRejected (holding both raw answers) when neither parses.
AnnotationResult annotate(const miner::FunctionInstance& inst, const std::vector<AnnotatedInstance>& seeds,
                          gateway::Backend& backend, const AnnotateOptions& options,
                          std::uint64_t request_index = 0);

struct RejectRecord {
    std::string instance_id;
    std::string reason;
    std::vector<std::string> raw_outputs;
};

void to_json(nlohmann::json& j, const RejectRecord& r);

struct AnnotationStats {
    std::size_t input = 0;
    std::size_t annotated = 0;
    std::size_t rejected = 0;
    std::size_t retried = 0;         // instances that needed the format reminder
    std::size_t backend_errors = 0;  // rejects caused by backend failures

    double reject_rate() const { return input ? static_cast<double>(rejected) / static_cast<double>(input) : 0.0; }
};

void to_json(nlohmann::json& j, const AnnotationStats& s);

struct AnnotationRun {
    std::vector<AnnotatedInstance> annotated;  // input order, rejects omitted
    std::vector<RejectRecord> rejected;        // input order
    AnnotationStats stats;
};

/// Annotates every instance with bounded parallelism; request_index is the
/// instance's position in `instances`.
AnnotationRun annotate_all(const std::vector<miner::FunctionInstance>& instances,
                           const std::vector<AnnotatedInstance>& seeds, gateway::Backend& backend,
                           const AnnotateOptions& options);

}  // namespace intentfill::annotation
