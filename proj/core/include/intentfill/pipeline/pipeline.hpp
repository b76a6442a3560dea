#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "intentfill/error.hpp"
#include "intentfill/eval/metrics.hpp"
#include "intentfill/gateway/gateway.hpp"
#include "intentfill/miner/corpus_miner.hpp"

namespace intentfill::pipeline {

/// Backend names per model role. Empty means "not configured".
struct Roles {
    std::string annotator;
    std::string completer;
    std::string intent_model;  // PLUGIN stage 1
    std::string embedder;
};

struct PipelineConfig {
    std::filesystem::path corpus_root;
    std::filesystem::path output_dir = "out";
    std::filesystem::path seeds;           // seed annotations for the annotator
    std::filesystem::path repo_manifest;   // optional {repo_id, topic, created_at} list
    nlohmann::json backends = nlohmann::json::object();  // gateway registry config
    std::filesystem::path base_dir;        // resolves relative mock scripts
    Roles roles;
    miner::FilterConfig filters;
    nlohmann::json intent_overrides = nlohmann::json::object();
    nlohmann::json code_overrides = nlohmann::json::object();
    eval::CodeBleuWeights codebleu_weights;
    std::uint64_t seed = 0;
    std::optional<std::size_t> sample_size;
    std::optional<std::string> created_before;
    std::size_t workers = 4;

    /// Throws ConfigError on out-of-range thresholds or a role naming a
    /// backend absent from `backends`.
    void validate() const;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

void to_json(nlohmann::json& j, const PipelineConfig& c);
/// Unknown top-level keys are rejected. Relative paths resolve against `base`.
PipelineConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// Identity of a run's configuration: every record a run writes carries
/// hash() so outputs from different configurations cannot be mixed silently.
struct Manifest {
    std::string config_hash;
    std::string template_version;
    std::map<std::string, std::string> backends;  // role -> "name:kind:model_id"
    int schema_version = 0;

    std::string hash() const;
};

void to_json(nlohmann::json& j, const Manifest& m);
void from_json(const nlohmann::json& j, Manifest& m);

/// Hash over the canonical config JSON minus file locations and worker
/// count, so every stage of a run shares one identity.
std::string config_hash(const PipelineConfig& c);
Manifest make_manifest(const PipelineConfig& c);

/// Adds "schema_version" and "manifest" to an object record.
nlohmann::json stamp(nlohmann::json record, const Manifest& m);
void write_stamped(const std::filesystem::path& path, const std::vector<nlohmann::json>& records, const Manifest& m);
/// Writes <dir>/manifest.json.
void write_manifest(const std::filesystem::path& dir, const Manifest& m);

class MixedManifests : public Error {
public:
    explicit MixedManifests(std::vector<std::string> hashes);
    const std::vector<std::string>& hashes() const noexcept { return hashes_; }

private:
    std::vector<std::string> hashes_;
};

/// Distinct manifest hashes in `records` (records without one count as "").
std::vector<std::string> manifest_hashes(const std::vector<nlohmann::json>& records);
/// Throws MixedManifests when more than one hash is present.
void require_single_manifest(const std::vector<nlohmann::json>& records);

/// Instantiates the configured backends.
gateway::Registry make_registry(const PipelineConfig& c);

}  // namespace intentfill::pipeline
