#include "intentfill/pipeline/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "intentfill/intent/reasoning.hpp"
#include "intentfill/jsonl.hpp"
#include "intentfill/text.hpp"

namespace intentfill::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve(const fs::path& p, const fs::path& base) {
    if (p.empty() || p.is_absolute() || base.empty()) return p;
    return (base / p).lexically_normal();
}

void check_range(bool ok, const std::string& what) {
    if (!ok) throw ConfigError("config: " + what);
}

std::map<std::string, gateway::BackendConfig> backend_configs(const json& backends) {
    std::map<std::string, gateway::BackendConfig> out;
    const json& entries = backends.contains("backends") ? backends.at("backends") : backends;
    if (!entries.is_object()) throw ConfigError("config: \"backends\" must be an object");
    for (const auto& [name, entry] : entries.items()) {
        auto cfg = entry.get<gateway::BackendConfig>();
        cfg.name = name;
        out.emplace(name, std::move(cfg));
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> role_list(const Roles& r) {
    return {{"annotator", r.annotator}, {"completer", r.completer}, {"intent_model", r.intent_model},
            {"embedder", r.embedder}};
}

}  // namespace

void PipelineConfig::validate() const {
    check_range(filters.max_body_lines_exclusive >= 1, "filters.max_body_lines_exclusive must be >= 1");
    check_range(filters.max_complexity >= 1, "filters.max_complexity must be >= 1");
    check_range(filters.min_context_lines >= 0, "filters.min_context_lines must be >= 0");
    check_range(filters.max_context_lines >= filters.min_context_lines,
                "filters.max_context_lines must be >= min_context_lines");
    check_range(filters.min_quality >= 0 && filters.min_quality <= 3, "filters.min_quality must be in [0, 3]");
    check_range(filters.generated_header_lines >= 0, "filters.generated_header_lines must be >= 0");
    check_range(workers >= 1, "workers must be >= 1");
    check_range(!sample_size || *sample_size > 0, "sample_size must be positive");
    try {
        codebleu_weights.validate();
        gateway::with_overrides(gateway::default_params(Stage::Intent), intent_overrides).validate();
        gateway::with_overrides(gateway::default_params(Stage::Code), code_overrides).validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    auto known = backend_configs(backends);
    for (const auto& [role, name] : role_list(roles)) {
        if (!name.empty() && !known.count(name)) {
            throw ConfigError("config: role " + role + " names unknown backend '" + name + "'");
        }
    }
}

void to_json(json& j, const PipelineConfig& c) {
    j = json{{"paths",
              {{"corpus_root", c.corpus_root.string()},
               {"output_dir", c.output_dir.string()},
               {"seeds", c.seeds.string()},
               {"repo_manifest", c.repo_manifest.string()}}},
             {"gateway", c.backends},
             {"roles",
              {{"annotator", c.roles.annotator},
               {"completer", c.roles.completer},
               {"intent_model", c.roles.intent_model},
               {"embedder", c.roles.embedder}}},
             {"filters", c.filters},
             {"sampling", {{"intent", c.intent_overrides}, {"code", c.code_overrides}}},
             {"codebleu_weights", c.codebleu_weights},
             {"seed", c.seed},
             {"workers", c.workers}};
    j["sample_size"] = c.sample_size ? json(*c.sample_size) : json(nullptr);
    j["created_before"] = c.created_before ? json(*c.created_before) : json(nullptr);
}

PipelineConfig config_from_json(const json& j, const fs::path& base) {
    static const std::set<std::string> keys{"paths",   "gateway",     "roles",   "filters",
                                            "sampling", "codebleu_weights", "seed", "workers",
                                            "sample_size", "created_before"};
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [k, v] : j.items()) {
        if (!keys.count(k)) throw ConfigError("config: unknown key '" + k + "'");
    }
    PipelineConfig c;
    c.base_dir = base;
    try {
        if (auto p = j.find("paths"); p != j.end()) {
            c.corpus_root = resolve(p->value("corpus_root", std::string{}), base);
            c.output_dir = resolve(p->value("output_dir", std::string("out")), base);
            c.seeds = resolve(p->value("seeds", std::string{}), base);
            c.repo_manifest = resolve(p->value("repo_manifest", std::string{}), base);
        }
        if (auto g = j.find("gateway"); g != j.end()) {
            c.backends = g->contains("backends") ? *g : json{{"backends", *g}};
        } else {
            c.backends = json{{"backends", json::object()}};
        }
        if (auto r = j.find("roles"); r != j.end()) {
            c.roles.annotator = r->value("annotator", std::string{});
            c.roles.completer = r->value("completer", std::string{});
            c.roles.intent_model = r->value("intent_model", std::string{});
            c.roles.embedder = r->value("embedder", std::string{});
        }
        if (auto f = j.find("filters"); f != j.end()) c.filters = f->get<miner::FilterConfig>();
        if (auto s = j.find("sampling"); s != j.end()) {
            c.intent_overrides = s->value("intent", json::object());
            c.code_overrides = s->value("code", json::object());
        }
        if (auto w = j.find("codebleu_weights"); w != j.end()) c.codebleu_weights = w->get<eval::CodeBleuWeights>();
        c.seed = j.value("seed", std::uint64_t{0});
        c.workers = j.value("workers", std::size_t{4});
        if (auto s = j.find("sample_size"); s != j.end() && !s->is_null()) c.sample_size = s->get<std::size_t>();
        if (auto d = j.find("created_before"); d != j.end() && !d->is_null()) c.created_before = d->get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

PipelineConfig load_config(const fs::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError("invalid config " + path.string() + ": " + e.what());
    }
    return config_from_json(j, path.parent_path());
}

std::string config_hash(const PipelineConfig& c) {
    json j = c;
    j.erase("paths");
    j.erase("workers");
    return text::hex64(text::fnv1a64(j.dump()));
}

std::string Manifest::hash() const {
    json j = *this;
    return text::hex64(text::fnv1a64(j.dump()));
}

void to_json(json& j, const Manifest& m) {
    j = json{{"config_hash", m.config_hash},
             {"template_version", m.template_version},
             {"backends", m.backends},
             {"schema_version", m.schema_version}};
}

void from_json(const json& j, Manifest& m) {
    m.config_hash = j.at("config_hash").get<std::string>();
    m.template_version = j.at("template_version").get<std::string>();
    m.backends = j.at("backends").get<std::map<std::string, std::string>>();
    m.schema_version = j.at("schema_version").get<int>();
}

Manifest make_manifest(const PipelineConfig& c) {
    Manifest m;
    m.config_hash = config_hash(c);
    m.template_version = std::string(intent::kTemplateVersion);
    m.schema_version = kSchemaVersion;
    auto known = backend_configs(c.backends);
    for (const auto& [role, name] : role_list(c.roles)) {
        if (name.empty()) continue;
        const auto& b = known.at(name);
        m.backends[role] = b.name + ":" + b.kind + ":" + b.model_id;
    }
    return m;
}

json stamp(json record, const Manifest& m) {
    record["schema_version"] = m.schema_version;
    record["manifest"] = m.hash();
    return record;
}

void write_stamped(const fs::path& path, const std::vector<json>& records, const Manifest& m) {
    std::vector<json> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(stamp(r, m));
    write_jsonl(path, out);
}

void write_manifest(const fs::path& dir, const Manifest& m) {
    json j = m;
    j["hash"] = m.hash();
    write_file(dir / "manifest.json", j.dump(2) + "\n");
}

MixedManifests::MixedManifests(std::vector<std::string> hashes)
    : Error("inputs come from " + std::to_string(hashes.size()) + " different manifests (" + text::join(hashes, ", ") +
            "); pass --force to combine them"),
      hashes_(std::move(hashes)) {}

std::vector<std::string> manifest_hashes(const std::vector<json>& records) {
    std::set<std::string> seen;
    for (const auto& r : records) {
        auto it = r.find("manifest");
        seen.insert(it != r.end() && it->is_string() ? it->get<std::string>() : std::string{});
    }
    return {seen.begin(), seen.end()};
}

void require_single_manifest(const std::vector<json>& records) {
    auto hashes = manifest_hashes(records);
    if (hashes.size() > 1) {
        for (auto& h : hashes) {
            if (h.empty()) h = "<none>";
        }
        throw MixedManifests(std::move(hashes));
    }
}

gateway::Registry make_registry(const PipelineConfig& c) { return gateway::Registry::from_json(c.backends, c.base_dir); }

}  // namespace intentfill::pipeline
