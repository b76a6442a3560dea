// intentfill: mine -> annotate -> format -> complete -> serve -> eval -> report

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <set>

#include <nlohmann/json.hpp>

#include "intentfill/annotation/annotation_engine.hpp"
#include "intentfill/completion/engine.hpp"
#include "intentfill/dataset/formatter.hpp"
#include "intentfill/eval/report.hpp"
#include "intentfill/eval/sandbox.hpp"
#include "intentfill/interaction/interaction.hpp"
#include "intentfill/interaction/session_service.hpp"
#include "intentfill/jsonl.hpp"
#include "intentfill/log.hpp"
#include "intentfill/miner/corpus_miner.hpp"
#include "intentfill/pipeline/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace intentfill;

namespace {

// Used when no --config is given: one synthetic mock backend in every role.
json default_config() {
    return json{{"gateway", {{"backends", {{"mock", {{"kind", "mock"}, {"model_id", "mock"}}}}}}},
                {"roles", {{"annotator", "mock"}, {"completer", "mock"}, {"intent_model", "mock"}, {"embedder", "mock"}}}};
}

struct Common {
    std::string config;
    std::optional<std::size_t> workers;
    std::optional<std::uint64_t> seed;
    bool verbose = false;
};

pipeline::PipelineConfig load(const Common& c) {
    auto cfg = c.config.empty() ? pipeline::config_from_json(default_config(), fs::current_path())
                                : pipeline::load_config(c.config);
    if (c.workers) cfg.workers = *c.workers;
    if (c.seed) cfg.seed = *c.seed;
    cfg.validate();
    return cfg;
}

std::shared_ptr<gateway::Backend> role(const gateway::Registry& reg, const std::string& name, const char* what) {
    if (name.empty()) throw pipeline::ConfigError(std::string("config: no backend assigned to role ") + what);
    return reg.get(name);
}

void finish(const fs::path& out, const pipeline::Manifest& m) {
    pipeline::write_manifest(out.has_parent_path() ? out.parent_path() : fs::path("."), m);
    log::info("wrote " + out.string() + " (manifest " + m.hash() + ")");
}

template <typename T>
std::vector<T> read_as(const fs::path& path) {
    return read_records<T>(path, [](const json& j) { return j.get<T>(); });
}

// ---- subcommands -----------------------------------------------------------

struct MineArgs {
    std::string corpus, repos, out = "instances.jsonl", reports;
    std::optional<std::size_t> sample;
};

int run_mine(const Common& c, const MineArgs& a) {
    auto cfg = load(c);
    if (!a.corpus.empty()) cfg.corpus_root = a.corpus;
    if (!a.repos.empty()) cfg.repo_manifest = a.repos;
    if (a.sample) cfg.sample_size = a.sample;
    if (cfg.corpus_root.empty()) throw pipeline::ConfigError("mine: no corpus root (--corpus or paths.corpus_root)");
    auto repos = cfg.repo_manifest.empty() ? std::map<std::string, miner::RepoInfo>{}
                                           : miner::load_repo_manifest(cfg.repo_manifest);
    miner::MiningOptions opts;
    opts.filters = cfg.filters;
    opts.sample_size = cfg.sample_size;
    opts.seed = cfg.seed;
    opts.workers = cfg.workers;
    opts.created_before = cfg.created_before;
    auto result = miner::mine(miner::load_corpus(cfg.corpus_root, repos), opts);
    auto manifest = pipeline::make_manifest(cfg);
    std::vector<json> rows(result.instances.begin(), result.instances.end());
    pipeline::write_stamped(a.out, rows, manifest);
    if (!a.reports.empty()) {
        pipeline::write_stamped(a.reports, std::vector<json>(result.reports.begin(), result.reports.end()), manifest);
    }
    std::cerr << json(result.stats).dump() << "\n";
    finish(a.out, manifest);
    return 0;
}

struct AnnotateArgs {
    std::string instances, seeds, out = "annotated.jsonl", rejects;
};

int run_annotate(const Common& c, const AnnotateArgs& a) {
    auto cfg = load(c);
    if (!a.seeds.empty()) cfg.seeds = a.seeds;
    if (cfg.seeds.empty()) throw pipeline::ConfigError("annotate: no seed file (--seeds or paths.seeds)");
    auto reg = pipeline::make_registry(cfg);
    auto backend = role(reg, cfg.roles.annotator, "annotator");
    auto instances = read_as<miner::FunctionInstance>(a.instances);
    auto seeds = read_as<annotation::AnnotatedInstance>(cfg.seeds);
    annotation::AnnotateOptions opts;
    opts.rng_seed = cfg.seed;
    opts.workers = cfg.workers;
    auto run = annotation::annotate_all(instances, seeds, *backend, opts);
    auto manifest = pipeline::make_manifest(cfg);
    pipeline::write_stamped(a.out, std::vector<json>(run.annotated.begin(), run.annotated.end()), manifest);
    fs::path rejects = a.rejects.empty() ? fs::path(a.out).replace_extension(".rejects.jsonl") : fs::path(a.rejects);
    pipeline::write_stamped(rejects, std::vector<json>(run.rejected.begin(), run.rejected.end()), manifest);
    std::cerr << json(run.stats).dump() << "\n";
    finish(a.out, manifest);
    return 0;
}

struct FormatArgs {
    std::string annotated, out = "train.jsonl";
};

int run_format(const Common& c, const FormatArgs& a) {
    auto cfg = load(c);
    auto items = read_as<annotation::AnnotatedInstance>(a.annotated);
    std::vector<json> rows;
    for (const auto& x : items) {
        std::vector<std::string> warnings;
        rows.push_back(dataset::verbalize(x, &warnings));
        for (const auto& w : warnings) log::warn(x.instance.id + ": " + w);
    }
    auto manifest = pipeline::make_manifest(cfg);
    pipeline::write_stamped(a.out, rows, manifest);
    finish(a.out, manifest);
    return 0;
}

struct CompleteArgs {
    std::string benchmark, instances, mode = "reason", policy = "none", out = "sessions.jsonl";
    bool serial = false;
};

int run_complete(const Common& c, const CompleteArgs& a) {
    auto cfg = load(c);
    auto mode = completion::parse_mode(a.mode);
    auto policy = completion::parse_policy(a.policy);
    std::vector<completion::Task> tasks;
    if (!a.benchmark.empty()) {
        for (auto& b : eval::load_benchmark(a.benchmark)) tasks.push_back({std::move(b.instance), b.oracle_docstring});
    } else if (!a.instances.empty()) {
        for (auto& inst : read_as<miner::FunctionInstance>(a.instances)) tasks.push_back({std::move(inst), std::nullopt});
    } else {
        throw pipeline::ConfigError("complete: pass --benchmark or --instances");
    }
    bool needs_oracle = mode == completion::Mode::Oracle || policy == completion::Policy::Select ||
                        policy == completion::Policy::Edit || policy == completion::Policy::Both;
    if (needs_oracle) {
        for (const auto& t : tasks) {
            if (!t.oracle_docstring) {
                throw pipeline::ConfigError("complete: mode/policy needs oracle docstrings; use --benchmark");
            }
        }
    }

    auto reg = pipeline::make_registry(cfg);
    completion::Backends backends;
    auto completer = role(reg, cfg.roles.completer, "completer");
    backends.completer = completer.get();
    std::shared_ptr<gateway::Backend> intent_model;
    if (mode == completion::Mode::Plugin) {
        intent_model = role(reg, cfg.roles.intent_model, "intent_model");
        backends.intent_model = intent_model.get();
    }
    std::shared_ptr<gateway::Backend> embedder;
    completion::InteractorFactory factory;
    if (policy == completion::Policy::Select || policy == completion::Policy::Edit ||
        policy == completion::Policy::Both) {
        embedder = role(reg, cfg.roles.embedder, "embedder");
        auto embed = interaction::backend_embedder(*embedder);
        factory = [embed](const completion::Task& t) {
            return std::make_unique<interaction::SimulatedInteractor>(t.oracle_docstring.value_or(""), embed);
        };
    }
    completion::EngineConfig ecfg;
    ecfg.intent_params = gateway::with_overrides(ecfg.intent_params, cfg.intent_overrides);
    ecfg.code_params = gateway::with_overrides(ecfg.code_params, cfg.code_overrides);

    std::size_t workers = a.serial ? 1 : cfg.workers;
    auto sessions = completion::run_batch(tasks, mode, policy, backends, ecfg, factory, workers);
    std::size_t failed = 0;
    for (const auto& s : sessions) failed += s.status == completion::Status::Failed;
    auto manifest = pipeline::make_manifest(cfg);
    pipeline::write_stamped(a.out, std::vector<json>(sessions.begin(), sessions.end()), manifest);
    log::info(std::to_string(sessions.size()) + " sessions, " + std::to_string(failed) + " failed");
    finish(a.out, manifest);
    return 0;
}

struct ServeArgs {
    std::string host = "127.0.0.1";
    int port = 8080;
};

interaction::SessionServer* g_server = nullptr;

extern "C" void on_signal(int) {
    if (g_server) g_server->stop();
}

int run_serve(const Common& c, const ServeArgs& a) {
    auto cfg = load(c);
    auto reg = pipeline::make_registry(cfg);
    completion::Backends backends;
    auto completer = role(reg, cfg.roles.completer, "completer");
    backends.completer = completer.get();
    std::shared_ptr<gateway::Backend> intent_model;
    if (!cfg.roles.intent_model.empty()) {
        intent_model = reg.get(cfg.roles.intent_model);
        backends.intent_model = intent_model.get();
    }
    completion::EngineConfig ecfg;
    ecfg.intent_params = gateway::with_overrides(ecfg.intent_params, cfg.intent_overrides);
    ecfg.code_params = gateway::with_overrides(ecfg.code_params, cfg.code_overrides);
    interaction::SessionService service(backends, ecfg);
    interaction::SessionServer server(service);
    int port = server.bind(a.host, a.port);
    std::cout << "listening on http://" << a.host << ":" << port << std::endl;
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    server.listen();
    g_server = nullptr;
    return 0;
}

struct EvalArgs {
    std::string sessions, benchmark, metrics = "all", out = "report.jsonl", md;
    bool force = false;
};

int run_eval(const Common& c, const EvalArgs& a) {
    auto cfg = load(c);
    auto raw = read_jsonl(a.sessions);
    if (!a.force) pipeline::require_single_manifest(raw);
    auto sessions = read_as<completion::Session>(a.sessions);
    auto bench = eval::load_benchmark(a.benchmark);

    eval::EvalOptions opts;
    opts.workers = cfg.workers;
    opts.weights = cfg.codebleu_weights;
    if (a.metrics != "all") {
        std::set<std::string> wanted;
        std::string cur;
        for (char ch : a.metrics + ",") {
            if (ch == ',') {
                if (!cur.empty()) wanted.insert(cur);
                cur.clear();
            } else {
                cur.push_back(ch);
            }
        }
        for (const auto& m : wanted) {
            if (m != "codebleu" && m != "es" && m != "pass1" && m != "sim") {
                throw pipeline::ConfigError("eval: unknown metric '" + m + "' (codebleu, es, pass1, sim, all)");
            }
        }
        opts.codebleu = wanted.count("codebleu");
        opts.edit_sim = wanted.count("es");
        opts.pass1 = wanted.count("pass1");
        opts.intent_sim = wanted.count("sim");
    }
    auto reg = pipeline::make_registry(cfg);
    std::shared_ptr<gateway::Backend> embedder;
    if (opts.intent_sim && !cfg.roles.embedder.empty()) {
        embedder = reg.get(cfg.roles.embedder);
        opts.embedder = interaction::backend_embedder(*embedder);
    }

    auto report = eval::evaluate(sessions, bench, opts);
    auto manifest = pipeline::make_manifest(cfg);
    auto hashes = pipeline::manifest_hashes(raw);
    report.meta["manifest"] = manifest.hash();
    report.meta["sessions_manifest"] = hashes.size() == 1 ? json(hashes.front()) : json(hashes);
    eval::write_report_jsonl(a.out, report);
    // The report records carry the run's manifest like every other output.
    auto rows = read_jsonl(a.out);
    pipeline::write_stamped(a.out, rows, manifest);
    fs::path md = a.md.empty() ? fs::path(a.out).replace_extension(".md") : fs::path(a.md);
    write_file(md, eval::render_markdown(report));
    finish(a.out, manifest);
    return 0;
}

struct ReportArgs {
    std::vector<std::string> inputs;
    std::string out = "report.md", jsonl;
    bool force = false;
};

int run_report(const Common&, const ReportArgs& a) {
    std::vector<json> all;
    eval::EvalReport merged;
    for (const auto& in : a.inputs) {
        auto rows = read_jsonl(in);
        all.insert(all.end(), rows.begin(), rows.end());
        auto part = eval::read_report_jsonl(in);
        auto fresh = eval::recompute_aggregates(part.instances);
        if (fresh != part.aggregates) {
            throw ContractViolation(in, 0, "stored aggregates differ from the per-instance records");
        }
        if (merged.meta.is_null()) merged.meta = part.meta;
        merged.instances.insert(merged.instances.end(), part.instances.begin(), part.instances.end());
    }
    if (!a.force) pipeline::require_single_manifest(all);
    merged.aggregates = eval::recompute_aggregates(merged.instances);
    write_file(a.out, eval::render_markdown(merged));
    if (!a.jsonl.empty()) eval::write_report_jsonl(a.jsonl, merged);
    log::info("wrote " + a.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Intent-first function completion pipeline"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--config", common.config, "Pipeline config (JSON)")->check(CLI::ExistingFile);
    app.add_option("--workers", common.workers, "Override the worker count");
    app.add_option("--seed", common.seed, "Override the RNG seed");
    app.add_flag("-v,--verbose", common.verbose, "Debug logging");

    MineArgs mine;
    auto* m = app.add_subcommand("mine", "Extract and filter functions from a corpus");
    m->add_option("--corpus", mine.corpus, "Corpus root (one directory per repository)");
    m->add_option("--repos", mine.repos, "Repository manifest (repo_id, topic, created_at)");
    m->add_option("--sample", mine.sample, "Uniform sample size");
    m->add_option("-o,--out", mine.out, "Output instances JSONL");
    m->add_option("--reports", mine.reports, "Also write per-function filter reports");

    AnnotateArgs ann;
    auto* an = app.add_subcommand("annotate", "Annotate instances with reasoning traces and docstrings");
    an->add_option("--instances", ann.instances)->required();
    an->add_option("--seeds", ann.seeds, "Seed annotations JSONL");
    an->add_option("-o,--out", ann.out);
    an->add_option("--rejects", ann.rejects);

    FormatArgs fmt;
    auto* f = app.add_subcommand("format", "Verbalize annotated instances into training records");
    f->add_option("--annotated", fmt.annotated)->required();
    f->add_option("-o,--out", fmt.out);

    CompleteArgs comp;
    auto* cp = app.add_subcommand("complete", "Run completion sessions");
    cp->add_option("--benchmark", comp.benchmark, "Benchmark JSONL (gives oracle docstrings)");
    cp->add_option("--instances", comp.instances, "Mined instances JSONL");
    cp->add_option("--mode", comp.mode)->check(CLI::IsMember({"direct", "intent", "reason", "oracle", "plugin"}));
    cp->add_option("--policy", comp.policy)->check(CLI::IsMember({"none", "select", "edit", "both", "human"}));
    cp->add_option("-o,--out", comp.out);
    cp->add_flag("--serial", comp.serial, "One session at a time (efficiency measurements)");

    ServeArgs serve;
    auto* sv = app.add_subcommand("serve", "Serve the session API for human interaction");
    sv->add_option("--host", serve.host);
    sv->add_option("--port", serve.port);

    EvalArgs ev;
    auto* e = app.add_subcommand("eval", "Score sessions against a benchmark");
    e->add_option("--sessions", ev.sessions)->required();
    e->add_option("--benchmark", ev.benchmark)->required();
    e->add_option("--metrics", ev.metrics, "all, or a comma list of codebleu, es, pass1, sim");
    e->add_option("-o,--out", ev.out);
    e->add_option("--md", ev.md, "Markdown tables (default: next to --out)");
    e->add_flag("--force", ev.force, "Accept sessions from several manifests");

    ReportArgs rep;
    auto* r = app.add_subcommand("report", "Render tables from one or more eval reports");
    r->add_option("inputs", rep.inputs, "report.jsonl files")->required();
    r->add_option("-o,--out", rep.out);
    r->add_option("--jsonl", rep.jsonl, "Also write the merged report");
    r->add_flag("--force", rep.force, "Combine reports from different manifests");

    CLI11_PARSE(app, argc, argv);
    log::set_min_level(common.verbose ? log::Level::Debug : log::Level::Info);

    try {
        if (*m) return run_mine(common, mine);
        if (*an) return run_annotate(common, ann);
        if (*f) return run_format(common, fmt);
        if (*cp) return run_complete(common, comp);
        if (*sv) return run_serve(common, serve);
        if (*e) return run_eval(common, ev);
        if (*r) return run_report(common, rep);
    } catch (const ContractViolation& ex) {
        std::cerr << "contract violation: " << ex.what() << "\n";
        return 1;
    } catch (const pipeline::MixedManifests& ex) {
        std::cerr << "contract violation: " << ex.what() << "\n";
        return 1;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
    return 0;
}
