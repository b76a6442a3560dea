#include "intentfill/eval/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <tuple>

#include "intentfill/jsonl.hpp"
#include "intentfill/parallel.hpp"
#include "intentfill/text.hpp"

namespace intentfill::eval {

using completion::Mode;
using completion::Policy;
using completion::Session;
using nlohmann::json;

namespace {

const std::vector<std::string>& base_order() {
    static const std::vector<std::string> v{"direct", "intent", "reason", "+select", "+edit", "+both", "+human", "oracle"};
    return v;
}

std::string policy_suffix(Policy p) {
    switch (p) {
    case Policy::None: return "";
    case Policy::Select: return "+select";
    case Policy::Edit: return "+edit";
    case Policy::Both: return "+both";
    case Policy::Human: return "+human";
    }
    return "";
}

std::string first_backend(const Session& s, int stage) {
    for (const auto& e : s.events) {
        if (e.stage == stage && !e.backend.empty()) return e.backend;
    }
    return "unknown";
}

template <typename T>
std::optional<double> mean_of(const std::vector<T>& rows) {
    if (rows.empty()) return std::nullopt;
    double sum = 0;
    for (double v : rows) sum += v;
    return sum / static_cast<double>(rows.size());
}

Efficiency efficiency_of(const std::vector<double>& totals, const std::vector<int>& tokens) {
    Efficiency e;
    e.n = totals.size();
    if (e.n == 0) return e;
    double wall = 0;
    for (double t : totals) wall += t;
    double tok = 0;
    for (int t : tokens) tok += t;
    e.gen_tokens = tok / static_cast<double>(e.n);
    e.latency_s = wall / static_cast<double>(e.n);
    e.throughput = wall > 0 ? static_cast<double>(e.n) / wall : 0.0;
    return e;
}

template <typename T>
void put_opt(json& j, const char* key, const std::optional<T>& v) {
    j[key] = v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<T>();
}

std::string fmt(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v, int digits = 2) { return v ? fmt(*v, digits) : "n/a"; }

}  // namespace

std::string variant_label(const Session& s) {
    switch (s.mode) {
    case Mode::Direct: return "direct";
    case Mode::Intent: return "intent";
    case Mode::Oracle: return "oracle";
    case Mode::Reason: return s.policy == Policy::None ? "reason" : policy_suffix(s.policy);
    case Mode::Plugin: return "plugin:" + first_backend(s, 1) + policy_suffix(s.policy);
    }
    return "unknown";
}

std::string model_label(const Session& s) {
    for (auto it = s.events.rbegin(); it != s.events.rend(); ++it) {
        if (it->stage == 3 && !it->backend.empty()) return it->backend;
    }
    return "unknown";
}

int variant_order(const std::string& variant) {
    const auto& order = base_order();
    auto it = std::find(order.begin(), order.end(), variant);
    if (it != order.end()) return static_cast<int>(it - order.begin());
    if (variant.rfind("plugin:", 0) == 0) return static_cast<int>(order.size());
    return static_cast<int>(order.size()) + 1;
}

Pass1 pass_at_1(const std::vector<Outcome>& outcomes) {
    Pass1 p;
    for (Outcome o : outcomes) {
        if (o == Outcome::Skip) {
            ++p.skipped;
            continue;
        }
        ++p.counted;
        if (o == Outcome::Pass) ++p.passed;
    }
    if (p.counted > 0) p.value = static_cast<double>(p.passed) / p.counted;
    return p;
}

double intent_similarity(const std::string& generated, const std::string& oracle, const interaction::Embedder& embed) {
    return 100.0 * interaction::cosine(embed(generated), embed(oracle));
}

Efficiency efficiency_stats(const std::vector<Session>& sessions) {
    std::vector<double> totals;
    std::vector<int> tokens;
    for (const auto& s : sessions) {
        totals.push_back(s.total_s());
        tokens.push_back(s.gen_tokens);
    }
    return efficiency_of(totals, tokens);
}

bool Aggregate::operator==(const Aggregate& o) const {
    return std::tie(model, variant, n, codebleu, edit_sim, intent_sim, pass1.value, pass1.passed, pass1.counted,
                    pass1.skipped, efficiency.n, efficiency.gen_tokens, efficiency.latency_s, efficiency.throughput) ==
           std::tie(o.model, o.variant, o.n, o.codebleu, o.edit_sim, o.intent_sim, o.pass1.value, o.pass1.passed,
                    o.pass1.counted, o.pass1.skipped, o.efficiency.n, o.efficiency.gen_tokens, o.efficiency.latency_s,
                    o.efficiency.throughput);
}

void to_json(json& j, const InstanceResult& r) {
    j = json{{"session_id", r.session_id}, {"instance_id", r.instance_id}, {"model", r.model},
             {"variant", r.variant},       {"status", r.status},           {"total_s", r.total_s},
             {"gen_tokens", r.gen_tokens}};
    j["codebleu"] = r.codebleu ? json(*r.codebleu) : json(nullptr);
    put_opt(j, "edit_sim", r.edit_sim);
    j["pass1"] = r.pass1 ? json(std::string(to_string(*r.pass1))) : json(nullptr);
    put_opt(j, "intent_sim", r.intent_sim);
    if (!r.note.empty()) j["note"] = r.note;
}

void from_json(const json& j, InstanceResult& r) {
    r.session_id = j.at("session_id").get<std::string>();
    r.instance_id = j.at("instance_id").get<std::string>();
    r.model = j.at("model").get<std::string>();
    r.variant = j.at("variant").get<std::string>();
    r.status = j.value("status", std::string{});
    r.total_s = j.at("total_s").get<double>();
    r.gen_tokens = j.at("gen_tokens").get<int>();
    r.codebleu.reset();
    if (auto it = j.find("codebleu"); it != j.end() && !it->is_null()) {
        CodeBleuResult c;
        c.score = it->at("score").get<double>();
        c.ngram = it->at("ngram").get<double>();
        c.weighted_ngram = it->at("weighted_ngram").get<double>();
        c.syntax = it->at("syntax").get<double>();
        c.dataflow = it->at("dataflow").get<double>();
        c.hyp_unparseable = it->value("hyp_unparseable", false);
        c.ref_unparseable = it->value("ref_unparseable", false);
        r.codebleu = c;
    }
    r.edit_sim = get_opt<double>(j, "edit_sim");
    auto p = get_opt<std::string>(j, "pass1");
    r.pass1 = p ? std::optional<Outcome>(parse_outcome(*p)) : std::nullopt;
    r.intent_sim = get_opt<double>(j, "intent_sim");
    r.note = j.value("note", std::string{});
}

void to_json(json& j, const Aggregate& a) {
    j = json{{"model", a.model}, {"variant", a.variant}, {"n", a.n}};
    put_opt(j, "codebleu", a.codebleu);
    put_opt(j, "edit_sim", a.edit_sim);
    put_opt(j, "pass1", a.pass1.value);
    j["pass1_passed"] = a.pass1.passed;
    j["pass1_counted"] = a.pass1.counted;
    j["pass1_skipped"] = a.pass1.skipped;
    put_opt(j, "intent_sim", a.intent_sim);
    j["gen_tokens"] = a.efficiency.gen_tokens;
    j["latency_s"] = a.efficiency.latency_s;
    j["throughput"] = a.efficiency.throughput;
}

void from_json(const json& j, Aggregate& a) {
    a.model = j.at("model").get<std::string>();
    a.variant = j.at("variant").get<std::string>();
    a.n = j.at("n").get<std::size_t>();
    a.codebleu = get_opt<double>(j, "codebleu");
    a.edit_sim = get_opt<double>(j, "edit_sim");
    a.pass1.value = get_opt<double>(j, "pass1");
    a.pass1.passed = j.at("pass1_passed").get<int>();
    a.pass1.counted = j.at("pass1_counted").get<int>();
    a.pass1.skipped = j.at("pass1_skipped").get<int>();
    a.intent_sim = get_opt<double>(j, "intent_sim");
    a.efficiency.n = a.n;
    a.efficiency.gen_tokens = j.at("gen_tokens").get<double>();
    a.efficiency.latency_s = j.at("latency_s").get<double>();
    a.efficiency.throughput = j.at("throughput").get<double>();
}

EvalReport evaluate(const std::vector<Session>& sessions, const std::vector<BenchmarkInstance>& bench,
                    const EvalOptions& opts) {
    opts.weights.validate();
    std::map<std::string, const BenchmarkInstance*> by_id;
    for (const auto& b : bench) by_id[b.instance.id] = &b;
    std::vector<const BenchmarkInstance*> targets;
    for (const auto& s : sessions) {
        auto it = by_id.find(s.instance.id);
        if (it == by_id.end()) throw Error("session " + s.id + ": instance " + s.instance.id + " not in benchmark");
        targets.push_back(it->second);
    }

    EvalReport report;
    report.instances.resize(sessions.size());
    parallel_for(sessions.size(), opts.workers, [&](std::size_t i) {
        const Session& s = sessions[i];
        const BenchmarkInstance& b = *targets[i];
        InstanceResult& r = report.instances[i];
        r.session_id = s.id;
        r.instance_id = s.instance.id;
        r.model = model_label(s);
        r.variant = variant_label(s);
        r.status = std::string(completion::to_string(s.status));
        r.total_s = s.total_s();
        r.gen_tokens = s.gen_tokens;
        std::string hyp = s.final_code.value_or("");
        if (!s.final_code) r.note = s.error.value_or("no generated body");
        std::string ref_d = text::dedent(b.instance.body);
        std::string hyp_d = text::dedent(hyp);
        if (opts.codebleu) r.codebleu = codebleu(ref_d, hyp_d, opts.weights);
        if (opts.edit_sim) r.edit_sim = edit_similarity(ref_d, hyp_d);
        if (opts.pass1) {
            if (s.final_code) {
                ExecResult ex = execute_tests(b, hyp, opts.sandbox);
                r.pass1 = ex.outcome;
                if (!ex.detail.empty()) r.note = ex.detail;
            } else {
                r.pass1 = Outcome::Error;
            }
        }
        if (opts.intent_sim && opts.embedder && s.docstring && !b.oracle_docstring.empty()) {
            try {
                r.intent_sim = intent_similarity(*s.docstring, b.oracle_docstring, opts.embedder);
            } catch (const interaction::ZeroVector&) {
                r.note = "intent similarity undefined for an empty embedding";
            }
        }
    });

    report.aggregates = recompute_aggregates(report.instances);
    report.meta = json{{"edit_similarity_formula", kEditSimilarityFormula},
                       {"codebleu_weights", opts.weights},
                       {"metrics",
                        {{"codebleu", opts.codebleu},
                         {"edit_sim", opts.edit_sim},
                         {"pass1", opts.pass1},
                         {"intent_sim", opts.intent_sim && static_cast<bool>(opts.embedder)}}}};
    return report;
}

std::vector<Aggregate> recompute_aggregates(const std::vector<InstanceResult>& instances) {
    using Key = std::tuple<std::string, int, std::string>;
    std::map<Key, std::vector<const InstanceResult*>> groups;
    for (const auto& r : instances) groups[{r.model, variant_order(r.variant), r.variant}].push_back(&r);

    std::vector<Aggregate> out;
    for (const auto& [key, rows] : groups) {
        Aggregate a;
        a.model = std::get<0>(key);
        a.variant = std::get<2>(key);
        a.n = rows.size();
        std::vector<double> cb, es, sim, totals;
        std::vector<int> tokens;
        std::vector<Outcome> outcomes;
        for (const auto* r : rows) {
            if (r->codebleu) cb.push_back(r->codebleu->score);
            if (r->edit_sim) es.push_back(*r->edit_sim);
            if (r->intent_sim) sim.push_back(*r->intent_sim);
            if (r->pass1) outcomes.push_back(*r->pass1);
            totals.push_back(r->total_s);
            tokens.push_back(r->gen_tokens);
        }
        a.codebleu = mean_of(cb);
        a.edit_sim = mean_of(es);
        a.intent_sim = mean_of(sim);
        a.pass1 = pass_at_1(outcomes);
        a.efficiency = efficiency_of(totals, tokens);
        out.push_back(std::move(a));
    }
    return out;
}

void write_report_jsonl(const std::filesystem::path& path, const EvalReport& report) {
    std::vector<json> rows;
    json meta = report.meta.is_object() ? report.meta : json::object();
    meta["record"] = "meta";
    meta["schema_version"] = kSchemaVersion;
    rows.push_back(meta);
    for (const auto& r : report.instances) {
        json j = r;
        j["record"] = "instance";
        j["schema_version"] = kSchemaVersion;
        rows.push_back(std::move(j));
    }
    for (const auto& a : report.aggregates) {
        json j = a;
        j["record"] = "aggregate";
        j["schema_version"] = kSchemaVersion;
        rows.push_back(std::move(j));
    }
    write_jsonl(path, rows);
}

EvalReport read_report_jsonl(const std::filesystem::path& path) {
    EvalReport report;
    auto rows = read_jsonl(path);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const json& j = rows[i];
        try {
            std::string kind = j.at("record").get<std::string>();
            if (kind == "meta") {
                report.meta = j;
                report.meta.erase("record");
            } else if (kind == "instance") {
                report.instances.push_back(j.get<InstanceResult>());
            } else if (kind == "aggregate") {
                report.aggregates.push_back(j.get<Aggregate>());
            } else {
                throw Error("unknown record kind '" + kind + "'");
            }
        } catch (const std::exception& e) {
            throw ContractViolation(path.string(), i + 1, e.what());
        }
    }
    return report;
}

std::string render_markdown(const EvalReport& report) {
    std::string md = "# Evaluation report\n\n";
    md += "Edit similarity: `" + report.meta.value("edit_similarity_formula", std::string(kEditSimilarityFormula)) +
          "`\n";
    if (auto it = report.meta.find("manifest"); it != report.meta.end() && it->is_string()) {
        md += "Manifest: `" + it->get<std::string>() + "`\n";
    }

    std::vector<std::string> models;
    for (const auto& a : report.aggregates) {
        if (std::find(models.begin(), models.end(), a.model) == models.end()) models.push_back(a.model);
    }
    for (const auto& m : models) {
        md += "\n## " + m + "\n\n";
        md += "| Variant | C-BLEU | ES | P@1 | Sim | N |\n";
        md += "|---|---:|---:|---:|---:|---:|\n";
        for (const auto& a : report.aggregates) {
            if (a.model != m) continue;
            std::string p1 = a.pass1.value ? fmt(100.0 * *a.pass1.value) : "n/a";
            if (a.pass1.skipped > 0) p1 += " (" + std::to_string(a.pass1.skipped) + " skipped)";
            md += "| " + a.variant + " | " + fmt_opt(a.codebleu) + " | " + fmt_opt(a.edit_sim) + " | " + p1 + " | " +
                  fmt_opt(a.intent_sim) + " | " + std::to_string(a.n) + " |\n";
        }
    }

    md += "\n## Efficiency\n\n";
    md += "| Model | Variant | Gen_Tokens | Latency (s/func) | Throughput (func/s) |\n";
    md += "|---|---|---:|---:|---:|\n";
    for (const auto& a : report.aggregates) {
        md += "| " + a.model + " | " + a.variant + " | " + fmt(a.efficiency.gen_tokens, 0) + " | " +
              fmt(a.efficiency.latency_s) + " | " + fmt(a.efficiency.throughput) + " |\n";
    }
    return md;
}

}  // namespace intentfill::eval
