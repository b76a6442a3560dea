#include "intentfill/miner/corpus_miner.hpp"

#include <algorithm>
#include <tuple>

#include <nlohmann/json.hpp>

#include "intentfill/jsonl.hpp"
#include "intentfill/log.hpp"
#include "intentfill/parallel.hpp"
#include "intentfill/random.hpp"
#include "intentfill/text.hpp"

namespace intentfill::miner {

using nlohmann::json;

// ---- JSON ---------------------------------------------------------------

void to_json(json& j, const FunctionInstance& f) {
    j = json{{"id", f.id},
             {"file_name", f.file_name},
             {"preceding_code", f.preceding_code},
             {"signature", f.signature},
             {"body", f.body},
             {"function_name", f.function_name},
             {"arg_names", f.arg_names},
             {"body_line_count", f.body_line_count},
             {"context_line_count", f.context_line_count},
             {"complexity", f.complexity},
             {"quality_score", f.quality_score},
             {"topic", f.topic},
             {"extra_context", f.extra_context ? json(*f.extra_context) : json(nullptr)}};
}

void from_json(const json& j, FunctionInstance& f) {
    j.at("id").get_to(f.id);
    j.at("file_name").get_to(f.file_name);
    j.at("preceding_code").get_to(f.preceding_code);
    j.at("signature").get_to(f.signature);
    j.at("body").get_to(f.body);
    j.at("function_name").get_to(f.function_name);
    f.arg_names = j.value("arg_names", std::vector<std::string>{});
    f.body_line_count = j.value("body_line_count", static_cast<int>(text::count_lines(f.body)));
    f.context_line_count = j.value("context_line_count", static_cast<int>(text::count_lines(f.preceding_code)));
    f.complexity = j.value("complexity", 1);
    f.quality_score = j.value("quality_score", 0);
    f.topic = j.value("topic", std::string{});
    if (auto it = j.find("extra_context"); it != j.end() && !it->is_null()) {
        f.extra_context = it->get<std::string>();
    } else {
        f.extra_context.reset();
    }
}

void to_json(json& j, const FilterConfig& c) {
    j = json{{"max_body_lines_exclusive", c.max_body_lines_exclusive},
             {"max_complexity", c.max_complexity},
             {"min_context_lines", c.min_context_lines},
             {"max_context_lines", c.max_context_lines},
             {"min_quality", c.min_quality},
             {"generated_header_lines", c.generated_header_lines},
             {"sensitive_keywords", c.sensitive_keywords},
             {"generated_markers", c.generated_markers}};
}

void from_json(const json& j, FilterConfig& c) {
    FilterConfig d;
    c.max_body_lines_exclusive = j.value("max_body_lines_exclusive", d.max_body_lines_exclusive);
    c.max_complexity = j.value("max_complexity", d.max_complexity);
    c.min_context_lines = j.value("min_context_lines", d.min_context_lines);
    c.max_context_lines = j.value("max_context_lines", d.max_context_lines);
    c.min_quality = j.value("min_quality", d.min_quality);
    c.generated_header_lines = j.value("generated_header_lines", d.generated_header_lines);
    c.sensitive_keywords = j.value("sensitive_keywords", d.sensitive_keywords);
    c.generated_markers = j.value("generated_markers", d.generated_markers);
}

std::vector<std::string> FilterReport::failed_rules() const {
    std::vector<std::string> out;
    for (const auto& [rule, v] : verdicts) {
        if (!v.pass) out.push_back(rule);
    }
    return out;
}

void to_json(json& j, const FilterReport& r) {
    json verdicts = json::object();
    for (const auto& [rule, v] : r.verdicts) {
        verdicts[rule] = json{{"verdict", v.pass ? "pass" : "fail"}, {"detail", v.detail}};
    }
    j = json{{"instance_id", r.instance_id}, {"verdicts", verdicts}, {"accepted", r.accepted}};
}

void from_json(const json& j, FilterReport& r) {
    j.at("instance_id").get_to(r.instance_id);
    r.verdicts.clear();
    for (const auto& [rule, v] : j.at("verdicts").items()) {
        r.verdicts[rule] = RuleVerdict{v.at("verdict").get<std::string>() == "pass", v.value("detail", "")};
    }
    j.at("accepted").get_to(r.accepted);
}

void to_json(json& j, const MiningStats& s) {
    j = json{{"files_seen", s.files_seen},
             {"files_parsed", s.files_parsed},
             {"parse_errors", s.parse_errors},
             {"functions_extracted", s.functions_extracted},
             {"accepted", s.accepted},
             {"sampled", s.sampled},
             {"rejections_by_rule", s.rejections_by_rule},
             {"skipped", s.skipped}};
}

// ---- extraction ---------------------------------------------------------

namespace {

std::size_t line_start(std::string_view text, std::size_t pos) {
    auto nl = text.rfind('\n', pos == 0 ? 0 : pos - 1);
    if (pos == 0 || nl == std::string_view::npos) return 0;
    return nl + 1;
}

std::size_t after_line_end(std::string_view text, std::size_t pos) {
    auto nl = text.find('\n', pos);
    return nl == std::string_view::npos ? text.size() : nl + 1;
}

std::string parameter_name(const py::Node& p, std::string_view src) {
    if (p.kind == "identifier") return std::string(p.text(src));
    if (p.kind == "default_parameter" || p.kind == "typed_default_parameter") {
        return std::string(p.child_by_field("name")->text(src));
    }
    if (p.kind == "typed_parameter") return parameter_name(p.children.front(), src);
    if (p.kind == "list_splat_pattern" || p.kind == "dictionary_splat_pattern") {
        return parameter_name(p.children.back(), src);
    }
    return {};
}

RawFunction describe(const py::Node& def, std::string_view src) {
    RawFunction fn;
    fn.name = std::string(def.child_by_field("name")->text(src));
    fn.def_line = def.line;
    for (const auto& p : def.child_by_field("parameters")->children) {
        if (!p.named) continue;
        auto name = parameter_name(p, src);
        if (!name.empty()) fn.arg_names.push_back(std::move(name));
    }
    const py::Node* body = def.child_by_field("body");
    const py::Node* colon = nullptr;
    for (const auto& c : def.children) {
        if (&c == body) break;
        if (!c.named && c.kind == ":") colon = &c;
    }
    fn.header_begin = line_start(src, def.begin);
    if (body->line == colon->line) {
        fn.body_begin = colon->end;
    } else {
        fn.body_begin = after_line_end(src, colon->end);
    }
    fn.body_end = after_line_end(src, body->end);
    return fn;
}

const py::Node* function_of(const py::Node& stmt) {
    if (stmt.kind == "function_definition") return &stmt;
    if (stmt.kind == "decorated_definition") {
        const auto* d = stmt.child_by_field("definition");
        if (d != nullptr && d->kind == "function_definition") return d;
    }
    return nullptr;
}

std::set<std::string> names_defined_before(const py::SyntaxTree& tree, std::size_t limit) {
    std::set<std::string> names;
    py::walk(tree.root(), [&](const py::Node& n) {
        if ((n.kind == "function_definition" || n.kind == "class_definition") && n.begin < limit) {
            names.insert(std::string(tree.text(*n.child_by_field("name"))));
        }
    });
    return names;
}

const py::Node* find_body_block(const py::SyntaxTree& tree, const RawFunction& fn) {
    for (const auto& stmt : tree.root().children) {
        const auto* def = function_of(stmt);
        if (def != nullptr && def->line == fn.def_line) return def->child_by_field("body");
    }
    return nullptr;
}

bool is_placeholder_statement(const py::Node& s, std::string_view src) {
    if (s.kind == "pass_statement") return true;
    if (s.kind == "expression_statement" && s.children.size() == 1) {
        const auto& e = s.children.front();
        return e.kind == "ellipsis" || e.kind == "string" || e.kind == "concatenated_string";
    }
    if (s.kind == "raise_statement" && s.children.size() >= 2) {
        const auto& e = s.children[1];
        const py::Node* target = &e;
        if (e.kind == "call") target = e.child_by_field("function");
        return target->kind == "identifier" && target->text(src) == "NotImplementedError";
    }
    return false;
}

}  // namespace

std::vector<RawFunction> extract_functions(const py::SyntaxTree& tree) {
    std::vector<RawFunction> out;
    for (const auto& stmt : tree.root().children) {
        if (const auto* def = function_of(stmt)) out.push_back(describe(*def, tree.source()));
    }
    return out;
}

std::vector<RawFunction> extract_functions(const SourceFile& file) {
    return extract_functions(py::parse_module(file.text));
}

ContextSplit split_context(const SourceFile& file, const RawFunction& fn) {
    std::string_view t = file.text;
    return ContextSplit{std::string(t.substr(0, fn.header_begin)),
                        std::string(t.substr(fn.header_begin, fn.body_begin - fn.header_begin)),
                        std::string(t.substr(fn.body_begin, fn.body_end - fn.body_begin))};
}

// ---- metrics ------------------------------------------------------------

int decision_points(const py::Node& n) {
    int count = 0;
    py::walk(n, [&](const py::Node& x) {
        const auto& k = x.kind;
        if (k == "if_statement" || k == "elif_clause" || k == "for_statement" || k == "while_statement" ||
            k == "except_clause" || k == "assert_statement" || k == "boolean_operator" ||
            k == "conditional_expression" || k == "if_clause") {
            ++count;
        }
    });
    return count;
}

int cyclomatic_complexity(std::string_view body) {
    auto tree = py::parse_body(body);
    return 1 + decision_points(tree.root());
}

QualityIndicators quality_indicators(const py::SyntaxTree& tree, const py::Node& body_root,
                                     const std::set<std::string>& helper_names) {
    QualityIndicators q;
    py::walk(body_root, [&](const py::Node& n) {
        const auto& k = n.kind;
        if (k == "if_statement" || k == "for_statement" || k == "while_statement" || k == "try_statement") {
            q.control_flow = true;
        } else if (k == "return_statement" && n.children.size() > 1) {
            q.valued_return = true;
        } else if (k == "call") {
            const auto* f = n.child_by_field("function");
            if (f->kind == "identifier" && helper_names.count(std::string(tree.text(*f)))) q.helper_call = true;
        }
    });
    return q;
}

int quality_score(const SourceFile& file, const RawFunction& fn) {
    auto tree = py::parse_module(file.text);
    const auto* body = find_body_block(tree, fn);
    if (body == nullptr) return 0;
    return quality_indicators(tree, *body, names_defined_before(tree, fn.header_begin)).score();
}

int quality_score(std::string_view preceding_code, std::string_view body) {
    std::set<std::string> helpers;
    try {
        auto pre = py::parse_module(std::string(preceding_code));
        helpers = names_defined_before(pre, pre.source().size() + 1);
    } catch (const py::ParseError&) {
        // Context that does not parse on its own contributes no helpers.
    }
    auto tree = py::parse_body(body);
    return quality_indicators(tree, tree.root(), helpers).score();
}

bool is_placeholder_body(std::string_view body) {
    auto tree = py::parse_body(body);
    const auto& stmts = tree.root().children;
    return !stmts.empty() && std::all_of(stmts.begin(), stmts.end(), [&](const py::Node& s) {
        return is_placeholder_statement(s, tree.source());
    });
}

bool is_trivial_name(std::string_view name) {
    if (name.size() > 4 && name.substr(0, 2) == "__" && name.substr(name.size() - 2) == "__") return true;
    if (name.rfind("test_", 0) == 0) return true;
    return name.size() >= 5 && name.substr(name.size() - 5) == "_test";
}

// ---- filters ------------------------------------------------------------

namespace {

std::optional<std::string> find_sensitive(std::string_view code, const std::vector<std::string>& keywords) {
    auto check = [&](std::string_view word) -> std::optional<std::string> {
        auto lower = text::to_lower(word);
        for (const auto& kw : keywords) {
            if (lower.find(text::to_lower(kw)) != std::string::npos) return kw + " in '" + std::string(word) + "'";
        }
        return std::nullopt;
    };
    try {
        for (const auto& t : py::tokenize(code)) {
            if (t.kind == py::TokenKind::String || (t.kind == py::TokenKind::Name && !py::is_keyword(t.text))) {
                if (auto hit = check(t.text)) return hit;
            }
        }
        return std::nullopt;
    } catch (const py::ParseError&) {
        return check(code);
    }
}

}  // namespace

FilterReport apply_filters(const FunctionInstance& c, const FilterConfig& cfg) {
    FilterReport r;
    r.instance_id = c.id;
    auto set = [&](std::string_view rule, bool pass, std::string detail) {
        r.verdicts[std::string(rule)] = RuleVerdict{pass, std::move(detail)};
    };

    set(kRuleLength, c.body_line_count < cfg.max_body_lines_exclusive,
        std::to_string(c.body_line_count) + " body lines (limit < " + std::to_string(cfg.max_body_lines_exclusive) +
            ")");

    bool trivial = is_trivial_name(c.function_name);
    set(kRuleTrivialName, !trivial, trivial ? "name '" + c.function_name + "' is a dunder or test name" : "");

    try {
        bool placeholder = is_placeholder_body(c.body);
        set(kRulePlaceholder, !placeholder, placeholder ? "placeholder body" : "");
    } catch (const py::ParseError& e) {
        set(kRulePlaceholder, false, std::string("body does not parse: ") + e.what());
    }

    set(kRuleComplexity, c.complexity <= cfg.max_complexity,
        "complexity " + std::to_string(c.complexity) + " (limit <= " + std::to_string(cfg.max_complexity) + ")");

    bool ctx_ok = c.context_line_count >= cfg.min_context_lines && c.context_line_count <= cfg.max_context_lines;
    set(kRuleContextSize, ctx_ok,
        std::to_string(c.context_line_count) + " context lines (range " + std::to_string(cfg.min_context_lines) +
            "-" + std::to_string(cfg.max_context_lines) + ")");

    auto hit = find_sensitive(c.signature + c.body, cfg.sensitive_keywords);
    set(kRuleSensitive, !hit.has_value(), hit.value_or(""));

    std::string whole = c.preceding_code + c.signature + c.body;
    auto lines = text::split_lines(whole);
    std::string generated_detail;
    for (std::size_t i = 0; i < lines.size() && i < static_cast<std::size_t>(cfg.generated_header_lines); ++i) {
        for (const auto& marker : cfg.generated_markers) {
            if (text::icontains(lines[i], marker)) {
                generated_detail = "line " + std::to_string(i + 1) + " contains '" + marker + "'";
                break;
            }
        }
        if (!generated_detail.empty()) break;
    }
    set(kRuleGenerated, generated_detail.empty(), generated_detail);

    set(kRuleQuality, c.quality_score >= cfg.min_quality,
        "score " + std::to_string(c.quality_score) + " (threshold " + std::to_string(cfg.min_quality) + ")");

    r.accepted = std::all_of(r.verdicts.begin(), r.verdicts.end(), [](const auto& kv) { return kv.second.pass; });
    return r;
}

// ---- sampling -----------------------------------------------------------

std::vector<FunctionInstance> stratified_sample(const std::vector<FunctionInstance>& instances, std::size_t n,
                                                std::uint64_t seed) {
    std::map<std::string, std::vector<const FunctionInstance*>> buckets;
    for (const auto& inst : instances) buckets[inst.topic].push_back(&inst);
    std::vector<std::vector<const FunctionInstance*>> order;
    for (auto& [topic, bucket] : buckets) {
        std::sort(bucket.begin(), bucket.end(), [](auto* a, auto* b) { return a->id < b->id; });
        std::mt19937_64 rng(mix_seed(seed, text::fnv1a64(topic)));
        shuffle(bucket, rng);
        order.push_back(std::move(bucket));
    }
    if (n > instances.size()) {
        log::warn("stratified_sample: requested " + std::to_string(n) + " but only " +
                  std::to_string(instances.size()) + " instances available; returning all");
        n = instances.size();
    }
    std::vector<FunctionInstance> out;
    out.reserve(n);
    for (std::size_t round = 0; out.size() < n; ++round) {
        for (const auto& bucket : order) {
            if (out.size() >= n) break;
            if (round < bucket.size()) out.push_back(*bucket[round]);
        }
    }
    return out;
}

// ---- instance construction ----------------------------------------------

FunctionInstance make_instance(const SourceFile& file, const RawFunction& fn, const py::SyntaxTree& tree) {
    auto parts = split_context(file, fn);
    FunctionInstance inst;
    inst.id = file.repo_id + "/" + file.path + "::" + fn.name + "@L" + std::to_string(fn.def_line);
    inst.file_name = file.path;
    inst.preceding_code = std::move(parts.preceding_code);
    inst.signature = std::move(parts.signature);
    inst.body = std::move(parts.body);
    inst.function_name = fn.name;
    inst.arg_names = fn.arg_names;
    inst.body_line_count = static_cast<int>(text::count_lines(inst.body));
    inst.context_line_count = static_cast<int>(text::count_lines(inst.preceding_code));
    inst.topic = file.topic;
    if (const auto* body = find_body_block(tree, fn)) {
        inst.complexity = 1 + decision_points(*body);
        inst.quality_score =
            quality_indicators(tree, *body, names_defined_before(tree, fn.header_begin)).score();
    }
    return inst;
}

// ---- corpus driver ------------------------------------------------------

std::map<std::string, RepoInfo> load_repo_manifest(const std::filesystem::path& path) {
    auto j = json::parse(read_file(path));
    const json& list = j.is_object() ? j.at("repos") : j;
    std::map<std::string, RepoInfo> out;
    for (const auto& e : list) {
        RepoInfo r{e.at("repo_id").get<std::string>(), e.value("topic", std::string("unknown")),
                   e.value("created_at", std::string{})};
        out[r.repo_id] = r;
    }
    return out;
}

std::vector<SourceFile> load_corpus(const std::filesystem::path& root, const std::map<std::string, RepoInfo>& repos) {
    namespace fs = std::filesystem;
    std::vector<SourceFile> files;
    auto add_repo_file = [&](const std::string& repo_id, const fs::path& repo_root, const fs::path& file) {
        SourceFile sf;
        sf.repo_id = repo_id;
        sf.path = fs::relative(file, repo_root).generic_string();
        if (auto it = repos.find(repo_id); it != repos.end()) {
            sf.topic = it->second.topic;
            sf.created_at = it->second.created_at;
        } else {
            sf.topic = "unknown";
        }
        sf.text = read_file(file);
        files.push_back(std::move(sf));
    };
    auto is_py = [](const fs::path& p) { return p.extension() == ".py"; };
    std::string root_repo = fs::absolute(root).lexically_normal().filename().string();
    if (root_repo.empty()) root_repo = fs::absolute(root).lexically_normal().parent_path().filename().string();
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory()) {
            std::string repo_id = entry.path().filename().string();
            if (repo_id.empty() || repo_id.front() == '.') continue;
            for (const auto& f : fs::recursive_directory_iterator(entry.path())) {
                if (f.is_regular_file() && is_py(f.path())) add_repo_file(repo_id, entry.path(), f.path());
            }
        } else if (entry.is_regular_file() && is_py(entry.path())) {
            add_repo_file(root_repo, root, entry.path());
        }
    }
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return std::tie(a.repo_id, a.path) < std::tie(b.repo_id, b.path); });
    return files;
}

MiningResult mine(const std::vector<SourceFile>& files, const MiningOptions& options) {
    struct FileOutcome {
        bool skipped = false;
        bool parse_error = false;
        std::string reason;
        std::vector<FunctionInstance> candidates;
        std::vector<FilterReport> reports;
    };
    std::vector<FileOutcome> outcomes(files.size());
    parallel_for(files.size(), options.workers, [&](std::size_t i) {
        const auto& file = files[i];
        auto& out = outcomes[i];
        if (options.created_before && !file.created_at.empty() && file.created_at >= *options.created_before) {
            out.skipped = true;
            out.reason = "created_at " + file.created_at + " not before " + *options.created_before;
            return;
        }
        if (!text::is_valid_utf8(file.text)) {
            out.skipped = true;
            out.reason = "not valid UTF-8";
            return;
        }
        try {
            auto tree = py::parse_module(file.text);
            for (const auto& fn : extract_functions(tree)) {
                auto inst = make_instance(file, fn, tree);
                out.reports.push_back(apply_filters(inst, options.filters));
                out.candidates.push_back(std::move(inst));
            }
        } catch (const py::ParseError& e) {
            out.skipped = true;
            out.parse_error = true;
            out.reason = e.what();
        }
    });

    MiningResult result;
    std::vector<FunctionInstance> accepted;
    for (std::size_t i = 0; i < files.size(); ++i) {
        auto& o = outcomes[i];
        ++result.stats.files_seen;
        if (o.skipped) {
            if (o.parse_error) ++result.stats.parse_errors;
            result.stats.skipped.push_back(files[i].repo_id + "/" + files[i].path + ": " + o.reason);
            log::debug("skipped " + files[i].path + ": " + o.reason);
            continue;
        }
        ++result.stats.files_parsed;
        for (std::size_t k = 0; k < o.candidates.size(); ++k) {
            ++result.stats.functions_extracted;
            const auto& rep = o.reports[k];
            if (rep.accepted) {
                accepted.push_back(std::move(o.candidates[k]));
            } else {
                for (const auto& rule : rep.failed_rules()) ++result.stats.rejections_by_rule[rule];
            }
            result.reports.push_back(rep);
        }
    }
    result.stats.accepted = accepted.size();
    if (options.sample_size) {
        result.instances = stratified_sample(accepted, *options.sample_size, options.seed);
    } else {
        result.instances = std::move(accepted);
    }
    result.stats.sampled = result.instances.size();
    return result;
}

}  // namespace intentfill::miner
