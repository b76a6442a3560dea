#include "intentfill/completion/engine.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <iomanip>
#include <set>
#include <sstream>

#include "intentfill/dataset/formatter.hpp"
#include "intentfill/intent/prompts.hpp"
#include "intentfill/log.hpp"
#include "intentfill/parallel.hpp"
#include "intentfill/text.hpp"

namespace intentfill::completion {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const auto t = std::chrono::system_clock::to_time_t(now);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%S") << '.' << std::setw(3) << std::setfill('0') << ms << 'Z';
    return out.str();
}

void add_event(Session& s, int stage, std::string name, Actor actor, std::string backend = {},
               std::string detail = {}) {
    s.events.push_back(Event{stage, std::move(name), utc_now(), actor, std::move(backend), std::move(detail)});
}

template <typename Fn>
void model_stage(Session& s, Fn&& fn) {
    try {
        fn();
    } catch (const OutOfOrder&) {
        throw;
    } catch (const InvalidAction&) {
        throw;
    } catch (const std::exception& e) {
        s.status = Status::Failed;
        s.error = e.what();
        throw;
    }
}

gateway::Backend& require(gateway::Backend* b, const char* role) {
    if (!b) throw InvalidAction(std::string("no ") + role + " backend configured");
    return *b;
}

std::string direct_prompt(const miner::FunctionInstance& inst) {
    return dataset::verbalize_context(inst) + "\n" + std::string(dataset::kCodeOpen);
}

std::string intent_first_prompt(const miner::FunctionInstance& inst) {
    return std::string(intent::template_asset("plain_intent")) + dataset::verbalize_context(inst) + "\n" +
           std::string(dataset::kDocOpen);
}

miner::FunctionInstance fitted(Session& s, const gateway::Backend& b, int max_new,
                               const std::function<std::string(const miner::FunctionInstance&)>& build) {
    bool truncated = false;
    auto inst = fit_context(s.instance, b.config().context_window, max_new, build, &truncated);
    if (truncated)
        s.warnings.push_back("preceding code truncated to " + std::to_string(inst.context_line_count) +
                             " lines to fit " + b.name() + "'s context window");
    return inst;
}

CodeResult code_from(const gateway::Generation& gen) {
    auto parsed = dataset::parse_generation(std::string(dataset::kCodeOpen) + gen.text);
    if (!parsed.code.content || text::trim(*parsed.code.content).empty())
        throw EmptyGeneration("code generation produced no body");
    return {*parsed.code.content, parsed.code.unterminated && !gen.stopped, gen.completion_tokens};
}

void run_intent_first(Session& s, gateway::Backend& b, const EngineConfig& cfg) {
    auto params = cfg.code_params;
    const auto t0 = Clock::now();
    const auto inst = fitted(s, b, params.max_tokens, intent_first_prompt);
    ++s.request_count;
    auto gen = b.complete(intent_first_prompt(inst), params).front();
    s.gen_tokens += gen.completion_tokens;
    s.timings.code_s += seconds_since(t0);

    auto parsed = dataset::parse_generation(std::string(dataset::kDocOpen) + gen.text);
    s.warnings.insert(s.warnings.end(), parsed.warnings.begin(), parsed.warnings.end());
    if (!parsed.docstring.content || text::trim(*parsed.docstring.content).empty())
        throw EmptyGeneration("intent-first generation produced no docstring");
    const std::string doc(text::trim(*parsed.docstring.content));
    s.candidates = {CandidateIntent{1, "", doc, gen.mean_logprob, parsed.docstring.unterminated}};
    s.selected_rank = 1;
    s.docstring = doc;
    add_event(s, 1, "intents_generated", Actor::System, b.name(), "k=1");
    add_event(s, 2, "selected", Actor::System, {}, "rank=1");
    if (!parsed.code.content || text::trim(*parsed.code.content).empty())
        throw EmptyGeneration("intent-first generation produced no body");
    s.final_code = *parsed.code.content;
    s.code_unterminated = parsed.code.unterminated && !gen.stopped;
    s.status = Status::Completed;
    add_event(s, 3, "code_generated", Actor::System, b.name());
}

}  // namespace

miner::FunctionInstance fit_context(const miner::FunctionInstance& inst, int context_window, int max_new_tokens,
                                    const std::function<std::string(const miner::FunctionInstance&)>& build,
                                    bool* truncated) {
    if (truncated) *truncated = false;
    const auto budget = static_cast<std::size_t>(std::max(0, context_window - max_new_tokens));
    auto fits = [&](const miner::FunctionInstance& x) { return text::estimate_tokens(build(x)) <= budget; };
    if (fits(inst)) return inst;

    const auto& ctx = inst.preceding_code;
    std::vector<std::size_t> starts{0};
    for (std::size_t i = 0; i < ctx.size(); ++i)
        if (ctx[i] == '\n' && i + 1 < ctx.size()) starts.push_back(i + 1);
    starts.push_back(ctx.size());
    auto drop = [&](std::size_t k) {
        auto x = inst;
        x.preceding_code = ctx.substr(starts[k]);
        x.context_line_count = static_cast<int>(text::count_lines(x.preceding_code));
        return x;
    };
    const auto all = starts.size() - 1;
    if (!fits(drop(all)))
        throw ContextOverflow("prompt for " + inst.id + " exceeds the context window even without preceding code");
    std::size_t lo = 0, hi = all;
    while (hi - lo > 1) {
        const auto mid = lo + (hi - lo) / 2;
        (fits(drop(mid)) ? hi : lo) = mid;
    }
    if (truncated) *truncated = true;
    return drop(hi);
}

IntentResult rank_candidates(const std::vector<gateway::Generation>& generations) {
    IntentResult out;
    std::vector<CandidateIntent> parsed;
    std::vector<std::string> raws;
    for (std::size_t i = 0; i < generations.size(); ++i) {
        const auto& g = generations[i];
        raws.push_back(g.text);
        out.gen_tokens += g.completion_tokens;
        auto p = dataset::parse_generation(std::string(dataset::kReasoningOpen) + g.text);
        if (!p.docstring.content || text::trim(*p.docstring.content).empty()) {
            out.warnings.push_back("candidate " + std::to_string(i + 1) + " is malformed: no docstring");
            continue;
        }
        if (!p.trace.content || text::trim(*p.trace.content).empty())
            out.warnings.push_back("candidate " + std::to_string(i + 1) + " has no reasoning trace");
        CandidateIntent c;
        c.trace_text = p.trace.content ? std::string(text::trim(*p.trace.content)) : std::string{};
        c.docstring_text = std::string(text::trim(*p.docstring.content));
        c.mean_logprob = g.mean_logprob;
        c.unterminated = p.docstring.unterminated && !g.stopped;
        parsed.push_back(std::move(c));
    }
    if (parsed.empty()) throw AllCandidatesMalformed(std::move(raws));

    const bool all_scored = std::all_of(parsed.begin(), parsed.end(), [](const auto& c) { return c.mean_logprob; });
    if (all_scored)
        std::stable_sort(parsed.begin(), parsed.end(),
                         [](const auto& a, const auto& b) { return *a.mean_logprob > *b.mean_logprob; });
    else
        out.warnings.push_back("backend returned no logprobs; candidates keep backend order");

    std::set<std::string> seen;
    for (auto& c : parsed) {
        if (!seen.insert(c.docstring_text).second) continue;
        c.rank = static_cast<int>(out.candidates.size()) + 1;
        out.candidates.push_back(std::move(c));
    }
    return out;
}

IntentResult infer_intents(const miner::FunctionInstance& inst, gateway::Backend& backend,
                           const gateway::SamplingParams& params) {
    auto build = [](const miner::FunctionInstance& x) { return dataset::build_inference_prefix(x, Stage::Intent); };
    bool truncated = false;
    const auto fit = fit_context(inst, backend.config().context_window, params.max_tokens, build, &truncated);
    auto result = rank_candidates(backend.complete(build(fit), params));
    if (truncated) result.warnings.push_back("preceding code truncated to fit the context window");
    return result;
}

std::string frame_docstring(std::string_view doc) {
    while (!doc.empty() && (doc.front() == '\n' || doc.front() == '\r')) doc.remove_prefix(1);
    doc = text::rtrim(doc);
    return "\n" + std::string(doc) + "\n";
}

CodeResult generate_code(const miner::FunctionInstance& inst, const std::string& docstring,
                         gateway::Backend& backend, const gateway::SamplingParams& params) {
    if (text::trim(docstring).empty()) throw InvalidAction("code generation needs a non-empty docstring");
    const auto framed = frame_docstring(docstring);
    auto build = [&](const miner::FunctionInstance& x) {
        return dataset::build_inference_prefix(x, Stage::Code, framed);
    };
    const auto fit = fit_context(inst, backend.config().context_window, params.max_tokens, build);
    return code_from(backend.complete(build(fit), params).front());
}

std::string session_id(const miner::FunctionInstance& inst, Mode mode, Policy policy, std::string_view salt) {
    std::string key = inst.id + '\x1f' + std::string(to_string(mode)) + '\x1f' + std::string(to_string(policy));
    if (!salt.empty()) key += '\x1f' + std::string(salt);
    return "s-" + text::hex64(text::fnv1a64(key));
}

Session new_session(const Task& task, Mode mode, Policy policy) {
    Session s;
    s.id = session_id(task.instance, mode, policy);
    s.instance = task.instance;
    s.mode = mode;
    s.policy = policy;
    s.oracle_docstring = task.oracle_docstring;
    return s;
}

void run_intent_stage(Session& s, const Backends& backends, const EngineConfig& cfg) {
    if (s.status != Status::Created) throw OutOfOrder("intent stage already ran");
    switch (s.mode) {
        case Mode::Direct:
            throw InvalidAction("direct mode has no intent stage");
        case Mode::Oracle:
            if (!s.oracle_docstring || text::trim(*s.oracle_docstring).empty())
                throw InvalidAction("oracle mode needs the benchmark docstring");
            s.docstring = *s.oracle_docstring;
            s.status = Status::Selected;
            add_event(s, 1, "oracle_docstring", Actor::System);
            return;
        case Mode::Intent:
            model_stage(s, [&] { run_intent_first(s, require(backends.completer, "completer"), cfg); });
            return;
        case Mode::Reason:
        case Mode::Plugin: {
            auto& b = s.mode == Mode::Plugin ? require(backends.intent_model, "intent-model")
                                             : require(backends.completer, "completer");
            model_stage(s, [&] {
                const auto t0 = Clock::now();
                ++s.request_count;
                auto r = infer_intents(s.instance, b, cfg.intent_params);
                s.timings.intent_s += seconds_since(t0);
                s.gen_tokens += r.gen_tokens;
                s.candidates = std::move(r.candidates);
                s.warnings.insert(s.warnings.end(), r.warnings.begin(), r.warnings.end());
                s.status = Status::IntentsReady;
                add_event(s, 1, "intents_generated", Actor::System, b.name(),
                          "k=" + std::to_string(s.candidates.size()));
            });
            return;
        }
    }
}

void select_candidate(Session& s, int rank, Actor actor) {
    if (s.mode != Mode::Reason && s.mode != Mode::Plugin)
        throw InvalidAction("selection applies to reason and plugin sessions only");
    if (s.status != Status::IntentsReady && s.status != Status::Selected && s.status != Status::Edited)
        throw OutOfOrder("cannot select in state " + std::string(to_string(s.status)));
    const auto* c = s.candidate(rank);
    if (!c) throw InvalidAction("no candidate with rank " + std::to_string(rank));
    s.selected_rank = rank;
    s.edited_docstring.reset();
    s.docstring = c->docstring_text;
    s.status = Status::Selected;
    add_event(s, 2, "selected", actor, {}, "rank=" + std::to_string(rank));
}

void set_edited_docstring(Session& s, std::string doc, Actor actor, std::string detail) {
    if (s.status != Status::Selected && s.status != Status::Edited)
        throw OutOfOrder("cannot edit in state " + std::string(to_string(s.status)));
    if (text::trim(doc).empty()) throw InvalidAction("edited docstring is empty");
    s.edited_docstring = doc;
    s.docstring = std::move(doc);
    s.status = Status::Edited;
    add_event(s, 2, "edited", actor, {}, std::move(detail));
}

void run_code_stage(Session& s, const Backends& backends, const EngineConfig& cfg) {
    auto& b = require(backends.completer, "completer");
    if (s.mode == Mode::Direct) {
        if (s.status != Status::Created) throw OutOfOrder("code stage already ran");
        model_stage(s, [&] {
            const auto t0 = Clock::now();
            const auto inst = fitted(s, b, cfg.code_params.max_tokens, direct_prompt);
            ++s.request_count;
            auto r = code_from(b.complete(direct_prompt(inst), cfg.code_params).front());
            s.timings.code_s += seconds_since(t0);
            s.gen_tokens += r.gen_tokens;
            s.final_code = std::move(r.code);
            s.code_unterminated = r.unterminated;
            s.status = Status::Completed;
            add_event(s, 3, "code_generated", Actor::System, b.name());
        });
        return;
    }
    if (s.status != Status::Selected && s.status != Status::Edited)
        throw OutOfOrder("generation needs a fixed docstring (state " + std::string(to_string(s.status)) + ")");
    model_stage(s, [&] {
        const auto t0 = Clock::now();
        ++s.request_count;
        auto r = generate_code(s.instance, *s.docstring, b, cfg.code_params);
        s.timings.code_s += seconds_since(t0);
        s.gen_tokens += r.gen_tokens;
        s.final_code = std::move(r.code);
        s.code_unterminated = r.unterminated;
        s.status = Status::Completed;
        add_event(s, 3, "code_generated", Actor::System, b.name());
    });
}

Session run_pipeline(const Task& task, Mode mode, Policy policy, const Backends& backends, const EngineConfig& cfg,
                     Interactor* interactor) {
    Session s = new_session(task, mode, policy);
    const bool interactive = mode == Mode::Reason || mode == Mode::Plugin;
    if (!interactive && policy != Policy::None)
        s.warnings.push_back("policy " + std::string(to_string(policy)) + " ignored in " +
                             std::string(to_string(mode)) + " mode");
    try {
        if (mode == Mode::Direct) {
            run_code_stage(s, backends, cfg);
            return s;
        }
        run_intent_stage(s, backends, cfg);
        if (mode == Mode::Intent) return s;
        if (interactive) {
            if (policy == Policy::Human) return s;
            const bool do_select = policy == Policy::Select || policy == Policy::Both;
            const bool do_edit = policy == Policy::Edit || policy == Policy::Both;
            if ((do_select || do_edit) && !interactor)
                throw InvalidAction("policy " + std::string(to_string(policy)) + " needs an interactor");
            const auto t0 = Clock::now();
            if (do_select)
                select_candidate(s, interactor->select(s), Actor::Simulated);
            else
                select_candidate(s, 1, Actor::System);
            if (do_edit) {
                std::string detail;
                auto edited = interactor->edit(s, *s.docstring, detail);
                if (edited && *edited != *s.docstring)
                    set_edited_docstring(s, std::move(*edited), Actor::Simulated, detail);
                else
                    add_event(s, 2, "edit_skipped", Actor::Simulated, {}, detail);
            }
            if (interactor) s.request_count += interactor->take_request_count();
            s.timings.interact_s += seconds_since(t0);
        }
        run_code_stage(s, backends, cfg);
    } catch (const std::exception& e) {
        if (s.status != Status::Failed) {
            s.status = Status::Failed;
            s.error = e.what();
        }
        log::warn("session " + s.id + " (" + s.instance.id + ") failed: " + e.what());
    }
    return s;
}

std::vector<Session> run_batch(const std::vector<Task>& tasks, Mode mode, Policy policy, const Backends& backends,
                               const EngineConfig& cfg, const InteractorFactory& interactors, std::size_t workers) {
    std::vector<Session> out(tasks.size());
    parallel_for(tasks.size(), workers, [&](std::size_t i) {
        std::unique_ptr<Interactor> it = interactors ? interactors(tasks[i]) : nullptr;
        out[i] = run_pipeline(tasks[i], mode, policy, backends, cfg, it.get());
    });
    return out;
}

}  // namespace intentfill::completion
