#include "intentfill/annotation/annotation_engine.hpp"

#include <mutex>
#include <optional>
#include <random>

#include <nlohmann/json.hpp>

#include "intentfill/dataset/formatter.hpp"
#include "intentfill/intent/prompts.hpp"
#include "intentfill/log.hpp"
#include "intentfill/parallel.hpp"
#include "intentfill/random.hpp"
#include "intentfill/text.hpp"

namespace intentfill::annotation {

using nlohmann::json;

std::array<std::size_t, 2> pick_demo_indices(std::size_t seed_count, std::uint64_t rng_seed,
                                             std::uint64_t request_index) {
    if (seed_count < 2) throw TooFewSeeds(seed_count);
    std::mt19937_64 rng(mix_seed(rng_seed, request_index));
    const auto first = static_cast<std::size_t>(uniform_below(rng, seed_count));
    auto second = static_cast<std::size_t>(uniform_below(rng, seed_count - 1));
    if (second >= first) ++second;
    return {first, second};
}

std::array<AnnotatedInstance, 2> pick_demos(const std::vector<AnnotatedInstance>& seeds, std::uint64_t rng_seed,
                                            std::uint64_t request_index) {
    auto [a, b] = pick_demo_indices(seeds.size(), rng_seed, request_index);
    return {seeds[a], seeds[b]};
}

AnnotatedInstance truncate_demo(const AnnotatedInstance& demo, std::size_t max_tokens, const TokenCounter& count) {
    if (max_tokens == 0) throw Error("max_tokens must be positive");
    const TokenCounter counter = count ? count : TokenCounter(text::estimate_tokens);
    auto fits = [&](const AnnotatedInstance& d) { return counter(intent::render_demo(d)) <= max_tokens; };
    if (fits(demo)) return demo;

    // Line starts of the context; dropping the first k lines keeps a suffix.
    const auto& ctx = demo.instance.preceding_code;
    std::vector<std::size_t> starts{0};
    for (std::size_t i = 0; i < ctx.size(); ++i)
        if (ctx[i] == '\n' && i + 1 < ctx.size()) starts.push_back(i + 1);
    starts.push_back(ctx.size());

    auto with_drop = [&](std::size_t k) {
        AnnotatedInstance d = demo;
        d.instance.preceding_code = ctx.substr(starts[k]);
        d.instance.context_line_count = static_cast<int>(text::count_lines(d.instance.preceding_code));
        return d;
    };
    const std::size_t all = starts.size() - 1;
    if (!fits(with_drop(all)))
        throw DemoTooLarge("demo " + demo.instance.id + " exceeds " + std::to_string(max_tokens) +
                           " tokens without any context");
    std::size_t lo = 0, hi = all;  // fits(with_drop(hi)) holds, fits(with_drop(lo)) does not
    while (hi - lo > 1) {
        const auto mid = lo + (hi - lo) / 2;
        if (fits(with_drop(mid)))
            hi = mid;
        else
            lo = mid;
    }
    return with_drop(hi);
}

std::pair<intent::ReasoningTrace, intent::Docstring> parse_annotation(std::string_view raw) {
    auto parsed = dataset::parse_generation(raw);
    std::vector<std::string> missing;
    if (!parsed.trace.content || text::trim(*parsed.trace.content).empty()) missing.push_back("reasoning");
    if (!parsed.docstring.content || text::trim(*parsed.docstring.content).empty()) missing.push_back("docstring");
    if (!missing.empty()) throw intent::ParseIncomplete(std::move(missing));
    return {intent::parse_reasoning(*parsed.trace.content), intent::parse_docstring(*parsed.docstring.content)};
}

namespace {

std::string describe(const intent::ParseIncomplete& e) {
    return "missing " + text::join(e.missing(), ", ");
}

}  // namespace

AnnotationResult annotate(const miner::FunctionInstance& inst, const std::vector<AnnotatedInstance>& seeds,
                          gateway::Backend& backend, const AnnotateOptions& options, std::uint64_t request_index) {
    auto demos = pick_demos(seeds, options.rng_seed, request_index);
    for (auto& d : demos) d = truncate_demo(d, options.max_demo_tokens, options.count_tokens);
    const auto prompt = intent::build_annotation_prompt(inst, demos);

    gateway::SamplingParams params;
    params.temperature = options.temperature;
    params.top_p = 1.0;
    params.n = 1;
    params.max_tokens = options.max_tokens;
    params.stop = {std::string(dataset::kDocClose)};

    auto ask = [&](const std::string& p) {
        auto gen = backend.complete(p, params).front();
        if (gen.stopped) gen.text += dataset::kDocClose;
        return gen.text;
    };

    std::vector<std::string> raws;
    std::string problem;
    for (int attempt = 0; attempt < 2; ++attempt) {
        const auto p = attempt == 0 ? prompt : prompt + "\n\n" + intent::format_reminder(problem);
        raws.push_back(ask(p));
        try {
            auto [trace, doc] = parse_annotation(raws.back());
            AnnotatedInstance out{inst, std::move(trace), std::move(doc), backend.config().model_id.empty()
                                                                               ? backend.name()
                                                                               : backend.config().model_id,
                                  std::string(intent::kTemplateVersion)};
            // Must survive its own serialization before it is emitted.
            (void)json(out).get<AnnotatedInstance>();
            return {std::move(out), attempt};
        } catch (const intent::ParseIncomplete& e) {
            problem = describe(e);
        } catch (const Error& e) {
            problem = e.what();
        }
    }
    throw AnnotationRejected(inst.id, problem, std::move(raws));
}

void to_json(json& j, const RejectRecord& r) {
    j = json{{"instance_id", r.instance_id}, {"reason", r.reason}, {"raw_outputs", r.raw_outputs}};
}

void to_json(json& j, const AnnotationStats& s) {
    j = json{{"input", s.input},
             {"annotated", s.annotated},
             {"rejected", s.rejected},
             {"retried", s.retried},
             {"backend_errors", s.backend_errors},
             {"reject_rate", s.reject_rate()}};
}

AnnotationRun annotate_all(const std::vector<miner::FunctionInstance>& instances,
                           const std::vector<AnnotatedInstance>& seeds, gateway::Backend& backend,
                           const AnnotateOptions& options) {
    if (seeds.size() < 2) throw TooFewSeeds(seeds.size());
    struct Slot {
        std::optional<AnnotationResult> ok;
        std::optional<RejectRecord> reject;
        bool backend_error = false;
    };
    std::vector<Slot> slots(instances.size());
    parallel_for(instances.size(), options.workers, [&](std::size_t i) {
        try {
            slots[i].ok = annotate(instances[i], seeds, backend, options, i);
        } catch (const AnnotationRejected& e) {
            slots[i].reject = RejectRecord{e.instance_id(), e.reason(), e.raw_outputs()};
        } catch (const gateway::BackendError& e) {
            log::warn(std::string("annotation backend failure: ") + e.what());
            slots[i].reject = RejectRecord{instances[i].id, std::string("backend: ") + e.what(), {}};
            slots[i].backend_error = true;
        }
    });

    AnnotationRun run;
    run.stats.input = instances.size();
    for (auto& s : slots) {
        if (s.ok) {
            run.stats.retried += s.ok->retries > 0 ? 1 : 0;
            run.annotated.push_back(std::move(s.ok->annotated));
        } else {
            run.stats.retried += s.reject->raw_outputs.size() > 1 ? 1 : 0;
            run.stats.backend_errors += s.backend_error ? 1 : 0;
            run.rejected.push_back(std::move(*s.reject));
        }
    }
    run.stats.annotated = run.annotated.size();
    run.stats.rejected = run.rejected.size();
    return run;
}

}  // namespace intentfill::annotation
