#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "intentfill/completion/session.hpp"
#include "intentfill/gateway/gateway.hpp"

namespace intentfill::completion {

struct EngineConfig {
    gateway::SamplingParams intent_params = gateway::default_params(Stage::Intent);
    gateway::SamplingParams code_params = gateway::default_params(Stage::Code);
};

/// Model roles. In PLUGIN mode stage 1 runs on `intent_model` and stage 3 on
/// `completer`; every other mode uses `completer` only.
struct Backends {
    gateway::Backend* completer = nullptr;
    gateway::Backend* intent_model = nullptr;
};

/// Stage-2 decisions for the automated policies.
class Interactor {
public:
    virtual ~Interactor() = default;
    /// Rank to select among session.candidates.
    virtual int select(const Session& session) = 0;
    /// Edited text of `doc`, or nullopt to keep it. May append to `detail`.
    virtual std::optional<std::string> edit(const Session& session, const std::string& doc, std::string& detail) = 0;
    /// Backend requests issued by the last call (embeddings).
    virtual int take_request_count() { return 0; }
};

struct Task {
    miner::FunctionInstance instance;
    std::optional<std::string> oracle_docstring;
};

struct IntentResult {
    std::vector<CandidateIntent> candidates;
    std::vector<std::string> warnings;
    int gen_tokens = 0;
};

/// Drops whole lines from the front of preceding_code until `build(inst)`
/// plus `max_new_tokens` fits the window. Throws ContextOverflow when even an
/// empty context does not fit.
miner::FunctionInstance fit_context(const miner::FunctionInstance& inst, int context_window, int max_new_tokens,
                                    const std::function<std::string(const miner::FunctionInstance&)>& build,
                                    bool* truncated = nullptr);

/// Parses, dedupes (exact docstring text, keeping the most confident copy)
/// and ranks raw stage-1 generations. Throws AllCandidatesMalformed.
IntentResult rank_candidates(const std::vector<gateway::Generation>& generations);

/// Stage 1 of REASON/PLUGIN: k sampled reasoning+docstring generations.
IntentResult infer_intents(const miner::FunctionInstance& inst, gateway::Backend& backend,
                           const gateway::SamplingParams& params);

struct CodeResult {
    std::string code;
    bool unterminated = false;
    int gen_tokens = 0;
};

/// Stage 3: one generation conditioned on `docstring`. Throws EmptyGeneration.
CodeResult generate_code(const miner::FunctionInstance& inst, const std::string& docstring,
                         gateway::Backend& backend, const gateway::SamplingParams& params);

/// Adds the blank-line framing the verbalized layout uses around a docstring.
std::string frame_docstring(std::string_view doc);

/// Deterministic session id.
std::string session_id(const miner::FunctionInstance& inst, Mode mode, Policy policy, std::string_view salt = {});

Session new_session(const Task& task, Mode mode, Policy policy);

// Stage transitions. Each throws OutOfOrder when the session is not in a
// state that admits the action. Model-stage failures mark the session
// Failed and rethrow.
void run_intent_stage(Session& s, const Backends& backends, const EngineConfig& cfg);
void select_candidate(Session& s, int rank, Actor actor);
void set_edited_docstring(Session& s, std::string doc, Actor actor, std::string detail = {});
void run_code_stage(Session& s, const Backends& backends, const EngineConfig& cfg);

/// Runs every stage the mode and policy call for. Human policy stops after
/// stage 1. Errors are recorded on the returned (partial) session.
Session run_pipeline(const Task& task, Mode mode, Policy policy, const Backends& backends, const EngineConfig& cfg,
                     Interactor* interactor = nullptr);

using InteractorFactory = std::function<std::unique_ptr<Interactor>(const Task&)>;

/// Independent sessions in parallel; output order follows `tasks`.
std::vector<Session> run_batch(const std::vector<Task>& tasks, Mode mode, Policy policy, const Backends& backends,
                               const EngineConfig& cfg, const InteractorFactory& interactors, std::size_t workers);

}  // namespace intentfill::completion
