#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "intentfill/error.hpp"
#include "intentfill/gateway/gateway.hpp"
#include "intentfill/miner/corpus_miner.hpp"

namespace intentfill::completion {

enum class Mode { Direct, Intent, Reason, Oracle, Plugin };
enum class Policy { None, Select, Edit, Both, Human };
enum class Actor { System, Simulated, Human };

std::string_view to_string(Mode m);
std::string_view to_string(Policy p);
std::string_view to_string(Actor a);
Mode parse_mode(std::string_view s);
Policy parse_policy(std::string_view s);

struct CandidateIntent {
    int rank = 0;
    std::string trace_text;
    std::string docstring_text;
    std::optional<double> mean_logprob;
    bool unterminated = false;

    bool operator==(const CandidateIntent&) const = default;
};

struct Event {
    int stage = 0;  // 1 intent, 2 interaction, 3 code
    std::string name;
    std::string timestamp;  // ISO-8601 UTC
    Actor actor = Actor::System;
    std::string backend;  // empty for non-model events
    std::string detail;
};

struct Timings {
    double intent_s = 0.0;
    double interact_s = 0.0;
    double code_s = 0.0;
};

/// Lifecycle; transitions only move forward, except re-selection and
/// repeated edits within stage 2.
enum class Status { Created, IntentsReady, Selected, Edited, Completed, Failed };
std::string_view to_string(Status s);

struct Session {
    std::string id;
    miner::FunctionInstance instance;
    Mode mode = Mode::Reason;
    Policy policy = Policy::None;
    std::optional<std::string> oracle_docstring;
    std::vector<CandidateIntent> candidates;
    std::optional<int> selected_rank;
    std::optional<std::string> edited_docstring;
    std::optional<std::string> docstring;  // the intent fixed for stage 3
    std::optional<std::string> final_code;
    bool code_unterminated = false;
    std::vector<Event> events;
    Timings timings;
    int gen_tokens = 0;     // completion tokens over all generation requests
    int request_count = 0;  // every backend call, embeddings included
    Status status = Status::Created;
    std::vector<std::string> warnings;
    std::optional<std::string> error;

    double total_s() const { return timings.intent_s + timings.interact_s + timings.code_s; }
    const CandidateIntent* candidate(int rank) const;
};

void to_json(nlohmann::json& j, const CandidateIntent& c);
void from_json(const nlohmann::json& j, CandidateIntent& c);
void to_json(nlohmann::json& j, const Event& e);
void from_json(const nlohmann::json& j, Event& e);
void to_json(nlohmann::json& j, const Session& s);
void from_json(const nlohmann::json& j, Session& s);

/// Session JSON without timestamps or timings, for reproducibility checks.
nlohmann::json stable_view(const Session& s);

class AllCandidatesMalformed : public Error {
public:
    explicit AllCandidatesMalformed(std::vector<std::string> raw)
        : Error("no candidate docstring could be parsed from " + std::to_string(raw.size()) + " generations"),
          raw_(std::move(raw)) {}
    const std::vector<std::string>& raw_outputs() const noexcept { return raw_; }

private:
    std::vector<std::string> raw_;
};

class EmptyGeneration : public Error {
public:
    using Error::Error;
};

class ContextOverflow : public Error {
public:
    using Error::Error;
};

/// An action arrived in a state that does not allow it.
class OutOfOrder : public Error {
public:
    using Error::Error;
};

class InvalidAction : public Error {
public:
    using Error::Error;
};

}  // namespace intentfill::completion
