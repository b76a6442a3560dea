#include "intentfill/completion/session.hpp"

#include <array>
#include <utility>

#include <nlohmann/json.hpp>

namespace intentfill::completion {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Mode, std::string_view>, 5> kModes{{{Mode::Direct, "direct"},
                                                                  {Mode::Intent, "intent"},
                                                                  {Mode::Reason, "reason"},
                                                                  {Mode::Oracle, "oracle"},
                                                                  {Mode::Plugin, "plugin"}}};
constexpr std::array<std::pair<Policy, std::string_view>, 5> kPolicies{{{Policy::None, "none"},
                                                                       {Policy::Select, "select"},
                                                                       {Policy::Edit, "edit"},
                                                                       {Policy::Both, "both"},
                                                                       {Policy::Human, "human"}}};
constexpr std::array<std::pair<Actor, std::string_view>, 3> kActors{
    {{Actor::System, "system"}, {Actor::Simulated, "simulated"}, {Actor::Human, "human"}}};
constexpr std::array<std::pair<Status, std::string_view>, 6> kStatuses{{{Status::Created, "created"},
                                                                       {Status::IntentsReady, "intents_ready"},
                                                                       {Status::Selected, "selected"},
                                                                       {Status::Edited, "edited"},
                                                                       {Status::Completed, "completed"},
                                                                       {Status::Failed, "failed"}}};

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E v) {
    for (const auto& [e, n] : table)
        if (e == v) return n;
    return "?";
}

template <typename E, std::size_t N>
E value_of(const std::array<std::pair<E, std::string_view>, N>& table, std::string_view s, const char* what) {
    for (const auto& [e, n] : table)
        if (n == s) return e;
    throw InvalidAction(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

json optional_json(const auto& v) { return v ? json(*v) : json(nullptr); }

template <typename T>
std::optional<T> optional_field(const json& j, const char* key) {
    if (auto it = j.find(key); it != j.end() && !it->is_null()) return it->get<T>();
    return std::nullopt;
}

}  // namespace

std::string_view to_string(Mode m) { return name_of(kModes, m); }
std::string_view to_string(Policy p) { return name_of(kPolicies, p); }
std::string_view to_string(Actor a) { return name_of(kActors, a); }
std::string_view to_string(Status s) { return name_of(kStatuses, s); }
Mode parse_mode(std::string_view s) { return value_of(kModes, s, "mode"); }
Policy parse_policy(std::string_view s) { return value_of(kPolicies, s, "policy"); }

const CandidateIntent* Session::candidate(int rank) const {
    for (const auto& c : candidates)
        if (c.rank == rank) return &c;
    return nullptr;
}

void to_json(json& j, const CandidateIntent& c) {
    j = json{{"rank", c.rank},
             {"trace_text", c.trace_text},
             {"docstring_text", c.docstring_text},
             {"mean_logprob", optional_json(c.mean_logprob)},
             {"unterminated", c.unterminated}};
}

void from_json(const json& j, CandidateIntent& c) {
    c.rank = j.at("rank").get<int>();
    c.trace_text = j.value("trace_text", std::string{});
    c.docstring_text = j.at("docstring_text").get<std::string>();
    c.mean_logprob = optional_field<double>(j, "mean_logprob");
    c.unterminated = j.value("unterminated", false);
}

void to_json(json& j, const Event& e) {
    j = json{{"stage", e.stage},         {"name", e.name},       {"timestamp", e.timestamp},
             {"actor", to_string(e.actor)}, {"backend", e.backend}, {"detail", e.detail}};
}

void from_json(const json& j, Event& e) {
    e.stage = j.at("stage").get<int>();
    e.name = j.at("name").get<std::string>();
    e.timestamp = j.value("timestamp", std::string{});
    e.actor = value_of(kActors, j.value("actor", std::string("system")), "actor");
    e.backend = j.value("backend", std::string{});
    e.detail = j.value("detail", std::string{});
}

void to_json(json& j, const Session& s) {
    j = json{{"id", s.id},
             {"instance", s.instance},
             {"mode", to_string(s.mode)},
             {"policy", to_string(s.policy)},
             {"oracle_docstring", optional_json(s.oracle_docstring)},
             {"candidates", s.candidates},
             {"selected_rank", optional_json(s.selected_rank)},
             {"edited_docstring", optional_json(s.edited_docstring)},
             {"docstring", optional_json(s.docstring)},
             {"final_code", optional_json(s.final_code)},
             {"code_unterminated", s.code_unterminated},
             {"events", s.events},
             {"timings",
              {{"intent_s", s.timings.intent_s},
               {"interact_s", s.timings.interact_s},
               {"code_s", s.timings.code_s},
               {"total_s", s.total_s()}}},
             {"gen_tokens", s.gen_tokens},
             {"request_count", s.request_count},
             {"status", to_string(s.status)},
             {"warnings", s.warnings},
             {"error", optional_json(s.error)}};
}

void from_json(const json& j, Session& s) {
    s = Session{};
    s.id = j.at("id").get<std::string>();
    j.at("instance").get_to(s.instance);
    s.mode = parse_mode(j.at("mode").get<std::string>());
    s.policy = parse_policy(j.value("policy", std::string("none")));
    s.oracle_docstring = optional_field<std::string>(j, "oracle_docstring");
    s.candidates = j.value("candidates", std::vector<CandidateIntent>{});
    s.selected_rank = optional_field<int>(j, "selected_rank");
    s.edited_docstring = optional_field<std::string>(j, "edited_docstring");
    s.docstring = optional_field<std::string>(j, "docstring");
    s.final_code = optional_field<std::string>(j, "final_code");
    s.code_unterminated = j.value("code_unterminated", false);
    s.events = j.value("events", std::vector<Event>{});
    if (auto it = j.find("timings"); it != j.end()) {
        s.timings.intent_s = it->value("intent_s", 0.0);
        s.timings.interact_s = it->value("interact_s", 0.0);
        s.timings.code_s = it->value("code_s", 0.0);
    }
    s.gen_tokens = j.value("gen_tokens", 0);
    s.request_count = j.value("request_count", 0);
    s.status = value_of(kStatuses, j.value("status", std::string("created")), "status");
    s.warnings = j.value("warnings", std::vector<std::string>{});
    s.error = optional_field<std::string>(j, "error");
}

json stable_view(const Session& s) {
    json j = s;
    j.erase("timings");
    for (auto& e : j["events"]) e.erase("timestamp");
    return j;
}

}  // namespace intentfill::completion
