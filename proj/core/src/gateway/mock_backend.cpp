#include <cctype>
#include <chrono>
#include <fstream>
#include <regex>
#include <thread>

#include <nlohmann/json.hpp>

#include "intentfill/gateway/gateway.hpp"
#include "intentfill/intent/reasoning.hpp"
#include "intentfill/text.hpp"

namespace intentfill::gateway {

using nlohmann::json;

namespace {

MockResponse response_from_json(const json& j) {
    MockResponse r;
    if (j.is_string()) {
        r.text = j.get<std::string>();
        return r;
    }
    r.text = j.value("text", std::string{});
    if (j.contains("logprob") && !j["logprob"].is_null()) r.logprob = j["logprob"].get<double>();
    r.error = j.value("error", std::string{});
    if (!r.error.empty() && r.error != "timeout" && r.error != "server" && r.error != "invalid")
        throw Error("mock script: unknown error kind '" + r.error + "'");
    return r;
}

std::vector<MockResponse> responses_from_json(const json& j) {
    std::vector<MockResponse> out;
    if (j.is_array())
        for (const auto& e : j) out.push_back(response_from_json(e));
    else
        out.push_back(response_from_json(j));
    if (out.empty()) throw Error("mock script: empty response list");
    return out;
}

struct SyntheticSignature {
    std::string name = "function";
    std::vector<std::string> args;
};

SyntheticSignature last_signature(std::string_view prompt) {
    static const std::regex def_re(R"(def\s+([A-Za-z_]\w*)\s*\(([^)]*)\))");
    SyntheticSignature sig;
    std::string s(prompt);
    for (auto it = std::sregex_iterator(s.begin(), s.end(), def_re); it != std::sregex_iterator(); ++it) {
        sig.name = (*it)[1].str();
        sig.args.clear();
        std::string params = (*it)[2].str();
        std::size_t start = 0;
        while (start <= params.size()) {
            auto comma = params.find(',', start);
            if (comma == std::string::npos) comma = params.size();
            std::string p(text::trim(std::string_view(params).substr(start, comma - start)));
            start = comma + 1;
            auto cut = p.find_first_of(":=");
            p = std::string(text::trim(std::string_view(p).substr(0, cut)));
            if (p.empty() || p[0] == '*' || p == "self" || p == "cls" || p == "/") continue;
            sig.args.push_back(p);
        }
    }
    return sig;
}

std::string words_of(const std::string& name) {
    std::string out;
    for (char c : name) out += c == '_' ? ' ' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return std::string(text::trim(out));
}

intent::Docstring synthetic_docstring(const SyntheticSignature& sig, int index) {
    static const char* const kSummaries[] = {
        "Compute the %s result for the given inputs.",
        "Return the %s value derived from the arguments.",
        "Process the inputs and produce the %s output.",
    };
    std::string summary = kSummaries[index % 3];
    summary.replace(summary.find("%s"), 2, words_of(sig.name));
    intent::Docstring d;
    d.summary = summary;
    d.operations = {"Combines the arguments and returns the outcome."};
    for (const auto& a : sig.args) d.args.push_back({a, "object", "input " + words_of(a) + "."});
    d.returns_type = "object";
    d.returns = "the " + words_of(sig.name) + " result.";
    return d;
}

intent::ReasoningTrace synthetic_trace(const SyntheticSignature& sig) {
    intent::ReasoningTrace t;
    const auto w = words_of(sig.name);
    t.lexical_steps = {"The name " + sig.name + " suggests " + w + ".",
                       "It takes " + std::to_string(sig.args.size()) + " arguments.", "It likely computes " + w + "."};
    t.semantic_steps = {"The preceding code defines helpers.", "Relevant variables come from the arguments.",
                        "The body is missing."};
    t.intent_steps = {"The core logic is missing.", "A simple sequence of statements suffices.",
                      "It computes " + w + " from its arguments."};
    return t;
}

constexpr std::string_view kBody = "    result = None\n    return result\n";

}  // namespace

void from_json(const json& j, MockScript& s) {
    s = MockScript{};
    s.delay_s = j.value("delay_s", 0.0);
    s.synthetic = j.value("synthetic", true);
    if (j.contains("sequence"))
        for (const auto& e : j["sequence"]) s.sequence.push_back(responses_from_json(e));
    if (j.contains("by_hash"))
        for (const auto& [k, v] : j["by_hash"].items()) s.by_hash[k] = responses_from_json(v);
    if (j.contains("rules")) {
        for (const auto& r : j["rules"]) {
            MockRule rule;
            rule.contains = r.at("contains").get<std::string>();
            rule.responses = responses_from_json(r.contains("responses") ? r["responses"] : r.at("response"));
            s.rules.push_back(std::move(rule));
        }
    }
}

MockScript load_mock_script(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open mock script " + path.string());
    try {
        return json::parse(in).get<MockScript>();
    } catch (const json::exception& e) {
        throw Error("invalid mock script " + path.string() + ": " + e.what());
    }
}

std::vector<float> letter_frequency(std::string_view text) {
    std::vector<float> v(26, 0.0f);
    for (char c : text) {
        const auto l = std::tolower(static_cast<unsigned char>(c));
        if (l >= 'a' && l <= 'z') v[static_cast<std::size_t>(l - 'a')] += 1.0f;
    }
    return v;
}

std::string synthetic_response(std::string_view prompt, int index) {
    const auto sig = last_signature(prompt);
    const auto trimmed = text::rtrim(prompt);
    const bool annotation = prompt.find("Now annotate this function") != std::string_view::npos ||
                            prompt.find("could not be parsed") != std::string_view::npos;
    std::string out;
    if (trimmed.ends_with("<reasoning>")) {
        out = intent::render_reasoning(synthetic_trace(sig)) + "</reasoning>\n<docstring>" +
              intent::render_docstring(synthetic_docstring(sig, index)) + "</docstring>";
    } else if (trimmed.ends_with("<docstring>")) {
        out = intent::render_docstring(synthetic_docstring(sig, index)) + "</docstring>\n<code>" + std::string(kBody) +
              "</code>";
    } else if (trimmed.ends_with("<code>")) {
        out = std::string(kBody) + "</code>";
    } else if (annotation) {
        out = "<reasoning>" + intent::render_reasoning(synthetic_trace(sig)) + "</reasoning>\n<docstring>" +
              intent::render_docstring(synthetic_docstring(sig, index)) + "</docstring>";
    } else {
        out = std::string(kBody);
    }
    return out;
}

MockBackend::MockBackend(BackendConfig cfg, MockScript script) : Backend(std::move(cfg)), script_(std::move(script)) {}

std::string MockBackend::request_key(std::string_view prompt, const SamplingParams& params) {
    std::string key(prompt);
    key += '\x1f';
    key += json(params).dump();
    return text::hex64(text::fnv1a64(key));
}

std::vector<MockBackend::Request> MockBackend::requests() const {
    std::lock_guard lock(mu_);
    return log_;
}

void MockBackend::clear_requests() {
    std::lock_guard lock(mu_);
    log_.clear();
}

std::vector<MockResponse> MockBackend::resolve(const std::string& prompt, const SamplingParams& params) {
    std::lock_guard lock(mu_);
    log_.push_back({"complete", prompt, params});
    if (next_sequence_ < script_.sequence.size()) return script_.sequence[next_sequence_++];
    if (auto it = script_.by_hash.find(request_key(prompt, params)); it != script_.by_hash.end()) return it->second;
    for (const auto& rule : script_.rules)
        if (prompt.find(rule.contains) != std::string::npos) return rule.responses;
    if (!script_.synthetic) throw BackendError(name() + ": no scripted response for request", false, 404);
    std::vector<MockResponse> out;
    const auto h = text::fnv1a64(prompt);
    for (int i = 0; i < params.n; ++i) {
        MockResponse r;
        r.text = synthetic_response(prompt, i);
        r.logprob = -(0.1 + static_cast<double>((h >> (8 * (i % 8))) % 50) / 100.0);
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

void mock_wait(const BackendConfig& cfg, double delay_s) {
    if (delay_s <= 0.0) return;
    if (delay_s > cfg.timeout_s) {
        std::this_thread::sleep_for(std::chrono::duration<double>(cfg.timeout_s));
        throw Timeout(cfg.name + ": request timed out");
    }
    std::this_thread::sleep_for(std::chrono::duration<double>(delay_s));
}

}  // namespace

std::vector<Generation> MockBackend::wire_complete(const std::string& prompt, const SamplingParams& params) {
    auto responses = resolve(prompt, params);
    mock_wait(config(), script_.delay_s);
    const auto& first = responses.front();
    if (first.error == "timeout") throw Timeout(name() + ": scripted timeout");
    if (first.error == "server") throw BackendError(name() + ": scripted server error", true, 503);
    if (first.error == "invalid") throw BackendError(name() + ": scripted invalid request", false, 400);
    std::vector<Generation> out;
    for (int i = 0; i < params.n; ++i) {
        const auto& r = responses[static_cast<std::size_t>(i) % responses.size()];
        Generation g;
        g.text = r.text;
        g.mean_logprob = r.logprob;
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<float> MockBackend::wire_embed(const std::string& text) {
    {
        std::lock_guard lock(mu_);
        log_.push_back({"embed", text, {}});
    }
    mock_wait(config(), script_.delay_s);
    return letter_frequency(text);
}

}  // namespace intentfill::gateway
