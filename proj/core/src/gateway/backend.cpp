#include "intentfill/gateway/gateway.hpp"

#include <chrono>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "intentfill/log.hpp"
#include "intentfill/text.hpp"

namespace intentfill::gateway {

using nlohmann::json;

void SamplingParams::validate() const {
    if (!(top_p > 0.0 && top_p <= 1.0)) throw InvalidRequest("top_p must be in (0, 1]");
    if (!(temperature >= 0.0 && temperature <= 2.0)) throw InvalidRequest("temperature must be in [0, 2]");
    if (n < 1 || n > 128) throw InvalidRequest("n must be in [1, 128]");
    if (max_tokens < 1) throw InvalidRequest("max_tokens must be positive");
    for (const auto& s : stop)
        if (s.empty()) throw InvalidRequest("empty stop sequence");
}

void to_json(json& j, const SamplingParams& p) {
    j = json{{"top_p", p.top_p},
             {"temperature", p.temperature},
             {"n", p.n},
             {"max_tokens", p.max_tokens},
             {"stop", p.stop}};
}

void from_json(const json& j, SamplingParams& p) {
    p = SamplingParams{};
    p = with_overrides(p, j);
}

SamplingParams default_params(Stage stage) {
    SamplingParams p;
    if (stage == Stage::Intent) {
        p.top_p = 0.95;
        p.temperature = 0.4;
        p.n = 3;
        p.max_tokens = 512;
        p.stop = {"</docstring>"};
    } else {
        p.top_p = 1.0;
        p.temperature = 0.2;
        p.n = 1;
        p.max_tokens = 768;
        p.stop = {"</code>"};
    }
    return p;
}

SamplingParams with_overrides(SamplingParams p, const json& overrides) {
    if (overrides.is_null()) return p;
    if (!overrides.is_object()) throw InvalidRequest("sampling overrides must be an object");
    for (const auto& [key, value] : overrides.items()) {
        if (key == "top_p")
            p.top_p = value.get<double>();
        else if (key == "temperature")
            p.temperature = value.get<double>();
        else if (key == "n")
            p.n = value.get<int>();
        else if (key == "max_tokens")
            p.max_tokens = value.get<int>();
        else if (key == "stop")
            p.stop = value.is_string() ? std::vector<std::string>{value.get<std::string>()}
                                       : value.get<std::vector<std::string>>();
        else if (key != "greedy")
            throw InvalidRequest("unknown sampling field: " + key);
    }
    if (overrides.value("greedy", false)) {
        p.temperature = 0.0;
        p.top_p = 1.0;
        p.n = 1;
    }
    p.validate();
    return p;
}

void to_json(json& j, const Generation& g) {
    j = json{{"text", g.text},
             {"latency_s", g.latency_s},
             {"prompt_tokens", g.prompt_tokens},
             {"completion_tokens", g.completion_tokens},
             {"stopped", g.stopped}};
    j["mean_logprob"] = g.mean_logprob ? json(*g.mean_logprob) : json(nullptr);
}

void from_json(const json& j, Generation& g) {
    g = Generation{};
    g.text = j.at("text").get<std::string>();
    if (j.contains("mean_logprob") && !j["mean_logprob"].is_null()) g.mean_logprob = j["mean_logprob"].get<double>();
    g.latency_s = j.value("latency_s", 0.0);
    g.prompt_tokens = j.value("prompt_tokens", 0);
    g.completion_tokens = j.value("completion_tokens", 0);
    g.stopped = j.value("stopped", false);
}

void BackendConfig::validate() const {
    if (name.empty()) throw Error("backend without a name");
    if (kind != "openai" && kind != "mock") throw Error("backend " + name + ": unknown kind '" + kind + "'");
    if (kind == "openai" && (base_url.empty() || model_id.empty()))
        throw Error("backend " + name + ": base_url and model_id are required");
    if (!(timeout_s > 0.0)) throw Error("backend " + name + ": timeout_s must be positive");
    if (max_retries < 0) throw Error("backend " + name + ": max_retries must be >= 0");
    if (max_parallel < 1 || max_parallel > 1024) throw Error("backend " + name + ": max_parallel must be in [1, 1024]");
    if (backoff_s < 0.0) throw Error("backend " + name + ": backoff_s must be >= 0");
    if (context_window < 1) throw Error("backend " + name + ": context_window must be positive");
}

void to_json(json& j, const BackendConfig& c) {
    j = json{{"name", c.name},
             {"kind", c.kind},
             {"base_url", c.base_url},
             {"model_id", c.model_id},
             {"auth_secret_ref", c.auth_secret_ref},
             {"timeout_s", c.timeout_s},
             {"max_retries", c.max_retries},
             {"max_parallel", c.max_parallel},
             {"backoff_s", c.backoff_s},
             {"context_window", c.context_window},
             {"embedding_model", c.embedding_model},
             {"mock_script", c.mock_script.string()}};
}

void from_json(const json& j, BackendConfig& c) {
    const BackendConfig d;
    c.name = j.value("name", d.name);
    c.kind = j.value("kind", d.kind);
    c.base_url = j.value("base_url", d.base_url);
    c.model_id = j.value("model_id", d.model_id);
    c.auth_secret_ref = j.value("auth_secret_ref", d.auth_secret_ref);
    c.timeout_s = j.value("timeout_s", d.timeout_s);
    c.max_retries = j.value("max_retries", d.max_retries);
    c.max_parallel = j.value("max_parallel", d.max_parallel);
    c.backoff_s = j.value("backoff_s", d.backoff_s);
    c.context_window = j.value("context_window", d.context_window);
    c.embedding_model = j.value("embedding_model", d.embedding_model);
    c.mock_script = j.value("mock_script", std::string{});
}

std::string cut_at_stop(std::string_view text, const std::vector<std::string>& stop, bool* stopped) {
    std::size_t cut = std::string_view::npos;
    for (const auto& s : stop) {
        if (s.empty()) continue;
        cut = std::min(cut, text.find(s));
    }
    if (stopped) *stopped = cut != std::string_view::npos;
    return std::string(text.substr(0, cut));
}

Backend::Backend(BackendConfig cfg) : cfg_(std::move(cfg)), slots_(std::clamp(cfg_.max_parallel, 1, 1024)) {
    cfg_.validate();
}

template <typename Fn>
auto Backend::call(Fn&& fn) -> decltype(fn()) {
    struct Slot {
        Backend& b;
        explicit Slot(Backend& backend) : b(backend) {
            b.slots_.acquire();
            auto now = ++b.in_flight_;
            auto peak = b.peak_in_flight_.load();
            while (now > peak && !b.peak_in_flight_.compare_exchange_weak(peak, now)) {
            }
        }
        ~Slot() {
            --b.in_flight_;
            b.slots_.release();
        }
    };
    for (int attempt = 0;; ++attempt) {
        try {
            Slot slot(*this);
            return fn();
        } catch (const BackendError& e) {
            if (!e.retryable() || attempt >= cfg_.max_retries) throw;
            ++retries_;
            log::warn(cfg_.name + ": attempt " + std::to_string(attempt + 1) + " failed (" + e.what() + "), retrying");
        }
        std::this_thread::sleep_for(std::chrono::duration<double>(cfg_.backoff_s * std::ldexp(1.0, attempt)));
    }
}

std::vector<Generation> Backend::complete(const std::string& prompt, const SamplingParams& params) {
    params.validate();
    const auto prompt_tokens = static_cast<int>(text::estimate_tokens(prompt));
    if (prompt_tokens > cfg_.context_window)
        throw InvalidRequest(cfg_.name + ": prompt of ~" + std::to_string(prompt_tokens) +
                             " tokens exceeds the context window");
    return call([&] {
        const auto t0 = std::chrono::steady_clock::now();
        auto gens = wire_complete(prompt, params);
        const double latency = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (gens.size() != static_cast<std::size_t>(params.n))
            throw BackendError(cfg_.name + ": expected " + std::to_string(params.n) + " generations, got " +
                                   std::to_string(gens.size()),
                               false);
        for (auto& g : gens) {
            bool hit = false;
            g.text = cut_at_stop(g.text, params.stop, &hit);
            g.stopped = g.stopped || hit;
            g.latency_s = latency;
            if (g.prompt_tokens == 0) g.prompt_tokens = prompt_tokens;
            if (g.completion_tokens == 0) g.completion_tokens = static_cast<int>(text::estimate_tokens(g.text));
        }
        return gens;
    });
}

std::vector<float> Backend::embed(const std::string& text) {
    if (text.empty()) throw InvalidRequest(cfg_.name + ": cannot embed empty text");
    return call([&] { return wire_embed(text); });
}

std::shared_ptr<Backend> make_backend(const BackendConfig& cfg) {
    cfg.validate();
    if (cfg.kind == "mock")
        return std::make_shared<MockBackend>(cfg, cfg.mock_script.empty() ? MockScript{} : load_mock_script(cfg.mock_script));
    return std::make_shared<OpenAIBackend>(cfg);
}

Registry Registry::from_json(const json& j, const std::filesystem::path& base_dir) {
    Registry r;
    if (!j.contains("backends") || !j["backends"].is_object()) throw Error("gateway config needs a \"backends\" object");
    for (const auto& [name, entry] : j["backends"].items()) {
        auto cfg = entry.get<BackendConfig>();
        cfg.name = name;
        if (!cfg.mock_script.empty() && cfg.mock_script.is_relative() && !base_dir.empty())
            cfg.mock_script = base_dir / cfg.mock_script;
        r.add(make_backend(cfg));
    }
    return r;
}

Registry Registry::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open gateway config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error("invalid gateway config " + path.string() + ": " + e.what());
    }
    return from_json(j, path.parent_path());
}

void Registry::add(std::shared_ptr<Backend> backend) {
    auto name = backend->name();
    if (!backends_.emplace(name, std::move(backend)).second) throw Error("duplicate backend " + name);
}

std::shared_ptr<Backend> Registry::get(std::string_view name) const {
    auto it = backends_.find(name);
    if (it == backends_.end()) throw Error("unknown backend " + std::string(name));
    return it->second;
}

bool Registry::contains(std::string_view name) const { return backends_.find(name) != backends_.end(); }

std::vector<std::string> Registry::names() const {
    std::vector<std::string> out;
    for (const auto& [k, _] : backends_) out.push_back(k);
    return out;
}

}  // namespace intentfill::gateway
