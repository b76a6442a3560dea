#include <cstdlib>
#include <regex>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "intentfill/gateway/gateway.hpp"
#include "intentfill/text.hpp"

namespace intentfill::gateway {

using nlohmann::json;

namespace {

std::string resolve_secret(const std::string& ref) {
    if (ref.empty()) return {};
    std::string var = ref.starts_with("env:") ? ref.substr(4) : ref;
    const char* value = std::getenv(var.c_str());
    if (!value) throw Error("secret environment variable " + var + " is not set");
    return value;
}

}  // namespace

OpenAIBackend::OpenAIBackend(BackendConfig cfg) : Backend(std::move(cfg)) {
    static const std::regex url_re(R"(^(https?)://([^/:]+)(?::(\d+))?(/.*)?$)");
    std::smatch m;
    const auto& url = config().base_url;
    if (!std::regex_match(url, m, url_re)) throw Error(name() + ": malformed base_url " + url);
    if (m[1] == "https") throw Error(name() + ": https endpoints are not supported, use a local http proxy");
    host_ = m[2].str();
    port_ = m[3].matched ? std::stoi(m[3].str()) : 80;
    path_prefix_ = m[4].matched ? m[4].str() : "";
    while (path_prefix_.ends_with('/')) path_prefix_.pop_back();
    resolve_secret(config().auth_secret_ref);  // fail fast on a missing secret
}

json OpenAIBackend::post(const std::string& endpoint, const json& body) {
    httplib::Client cli(host_, port_);
    const auto secs = config().timeout_s;
    const auto whole = static_cast<time_t>(secs);
    const auto usec = static_cast<time_t>((secs - static_cast<double>(whole)) * 1e6);
    cli.set_connection_timeout(whole, usec);
    cli.set_read_timeout(whole, usec);
    cli.set_write_timeout(whole, usec);
    httplib::Headers headers;
    if (auto secret = resolve_secret(config().auth_secret_ref); !secret.empty())
        headers.emplace("Authorization", "Bearer " + secret);
    auto res = cli.Post(path_prefix_ + endpoint, headers, body.dump(), "application/json");
    if (!res) {
        const auto err = res.error();
        if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout)
            throw Timeout(name() + ": " + httplib::to_string(err));
        throw BackendError(name() + ": " + httplib::to_string(err), true);
    }
    const int status = res->status;
    if (status == 429 || status >= 500)
        throw BackendError(name() + ": HTTP " + std::to_string(status), true, status);
    if (status < 200 || status >= 300)
        throw BackendError(name() + ": HTTP " + std::to_string(status) + ": " + res->body.substr(0, 200), false, status);
    try {
        return json::parse(res->body);
    } catch (const json::exception& e) {
        throw BackendError(name() + ": malformed response body: " + e.what(), false, status);
    }
}

std::vector<Generation> OpenAIBackend::wire_complete(const std::string& prompt, const SamplingParams& params) {
    json body{{"model", config().model_id}, {"prompt", prompt},           {"max_tokens", params.max_tokens},
              {"temperature", params.temperature}, {"top_p", params.top_p}, {"n", params.n},
              {"logprobs", 1}};
    if (!params.stop.empty()) body["stop"] = params.stop;
    const auto reply = post("/completions", body);
    if (!reply.contains("choices") || !reply["choices"].is_array())
        throw BackendError(name() + ": response without choices", false);

    int prompt_tokens = 0;
    if (reply.contains("usage") && reply["usage"].is_object())
        prompt_tokens = reply["usage"].value("prompt_tokens", 0);

    std::vector<std::pair<int, Generation>> indexed;
    for (const auto& choice : reply["choices"]) {
        Generation g;
        g.text = choice.value("text", std::string{});
        g.prompt_tokens = prompt_tokens;
        const auto finish = choice.contains("finish_reason") && choice["finish_reason"].is_string()
                                ? choice["finish_reason"].get<std::string>()
                                : std::string{};
        g.stopped = finish == "stop";
        if (choice.contains("logprobs") && choice["logprobs"].is_object()) {
            const auto& lp = choice["logprobs"];
            if (lp.contains("token_logprobs") && lp["token_logprobs"].is_array()) {
                double sum = 0.0;
                int count = 0;
                for (const auto& v : lp["token_logprobs"]) {
                    if (!v.is_number()) continue;
                    sum += v.get<double>();
                    ++count;
                }
                if (count > 0) g.mean_logprob = sum / count;
                g.completion_tokens = static_cast<int>(lp["token_logprobs"].size());
            }
        }
        indexed.emplace_back(choice.value("index", static_cast<int>(indexed.size())), std::move(g));
    }
    std::stable_sort(indexed.begin(), indexed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Generation> out;
    out.reserve(indexed.size());
    for (auto& [_, g] : indexed) out.push_back(std::move(g));
    return out;
}

std::vector<float> OpenAIBackend::wire_embed(const std::string& text) {
    const auto& model = config().embedding_model.empty() ? config().model_id : config().embedding_model;
    const auto reply = post("/embeddings", json{{"model", model}, {"input", text}});
    try {
        return reply.at("data").at(0).at("embedding").get<std::vector<float>>();
    } catch (const json::exception& e) {
        throw BackendError(name() + ": malformed embedding response: " + e.what(), false);
    }
}

}  // namespace intentfill::gateway
