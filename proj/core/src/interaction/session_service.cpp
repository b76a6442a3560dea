#include "intentfill/interaction/session_service.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "intentfill/jsonl.hpp"
#include "intentfill/log.hpp"

namespace intentfill::interaction {

using completion::Session;
using nlohmann::json;

SessionService::SessionService(completion::Backends backends, completion::EngineConfig cfg)
    : backends_(backends), cfg_(std::move(cfg)) {}

std::shared_ptr<SessionService::Entry> SessionService::find(const std::string& id) const {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw ApiError(404, "unknown session " + id);
    return it->second;
}

template <typename Fn>
Session SessionService::act(const std::string& id, Fn&& fn) {
    auto e = find(id);
    std::lock_guard lock(e->mu);
    try {
        fn(e->session);
    } catch (const completion::OutOfOrder& err) {
        throw ApiError(409, err.what());
    } catch (const completion::InvalidAction& err) {
        throw ApiError(400, err.what());
    } catch (const ApiError&) {
        throw;
    } catch (const std::exception& err) {
        throw ApiError(502, err.what());
    }
    return e->session;
}

Session SessionService::create(const json& body) {
    completion::Task task;
    completion::Mode mode = completion::Mode::Reason;
    try {
        task.instance = body.at("instance").get<miner::FunctionInstance>();
        if (auto it = body.find("oracle_docstring"); it != body.end() && !it->is_null())
            task.oracle_docstring = it->get<std::string>();
        if (body.contains("mode")) mode = completion::parse_mode(body["mode"].get<std::string>());
    } catch (const std::exception& e) {
        throw ApiError(400, std::string("bad create request: ") + e.what());
    }
    if (mode != completion::Mode::Reason && mode != completion::Mode::Plugin)
        throw ApiError(400, "interactive sessions need mode reason or plugin");

    auto entry = std::make_shared<Entry>();
    entry->session = completion::new_session(task, mode, completion::Policy::Human);
    {
        std::lock_guard lock(mu_);
        entry->session.id = completion::session_id(task.instance, mode, completion::Policy::Human,
                                                   std::to_string(created_++));
        sessions_[entry->session.id] = entry;
    }
    std::lock_guard lock(entry->mu);
    try {
        completion::run_intent_stage(entry->session, backends_, cfg_);
    } catch (const completion::InvalidAction& e) {
        throw ApiError(400, e.what());
    } catch (const std::exception& e) {
        // The failed session stays retrievable for diagnostics.
        throw ApiError(502, "intent stage failed for " + entry->session.id + ": " + e.what());
    }
    return entry->session;
}

Session SessionService::get(const std::string& id) const {
    auto e = find(id);
    std::lock_guard lock(e->mu);
    return e->session;
}

Session SessionService::select(const std::string& id, int rank) {
    return act(id, [&](Session& s) { completion::select_candidate(s, rank, completion::Actor::Human); });
}

Session SessionService::edit(const std::string& id, const std::vector<EditOp>& ops) {
    return act(id, [&](Session& s) {
        if (s.status != completion::Status::Selected && s.status != completion::Status::Edited)
            throw completion::OutOfOrder("select a candidate before editing");
        if (ops.empty()) throw completion::InvalidAction("no edit operations");
        auto text = apply_edits(*s.docstring, ops);
        completion::set_edited_docstring(s, std::move(text), completion::Actor::Human,
                                         "edits=" + std::to_string(ops.size()));
    });
}

Session SessionService::generate(const std::string& id) {
    return act(id, [&](Session& s) { completion::run_code_stage(s, backends_, cfg_); });
}

std::vector<std::string> SessionService::ids() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    for (const auto& [k, _] : sessions_) out.push_back(k);
    return out;
}

json session_payload(const Session& s) {
    json j = s;
    j["schema_version"] = kSchemaVersion;
    return j;
}

struct SessionServer::Impl {
    SessionService& service;
    httplib::Server server;
};

namespace {

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(body.dump(), "application/json");
}

template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
    try {
        reply(res, 200, session_payload(fn()));
    } catch (const ApiError& e) {
        reply(res, e.status(), json{{"error", e.what()}, {"status", e.status()}});
    } catch (const std::exception& e) {
        reply(res, 400, json{{"error", e.what()}, {"status", 400}});
    }
}

json body_of(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
        return json::parse(req.body);
    } catch (const json::exception& e) {
        throw ApiError(400, std::string("malformed JSON body: ") + e.what());
    }
}

}  // namespace

SessionServer::SessionServer(SessionService& service) : impl_(new Impl{service, {}}) {
    auto& srv = impl_->server;
    auto& svc = impl_->service;
    srv.Post("/sessions", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { return svc.create(body_of(req)); });
    });
    srv.Get(R"(/sessions/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { return svc.get(req.matches[1]); });
    });
    srv.Post(R"(/sessions/([^/]+)/select)", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto body = body_of(req);
            if (!body.contains("rank") || !body["rank"].is_number_integer()) throw ApiError(400, "rank (int) required");
            return svc.select(req.matches[1], body["rank"].get<int>());
        });
    });
    srv.Post(R"(/sessions/([^/]+)/edit)", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto body = body_of(req);
            std::vector<EditOp> ops;
            try {
                ops = body.at("ops").get<std::vector<EditOp>>();
            } catch (const json::exception& e) {
                throw ApiError(400, std::string("ops must be a list of {position, old, new}: ") + e.what());
            }
            return svc.edit(req.matches[1], ops);
        });
    });
    srv.Post(R"(/sessions/([^/]+)/generate)", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { return svc.generate(req.matches[1]); });
    });
    srv.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });
}

SessionServer::~SessionServer() { stop(); }

int SessionServer::bind(const std::string& host, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(host);
    if (!impl_->server.bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
    return port;
}

void SessionServer::listen() { impl_->server.listen_after_bind(); }

void SessionServer::start() {
    thread_ = std::thread([this] { listen(); });
    impl_->server.wait_until_ready();
}

void SessionServer::stop() {
    impl_->server.stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace intentfill::interaction
