#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "intentfill/completion/engine.hpp"
#include "intentfill/error.hpp"
#include "intentfill/interaction/interaction.hpp"

namespace intentfill::interaction {

/// Failure carrying the HTTP status the API reports: 400 bad request,
/// 404 unknown session, 409 out-of-order action, 502 backend failure.
class ApiError : public Error {
public:
    ApiError(int status, const std::string& what) : Error(what), status_(status) {}
    int status() const noexcept { return status_; }

private:
    int status_;
};

/// Human-path sessions. Actions on one session are serialized; different
/// sessions proceed concurrently.
class SessionService {
public:
    SessionService(completion::Backends backends, completion::EngineConfig cfg);

    /// Body: {"instance": FunctionInstance, "mode": "reason"|"plugin",
    /// "oracle_docstring": optional}. Runs stage 1.
    completion::Session create(const nlohmann::json& body);
    completion::Session get(const std::string& id) const;
    completion::Session select(const std::string& id, int rank);
    /// Human edits: any number of valid EditOps against the current docstring.
    completion::Session edit(const std::string& id, const std::vector<EditOp>& ops);
    completion::Session generate(const std::string& id);
    std::vector<std::string> ids() const;

private:
    struct Entry {
        std::mutex mu;
        completion::Session session;
    };
    std::shared_ptr<Entry> find(const std::string& id) const;
    template <typename Fn>
    completion::Session act(const std::string& id, Fn&& fn);

    completion::Backends backends_;
    completion::EngineConfig cfg_;
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
    std::size_t created_ = 0;
};

/// Wire form of a session: the session JSON plus "schema_version".
nlohmann::json session_payload(const completion::Session& s);

/// HTTP+JSON front end:
///   POST /sessions                 create
///   GET  /sessions/{id}            fetch state
///   POST /sessions/{id}/select     {"rank": int}
///   POST /sessions/{id}/edit       {"ops": [{"position", "old", "new"}]}
///   POST /sessions/{id}/generate
/// Errors answer {"error": message, "status": code}.
class SessionServer {
public:
    explicit SessionServer(SessionService& service);
    ~SessionServer();
    SessionServer(const SessionServer&) = delete;
    SessionServer& operator=(const SessionServer&) = delete;

    /// Binds (port 0 picks a free port) and returns the bound port.
    int bind(const std::string& host, int port);
    /// Serves until stop(); blocking.
    void listen();
    /// Serves on a background thread.
    void start();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::thread thread_;
};

}  // namespace intentfill::interaction
