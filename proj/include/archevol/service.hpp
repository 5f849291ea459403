#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "archevol/architecture.hpp"
#include "archevol/formats.hpp"
#include "archevol/patterns.hpp"

namespace archevol {

struct Response {
    int status = 200;
    Json body;
};

/// The HTTP API, independent of any transport. Sessions live in memory.
///
///   POST /sessions                          architecture document -> {sessionId, revision}
///   GET  /sessions/{id}/architecture        -> {architecture, revision, connectsTo}
///   POST /sessions/{id}/ops                 {revision, operation} -> {architecture, revision, ports}
///   POST /sessions/{id}/pattern/{name}/start -> run state
///   GET  /sessions/{id}/pattern/state       -> run state
///   POST /sessions/{id}/pattern/decision    {step, answer} -> run state
///   GET  /sessions/{id}/check?style=name    -> conformance report
///   GET  /styles, GET /patterns             -> registries
///
/// Errors: 400 malformed request, 404 unknown session/step/style/pattern,
/// 409 stale revision or repeated decision, 422 rejected by validation.
class Service {
public:
    Response handle(const std::string& method, const std::string& path, const std::string& body,
                    const std::map<std::string, std::string>& query = {});

private:
    struct Session {
        Architecture architecture;
        std::uint64_t revision = 0;
        std::optional<PatternRun> run;
        std::mutex mutex;
    };

    std::shared_ptr<Session> session(const std::string& id);

    Response create_session(const std::string& body);
    Response get_architecture(Session& s);
    Response apply_op(Session& s, const std::string& body);
    Response start_pattern(Session& s, const std::string& name);
    Response pattern_state(Session& s);
    Response decide(Session& s, const std::string& body);
    Response check(Session& s, const std::map<std::string, std::string>& query);

    std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_id_ = 1;
};

/// Serves `service` over HTTP until the process ends. A nonempty
/// `allow_origin` enables CORS for that origin.
void serve(Service& service, const std::string& host, int port, const std::string& allow_origin = {});

}  // namespace archevol
