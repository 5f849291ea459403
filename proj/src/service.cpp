#include "archevol/service.hpp"

#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <httplib.h>

#include "archevol/cosa.hpp"
#include "archevol/error.hpp"
#include "archevol/evolution.hpp"
#include "archevol/styles.hpp"
#include "archevol/typing.hpp"

namespace archevol {

namespace {

Response error(int status, const std::string& message) { return {status, {{"error", message}}}; }

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> out;
    std::stringstream ss(path);
    std::string seg;
    while (std::getline(ss, seg, '/'))
        if (!seg.empty()) out.push_back(seg);
    return out;
}

std::string fresh_token(std::uint64_t counter) {
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    std::ostringstream ss;
    ss << std::hex << rng() << counter;
    return ss.str().substr(0, 12) + std::to_string(counter);
}

Json connects_to(const Architecture& a) {
    const TypeGraph tg = architecture_type_graph();
    Graph g = materialize_derived(encode(a), tg);
    Json out = Json::array();
    for (const auto& [id, e] : g.edges())
        if (e.type == cosa::connectsTo) out.push_back({name_of(g.node(e.src)), name_of(g.node(e.tgt))});
    return out;
}

Json run_state(const PatternRun& run, std::uint64_t revision) {
    Json j = run.to_json();
    j["revision"] = revision;
    return j;
}

}  // namespace

std::shared_ptr<Service::Session> Service::session(const std::string& id) {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

Response Service::handle(const std::string& method, const std::string& path, const std::string& body,
                         const std::map<std::string, std::string>& query) {
    try {
        auto seg = split_path(path);
        if (seg.size() == 1 && seg[0] == "styles" && method == "GET") {
            Json out = Json::array();
            for (const auto& s : builtin_styles()) out.push_back(to_json(s));
            return {200, out};
        }
        if (seg.size() == 1 && seg[0] == "patterns" && method == "GET") {
            Json out = Json::array();
            for (const auto& p : builtin_patterns()) {
                Json steps = Json::array();
                for (const auto& s : p.steps) steps.push_back({{"id", s.id}, {"kind", to_string(s.kind)}, {"title", s.title}});
                out.push_back({{"name", p.name}, {"description", p.description}, {"steps", steps}});
            }
            return {200, out};
        }
        if (seg.empty() || seg[0] != "sessions") return error(404, "no such endpoint: " + method + " " + path);
        if (seg.size() == 1) {
            if (method != "POST") return error(405, "use POST to create a session");
            return create_session(body);
        }
        auto s = session(seg[1]);
        if (!s) return error(404, "unknown session '" + seg[1] + "'");
        std::lock_guard lock(s->mutex);
        if (seg.size() == 3 && seg[2] == "architecture" && method == "GET") return get_architecture(*s);
        if (seg.size() == 3 && seg[2] == "ops" && method == "POST") return apply_op(*s, body);
        if (seg.size() == 3 && seg[2] == "check" && method == "GET") return check(*s, query);
        if (seg.size() == 5 && seg[2] == "pattern" && seg[4] == "start" && method == "POST") return start_pattern(*s, seg[3]);
        if (seg.size() == 4 && seg[2] == "pattern" && seg[3] == "state" && method == "GET") return pattern_state(*s);
        if (seg.size() == 4 && seg[2] == "pattern" && seg[3] == "decision" && method == "POST") return decide(*s, body);
        return error(404, "no such endpoint: " + method + " " + path);
    } catch (const FormatError& e) {
        return error(400, e.what());
    } catch (const std::exception& e) {
        return error(500, e.what());
    }
}

Response Service::create_session(const std::string& body) {
    Architecture a = parse_architecture(body);
    auto report = validate_architecture(a);
    if (!report.ok()) {
        Response r = error(422, "the architecture is not valid");
        r.body["report"] = to_json(report);
        return r;
    }
    auto s = std::make_shared<Session>();
    s->architecture = std::move(a);
    std::string id;
    {
        std::lock_guard lock(mutex_);
        id = fresh_token(next_id_++);
        sessions_[id] = s;
    }
    return {201, {{"sessionId", id}, {"revision", 0}}};
}

Response Service::get_architecture(Session& s) {
    return {200, {{"architecture", to_json(s.architecture)}, {"revision", s.revision}, {"connectsTo", connects_to(s.architecture)}}};
}

Response Service::apply_op(Session& s, const std::string& body) {
    Json j = parse_json(body);
    if (!j.is_object() || !j.contains("operation")) throw FormatError("expected {\"revision\": n, \"operation\": {...}}");
    if (!j.contains("revision") || !j["revision"].is_number_unsigned())
        throw FormatError("the expected 'revision' is required");
    if (j["revision"].get<std::uint64_t>() != s.revision)
        return {409, {{"error", "stale revision"}, {"revision", s.revision}}};
    if (s.run && s.run->state() == RunState::AwaitingDecision)
        return {409, {{"error", "a pattern run is awaiting a decision"}, {"revision", s.revision}}};
    OperationDescriptor d = operation_from_json(j["operation"]);
    Evolved e;
    try {
        e = apply_operation(s.architecture, d);
    } catch (const OperationError& err) {
        return error(422, err.what());
    }
    s.architecture = std::move(e.architecture);
    ++s.revision;
    Json ports = Json::object();
    for (const auto& [from, to] : e.ports)
        if (from != to) ports[from] = to;
    return {200, {{"architecture", to_json(s.architecture)}, {"revision", s.revision}, {"ports", ports}}};
}

Response Service::start_pattern(Session& s, const std::string& name) {
    auto p = find_builtin_pattern(name);
    if (!p) return error(404, "unknown pattern '" + name + "'");
    s.run.emplace(std::move(*p), s.architecture);
    s.architecture = s.run->architecture();
    ++s.revision;
    return {s.run->state() == RunState::Failed ? 422 : 200, run_state(*s.run, s.revision)};
}

Response Service::pattern_state(Session& s) {
    if (!s.run) return error(404, "no pattern run in this session");
    return {200, run_state(*s.run, s.revision)};
}

Response Service::decide(Session& s, const std::string& body) {
    if (!s.run) return error(404, "no pattern run in this session");
    Json j = parse_json(body);
    if (!j.is_object() || !j.contains("step") || !j["step"].is_string() || !j.contains("answer"))
        throw FormatError("expected {\"step\": id, \"answer\": ...}");
    const std::string step = j["step"].get<std::string>();
    const auto& steps = s.run->pattern().steps;
    bool known = false;
    for (const auto& st : steps) known = known || (st.id == step && st.kind == StepKind::Decision);
    if (!known) return error(404, "pattern " + s.run->pattern().name + " has no decision step '" + step + "'");
    if (s.run->answered(step)) {
        Response r{409, run_state(*s.run, s.revision)};
        r.body["error"] = "step '" + step + "' has already been answered";
        return r;
    }
    if (s.run->state() != RunState::AwaitingDecision || s.run->current_step() != step) {
        Response r{409, run_state(*s.run, s.revision)};
        r.body["error"] = "step '" + step + "' is not awaiting a decision";
        return r;
    }
    s.run->answer(step, j["answer"]);
    s.architecture = s.run->architecture();
    ++s.revision;
    return {s.run->state() == RunState::Failed ? 422 : 200, run_state(*s.run, s.revision)};
}

Response Service::check(Session& s, const std::map<std::string, std::string>& query) {
    auto it = query.find("style");
    if (it == query.end() || it->second.empty()) return {200, to_json(validate_architecture(s.architecture))};
    auto style = find_builtin_style(it->second);
    if (!style) return error(404, "unknown style '" + it->second + "'");
    try {
        return {200, to_json(check_style(s.architecture, *style))};
    } catch (const UnknownTypeError& e) {
        return error(422, e.what());
    }
}

// ---------------------------------------------------------------------------

void serve(Service& service, const std::string& host, int port, const std::string& allow_origin) {
    httplib::Server server;
    if (!allow_origin.empty()) {
        server.set_default_headers({{"Access-Control-Allow-Origin", allow_origin},
                                    {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                    {"Access-Control-Allow-Headers", "Content-Type"}});
        server.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    }
    auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> query;
        for (const auto& [k, v] : req.params) query[k] = v;
        Response r = service.handle(req.method, req.path, req.body, query);
        res.status = r.status;
        res.set_content(r.body.dump(2) + "\n", "application/json");
    };
    server.Get(".*", handler);
    server.Post(".*", handler);
    if (!server.listen(host, port)) throw Error("cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace archevol
