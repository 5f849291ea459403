#include "archevol/patterns.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "archevol/analysis.hpp"
#include "archevol/builtin_rules.hpp"
#include "archevol/cosa.hpp"
#include "archevol/evolution.hpp"

namespace archevol {

std::string to_string(StepKind k) {
    switch (k) {
        case StepKind::Decision: return "decision";
        case StepKind::Automated: return "automated";
        default: return "check";
    }
}

std::string to_string(RunState s) {
    switch (s) {
        case RunState::AwaitingDecision: return "awaiting-decision";
        case RunState::Running: return "running";
        case RunState::Finished: return "finished";
        default: return "failed";
    }
}

void validate_pattern(const EvolutionPattern& p) {
    std::set<std::string> ids;
    const TypeGraph tg = architecture_type_graph();
    std::vector<std::string> assumed;
    const TypeGraph base = cosa_type_graph();
    for (const auto& t : base.node_types()) assumed.push_back(t.name);
    const auto rules = client_server_rules();
    for (const auto& s : p.steps) {
        if (!ids.insert(s.id).second) throw DefinitionError("pattern " + p.name + ": step id '" + s.id + "' repeats");
        if (s.kind == StepKind::Decision && (!s.options || !s.accept))
            throw DefinitionError("pattern " + p.name + ": decision step " + s.id + " lacks a prompt or validation");
        if (s.kind == StepKind::Automated && !s.run)
            throw DefinitionError("pattern " + p.name + ": automated step " + s.id + " has no action");
        if (s.kind == StepKind::Check && !s.style)
            throw DefinitionError("pattern " + p.name + ": check step " + s.id + " has no style");
        if (!s.sequence) continue;
        auto report = analyze_sequence(parse_sequence(*s.sequence, rules), tg, assumed);
        for (const auto& f : report.static_findings)
            if (f.kind == FindingKind::NoEnabler)
                throw DefinitionError("pattern " + p.name + ": step " + s.id + ": " + f.detail);
    }
}

// ---------------------------------------------------------------------------
// The client-server pattern

namespace {

std::vector<std::string> top_level_names(const Architecture& a) {
    std::vector<std::string> out;
    for (const auto& c : a.components) out.push_back(c.name);
    return out;
}

std::vector<std::string> string_list(const Json& j, const std::string& what) {
    if (!j.is_array()) throw DecisionError(what + " must be a list of names");
    std::vector<std::string> out;
    for (const auto& v : j) {
        if (!v.is_string()) throw DecisionError(what + " must be a list of names");
        out.push_back(v.get<std::string>());
    }
    return out;
}

void accept_names(PatternContext& ctx, const Json& answer) {
    if (!answer.is_object() || !answer.contains("server") || !answer["server"].is_string())
        throw DecisionError("answer must be {\"server\": name, \"clients\": [names]}");
    for (const auto& [k, v] : answer.items())
        if (k != "server" && k != "clients") throw DecisionError("unexpected key '" + k + "' in answer");
    std::string server = answer["server"].get<std::string>();
    auto clients = string_list(answer.value("clients", Json::array()), "clients");
    if (clients.empty()) throw DecisionError("at least one client is required");
    std::set<std::string> names;
    std::set<std::string> existing;
    for (const auto& p : component_paths(ctx.architecture)) existing.insert(leaf_name(p));
    std::vector<std::string> all{server};
    all.insert(all.end(), clients.begin(), clients.end());
    for (const auto& n : all) {
        if (n.empty() || n.find_first_of("/#") != std::string::npos) throw DecisionError("invalid name '" + n + "'");
        if (!names.insert(n).second) throw DecisionError("name '" + n + "' is given twice");
        if (existing.count(n)) throw DecisionError("a component named '" + n + "' already exists");
    }
    ctx.facts["server"] = server;
    ctx.facts["clients"] = clients;
    ctx.facts["original"] = top_level_names(ctx.architecture);
}

void create_components(PatternContext& ctx) {
    const TypeGraph tg = architecture_type_graph();
    const auto rules = client_server_rules();
    Graph g = encode(ctx.architecture);
    auto run = [&](const std::string& rule, const std::string& name) {
        SequenceOptions options;
        options.bindings = {{"name", name}};
        auto res = apply_sequence(parse_sequence(rule, rules), g, tg, options);
        g = std::move(res.graph);
        ctx.log.push_back(rule + " " + name);
    };
    run("CreateServer", ctx.facts["server"].get<std::string>());
    for (const auto& c : ctx.facts["clients"]) run("CreateClient", c.get<std::string>());
    ctx.architecture = decode(g, ctx.architecture.name);
}

Json assign_options(const PatternContext& ctx) {
    Json targets = Json::array({ctx.facts.value("server", "")});
    for (const auto& c : ctx.facts.value("clients", Json::array())) targets.push_back(c);
    return {{"components", ctx.facts.value("original", Json::array())}, {"targets", targets}};
}

void accept_assignment(PatternContext& ctx, const Json& answer) {
    if (!answer.is_object()) throw DecisionError("answer must map component names to the server or a client");
    Json opts = assign_options(ctx);
    auto components = string_list(opts["components"], "components");
    auto targets = string_list(opts["targets"], "targets");
    for (const auto& [comp, target] : answer.items()) {
        if (std::find(components.begin(), components.end(), comp) == components.end())
            throw DecisionError("'" + comp + "' is not a top-level component of the original architecture");
        if (!find_component(ctx.architecture, comp))
            throw DecisionError("'" + comp + "' is no longer a top-level component");
        if (!target.is_string() || std::find(targets.begin(), targets.end(), target.get<std::string>()) == targets.end())
            throw DecisionError("'" + comp + "' must be assigned to the server or one of the clients");
    }
    ctx.facts["assignment"] = answer;
}

void distribute(PatternContext& ctx) {
    std::vector<std::string> threads{ctx.facts["server"].get<std::string>()};
    for (const auto& c : ctx.facts["clients"]) threads.push_back(c.get<std::string>());
    const Json& assignment = ctx.facts["assignment"];
    for (const auto& target : threads) {
        for (const auto& name : top_level_names(ctx.architecture)) {
            if (!assignment.contains(name) || assignment[name].get<std::string>() != target) continue;
            ctx.architecture = move_in(ctx.architecture, name, target).architecture;
            ctx.log.push_back("moveIn " + name + " -> " + target);
        }
    }
}

void accept_extras(PatternContext& ctx, const Json& answer) {
    if (!answer.is_array()) throw DecisionError("answer must be a list of operation descriptors");
    Json ops = Json::array();
    for (const auto& op : answer) {
        try {
            ops.push_back(archevol::to_json(operation_from_json(op)));
        } catch (const FormatError& e) {
            throw DecisionError(e.what());
        }
    }
    ctx.facts["extra"] = ops;
}

void execute_extras(PatternContext& ctx) {
    for (const auto& op : ctx.facts["extra"]) {
        auto d = operation_from_json(op);
        ctx.architecture = apply_operation(ctx.architecture, d).architecture;
        ctx.log.push_back(d.op + " " + d.context + (d.params.empty() ? "" : " " + d.params.dump()));
    }
}

}  // namespace

EvolutionPattern client_server_pattern() {
    EvolutionPattern p;
    p.name = "client-server";
    p.description = "Introduce the client-server style: one server, at least one client, every existing "
                    "component distributed onto them";

    Step names{"names", StepKind::Decision, "Name the server and the clients (at least one)"};
    names.options = [](const PatternContext&) { return Json{{"server", "string"}, {"clients", "list of strings"}}; };
    names.accept = accept_names;
    p.steps.push_back(names);

    Step create{"create", StepKind::Automated, "Create the server and the clients"};
    create.run = create_components;
    create.sequence = "CreateServer; CreateClient";
    p.steps.push_back(create);

    Step assign{"assign", StepKind::Decision, "Assign top-level components to the server or a client"};
    assign.options = assign_options;
    assign.accept = accept_assignment;
    p.steps.push_back(assign);

    Step dist{"distribute", StepKind::Automated, "Move the components in and delegate their connected ports"};
    dist.run = distribute;
    p.steps.push_back(dist);

    Step extra{"extra", StepKind::Decision, "Further operations (split, merge, move, delegate), possibly none"};
    extra.options = [](const PatternContext&) {
        return Json{{"operations", {"create", "delete", "movePort", "splitComponent", "mergeComponents", "moveIn",
                                    "moveOut", "delegatePort"}}};
    };
    extra.accept = accept_extras;
    p.steps.push_back(extra);

    Step exec{"execute", StepKind::Automated, "Execute the requested operations"};
    exec.run = execute_extras;
    p.steps.push_back(exec);

    Step check{"check", StepKind::Check, "Check conformance to the client-server style"};
    check.style = client_server_style();
    p.steps.push_back(check);

    validate_pattern(p);
    return p;
}

std::vector<EvolutionPattern> builtin_patterns() { return {client_server_pattern()}; }

std::optional<EvolutionPattern> find_builtin_pattern(const std::string& name) {
    for (auto& p : builtin_patterns())
        if (p.name == name) return p;
    return std::nullopt;
}

// ---------------------------------------------------------------------------

PatternRun::PatternRun(EvolutionPattern pattern, Architecture a) : pattern_(std::move(pattern)) {
    ctx_.architecture = std::move(a);
    auto problems = validate_architecture(ctx_.architecture);
    if (!problems.ok()) {
        std::string msg = "the architecture is not valid:";
        for (const auto& v : problems.violations) msg += "\n  - " + v.message;
        fail(msg);
        return;
    }
    advance();
}

std::string PatternRun::current_step() const {
    if (state_ == RunState::Finished || index_ >= pattern_.steps.size()) return {};
    return pattern_.steps[index_].id;
}

std::optional<DecisionPrompt> PatternRun::pending() const {
    if (state_ != RunState::AwaitingDecision) return std::nullopt;
    const Step& s = pattern_.steps[index_];
    return DecisionPrompt{s.id, s.title, s.options(ctx_)};
}

bool PatternRun::answered(const std::string& step) const {
    return std::find(answered_.begin(), answered_.end(), step) != answered_.end();
}

void PatternRun::answer(const std::string& step, const Json& answer) {
    if (state_ != RunState::AwaitingDecision || pattern_.steps[index_].id != step)
        throw std::invalid_argument("step '" + step + "' is not awaiting a decision");
    state_ = RunState::Running;
    answered_.push_back(step);
    PatternContext next = ctx_;
    try {
        pattern_.steps[index_].accept(next, answer);
    } catch (const Error& e) {
        fail("step " + step + ": " + e.what());
        return;
    }
    ctx_ = std::move(next);
    trace_.push_back({step, StepKind::Decision, answer.dump()});
    ++index_;
    advance();
}

void PatternRun::abandon(const std::string& reason) {
    if (state_ == RunState::AwaitingDecision) fail(reason);
}

void PatternRun::fail(const std::string& message) {
    state_ = RunState::Failed;
    error_ = message;
}

void PatternRun::advance() {
    state_ = RunState::Running;
    while (index_ < pattern_.steps.size()) {
        const Step& s = pattern_.steps[index_];
        if (s.kind == StepKind::Decision) {
            state_ = RunState::AwaitingDecision;
            return;
        }
        if (s.kind == StepKind::Check) {
            report_ = check_style(ctx_.architecture, *s.style);
            trace_.push_back({s.id, s.kind,
                              report_->ok() ? "conforms to " + s.style->name
                                            : std::to_string(report_->violations.size()) + " violation(s) of " +
                                                  s.style->name});
        } else {
            PatternContext next = ctx_;
            next.log.clear();
            try {
                s.run(next);
            } catch (const Error& e) {
                fail("step " + s.id + ": " + e.what());
                return;
            }
            std::string detail;
            for (const auto& line : next.log) detail += (detail.empty() ? "" : "; ") + line;
            ctx_ = std::move(next);
            trace_.push_back({s.id, s.kind, detail});
        }
        ++index_;
    }
    state_ = RunState::Finished;
}

Json PatternRun::to_json() const {
    Json trace = Json::array();
    for (const auto& t : trace_) trace.push_back({{"step", t.step}, {"kind", archevol::to_string(t.kind)}, {"detail", t.detail}});
    Json steps = Json::array();
    for (const auto& s : pattern_.steps) steps.push_back({{"id", s.id}, {"kind", archevol::to_string(s.kind)}, {"title", s.title}});
    Json out = {{"pattern", pattern_.name}, {"state", archevol::to_string(state_)}, {"step", current_step()},
                {"steps", steps},           {"trace", trace}};
    if (auto p = pending()) out["pending"] = {{"step", p->step}, {"title", p->title}, {"options", p->options}};
    if (report_) out["report"] = archevol::to_json(*report_);
    if (!error_.empty()) out["error"] = error_;
    return out;
}

// ---------------------------------------------------------------------------

Json to_json(const DecisionScript& s) {
    Json ds = Json::array();
    for (const auto& [step, answer] : s.decisions) ds.push_back({{"step", step}, {"answer", answer}});
    return {{"format", format::decisions}, {"pattern", s.pattern}, {"decisions", ds}};
}

DecisionScript decision_script_from_json(const Json& j) {
    require_format(j, format::decisions);
    DecisionScript s;
    if (!j.contains("pattern") || !j["pattern"].is_string()) throw FormatError("decision script needs a 'pattern'");
    s.pattern = j["pattern"].get<std::string>();
    if (!j.contains("decisions") || !j["decisions"].is_array()) throw FormatError("decision script needs 'decisions'");
    for (const auto& d : j["decisions"]) {
        if (!d.is_object() || !d.contains("step") || !d["step"].is_string() || !d.contains("answer"))
            throw FormatError("each decision needs a 'step' and an 'answer'");
        s.decisions.emplace_back(d["step"].get<std::string>(), d["answer"]);
    }
    return s;
}

DecisionScript load_decision_script(const std::filesystem::path& path) {
    return decision_script_from_json(parse_json(read_file(path)));
}

DecisionProvider script_provider(DecisionScript script) {
    return [script = std::move(script)](const DecisionPrompt& prompt) -> std::optional<Json> {
        for (const auto& [step, answer] : script.decisions)
            if (step == prompt.step) return answer;
        return std::nullopt;
    };
}

PatternRun run_pattern(const EvolutionPattern& p, const Architecture& a, const DecisionProvider& provider) {
    PatternRun run(p, a);
    while (auto prompt = run.pending()) {
        auto answer = provider(*prompt);
        if (!answer) {
            run.abandon("no answer for decision step '" + prompt->step + "'");
            break;
        }
        run.answer(prompt->step, *answer);
    }
    return run;
}

}  // namespace archevol
