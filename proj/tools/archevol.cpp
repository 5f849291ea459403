// Command-line driver: validation, style checks, evolution operations,
// pattern runs, critical pair and rule-sequence analysis, HTTP service.
//
// Exit status: 0 success, 1 violations or failed operation, 2 usage or
// input error, 3 internal error.

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "archevol/analysis.hpp"
#include "archevol/builtin_rules.hpp"
#include "archevol/cosa.hpp"
#include "archevol/error.hpp"
#include "archevol/evolution.hpp"
#include "archevol/formats.hpp"
#include "archevol/patterns.hpp"
#include "archevol/service.hpp"
#include "archevol/styles.hpp"

using namespace archevol;

namespace {

constexpr int kOk = 0, kViolations = 1, kUsage = 2, kInternal = 3;

struct UsageError : Error {
    using Error::Error;
};

void print_report(const ConformanceReport& r, const std::string& format, const std::string& subject) {
    if (format == "json") {
        std::cout << dump_canonical(to_json(r));
        return;
    }
    if (r.ok()) {
        std::cout << subject << ": ok\n";
        return;
    }
    std::cout << subject << ": " << r.violations.size() << " violation(s)\n";
    for (const auto& v : r.violations) std::cout << "  [" << v.code << "] " << v.message << "\n";
}

void emit_architecture(const Architecture& a, const std::string& out) {
    if (out.empty() || out == "-")
        std::cout << serialize(a);
    else
        save_architecture(a, out);
}

Style resolve_style(const std::string& name) {
    if (auto s = find_builtin_style(name)) return *s;
    if (name.find('.') != std::string::npos || name.find('/') != std::string::npos) return load_style(name);
    throw UsageError("unknown style '" + name + "' (builtin: client-server, or a style file)");
}

std::vector<Rule> resolve_rules(const std::string& builtin, const std::string& file) {
    if (!builtin.empty() && !file.empty()) throw UsageError("give either --builtin or --rules, not both");
    if (!file.empty()) return load_rules(file);
    if (builtin.empty()) throw UsageError("give --builtin or --rules");
    try {
        return builtin_rule_set(builtin);
    } catch (const DefinitionError&) {
        throw UsageError("unknown builtin rule set '" + builtin + "' (builtin: client-server-rules)");
    }
}

Bindings parse_bindings(const std::vector<std::string>& items) {
    Bindings out;
    for (const auto& kv : items) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("--bind expects name=value, got '" + kv + "'");
        out[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    return out;
}

Json conflict_json(const Conflict& c) {
    return {{"kind", to_string(c.kind)}, {"detail", c.detail}, {"witness", to_json(c.witness)}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"archevol: typed-graph architecture evolution"};
    app.require_subcommand(1);
    std::string format = "table";
    auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"table", "json"}));
    };

    // validate
    std::string file;
    auto* validate = app.add_subcommand("validate", "Check an architecture against the ADL invariants");
    validate->add_option("file", file, "Architecture file")->required();
    add_format(validate);

    // check-style
    std::string style_name;
    auto* check = app.add_subcommand("check-style", "Check conformance to an architectural style");
    check->add_option("file", file, "Architecture file")->required();
    check->add_option("--style", style_name, "Builtin style name or style file")->required();
    add_format(check);

    // apply
    std::string op, context, out, parent, target, name, element, direction, kind, from, to, provided, required;
    std::vector<std::string> ports, with;
    auto* apply = app.add_subcommand("apply", "Apply one evolution operation");
    apply->add_option("file", file, "Architecture file")->required();
    apply->add_option("--op", op, "Operation")
        ->required()
        ->check(CLI::IsMember({"create", "delete", "move-port", "split", "merge", "move-in", "move-out", "delegate"}));
    apply->add_option("--context", context, "Element operated on");
    apply->add_option("--parent", parent, "Parent component (move-in)");
    apply->add_option("--target", target, "Target component (move-port)");
    apply->add_option("--ports", ports, "Ports to move (split)")->delimiter(',');
    apply->add_option("--with", with, "Components merged into the context (merge)")->delimiter(',');
    apply->add_option("--name", name, "Name of the new element");
    apply->add_option("--element", element, "component, port, connector or uses (create/delete)");
    apply->add_option("--direction", direction, "provided or required (create port)");
    apply->add_option("--kind", kind, "plain, client or server (create component)");
    apply->add_option("--from", from, "Uses source port");
    apply->add_option("--to", to, "Uses target port");
    apply->add_option("--provided", provided, "Provided port (create connector)");
    apply->add_option("--required", required, "Required port (create connector)");
    apply->add_option("-o,--output", out, "Output file (default: stdout)");

    // pattern
    std::string pattern_name, script;
    auto* pattern = app.add_subcommand("pattern", "Run an evolution pattern with a decision script");
    pattern->add_option("file", file, "Architecture file")->required();
    pattern->add_option("--pattern", pattern_name, "Pattern name")->required();
    pattern->add_option("--script", script, "Decision script")->required();
    pattern->add_option("-o,--output", out, "Output file for the resulting architecture");
    add_format(pattern);

    // cpa
    std::string builtin, rules_file;
    std::size_t ceiling = 14;
    bool adjacency = false;
    auto* cpa = app.add_subcommand("cpa", "Critical pair analysis of a rule set");
    cpa->add_option("--builtin", builtin, "Builtin rule set");
    cpa->add_option("--rules", rules_file, "Rules file");
    cpa->add_option("--ceiling", ceiling, "Overlap node ceiling");
    cpa->add_flag("--adjacency", adjacency, "Print the adjacency listing instead of the table");
    add_format(cpa);

    // sequence
    std::string order, host;
    std::vector<std::string> binds;
    auto* sequence = app.add_subcommand("sequence", "Applicability analysis of a rule sequence");
    sequence->add_option("--builtin", builtin, "Builtin sequence (server-intro, client-intro)");
    sequence->add_option("--rules", rules_file, "Rules file");
    sequence->add_option("--order", order, "Sequence, e.g. \"A; (B)*\"");
    sequence->add_option("--host", host, "Architecture to run the sequence on");
    sequence->add_option("--bind", binds, "Rule parameter name=value");
    add_format(sequence);

    // export-rules
    auto* export_rules = app.add_subcommand("export-rules", "Write a builtin rule set as a rules document");
    export_rules->add_option("--builtin", builtin, "Builtin rule set")->required();
    export_rules->add_option("-o,--output", out, "Output file (default: stdout)");

    // serve
    std::string bind_host = "127.0.0.1", allow_origin;
    int port = 8080;
    auto* serve_cmd = app.add_subcommand("serve", "Start the HTTP service");
    serve_cmd->add_option("--host", bind_host, "Address to bind");
    serve_cmd->add_option("--port", port, "Port");
    serve_cmd->add_option("--allow-origin", allow_origin, "Origin allowed by CORS");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*validate) {
            Architecture a = load_architecture(file);
            auto report = validate_architecture(a);
            print_report(report, format, file);
            return report.ok() ? kOk : kViolations;
        }
        if (*check) {
            Style s = resolve_style(style_name);
            Architecture a = load_architecture(file);
            ConformanceReport report;
            try {
                report = check_style(a, s);
            } catch (const UnknownTypeError& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kViolations;
            }
            print_report(report, format, file + " against " + s.name);
            return report.ok() ? kOk : kViolations;
        }
        if (*apply) {
            static const std::map<std::string, std::string> ops{
                {"create", "create"},         {"delete", "delete"}, {"move-port", "movePort"},
                {"split", "splitComponent"},  {"merge", "mergeComponents"},
                {"move-in", "moveIn"},        {"move-out", "moveOut"}, {"delegate", "delegatePort"}};
            OperationDescriptor d;
            d.op = ops.at(op);
            d.context = context;
            auto set = [&](const char* key, const std::string& v) {
                if (!v.empty()) d.params[key] = v;
            };
            set("parent", parent);
            set("target", target);
            set("name", name);
            set("element", element);
            set("direction", direction);
            set("kind", kind);
            set("from", from);
            set("to", to);
            set("provided", provided);
            set("required", required);
            if (!ports.empty()) d.params["ports"] = ports;
            if (!with.empty()) d.params["with"] = with;
            Architecture a = load_architecture(file);
            try {
                Evolved e = apply_operation(a, d);
                emit_architecture(e.architecture, out);
            } catch (const OperationError& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kViolations;
            }
            return kOk;
        }
        if (*pattern) {
            auto p = find_builtin_pattern(pattern_name);
            if (!p) throw UsageError("unknown pattern '" + pattern_name + "' (builtin: client-server)");
            DecisionScript ds = load_decision_script(script);
            if (ds.pattern != p->name)
                throw UsageError("decision script is for pattern '" + ds.pattern + "', not '" + p->name + "'");
            Architecture a = load_architecture(file);
            PatternRun run = run_pattern(*p, a, script_provider(ds));
            if (format == "json") {
                std::cout << dump_canonical(run.to_json());
            } else {
                for (const auto& t : run.trace())
                    std::cout << t.step << " (" << to_string(t.kind) << "): " << t.detail << "\n";
                std::cout << "state: " << to_string(run.state()) << "\n";
                if (!run.error().empty()) std::cout << "error: " << run.error() << "\n";
                if (run.report()) print_report(*run.report(), "table", "final check");
            }
            if (!out.empty() && run.state() == RunState::Finished) save_architecture(run.architecture(), out);
            bool ok = run.state() == RunState::Finished && run.report() && run.report()->ok();
            return ok ? kOk : kViolations;
        }
        if (*cpa) {
            auto rules = resolve_rules(builtin, rules_file);
            CpaOptions options;
            options.overlap_ceiling = ceiling;
            const TypeGraph tg = architecture_type_graph();
            for (const auto& r : rules) r.validate(tg);
            CpaMatrix m = cpa_matrix(rules, tg, options);
            if (format == "json") {
                Json cells = Json::array();
                for (const auto& r1 : m.rules)
                    for (const auto& r2 : m.rules)
                        for (const auto& c : m.cell(r1, r2)) {
                            Json j = conflict_json(c);
                            j["r1"] = r1;
                            j["r2"] = r2;
                            cells.push_back(j);
                        }
                std::cout << dump_canonical({{"rules", m.rules}, {"findings", cells}});
            } else {
                std::cout << (adjacency ? format_adjacency(m) : format_table(m));
            }
            return kOk;
        }
        if (*sequence) {
            std::vector<Rule> rules;
            std::string text;
            Bindings bindings;
            if (!builtin.empty() && rules_file.empty()) {
                bool found = false;
                for (const auto& s : builtin_sequences())
                    if (s.name == builtin) {
                        text = order.empty() ? s.text : order;
                        bindings = s.bindings;
                        found = true;
                    }
                if (!found) throw UsageError("unknown builtin sequence '" + builtin + "' (server-intro, client-intro)");
                rules = client_server_rules();
            } else {
                rules = resolve_rules(builtin, rules_file);
                if (order.empty()) throw UsageError("--order is required with --rules");
                text = order;
            }
            for (const auto& [k, v] : parse_bindings(binds)) bindings[k] = v;
            RuleSequence seq;
            try {
                seq = parse_sequence(text, rules);
            } catch (const DefinitionError& e) {
                throw UsageError(e.what());
            }
            const TypeGraph tg = architecture_type_graph();
            const TypeGraph base = cosa_type_graph();
            std::vector<std::string> assumed;
            for (const auto& t : base.node_types()) assumed.push_back(t.name);
            std::optional<Graph> g;
            if (!host.empty()) g = encode(load_architecture(host));
            SequenceOptions options;
            options.bindings = bindings;
            SequenceReport report = analyze_sequence(seq, tg, assumed, g ? &*g : nullptr, options);
            bool ok = report.static_findings.empty() && (!report.dynamic || report.dynamic->applicable);
            if (format == "json") {
                Json findings = Json::array();
                for (const auto& f : report.static_findings)
                    findings.push_back({{"position", f.position}, {"kind", to_string(f.kind)}, {"detail", f.detail}});
                Json j = {{"sequence", report.sequence}, {"staticFindings", findings}};
                if (report.dynamic) {
                    Json steps = Json::array();
                    for (const auto& s : report.dynamic->trace.steps)
                        steps.push_back({{"position", s.position}, {"rule", s.rule}, {"match", s.match}});
                    j["dynamic"] = {{"applicable", report.dynamic->applicable}, {"trace", steps}};
                    if (report.dynamic->failing_position) j["dynamic"]["failingPosition"] = *report.dynamic->failing_position;
                    if (!report.dynamic->message.empty()) j["dynamic"]["message"] = report.dynamic->message;
                }
                std::cout << dump_canonical(j);
            } else {
                std::cout << "sequence: " << report.sequence << "\n";
                for (const auto& f : report.static_findings)
                    std::cout << "  [" << to_string(f.kind) << "] position " << f.position + 1 << ": " << f.detail << "\n";
                if (report.static_findings.empty()) std::cout << "static check: no findings\n";
                if (report.dynamic) {
                    std::cout << "dynamic run: " << report.dynamic->trace.steps.size() << " rewrite(s)\n";
                    if (!report.dynamic->message.empty()) std::cout << "  " << report.dynamic->message << "\n";
                }
                std::cout << (ok ? "applicable" : "not applicable") << "\n";
            }
            return ok ? kOk : kViolations;
        }
        if (*export_rules) {
            auto rules = resolve_rules(builtin, "");
            std::string text = dump_canonical(rules_document(rules));
            if (out.empty() || out == "-")
                std::cout << text;
            else
                write_file(out, text);
            return kOk;
        }
        if (*serve_cmd) {
            Service service;
            std::cerr << "archevol service listening on " << bind_host << ":" << port << "\n";
            serve(service, bind_host, port, allow_origin);
            return kOk;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kUsage;
}
