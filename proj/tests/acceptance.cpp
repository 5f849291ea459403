// Acceptance run: one PASS/FAIL line per primary criterion. Exits nonzero
// when any criterion fails. Time limits are wall-clock seconds.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "archevol/analysis.hpp"
#include "archevol/builtin_rules.hpp"
#include "archevol/cosa.hpp"
#include "archevol/error.hpp"
#include "archevol/evolution.hpp"
#include "archevol/formats.hpp"
#include "archevol/matcher.hpp"
#include "archevol/patterns.hpp"
#include "archevol/styles.hpp"
#include "archevol/typing.hpp"
#include "support.hpp"

using namespace archevol;
using namespace archevol::testing;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::vector<std::string> cosa_types() {
    std::vector<std::string> out;
    const TypeGraph tg = cosa_type_graph();
    for (const auto& t : tg.node_types()) out.push_back(t.name);
    return out;
}

// 1. CPA matrix over the eight client-server rules.
Outcome cpa_matrix_cells() {
    using K = ConflictKind;
    const std::map<std::pair<std::string, std::string>, std::set<K>> expected{
        {{"CreateServer", "CreateServer"}, {K::ProduceForbid}},
        {{"MoveComponentToServer", "MoveComponentToServer"}, {K::ProduceForbid}},
        {{"MoveComponentToClient", "MoveComponentToClient"}, {K::ProduceForbid}},
        {{"MoveComponentToServer", "MoveComponentToClient"}, {K::ProduceForbid}},
        {{"MoveComponentToClient", "MoveComponentToServer"}, {K::ProduceForbid}},
        {{"CreateServer", "MoveComponentToServer"}, {K::ProduceUse}},
        {{"CreateClient", "MoveComponentToClient"}, {K::ProduceUse}},
        {{"MoveComponentToServer", "DelegateProvPortToServer"}, {K::ProduceUse}},
        {{"MoveComponentToServer", "DelegateReqPortToServer"}, {K::ProduceUse}},
        {{"MoveComponentToClient", "DelegateProvPortToClient"}, {K::ProduceUse}},
        {{"MoveComponentToClient", "DelegateReqPortToClient"}, {K::ProduceUse}},
    };
    auto rules = client_server_rules();
    auto m = cpa_matrix(rules, architecture_type_graph());
    std::size_t nonempty = 0;
    std::string mismatch;
    for (const auto& a : m.rules)
        for (const auto& b : m.rules) {
            auto ks = m.kinds(a, b);
            std::set<K> got(ks.begin(), ks.end());
            if (!got.empty()) ++nonempty;
            auto it = expected.find({a, b});
            std::set<K> want = it == expected.end() ? std::set<K>{} : it->second;
            if (got != want && mismatch.empty()) mismatch = a + "/" + b;
        }
    if (!mismatch.empty()) return {false, "cell " + mismatch + " differs"};
    return {true, std::to_string(nonempty) + " nonempty cells, exact match"};
}

// 2. Applicability of the server-introduction sequence.
Outcome sequence_applicability() {
    auto rules = client_server_rules();
    TypeGraph tg = architecture_type_graph();
    auto types = cosa_types();
    auto seq = parse_sequence(
        "CreateServer;(MoveComponentToServer)*;(DelegateProvPortToServer)*;(DelegateReqPortToServer)*", rules);
    Graph host = encode(load_fixture("eshop.arch"));
    SequenceOptions o;
    o.bindings = {{"name", std::string("Server")}};
    auto report = analyze_sequence(seq, tg, types, &host, o);
    if (!report.dynamic || !report.dynamic->applicable) return {false, "server introduction not applicable"};
    if (!report.static_findings.empty()) return {false, "server introduction has static findings"};
    auto lone = analyze_sequence(parse_sequence("(MoveComponentToServer)", rules), tg, types);
    if (lone.static_findings.size() != 1 || lone.static_findings[0].kind != FindingKind::NoEnabler)
        return {false, "(MoveComponentToServer) should have exactly one no-enabler finding"};
    return {true, "applicable with " + std::to_string(report.dynamic->trace.steps.size()) +
                      " rewrites; lone move has 1 no-enabler finding"};
}

// 3. Case study end to end.
Outcome case_study() {
    PatternRun run = run_pattern(client_server_pattern(), load_fixture("eshop.arch"),
                                 script_provider(load_decision_script(fixture("eshop-decisions.json"))));
    if (run.state() != RunState::Finished) return {false, "run ended " + to_string(run.state()) + ": " + run.error()};
    if (serialize(run.architecture()) != read_file(fixture("eshop-cs.arch")))
        return {false, "result differs from eshop-cs.arch"};
    auto ok = check_style(run.architecture(), client_server_style());
    if (!ok.ok()) return {false, "result does not conform"};
    auto original = check_style(load_fixture("eshop.arch"), client_server_style());
    bool server_count = false;
    for (const auto& v : original.violations)
        server_count = server_count || (v.code == "node-count" && v.message.find("Server") != std::string::npos);
    if (original.ok() || !server_count) return {false, "original e-shop lacks the Server-count violation"};
    return {true, "byte-exact result, 0 violations; original has Server-count violation"};
}

// 4. Dependency preservation under random evolution.
Outcome dependency_preservation() {
    std::mt19937 rng(20240521);
    std::size_t architectures = 0, applied = 0, rejected = 0;
    for (; architectures < 600; ++architectures) {
        Architecture a = random_architecture(rng);
        const int steps = std::uniform_int_distribution<int>(1, 5)(rng);
        for (int step = 0; step < steps; ++step) {
            std::optional<Evolved> e;
            std::string what;
            try {
                e = random_operation(a, rng, &what);
            } catch (const OperationError&) {
                ++rejected;
                continue;
            }
            if (!e) continue;
            ++applied;
            DependencyPairs before;
            for (const auto& [p, r] : closure_pairs(a)) {
                auto ip = e->ports.find(p), ir = e->ports.find(r);
                if (ip != e->ports.end() && ir != e->ports.end()) before.insert({ip->second, ir->second});
            }
            std::set<std::string> alive;
            for (const auto& [from, to] : e->ports) alive.insert(to);
            DependencyPairs after;
            const DependencyPairs engine = dependency_reachability(e->architecture);
            if (engine != closure_pairs(e->architecture)) return {false, "engine reachability differs from oracle after " + what};
            for (const auto& pr : engine)
                if (alive.count(pr.first) && alive.count(pr.second)) after.insert(pr);
            if (before != after) return {false, "dependencies changed by " + what};
            if (!validate_architecture(e->architecture).ok()) return {false, "invalid result of " + what};
            a = e->architecture;
        }
    }
    return {true, std::to_string(architectures) + " architectures, " + std::to_string(applied) + " operations (" +
                      std::to_string(rejected) + " rejected by preconditions), 0 failures"};
}

// 5. Matcher and forbidden-constraint checking against brute force.
Outcome oracle_equivalence() {
    TypeGraph tg = architecture_type_graph();
    auto rules = client_server_rules();
    std::vector<GraphConstraint> forbidden;
    for (const auto& c : base_invariants())
        if (c.kind == ConstraintKind::Forbidden) forbidden.push_back(c);
    for (const auto& c : client_server_style().constraints)
        if (c.kind == ConstraintKind::Forbidden) forbidden.push_back(c);
    Bindings b{{"name", std::string("N")}};
    std::mt19937 rng(424242);
    std::size_t graphs = 0, matches = 0, witnesses = 0;
    for (; graphs < 250; ++graphs) {
        Graph host = random_graph(rng);
        for (const auto& r : rules) {
            std::set<RawEmbedding> engine;
            for (const auto& m : find_matches(r, host, tg, b)) engine.insert(raw(m.embedding));
            if (engine != brute_matches(r, host, tg, b)) return {false, "matches of " + r.name + " differ"};
            matches += engine.size();
        }
        Graph full = materialize_derived(host, tg);
        for (const auto& c : forbidden) {
            auto engine = witness_keys(check_constraint(full, c, tg));
            if (engine != brute_forbidden(full, c, tg)) return {false, "witnesses of " + c.name + " differ"};
            witnesses += engine.size();
        }
    }
    return {true, std::to_string(graphs) + " graphs, " + std::to_string(matches) + " matches, " +
                      std::to_string(witnesses) + " forbidden witnesses, 0 discrepancies"};
}

// 6. Golden split of Product.
Outcome split_golden() {
    Architecture a = load_fixture("eshop.arch");
    Evolved e = split_component(a, "Product", {"OpenOrder"});
    const Architecture& b = e.architecture;
    std::size_t new_components = component_paths(b).size() - component_paths(a).size();
    std::size_t new_ports = 0;
    for (const auto& r : port_refs(b)) {
        auto original = std::find_if(e.ports.begin(), e.ports.end(), [&](const auto& kv) { return kv.second == r; });
        if (original == e.ports.end()) ++new_ports;
    }
    std::size_t new_connectors = b.connectors.size() - a.connectors.size();
    std::size_t new_uses = 0;
    for (const auto& u : b.uses) {
        bool existed = false;
        for (const auto& o : a.uses)
            existed = existed || (e.ports.count(o.from) && e.ports.count(o.to) && e.ports.at(o.from) == u.from &&
                                  e.ports.at(o.to) == u.to);
        if (!existed) ++new_uses;
    }
    DependencyPairs before;
    for (const auto& [p, r] : closure_pairs(a)) before.insert({e.ports.at(p), e.ports.at(r)});
    DependencyPairs after;
    for (const auto& pr : closure_pairs(b))
        if (std::any_of(e.ports.begin(), e.ports.end(), [&](const auto& kv) { return kv.second == pr.first; }) &&
            std::any_of(e.ports.begin(), e.ports.end(), [&](const auto& kv) { return kv.second == pr.second; }))
            after.insert(pr);
    std::string counts = std::to_string(new_components) + " component, " + std::to_string(new_ports) + " ports, " +
                         std::to_string(new_connectors) + " connector, " + std::to_string(new_uses) + " uses";
    bool ok = new_components == 1 && new_ports == 2 && new_connectors == 1 && new_uses == 2 && before == after;
    return {ok, counts + (before == after ? "; external pairs unchanged" : "; external pairs changed")};
}

// 7. Byte-identical load/save of every fixture.
Outcome round_trip() {
    std::size_t files = 0;
    std::vector<std::filesystem::path> paths;
    for (const auto& entry : std::filesystem::directory_iterator(fixture("")))
        if (entry.is_regular_file()) paths.push_back(entry.path());
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths) {
        const std::string text = read_file(p);
        std::string again;
        if (p.extension() == ".arch") {
            again = serialize(parse_architecture(text));
        } else if (p.extension() == ".json") {
            Json j = parse_json(text);
            if (j.value("format", "") == format::decisions)
                again = dump_canonical(to_json(decision_script_from_json(j)));
            else
                again = dump_canonical(j);
        } else {
            continue;
        }
        if (again != text) return {false, p.filename().string() + " changed on round trip"};
        ++files;
    }
    return {files > 0, std::to_string(files) + " fixtures byte-identical"};
}

struct Criterion {
    int number;
    std::string title;
    double limit_seconds;  // 0: no time limit
    std::function<Outcome()> check;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "CPA matrix of the client-server rules", 10, cpa_matrix_cells},
        {2, "sequence applicability", 5, sequence_applicability},
        {3, "case study end to end", 5, case_study},
        {4, "dependency preservation", 60, dependency_preservation},
        {5, "matcher/constraint oracle equivalence", 60, oracle_equivalence},
        {6, "golden split of Product", 0, split_golden},
        {7, "format round trip", 0, round_trip},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = c.limit_seconds == 0 || secs < c.limit_seconds;
        const bool pass = o.pass && in_time;
        failures += pass ? 0 : 1;
        char timing[64];
        if (c.limit_seconds > 0)
            std::snprintf(timing, sizeof timing, "%.2f s, limit %.0f s", secs, c.limit_seconds);
        else
            std::snprintf(timing, sizeof timing, "%.2f s", secs);
        std::printf("%s criterion %d: %s: %s (%s)\n", pass ? "PASS" : "FAIL", c.number, c.title.c_str(),
                    o.detail.c_str(), timing);
    }
    return failures == 0 ? 0 : 1;
}
