#include "archevol/builtin_rules.hpp"

#include "archevol/cosa.hpp"
#include "archevol/error.hpp"

namespace archevol {

namespace {

const Attrs kName{{"n", Var{"name"}}};

Rule create_rule(const char* kind, bool single) {
    Rule r;
    r.name = std::string("Create") + kind;
    r.rhs = PatternBuilder()
                .node(1, kind, kName)
                .node(2, cosa::Configuration, kName)
                .edge(1, cosa::configuration, 1, 2);
    if (single) r.nacs.push_back({std::string("No") + kind, PatternBuilder().node(1, kind)});
    r.params.push_back({"name", AttrKind::String});
    return r;
}

Rule move_rule(const char* kind) {
    Rule r;
    r.name = std::string("MoveComponentTo") + kind;
    PatternBuilder lhs;
    lhs.node(1, kind).node(2, cosa::Configuration).exact(3, cosa::Component);
    lhs.edge(1, cosa::configuration, 1, 2);
    r.lhs = lhs;
    Graph rhs = r.lhs;
    rhs.add_edge(Edge{EdgeId{2}, cosa::contains, NodeId{2}, NodeId{3}, {}});
    r.rhs = rhs;
    Graph nac = r.lhs;
    nac.add_node(Node{NodeId{4}, cosa::Configuration, {}, false});
    nac.add_edge(Edge{EdgeId{3}, cosa::contains, NodeId{4}, NodeId{3}, {}});
    r.nacs.push_back({"NoContainment", nac});
    // Matching is injective, so containment in the target's own
    // configuration needs its own condition.
    Graph again = r.lhs;
    again.add_edge(Edge{EdgeId{3}, cosa::contains, NodeId{2}, NodeId{3}, {}});
    r.nacs.push_back({"AlreadyContained", again});
    return r;
}

Rule delegate_rule(const char* kind, bool provided) {
    const char* port = provided ? cosa::ProvPort : cosa::ReqPort;
    Rule r;
    r.name = std::string("Delegate") + (provided ? "Prov" : "Req") + "PortTo" + kind;
    PatternBuilder lhs;
    lhs.node(1, kind).node(2, cosa::Configuration).exact(3, cosa::Component);
    lhs.node(4, port, {{"n", Var{"x"}}});
    lhs.edge(1, cosa::configuration, 1, 2).edge(2, cosa::contains, 2, 3).edge(3, cosa::hasPort, 3, 4);
    r.lhs = lhs;
    Graph rhs = r.lhs;
    rhs.add_node(Node{NodeId{6}, port, {{"n", Var{"x"}}}, false});
    rhs.add_edge(Edge{EdgeId{4}, cosa::hasPort, NodeId{1}, NodeId{6}, {}});
    rhs.add_edge(Edge{EdgeId{5}, cosa::binding, NodeId{6}, NodeId{4}, {}});
    r.rhs = rhs;
    Graph nac = r.lhs;
    nac.add_node(Node{NodeId{5}, port, {}, false});
    nac.add_edge(Edge{EdgeId{6}, cosa::binding, NodeId{5}, NodeId{4}, {}});
    r.nacs.push_back({"AlreadyDelegated", nac});
    return r;
}

}  // namespace

std::vector<Rule> client_server_rules() {
    return {create_rule(cosa::Server, true),
            create_rule(cosa::Client, false),
            move_rule(cosa::Server),
            move_rule(cosa::Client),
            delegate_rule(cosa::Server, true),
            delegate_rule(cosa::Server, false),
            delegate_rule(cosa::Client, true),
            delegate_rule(cosa::Client, false)};
}

std::vector<BuiltinSequence> builtin_sequences() {
    return {{"server-intro",
             "CreateServer; (MoveComponentToServer)*; (DelegateProvPortToServer)*; (DelegateReqPortToServer)*",
             {{"name", std::string("Server")}}},
            {"client-intro",
             "CreateClient; (MoveComponentToClient)*; (DelegateProvPortToClient)*; (DelegateReqPortToClient)*",
             {{"name", std::string("Client")}}}};
}

std::vector<Rule> builtin_rule_set(const std::string& name) {
    if (name == "client-server-rules") return client_server_rules();
    throw DefinitionError("unknown builtin rule set '" + name + "'");
}

}  // namespace archevol
