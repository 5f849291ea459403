#include <gtest/gtest.h>

#include <random>

#include "archevol/builtin_rules.hpp"
#include "archevol/cosa.hpp"
#include "archevol/error.hpp"
#include "archevol/rewrite.hpp"
#include "archevol/typing.hpp"
#include "support.hpp"

using namespace archevol;
using namespace archevol::testing;

namespace {

const Rule& rule(const std::string& name) {
    static const auto rules = client_server_rules();
    for (const auto& r : rules)
        if (r.name == name) return r;
    throw std::runtime_error("no rule " + name);
}

const Bindings kServer{{"name", std::string("Server")}};

Graph eshop_graph() { return encode(load_fixture("eshop.arch")); }

Graph with_server(const Graph& g) {
    auto ms = find_matches(rule("CreateServer"), g, architecture_type_graph(), kServer);
    return apply(ms.at(0));
}

std::string host_name(const Match& m, std::uint32_t pattern_node) {
    return name_of(m.host->node(m.embedding.nodes.at(NodeId{pattern_node})));
}

std::size_t count_edges(const Graph& g, const std::string& type) {
    std::size_t n = 0;
    for (const auto& [id, e] : g.edges())
        if (e.type == type) ++n;
    return n;
}

/// Identity rule over a single Component.
Rule keep_component() {
    Rule r;
    r.name = "Keep";
    r.lhs = PatternBuilder().node(1, cosa::Component);
    r.rhs = r.lhs;
    return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// find_matches

TEST(FindMatches, CreateServerOnEshopHasOneMatch) {
    EXPECT_EQ(find_matches(rule("CreateServer"), eshop_graph(), architecture_type_graph(), kServer).size(), 1u);
}

TEST(FindMatches, NoServerNacBlocksSecondServer) {
    Graph g = with_server(eshop_graph());
    EXPECT_TRUE(find_matches(rule("CreateServer"), g, architecture_type_graph(), kServer).empty());
}

TEST(FindMatches, MoveToServerMatchesEachUncontainedComponent) {
    TypeGraph tg = architecture_type_graph();
    Graph g = with_server(eshop_graph());
    auto ms = find_matches(rule("MoveComponentToServer"), g, tg);
    EXPECT_EQ(ms.size(), 3u);
    std::set<RawEmbedding> engine;
    for (const auto& m : ms) engine.insert(raw(m.embedding));
    EXPECT_EQ(engine, brute_matches(rule("MoveComponentToServer"), g, tg));
}

TEST(FindMatches, CanonicalOrderIsSortedByHostIds) {
    Graph g = with_server(eshop_graph());
    auto ms = find_matches(rule("MoveComponentToServer"), g, architecture_type_graph());
    for (std::size_t i = 1; i < ms.size(); ++i) EXPECT_LT(ms[i - 1].embedding, ms[i].embedding);
}

TEST(FindMatches, MissingParameterIsAnError) {
    EXPECT_THROW(find_matches(rule("CreateServer"), eshop_graph(), architecture_type_graph()),
                 UnboundParameterError);
}

// ---------------------------------------------------------------------------
// apply

TEST(Apply, CreateServerAddsServerAndConfiguration) {
    Graph g = eshop_graph();
    Graph h = with_server(g);
    EXPECT_EQ(h.node_count(), g.node_count() + 2);
    EXPECT_EQ(h.edge_count(), g.edge_count() + 1);
    for (const auto& [id, n] : g.nodes()) EXPECT_EQ(h.node(id), n);
    for (const auto& [id, e] : g.edges()) EXPECT_EQ(h.edge(id), e);
    std::multiset<std::string> added;
    for (const auto& [id, n] : h.nodes())
        if (!g.has_node(id)) added.insert(n.type);
    EXPECT_EQ(added, (std::multiset<std::string>{cosa::Server, cosa::Configuration}));
}

TEST(Apply, IdentityRuleLeavesGraphUnchanged) {
    Graph g = eshop_graph();
    auto ms = find_matches(keep_component(), g, architecture_type_graph());
    ASSERT_FALSE(ms.empty());
    EXPECT_EQ(apply(ms[0]), g);
}

TEST(Apply, MoveOrderIntoServerAddsOneContainsEdge) {
    Graph g = with_server(eshop_graph());
    for (const auto& m : find_matches(rule("MoveComponentToServer"), g, architecture_type_graph())) {
        if (host_name(m, 3) != "Order") continue;
        Graph h = apply(m);
        EXPECT_EQ(h.node_count(), g.node_count());
        EXPECT_EQ(h.edge_count(), g.edge_count() + 1);
        EXPECT_EQ(count_edges(h, cosa::contains), count_edges(g, cosa::contains) + 1);
        Architecture a = decode(h);
        ASSERT_NE(find_component(a, "Server/Order"), nullptr);
        return;
    }
    FAIL() << "no match for Order";
}

TEST(Apply, GluingConditionRejectsDanglingEdges) {
    Rule drop;
    drop.name = "DropComponent";
    drop.lhs = PatternBuilder().node(1, cosa::Component);
    Graph g = eshop_graph();
    auto ms = find_matches(drop, g, architecture_type_graph());
    ASSERT_FALSE(ms.empty());
    try {
        apply(ms[0]);
        FAIL() << "expected a gluing error";
    } catch (const GluingError& e) {
        EXPECT_FALSE(e.dangling_edges.empty());
    }
}

TEST(Apply, StaleMatchIsRejected) {
    Graph g = eshop_graph();
    auto ms = find_matches(keep_component(), g, architecture_type_graph());
    Graph other = with_server(g);
    EXPECT_THROW(apply(ms.at(0), other), StaleMatchError);
    EXPECT_NO_THROW(apply(ms.at(0), g));
}

// ---------------------------------------------------------------------------
// apply_sequence

TEST(Sequence, ServerIntroMovingOnlyOrder) {
    auto rules = client_server_rules();
    auto seq = parse_sequence(
        "CreateServer; (MoveComponentToServer)*; (DelegateProvPortToServer)*; (DelegateReqPortToServer)*", rules);
    SequenceOptions o;
    o.bindings = kServer;
    o.chooser = [](const Rule& r, std::span<const Match> ms) -> std::optional<std::size_t> {
        if (r.name != "MoveComponentToServer") return 0;
        for (std::size_t i = 0; i < ms.size(); ++i)
            if (host_name(ms[i], 3) == "Order") return i;
        return std::nullopt;
    };
    auto result = apply_sequence(seq, eshop_graph(), architecture_type_graph(), o);
    Architecture a = decode(result.graph);
    const Component* order = find_component(a, "Server/Order");
    ASSERT_NE(order, nullptr);
    EXPECT_NE(find_component(a, "Product"), nullptr);
    EXPECT_NE(find_component(a, "Customer"), nullptr);
    for (const auto& p : order->ports) {
        auto inner = port_ref("Server/Order", p.name);
        bool bound = false;
        for (const auto& b : a.bindings)
            if (b.inner == inner) {
                bound = true;
                EXPECT_EQ(find_port(a, b.outer)->direction, p.direction);
            }
        EXPECT_TRUE(bound) << inner;
    }
    EXPECT_EQ(result.trace.steps.size(), 1u + 1u + order->ports.size());
    for (std::size_t i = 1; i < result.trace.steps.size(); ++i) {
        EXPECT_LE(result.trace.steps[i - 1].position, result.trace.steps[i].position);
        EXPECT_EQ(result.trace.steps[i - 1].post_digest, result.trace.steps[i].pre_digest);
    }
}

TEST(Sequence, StarWithoutMatchesIsANoOp) {
    auto seq = parse_sequence("(MoveComponentToServer)*", client_server_rules());
    Graph g = eshop_graph();
    auto result = apply_sequence(seq, g, architecture_type_graph());
    EXPECT_EQ(result.graph, g);
    EXPECT_TRUE(result.trace.steps.empty());
}

TEST(Sequence, SecondCreateServerFails) {
    auto seq = parse_sequence("CreateServer; CreateServer", client_server_rules());
    SequenceOptions o;
    o.bindings = kServer;
    try {
        apply_sequence(seq, Graph{}, architecture_type_graph(), o);
        FAIL() << "expected a sequence error";
    } catch (const SequenceError& e) {
        EXPECT_EQ(e.position, 1u);
        EXPECT_EQ(e.rule, "CreateServer");
    }
}

TEST(Sequence, RewriteCeilingStopsNonTermination) {
    std::vector<Rule> rules{keep_component()};
    auto seq = parse_sequence("(Keep)*", rules);
    SequenceOptions o;
    o.max_rewrites = 25;
    EXPECT_THROW(apply_sequence(seq, eshop_graph(), architecture_type_graph(), o), SequenceError);
}

TEST(Sequence, ParseRejectsUnknownRules) {
    EXPECT_THROW(parse_sequence("CreateServer; Teleport", client_server_rules()), DefinitionError);
    EXPECT_EQ(parse_sequence("CreateServer;(MoveComponentToServer)*", client_server_rules()).to_string(),
              "CreateServer; (MoveComponentToServer)*");
}

TEST(Sequence, DefaultChooserIsDeterministic) {
    auto seq = parse_sequence("CreateServer; (MoveComponentToServer)*; (DelegateProvPortToServer)*",
                              client_server_rules());
    SequenceOptions o;
    o.bindings = kServer;
    auto a = apply_sequence(seq, eshop_graph(), architecture_type_graph(), o);
    auto b = apply_sequence(seq, eshop_graph(), architecture_type_graph(), o);
    EXPECT_EQ(a.graph, b.graph);
    EXPECT_EQ(a.graph.digest(), b.graph.digest());
}

// ---------------------------------------------------------------------------
// Properties over random hosts

TEST(Properties, FindMatchesAgreesWithBruteForce) {
    TypeGraph tg = architecture_type_graph();
    std::mt19937 rng(31337);
    Bindings b{{"name", std::string("a")}};
    std::size_t total = 0;
    for (int i = 0; i < 80; ++i) {
        Graph host = random_graph(rng);
        for (const auto& r : client_server_rules()) {
            std::set<RawEmbedding> engine;
            for (const auto& m : find_matches(r, host, tg, b)) engine.insert(raw(m.embedding));
            EXPECT_EQ(engine, brute_matches(r, host, tg, b)) << r.name;
            total += engine.size();
        }
    }
    EXPECT_GT(total, 0u);
}

TEST(Properties, RewritingPreservesEndpointTyping) {
    TypeGraph tg = architecture_type_graph();
    std::mt19937 rng(5);
    Bindings b{{"name", std::string("N")}};
    for (int i = 0; i < 60; ++i) {
        Graph host = random_graph(rng);
        ASSERT_EQ(check_typing(host, tg, {false, false}).count("edge-endpoint"), 0u);
        for (const auto& r : client_server_rules())
            for (const auto& m : find_matches(r, host, tg, b)) {
                Graph out = apply(m);
                EXPECT_EQ(check_typing(out, tg, {false, false}).count("edge-endpoint"), 0u) << r.name;
            }
    }
}

TEST(Properties, RulesDisableThemselvesAtTheirOwnLocation) {
    TypeGraph tg = architecture_type_graph();
    std::mt19937 rng(8);
    Bindings b{{"name", std::string("N")}};
    std::size_t checked = 0;
    for (int i = 0; i < 60; ++i) {
        Graph host = random_graph(rng);
        for (const auto& r : client_server_rules()) {
            if (r.nacs.empty()) continue;  // e.g. CreateClient: many clients are fine
            for (const auto& m : find_matches(r, host, tg, b)) {
                Graph out = apply(m);
                for (const auto& again : find_matches(r, out, tg, b))
                    EXPECT_NE(again.embedding.nodes, m.embedding.nodes) << r.name;
                ++checked;
            }
        }
    }
    EXPECT_GT(checked, 0u);
}
