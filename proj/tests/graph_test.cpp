#include <gtest/gtest.h>

#include <random>

#include "archevol/builtin_rules.hpp"
#include "archevol/cosa.hpp"
#include "archevol/error.hpp"
#include "archevol/matcher.hpp"
#include "archevol/styles.hpp"
#include "archevol/typing.hpp"
#include "support.hpp"

using namespace archevol;
using namespace archevol::testing;

namespace {

const GraphConstraint& invariant(const std::string& name) {
    static const auto all = base_invariants();
    for (const auto& c : all)
        if (c.name == name) return c;
    throw std::runtime_error("no invariant " + name);
}

bool has_code(const ConformanceReport& r, const std::string& code) { return r.count(code) > 0; }

/// Two components whose ports attach to the two roles of one connector.
Graph connected_pair() {
    using namespace cosa;
    Graph g;
    NodeId a = g.add_node(cosa::Component, {{"n", std::string("A")}});
    NodeId b = g.add_node(cosa::Component, {{"n", std::string("B")}});
    NodeId pa = g.add_node(ProvPort, {{"n", std::string("p")}});
    NodeId pb = g.add_node(ReqPort, {{"n", std::string("r")}});
    NodeId k = g.add_node(cosa::Connector, {{"n", std::string("K")}});
    NodeId r1 = g.add_node(ProvRole, {{"n", std::string("prov")}});
    NodeId r2 = g.add_node(ReqRole, {{"n", std::string("req")}});
    g.add_edge(hasPort, a, pa);
    g.add_edge(hasPort, b, pb);
    g.add_edge(hasRole, k, r1);
    g.add_edge(hasRole, k, r2);
    g.add_edge(attachment, pa, r1);
    g.add_edge(attachment, pb, r2);
    return g;
}

std::size_t count_type(const Graph& g, const std::string& type) {
    std::size_t n = 0;
    for (const auto& [id, e] : g.edges())
        if (e.type == type) ++n;
    return n;
}

}  // namespace

// ---------------------------------------------------------------------------
// check_typing

TEST(Typing, EshopConformsToCosa) {
    Graph g = encode(load_fixture("eshop.arch"));
    auto r = check_typing(g, cosa_type_graph());
    EXPECT_TRUE(r.ok()) << (r.ok() ? "" : r.violations.front().message);
}

TEST(Typing, EmptyGraphConformsVacuously) { EXPECT_TRUE(check_typing(Graph{}, cosa_type_graph()).ok()); }

TEST(Typing, PortWithoutOwnerIsReported) {
    Graph g;
    g.add_node(cosa::ProvPort, {{"n", std::string("p")}});
    auto r = check_typing(g, cosa_type_graph());
    ASSERT_EQ(r.violations.size(), 1u);
    EXPECT_EQ(r.violations[0].code, "edge-multiplicity");
    EXPECT_NE(r.violations[0].message.find("Port must connect to exactly 1 Component"), std::string::npos)
        << r.violations[0].message;
}

TEST(Typing, UnknownTypeIsAHardError) {
    Graph g;
    g.add_node("Gizmo");
    EXPECT_THROW(check_typing(g, cosa_type_graph()), UnknownTypeError);
}

TEST(Typing, AbstractTypeAndAttributesAreChecked) {
    Graph g;
    g.add_node(cosa::Component);  // missing n
    g.add_node(cosa::Port, {{"n", std::string("p")}});
    auto r = check_typing(g, cosa_type_graph(), {.node_counts = true, .edge_multiplicities = false});
    EXPECT_TRUE(has_code(r, "abstract-type"));
    EXPECT_TRUE(has_code(r, "attribute"));
}

TEST(Typing, EdgeEndpointsRespectInheritance) {
    Graph g;
    NodeId s = g.add_node(cosa::Server, {{"n", std::string("S")}});
    NodeId p = g.add_node(cosa::ReqPort, {{"n", std::string("p")}});
    g.add_edge(cosa::hasPort, s, p);
    TypingOptions o;
    EXPECT_TRUE(check_typing(g, architecture_type_graph(), o).ok());
    g.add_edge(cosa::hasPort, p, s);
    EXPECT_TRUE(has_code(check_typing(g, architecture_type_graph(), o), "edge-endpoint"));
}

TEST(Typing, IsDeterministic) {
    std::mt19937 rng(7);
    for (int i = 0; i < 20; ++i) {
        Graph g = random_graph(rng);
        EXPECT_EQ(check_typing(g, architecture_type_graph()).violations,
                  check_typing(g, architecture_type_graph()).violations);
    }
}

// ---------------------------------------------------------------------------
// check_constraint

TEST(Constraint, UsesAcrossComponentsViolatesIii) {
    using namespace cosa;
    Graph g;
    NodeId a = g.add_node(cosa::Component, {{"n", std::string("A")}});
    NodeId b = g.add_node(cosa::Component, {{"n", std::string("B")}});
    NodeId pa = g.add_node(ProvPort, {{"n", std::string("x")}});
    NodeId pb = g.add_node(ReqPort, {{"n", std::string("y")}});
    g.add_edge(hasPort, a, pa);
    g.add_edge(hasPort, b, pb);
    EXPECT_TRUE(check_constraint(g, invariant("cosa-iii"), cosa_type_graph()).ok());
    g.add_edge(uses, pa, pb);
    EXPECT_EQ(check_constraint(g, invariant("cosa-iii"), cosa_type_graph()).violations.size(), 1u);
}

TEST(Constraint, BindingBetweenProvAndReqViolatesIi) {
    using namespace cosa;
    Graph g;
    NodeId outer = g.add_node(cosa::Component, {{"n", std::string("O")}});
    NodeId conf = g.add_node(cosa::Configuration);
    NodeId inner = g.add_node(cosa::Component, {{"n", std::string("I")}});
    NodeId po = g.add_node(ProvPort, {{"n", std::string("x")}});
    NodeId pi = g.add_node(ReqPort, {{"n", std::string("y")}});
    g.add_edge(configuration, outer, conf);
    g.add_edge(contains, conf, inner);
    g.add_edge(hasPort, outer, po);
    g.add_edge(hasPort, inner, pi);
    g.add_edge(binding, po, pi);
    EXPECT_EQ(check_constraint(g, invariant("cosa-ii"), cosa_type_graph()).violations.size(), 1u);
}

TEST(Constraint, SelfContainmentViolatesI) {
    using namespace cosa;
    Graph g;
    NodeId c = g.add_node(cosa::Component, {{"n", std::string("C")}});
    NodeId conf = g.add_node(cosa::Configuration);
    g.add_edge(configuration, c, conf);
    g.add_edge(contains, conf, c);
    EXPECT_EQ(check_constraint(g, invariant("cosa-i"), cosa_type_graph()).violations.size(), 1u);
}

TEST(Constraint, EshopSatisfiesAllInvariants) {
    TypeGraph tg = cosa_type_graph();
    Graph g = materialize_derived(encode(load_fixture("eshop.arch")), tg);
    auto invariants = base_invariants();
    EXPECT_EQ(invariants.size(), 4u);
    EXPECT_TRUE(check_constraints(g, invariants, tg).ok());
}

// ---------------------------------------------------------------------------
// materialize_derived

TEST(Derived, ConnectorYieldsOneConnectsTo) {
    TypeGraph tg = cosa_type_graph();
    Graph g = materialize_derived(connected_pair(), tg);
    EXPECT_EQ(count_type(g, cosa::connectsTo), 1u);
    EXPECT_EQ(count_type(g, cosa::connector), 1u);
}

TEST(Derived, UnattachedComponentAddsNothing) {
    Graph g;
    NodeId c = g.add_node(cosa::Component, {{"n", std::string("C")}});
    NodeId p = g.add_node(cosa::ProvPort, {{"n", std::string("p")}});
    g.add_edge(cosa::hasPort, c, p);
    EXPECT_EQ(materialize_derived(g, cosa_type_graph()), g);
}

TEST(Derived, EshopConnectsToMatchesPathEnumeration) {
    using namespace cosa;
    TypeGraph tg = cosa_type_graph();
    Graph base = encode(load_fixture("eshop.arch"));
    // oracle: component-provport-attachment-provrole-connector-reqrole-attachment-reqport-component
    std::set<std::pair<NodeId, NodeId>> pairs;
    auto owner = [&](NodeId port) {
        for (const auto& [id, e] : base.edges())
            if (e.type == hasPort && e.tgt == port) return e.src;
        throw std::runtime_error("unowned port");
    };
    auto connector_of = [&](NodeId role) {
        for (const auto& [id, e] : base.edges())
            if (e.type == hasRole && e.tgt == role) return e.src;
        throw std::runtime_error("orphan role");
    };
    for (const auto& [i1, a1] : base.edges())
        for (const auto& [i2, a2] : base.edges()) {
            if (a1.type != attachment || a2.type != attachment || i1 == i2) continue;
            if (a1.src == a2.src || a1.tgt == a2.tgt) continue;
            // oriented from the providing to the requiring side
            if (base.node(a1.src).type != ProvPort || base.node(a1.tgt).type != ProvRole) continue;
            if (base.node(a2.src).type != ReqPort || base.node(a2.tgt).type != ReqRole) continue;
            if (connector_of(a1.tgt) != connector_of(a2.tgt)) continue;
            pairs.emplace(owner(a1.src), owner(a2.src));
        }
    Graph g = materialize_derived(base, tg);
    EXPECT_EQ(count_type(g, connectsTo), pairs.size());
    EXPECT_GT(pairs.size(), 0u);
}

TEST(Derived, OnlyAddsDerivedEdgesAndIsIdempotent) {
    TypeGraph tg = architecture_type_graph();
    std::mt19937 rng(11);
    for (int i = 0; i < 50; ++i) {
        Graph g = random_graph(rng);
        Graph m = materialize_derived(g, tg);
        for (const auto& [id, n] : g.nodes()) EXPECT_EQ(m.node(id), n);
        for (const auto& [id, e] : g.edges()) EXPECT_EQ(m.edge(id), e);
        for (const auto& [id, e] : m.edges())
            if (!g.has_edge(id)) EXPECT_TRUE(tg.edge_type(e.type).derived);
        EXPECT_EQ(strip_derived(m, tg), g);
        EXPECT_EQ(materialize_derived(strip_derived(m, tg), tg), m);
    }
}

// ---------------------------------------------------------------------------
// Oracle equivalence on random graphs

TEST(Oracle, EmbeddingsMatchBruteForce) {
    TypeGraph tg = architecture_type_graph();
    std::vector<Graph> patterns;
    for (const auto& r : client_server_rules()) {
        patterns.push_back(r.lhs);
        for (const auto& n : r.nacs) patterns.push_back(n.pattern);
    }
    std::mt19937 rng(2024);
    std::size_t total = 0;
    for (int i = 0; i < 100; ++i) {
        Graph host = random_graph(rng);
        for (const auto& p : patterns) {
            std::set<RawEmbedding> engine, oracle;
            for (const auto& e : find_embeddings(p, host, tg)) engine.insert(raw(e));
            for (auto& e : brute_embeddings(p, host, tg)) {
                e.bindings.clear();
                oracle.insert(e);
            }
            ASSERT_EQ(engine.size(), oracle.size());
            EXPECT_TRUE(engine == oracle);
            total += engine.size();
        }
    }
    EXPECT_GT(total, 0u);
}

TEST(Oracle, ConstraintsMatchBruteForce) {
    TypeGraph tg = architecture_type_graph();
    std::vector<GraphConstraint> constraints = base_invariants();
    for (const auto& c : client_server_style().constraints) constraints.push_back(c);
    std::mt19937 rng(99);
    std::size_t forbidden_hits = 0;
    for (int i = 0; i < 100; ++i) {
        Graph g = materialize_derived(random_graph(rng), tg);
        for (const auto& c : constraints) {
            auto engine = witness_keys(check_constraint(g, c, tg));
            if (c.kind == ConstraintKind::Forbidden) {
                EXPECT_EQ(engine, brute_forbidden(g, c, tg)) << c.name;
                forbidden_hits += engine.size();
                continue;
            }
            std::multiset<WitnessKey> oracle;
            for (const auto& e : brute_embeddings(c.premise, g, tg)) {
                bool extends = false;
                for (const auto& concl : c.conclusions)
                    if (!brute_embeddings(concl, g, tg, e).empty()) extends = true;
                if (extends) continue;
                WitnessKey k;
                for (const auto& [p, h] : e.nodes) k.first.push_back(h);
                for (const auto& [p, h] : e.edges) k.second.push_back(h);
                std::sort(k.first.begin(), k.first.end());
                std::sort(k.second.begin(), k.second.end());
                oracle.insert(k);
            }
            EXPECT_EQ(engine, oracle) << c.name;
        }
    }
    EXPECT_GT(forbidden_hits, 0u);
}
