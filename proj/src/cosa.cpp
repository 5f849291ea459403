#include "archevol/cosa.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "archevol/typing.hpp"

namespace archevol {

TypeGraph cosa_type_graph() {
    TypeGraph tg;
    const std::vector<AttributeDecl> named{{"n", AttrKind::String}};
    tg.add_node_type({cosa::Component, false, std::nullopt, named});
    tg.add_node_type({cosa::Configuration, false, std::nullopt, named});
    tg.add_node_type({cosa::Port, true, std::nullopt, named});
    tg.add_node_type({cosa::ProvPort, false, std::string(cosa::Port), {}});
    tg.add_node_type({cosa::ReqPort, false, std::string(cosa::Port), {}});
    tg.add_node_type({cosa::Connector, false, std::nullopt, named});
    tg.add_node_type({cosa::Role, true, std::nullopt, named});
    tg.add_node_type({cosa::ProvRole, false, std::string(cosa::Role), {}});
    tg.add_node_type({cosa::ReqRole, false, std::string(cosa::Role), {}});

    tg.add_edge_type({cosa::hasPort, cosa::Component, cosa::Port, Bounds::exactly(1), Bounds::any()});
    tg.add_edge_type({cosa::hasRole, cosa::Connector, cosa::Role, Bounds::exactly(1), Bounds::any()});
    tg.add_edge_type({cosa::configuration, cosa::Component, cosa::Configuration, Bounds::exactly(1), Bounds::at_most(1)});
    tg.add_edge_type({cosa::contains, cosa::Configuration, cosa::Component, Bounds::at_most(1), Bounds::any()});
    tg.add_edge_type({cosa::attachment, cosa::Port, cosa::Role, Bounds::at_most(1), Bounds::any()});
    tg.add_edge_type({cosa::binding, cosa::Port, cosa::Port, Bounds::at_most(1), Bounds::any()});
    tg.add_edge_type({cosa::uses, cosa::Port, cosa::Port, Bounds::any(), Bounds::any()});

    // Provided end to required end across a connector.
    const std::vector<PathStep> across{{cosa::attachment, true, cosa::ProvRole},
                                       {cosa::hasRole, false, cosa::Connector},
                                       {cosa::hasRole, true, cosa::ReqRole},
                                       {cosa::attachment, false, cosa::ReqPort}};
    tg.add_edge_type({cosa::connector, cosa::ProvPort, cosa::ReqPort, Bounds::any(), Bounds::any(), true, across});
    std::vector<PathStep> comp{{cosa::hasPort, true, cosa::ProvPort}};
    comp.insert(comp.end(), across.begin(), across.end());
    comp.push_back({cosa::hasPort, false, cosa::Component});
    tg.add_edge_type({cosa::connectsTo, cosa::Component, cosa::Component, Bounds::any(), Bounds::any(), true, comp});
    return tg;
}

TypeGraph architecture_type_graph() {
    TypeGraph tg = cosa_type_graph();
    tg.add_node_type({cosa::Client, false, std::string(cosa::Component), {}});
    tg.add_node_type({cosa::Server, false, std::string(cosa::Component), {}});
    return tg;
}

// ---------------------------------------------------------------------------

namespace {

Attrs named(const std::string& n) { return Attrs{{"n", n}}; }

const char* type_of(ComponentKind k) {
    switch (k) {
        case ComponentKind::Client: return cosa::Client;
        case ComponentKind::Server: return cosa::Server;
        default: return cosa::Component;
    }
}

class Encoder {
public:
    explicit Encoder(const Architecture& a) : a_(a) {}

    Graph run() {
        for (const auto& c : a_.components) component(c, "");
        for (const auto& conn : a_.connectors) {
            NodeId cid = g_.add_node(cosa::Connector, named(conn.name));
            for (const auto& r : conn.roles) {
                NodeId rid = g_.add_node(r.direction == Direction::Provided ? cosa::ProvRole : cosa::ReqRole,
                                         named(r.name));
                g_.add_edge(cosa::hasRole, cid, rid);
                roles_[conn.name + "#" + r.name] = rid;
            }
        }
        for (const auto& at : a_.attachments) g_.add_edge(cosa::attachment, ports_.at(at.port), roles_.at(at.role));
        for (const auto& b : a_.bindings) g_.add_edge(cosa::binding, ports_.at(b.outer), ports_.at(b.inner));
        for (const auto& u : a_.uses) g_.add_edge(cosa::uses, ports_.at(u.from), ports_.at(u.to));
        return std::move(g_);
    }

private:
    NodeId component(const Component& c, const std::string& prefix) {
        std::string path = child_path(prefix, c.name);
        NodeId id = g_.add_node(type_of(c.kind), named(c.name));
        for (const auto& p : c.ports) {
            NodeId pid = g_.add_node(p.direction == Direction::Provided ? cosa::ProvPort : cosa::ReqPort,
                                     named(p.name));
            g_.add_edge(cosa::hasPort, id, pid);
            ports_[port_ref(path, p.name)] = pid;
        }
        if (c.configuration) {
            NodeId conf = g_.add_node(cosa::Configuration, named(c.name));
            g_.add_edge(cosa::configuration, id, conf);
            for (const auto& child : *c.configuration) {
                NodeId cid = component(child, path);
                g_.add_edge(cosa::contains, conf, cid);
            }
        }
        return id;
    }

    const Architecture& a_;
    Graph g_;
    std::map<std::string, NodeId> ports_;
    std::map<std::string, NodeId> roles_;
};

std::vector<EdgeId> out_edges(const Graph& g, NodeId n, const char* type) {
    std::vector<EdgeId> out;
    for (const auto& [id, e] : g.edges())
        if (e.src == n && e.type == type) out.push_back(id);
    return out;
}

bool has_in_edge(const Graph& g, NodeId n, const char* type) {
    return std::any_of(g.edges().begin(), g.edges().end(),
                       [&](const auto& kv) { return kv.second.tgt == n && kv.second.type == type; });
}

class Decoder {
public:
    Decoder(const Graph& g, const TypeGraph& tg) : g_(g), tg_(tg) {}

    Architecture run(std::string name) {
        Architecture a;
        a.name = std::move(name);
        for (const auto& [id, n] : g_.nodes())
            if (tg_.is_subtype(n.type, cosa::Component) && !has_in_edge(g_, id, cosa::contains))
                a.components.push_back(component(id, ""));
        for (const auto& [id, n] : g_.nodes()) {
            if (n.type != cosa::Connector) continue;
            Connector c{name_of(n), {}};
            std::vector<NodeId> rs;
            for (EdgeId e : out_edges(g_, id, cosa::hasRole)) rs.push_back(g_.edge(e).tgt);
            std::sort(rs.begin(), rs.end());
            for (NodeId r : rs) {
                const Node& rn = g_.node(r);
                c.roles.push_back({name_of(rn), rn.type == cosa::ProvRole ? Direction::Provided : Direction::Required});
                refs_[r] = c.name + "#" + name_of(rn);
            }
            a.connectors.push_back(std::move(c));
        }
        for (const auto& [id, e] : g_.edges()) {
            if (e.type == cosa::attachment)
                a.attachments.push_back({refs_.at(e.src), refs_.at(e.tgt)});
            else if (e.type == cosa::binding)
                a.bindings.push_back({refs_.at(e.src), refs_.at(e.tgt)});
            else if (e.type == cosa::uses)
                a.uses.push_back({refs_.at(e.src), refs_.at(e.tgt)});
        }
        return a;
    }

private:
    Component component(NodeId id, const std::string& prefix) {
        const Node& n = g_.node(id);
        Component c;
        c.name = name_of(n);
        c.kind = n.type == cosa::Client ? ComponentKind::Client
                 : n.type == cosa::Server ? ComponentKind::Server
                                    : ComponentKind::Plain;
        std::string path = child_path(prefix, c.name);
        std::vector<NodeId> ps;
        for (EdgeId e : out_edges(g_, id, cosa::hasPort)) ps.push_back(g_.edge(e).tgt);
        std::sort(ps.begin(), ps.end());
        for (NodeId p : ps) {
            const Node& pn = g_.node(p);
            c.ports.push_back({name_of(pn), pn.type == cosa::ProvPort ? Direction::Provided : Direction::Required});
            refs_[p] = port_ref(path, name_of(pn));
        }
        auto confs = out_edges(g_, id, cosa::configuration);
        if (!confs.empty()) {
            NodeId conf = g_.edge(confs.front()).tgt;
            std::vector<NodeId> kids;
            for (EdgeId e : out_edges(g_, conf, cosa::contains)) kids.push_back(g_.edge(e).tgt);
            std::sort(kids.begin(), kids.end());
            c.configuration.emplace();
            for (NodeId k : kids) c.configuration->push_back(component(k, path));
        }
        return c;
    }

    const Graph& g_;
    const TypeGraph& tg_;
    std::map<NodeId, std::string> refs_;
};

}  // namespace

Graph encode(const Architecture& a) {
    require_valid_model(a);
    return Encoder(a).run();
}

Architecture decode(const Graph& g, std::string name) {
    TypeGraph tg = architecture_type_graph();
    Graph plain = strip_derived(g, tg);
    ConformanceReport report = check_typing(plain, tg, {.node_counts = false});
    if (report.ok()) {
        auto invariants = base_invariants();
        report.merge(check_constraints(materialize_derived(plain, tg), invariants, tg));
    }
    if (!report.ok()) {
        std::string msg = "graph does not conform to the architecture type graph";
        for (const auto& v : report.violations) msg += "\n  - " + v.message;
        throw ConformanceError(msg, std::move(report));
    }
    Architecture a = Decoder(plain, tg).run(std::move(name));
    require_valid_model(a);
    return a;
}

std::vector<GraphConstraint> base_invariants() {
    std::vector<GraphConstraint> out;

    GraphConstraint self;
    self.name = "cosa-i";
    self.kind = ConstraintKind::Forbidden;
    self.message = "a component cannot be connected to, or contained in, itself";
    self.patterns.push_back(PatternBuilder().node(1, cosa::Component).edge(1, cosa::connectsTo, 1, 1));
    self.patterns.push_back(PatternBuilder()
                                .node(1, cosa::Component)
                                .node(2, cosa::Configuration)
                                .edge(1, cosa::configuration, 1, 2)
                                .edge(2, cosa::contains, 2, 1));
    out.push_back(std::move(self));

    GraphConstraint bind;
    bind.name = "cosa-ii";
    bind.kind = ConstraintKind::Conditional;
    bind.message =
        "a binding is only allowed between ports of the same type belonging to a component and "
        "one of its subcomponents";
    bind.premise = PatternBuilder().node(1, cosa::Port).node(2, cosa::Port).edge(1, cosa::binding, 1, 2);
    for (const char* t : {cosa::ProvPort, cosa::ReqPort}) {
        bind.conclusions.push_back(PatternBuilder()
                                       .node(1, t)
                                       .node(2, t)
                                       .node(3, cosa::Component)
                                       .node(4, cosa::Configuration)
                                       .node(5, cosa::Component)
                                       .edge(1, cosa::binding, 1, 2)
                                       .edge(2, cosa::hasPort, 3, 1)
                                       .edge(3, cosa::configuration, 3, 4)
                                       .edge(4, cosa::contains, 4, 5)
                                       .edge(5, cosa::hasPort, 5, 2));
    }
    out.push_back(std::move(bind));

    GraphConstraint use;
    use.name = "cosa-iii";
    use.kind = ConstraintKind::Conditional;
    use.message = "a uses dependency is only allowed between different ports of the same component";
    use.premise = PatternBuilder().node(1, cosa::Port).node(2, cosa::Port).edge(1, cosa::uses, 1, 2);
    use.conclusions.push_back(PatternBuilder()
                                  .node(1, cosa::Port)
                                  .node(2, cosa::Port)
                                  .node(3, cosa::Component)
                                  .edge(1, cosa::uses, 1, 2)
                                  .edge(2, cosa::hasPort, 3, 1)
                                  .edge(3, cosa::hasPort, 3, 2));
    out.push_back(std::move(use));

    GraphConstraint both;
    both.name = "cosa-iv";
    both.kind = ConstraintKind::Forbidden;
    both.message = "two components cannot be both connected to and contained in one another";
    for (bool outward : {true, false}) {
        PatternBuilder b;
        b.node(1, cosa::Component).node(2, cosa::Configuration).node(3, cosa::Component);
        b.edge(1, cosa::configuration, 1, 2).edge(2, cosa::contains, 2, 3);
        if (outward)
            b.edge(3, cosa::connectsTo, 1, 3);
        else
            b.edge(3, cosa::connectsTo, 3, 1);
        both.patterns.push_back(b);
    }
    out.push_back(std::move(both));
    return out;
}

ConformanceReport validate_architecture(const Architecture& a) {
    ConformanceReport report;
    auto problems = model_problems(a);
    for (auto& p : problems) report.violations.push_back({"model", std::move(p), {}});
    if (!report.ok()) return report;
    TypeGraph tg = architecture_type_graph();
    Graph g = encode(a);
    report.merge(check_typing(g, tg, {.node_counts = false}));
    auto invariants = base_invariants();
    report.merge(check_constraints(materialize_derived(g, tg), invariants, tg));
    return report;
}

DependencyPairs dependency_reachability(const Architecture& a) {
    std::map<std::string, std::vector<std::string>> succ;
    for (const auto& u : a.uses) succ[u.from].push_back(u.to);
    for (const auto& conn : a.connectors) {
        std::vector<std::string> providers, requirers;
        for (const auto& at : a.attachments) {
            if (split_port_ref(at.role).component != conn.name) continue;
            const Role* r = find_role(a, at.role);
            if (!r) continue;
            (r->direction == Direction::Provided ? providers : requirers).push_back(at.port);
        }
        for (const auto& req : requirers)
            for (const auto& prov : providers) succ[req].push_back(prov);
    }
    for (const auto& b : a.bindings) {
        const Port* p = find_port(a, b.outer);
        if (!p) continue;
        if (p->direction == Direction::Provided)
            succ[b.outer].push_back(b.inner);
        else
            succ[b.inner].push_back(b.outer);
    }

    DependencyPairs out;
    for (const auto& start : port_refs(a)) {
        const Port* sp = find_port(a, start);
        if (sp->direction != Direction::Provided) continue;
        std::set<std::string> seen;
        std::vector<std::string> stack{start};
        while (!stack.empty()) {
            std::string cur = stack.back();
            stack.pop_back();
            for (const auto& nxt : succ[cur]) {
                if (!seen.insert(nxt).second) continue;
                stack.push_back(nxt);
            }
        }
        for (const auto& r : seen) {
            if (r == start) continue;
            const Port* rp = find_port(a, r);
            if (rp && rp->direction == Direction::Required) out.emplace(start, r);
        }
    }
    return out;
}

}  // namespace archevol
