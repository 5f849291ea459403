#include "archevol/typing.hpp"

#include <algorithm>
#include <set>

#include "archevol/error.hpp"
#include "archevol/matcher.hpp"

namespace archevol {

namespace {

std::string bounds_text(const Bounds& b) {
    if (b.max && *b.max == b.min) return "exactly " + std::to_string(b.min);
    if (!b.max) return "at least " + std::to_string(b.min);
    return "between " + std::to_string(b.min) + " and " + std::to_string(*b.max);
}

bool violates(const Bounds& b, std::size_t n, bool upper_only) {
    if (b.max && n > *b.max) return true;
    return !upper_only && n < b.min;
}

}  // namespace

ConformanceReport check_typing(const Graph& g, const TypeGraph& tg, TypingOptions options) {
    ConformanceReport report;
    auto add = [&](std::string code, std::string msg, Witness w) {
        report.violations.push_back({std::move(code), std::move(msg), std::move(w)});
    };

    for (const auto& [id, n] : g.nodes()) {
        const NodeType& t = tg.node_type(n.type);
        if (t.abstract)
            add("abstract-type", "node of abstract type " + t.name + " cannot be instantiated",
                {{id}, {}});
        auto decls = tg.attributes_of(n.type);
        for (const auto& d : decls) {
            auto it = n.attrs.find(d.name);
            if (it == n.attrs.end()) {
                add("attribute", n.type + " node is missing attribute '" + d.name + "'", {{id}, {}});
                continue;
            }
            const Value& v = it->second;
            bool kind_ok = d.kind == AttrKind::String ? std::holds_alternative<std::string>(v)
                                                      : std::holds_alternative<std::int64_t>(v);
            if (!kind_ok)
                add("attribute",
                    n.type + " attribute '" + d.name + "' has the wrong kind or is unbound",
                    {{id}, {}});
        }
        for (const auto& [key, v] : n.attrs) {
            bool declared = std::any_of(decls.begin(), decls.end(),
                                        [&](const AttributeDecl& d) { return d.name == key; });
            if (!declared)
                add("attribute", n.type + " node has undeclared attribute '" + key + "'", {{id}, {}});
        }
    }

    for (const auto& [id, e] : g.edges()) {
        const EdgeType& t = tg.edge_type(e.type);
        if (!g.has_node(e.src) || !g.has_node(e.tgt)) {
            add("edge-endpoint", t.name + " edge has a missing endpoint", {{}, {id}});
            continue;
        }
        const Node& s = g.node(e.src);
        const Node& d = g.node(e.tgt);
        if (!tg.is_subtype(s.type, t.source) || !tg.is_subtype(d.type, t.target))
            add("edge-endpoint",
                t.name + " edge must run from " + t.source + " to " + t.target + ", found " +
                    s.type + " to " + d.type,
                {{e.src, e.tgt}, {id}});
    }

    if (options.edge_multiplicities) {
        for (const auto& t : tg.edge_types()) {
            if (t.derived) continue;
            for (const auto& [id, n] : g.nodes()) {
                if (tg.is_subtype(n.type, t.target)) {
                    std::size_t incoming = 0;
                    for (const auto& [eid, e] : g.edges())
                        if (e.type == t.name && e.tgt == id) ++incoming;
                    if (violates(t.source_mult, incoming, options.upper_bounds_only))
                        add("edge-multiplicity",
                            t.target + " must connect to " + bounds_text(t.source_mult) + " " +
                                t.source + " via " + t.name + " (found " +
                                std::to_string(incoming) + ")",
                            {{id}, {}});
                }
                if (tg.is_subtype(n.type, t.source)) {
                    std::size_t outgoing = 0;
                    for (const auto& [eid, e] : g.edges())
                        if (e.type == t.name && e.src == id) ++outgoing;
                    if (violates(t.target_mult, outgoing, options.upper_bounds_only))
                        add("edge-multiplicity",
                            t.source + " must have " + bounds_text(t.target_mult) + " " +
                                t.name + " edges to " + t.target + " (found " +
                                std::to_string(outgoing) + ")",
                            {{id}, {}});
                }
            }
        }
    }

    if (options.node_counts) {
        for (const auto& t : tg.node_types()) {
            if (t.count.min == 0 && !t.count.max) continue;
            Witness w;
            for (const auto& [id, n] : g.nodes())
                if (tg.is_subtype(n.type, t.name)) w.nodes.push_back(id);
            const std::size_t found = w.nodes.size();
            if (violates(t.count, found, options.upper_bounds_only))
                add("node-count",
                    "expected " + bounds_text(t.count) + " " + t.name + " node(s), found " +
                        std::to_string(found),
                    std::move(w));
        }
    }
    return report;
}

namespace {

Witness witness_of(const Embedding& e) {
    Witness w;
    for (const auto& [p, h] : e.nodes) w.nodes.push_back(h);
    for (const auto& [p, h] : e.edges) w.edges.push_back(h);
    std::sort(w.nodes.begin(), w.nodes.end());
    std::sort(w.edges.begin(), w.edges.end());
    return w;
}

std::string describe(const Graph& g, const Witness& w) {
    std::string out;
    for (NodeId id : w.nodes) {
        const Node& n = g.node(id);
        std::string name = name_of(n);
        if (name.empty()) continue;
        if (!out.empty()) out += ", ";
        out += n.type + " " + name;
    }
    return out;
}

}  // namespace

ConformanceReport check_constraint(const Graph& g, const GraphConstraint& c, const TypeGraph& tg) {
    ConformanceReport report;
    auto add = [&](const Embedding& e) {
        Witness w = witness_of(e);
        std::string msg = c.message.empty() ? "constraint violated" : c.message;
        std::string where = describe(g, w);
        if (!where.empty()) msg += " [" + where + "]";
        report.violations.push_back({c.name, std::move(msg), std::move(w)});
    };
    if (c.kind == ConstraintKind::Forbidden) {
        for (const auto& pattern : c.patterns)
            for (const auto& e : find_embeddings(pattern, g, tg)) add(e);
        return report;
    }
    for (const auto& e : find_embeddings(c.premise, g, tg)) {
        bool satisfied = std::any_of(c.conclusions.begin(), c.conclusions.end(),
                                     [&](const Graph& concl) { return has_embedding(concl, g, tg, e); });
        if (!satisfied) add(e);
    }
    return report;
}

ConformanceReport check_constraints(const Graph& g, std::span<const GraphConstraint> cs,
                                    const TypeGraph& tg) {
    ConformanceReport report;
    for (const auto& c : cs) report.merge(check_constraint(g, c, tg));
    return report;
}

Graph path_pattern(const EdgeType& derived) {
    Graph p;
    NodeId prev = p.add_node(derived.source);
    for (const auto& step : derived.path) {
        NodeId next = p.add_node(step.node_type);
        if (step.forward)
            p.add_edge(step.edge_type, prev, next);
        else
            p.add_edge(step.edge_type, next, prev);
        prev = next;
    }
    return p;
}

namespace {

// Same path with its last node identified with the first, or nullopt when
// the end types are unrelated.
std::optional<Graph> closed_path_pattern(const Graph& open, const TypeGraph& tg) {
    NodeId first = open.nodes().begin()->first;
    NodeId last = open.nodes().rbegin()->first;
    if (first == last) return std::nullopt;
    const std::string& a = open.node(first).type;
    const std::string& b = open.node(last).type;
    std::string merged;
    if (tg.is_subtype(a, b))
        merged = a;
    else if (tg.is_subtype(b, a))
        merged = b;
    else
        return std::nullopt;
    Graph closed;
    for (const auto& [id, n] : open.nodes()) {
        if (id == last) continue;
        Node copy = n;
        if (id == first) copy.type = merged;
        closed.add_node(copy);
    }
    for (const auto& [id, e] : open.edges()) {
        Edge copy = e;
        if (copy.src == last) copy.src = first;
        if (copy.tgt == last) copy.tgt = first;
        closed.add_edge(copy);
    }
    return closed;
}

}  // namespace

Graph materialize_derived(const Graph& g, const TypeGraph& tg) {
    Graph out = g;
    for (const auto& t : tg.edge_types()) {
        if (!t.derived) continue;
        Graph open = path_pattern(t);
        NodeId first = open.nodes().begin()->first;
        NodeId last = open.nodes().rbegin()->first;
        std::set<std::pair<NodeId, NodeId>> pairs;
        for (const auto& e : find_embeddings(open, g, tg))
            pairs.emplace(e.nodes.at(first), e.nodes.at(last));
        if (auto closed = closed_path_pattern(open, tg)) {
            for (const auto& e : find_embeddings(*closed, g, tg))
                pairs.emplace(e.nodes.at(first), e.nodes.at(first));
        }
        for (const auto& [s, d] : pairs) out.add_edge(t.name, s, d);
    }
    return out;
}

Graph strip_derived(const Graph& g, const TypeGraph& tg) {
    Graph out = g;
    for (const auto& [id, e] : g.edges())
        if (tg.edge_type(e.type).derived) out.remove_edge(id);
    return out;
}

}  // namespace archevol
