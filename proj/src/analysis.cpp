#include "archevol/analysis.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "archevol/error.hpp"
#include "archevol/typing.hpp"

namespace archevol {

std::string to_string(ConflictKind k) {
    switch (k) {
        case ConflictKind::DeleteUse: return "delete-use";
        case ConflictKind::ProduceForbid: return "produce-forbid";
        case ConflictKind::ProduceUse: return "produce-use";
        default: return "delete-forbid";
    }
}

bool is_parallel(ConflictKind k) { return k == ConflictKind::DeleteUse || k == ConflictKind::ProduceForbid; }

std::string to_string(FindingKind k) {
    return k == FindingKind::NoEnabler ? "no-enabler" : "consumed-before-use";
}

namespace {

// ---------------------------------------------------------------------------
// Overlap enumeration

/// Pattern variables become symbolic host values, tagged by side so the two
/// rules' variables never clash.
Attrs symbolic(const Attrs& attrs, const std::string& side) {
    Attrs out;
    for (const auto& [k, v] : attrs) {
        if (const auto* var = std::get_if<Var>(&v))
            out[k] = Var{side + var->name};
        else
            out[k] = v;
    }
    return out;
}

/// Attribute union of two glued nodes; nullopt when constants disagree.
std::optional<Attrs> unify(const Attrs& a, const Attrs& b) {
    Attrs out = a;
    for (const auto& [k, v] : b) {
        auto it = out.find(k);
        if (it == out.end()) {
            out[k] = v;
        } else if (is_variable(it->second)) {
            if (!is_variable(v)) it->second = v;
        } else if (!is_variable(v) && it->second != v) {
            return std::nullopt;
        }
    }
    return out;
}

/// The type a node glued from `a` and `b` must have, if any.
std::optional<std::string> glued_type(const TypeGraph& tg, const Node& a, const Node& b) {
    std::string t;
    if (tg.is_subtype(a.type, b.type))
        t = a.type;
    else if (tg.is_subtype(b.type, a.type))
        t = b.type;
    else
        return std::nullopt;
    if ((a.exact && t != a.type) || (b.exact && t != b.type)) return std::nullopt;
    return t;
}

/// A jointly surjective overlap of patterns A and B. A's elements keep their
/// ids in the overlap graph; B's are recorded in `b_nodes`/`b_edges`.
struct Overlap {
    Graph graph;
    std::map<NodeId, NodeId> b_nodes;
    std::map<EdgeId, EdgeId> b_edges;
    std::set<NodeId> glued_nodes;  // A ids that received a B node
    std::set<EdgeId> glued_edges;
};

class OverlapEnumerator {
public:
    OverlapEnumerator(const Graph& a, const Graph& b, const TypeGraph& tg) : a_(a), b_(b), tg_(tg) {
        for (const auto& [id, n] : b.nodes()) b_node_order_.push_back(id);
        for (const auto& [id, e] : b.edges()) b_edge_order_.push_back(id);
    }

    std::vector<Overlap> run() {
        Overlap start;
        for (const auto& [id, n] : a_.nodes())
            start.graph.add_node(Node{id, n.type, symbolic(n.attrs, "1:"), false});
        for (const auto& [id, e] : a_.edges())
            start.graph.add_edge(Edge{id, e.type, e.src, e.tgt, symbolic(e.attrs, "1:")});
        glue_nodes(start, 0);
        return std::move(out_);
    }

private:
    void glue_nodes(Overlap& o, std::size_t i) {
        if (i == b_node_order_.size()) {
            glue_edges(o, 0);
            return;
        }
        const Node& bn = b_.node(b_node_order_[i]);
        Attrs battrs = symbolic(bn.attrs, "2:");
        // Glue onto each free A node.
        for (const auto& [aid, an] : a_.nodes()) {
            if (o.glued_nodes.count(aid)) continue;
            auto t = glued_type(tg_, an, bn);
            if (!t) continue;
            const Node current = o.graph.node(aid);
            auto attrs = unify(current.attrs, battrs);
            if (!attrs) continue;
            Overlap next = o;
            next.graph.node(aid).type = *t;
            next.graph.node(aid).attrs = *attrs;
            next.glued_nodes.insert(aid);
            next.b_nodes[bn.id] = aid;
            glue_nodes(next, i + 1);
        }
        // Or keep it apart.
        Overlap next = o;
        next.b_nodes[bn.id] = next.graph.add_node(bn.type, battrs);
        glue_nodes(next, i + 1);
    }

    void glue_edges(Overlap& o, std::size_t i) {
        if (i == b_edge_order_.size()) {
            out_.push_back(o);
            return;
        }
        const Edge& be = b_.edge(b_edge_order_[i]);
        NodeId src = o.b_nodes.at(be.src), tgt = o.b_nodes.at(be.tgt);
        for (const auto& [aid, ae] : a_.edges()) {
            if (o.glued_edges.count(aid) || ae.type != be.type || ae.src != src || ae.tgt != tgt) continue;
            auto attrs = unify(o.graph.edge(aid).attrs, symbolic(be.attrs, "2:"));
            if (!attrs) continue;
            Overlap next = o;
            Edge e = next.graph.edge(aid);
            next.graph.remove_edge(aid);
            e.attrs = *attrs;
            next.graph.add_edge(e);
            next.glued_edges.insert(aid);
            next.b_edges[be.id] = aid;
            glue_edges(next, i + 1);
        }
        Overlap next = o;
        next.b_edges[be.id] = next.graph.add_edge(be.type, src, tgt, symbolic(be.attrs, "2:"));
        glue_edges(next, i + 1);
    }

    const Graph& a_;
    const Graph& b_;
    const TypeGraph& tg_;
    std::vector<NodeId> b_node_order_;
    std::vector<EdgeId> b_edge_order_;
    std::vector<Overlap> out_;
};

std::vector<Overlap> overlaps(const Graph& a, const Graph& b, const TypeGraph& tg, const CpaOptions& options,
                              const std::string& what) {
    std::size_t size = a.node_count() + b.node_count();
    if (size > options.overlap_ceiling)
        throw OverlapLimitError(what + ": overlapping " + std::to_string(size) + " pattern nodes exceeds the ceiling of " +
                                std::to_string(options.overlap_ceiling) + "; simplify the rules or raise the ceiling");
    return OverlapEnumerator(a, b, tg).run();
}

// ---------------------------------------------------------------------------
// Helpers over overlaps

/// Overlaps must be realisable: no upper multiplicity bound may be exceeded.
bool consistent(const Graph& g, const TypeGraph& tg) {
    auto report = check_typing(g, tg, {.node_counts = false, .edge_multiplicities = true, .upper_bounds_only = true});
    return report.count("edge-multiplicity") == 0;
}

Bindings symbolic_parameters(const Rule& r, const std::string& side) {
    Bindings b;
    for (const auto& v : r.free_variables()) b[v] = Var{side + v};
    return b;
}

/// The unique embedding of `pattern` into `host` fixed by `seed`.
std::optional<Embedding> embed(const Graph& pattern, const Graph& host, const TypeGraph& tg, Embedding seed) {
    auto es = find_embeddings(pattern, host, tg, seed, 1);
    if (es.empty()) return std::nullopt;
    return es.front();
}

Embedding seed_from(const std::map<NodeId, NodeId>& nodes, const std::map<EdgeId, EdgeId>& edges, Bindings b = {}) {
    Embedding e;
    e.nodes = nodes;
    e.edges = edges;
    e.bindings = std::move(b);
    return e;
}

Embedding identity_seed(const Graph& pattern, Bindings b = {}) {
    Embedding e;
    for (const auto& [id, n] : pattern.nodes()) e.nodes[id] = id;
    for (const auto& [id, x] : pattern.edges()) e.edges[id] = id;
    e.bindings = std::move(b);
    return e;
}

/// Restricts a B-side map to the elements of `part`.
Embedding restrict_to(const Overlap& o, const Graph& part) {
    Embedding e;
    for (const auto& [id, n] : part.nodes()) e.nodes[id] = o.b_nodes.at(id);
    for (const auto& [id, x] : part.edges()) e.edges[id] = o.b_edges.at(id);
    return e;
}

bool applicable_at(const Rule& r, const Graph& g, const Embedding& m, const TypeGraph& tg) {
    return dangling_edges(r, g, m).empty() && nacs_hold(r, g, m, tg);
}

/// The same match of a rule against itself is no conflict, unless there is
/// nothing to match: then two applications really do compete.
bool trivial_self_overlap(const Rule& r1, const Rule& r2, const Embedding& m1, const Embedding& m2) {
    if (r1.name != r2.name || r1.lhs.empty()) return false;
    return m1.nodes == m2.nodes && m1.edges == m2.edges;
}

/// Reverses r1 on H (whose r1-RHS part carries RHS ids): removes created
/// elements and restores deleted ones. Fails when a created node would keep
/// edges r1 did not create. `m1` receives the seed embedding of r1's LHS.
std::optional<Graph> undo(const Rule& r1, const Graph& h, Embedding& m1) {
    Graph g = h;
    for (EdgeId id : r1.created_edges()) g.remove_edge(id);
    auto created = r1.created_nodes();
    for (NodeId id : created)
        if (!g.incident_edges(id).empty()) return std::nullopt;
    for (NodeId id : created) g.remove_node(id);

    m1 = Embedding{};
    for (NodeId id : r1.preserved_nodes()) m1.nodes[id] = id;
    for (EdgeId id : r1.preserved_edges()) m1.edges[id] = id;
    for (NodeId id : r1.deleted_nodes()) {
        const Node& n = r1.lhs.node(id);
        m1.nodes[id] = g.add_node(n.type, symbolic(n.attrs, "1:"));
    }
    for (EdgeId id : r1.deleted_edges()) {
        const Edge& e = r1.lhs.edge(id);
        m1.edges[id] = g.add_edge(e.type, m1.nodes.at(e.src), m1.nodes.at(e.tgt), symbolic(e.attrs, "1:"));
    }
    return g;
}

/// Pattern elements of `nac` that its rule's LHS does not contain.
bool nac_only(const Rule& r, NodeId id) { return !r.lhs.has_node(id); }
bool nac_only(const Rule& r, EdgeId id) { return !r.lhs.has_edge(id); }

std::string describe(const Rule& r1, const Rule& r2, const std::string& what) {
    return r1.name + " / " + r2.name + ": " + what;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<Conflict> critical_pairs(const Rule& r1, const Rule& r2, const TypeGraph& tg, const CpaOptions& options) {
    std::vector<Conflict> out;
    const Bindings p1 = symbolic_parameters(r1, "1:");
    const Bindings p2 = symbolic_parameters(r2, "2:");

    // delete-use: r1 deletes something r2's match needs.
    if (!r1.deleted_nodes().empty() || !r1.deleted_edges().empty()) {
        for (auto& o : overlaps(r1.lhs, r2.lhs, tg, options, r1.name + "/" + r2.name)) {
            bool critical = false;
            for (const auto& [b, a] : o.b_nodes) critical = critical || r1.is_deleted(a);
            for (const auto& [b, a] : o.b_edges) critical = critical || (r1.lhs.has_edge(a) && r1.is_deleted(a));
            if (!critical || !consistent(o.graph, tg)) continue;
            auto m1 = embed(r1.lhs, o.graph, tg, identity_seed(r1.lhs, p1));
            auto m2 = embed(r2.lhs, o.graph, tg, seed_from(o.b_nodes, o.b_edges, p2));
            if (!m1 || !m2 || trivial_self_overlap(r1, r2, *m1, *m2)) continue;
            if (!applicable_at(r1, o.graph, *m1, tg) || !applicable_at(r2, o.graph, *m2, tg)) continue;
            out.push_back({ConflictKind::DeleteUse, o.graph, *m1, *m2,
                           describe(r1, r2, "r1 deletes an element matched by r2")});
        }
    }

    // produce-forbid: r1 creates something a NAC of r2 forbids.
    if (!r1.created_nodes().empty() || !r1.created_edges().empty()) {
        for (const auto& nac : r2.nacs) {
            for (auto& o : overlaps(r1.rhs, nac.pattern, tg, options, r1.name + "/" + r2.name + "." + nac.name)) {
                bool critical = false, lhs_created = false;
                for (const auto& [b, a] : o.b_nodes) {
                    if (!r1.rhs.has_node(a) || !r1.is_created(a)) continue;
                    (nac_only(r2, b) ? critical : lhs_created) = true;
                }
                for (const auto& [b, a] : o.b_edges) {
                    if (!r1.rhs.has_edge(a) || !r1.is_created(a)) continue;
                    (nac_only(r2, b) ? critical : lhs_created) = true;
                }
                if (!critical || lhs_created || !consistent(o.graph, tg)) continue;
                Embedding seed1;
                auto g = undo(r1, o.graph, seed1);
                if (!g || !consistent(*g, tg)) continue;
                seed1.bindings = p1;
                auto m1 = embed(r1.lhs, *g, tg, seed1);
                Embedding seed2 = restrict_to(o, r2.lhs);
                seed2.bindings = p2;
                auto m2 = embed(r2.lhs, *g, tg, seed2);
                if (!m1 || !m2 || trivial_self_overlap(r1, r2, *m1, *m2)) continue;
                if (!applicable_at(r1, *g, *m1, tg) || !applicable_at(r2, *g, *m2, tg)) continue;
                out.push_back({ConflictKind::ProduceForbid, std::move(*g), *m1, *m2,
                               describe(r1, r2, "r1 creates an element forbidden by NAC " + nac.name)});
            }
        }
    }
    return out;
}

std::vector<Conflict> sequential_dependencies(const Rule& r1, const Rule& r2, const TypeGraph& tg,
                                              const CpaOptions& options) {
    std::vector<Conflict> out;
    const Bindings p1 = symbolic_parameters(r1, "1:");
    const Bindings p2 = symbolic_parameters(r2, "2:");

    // produce-use: r2's match needs something r1 created.
    if (!r1.created_nodes().empty() || !r1.created_edges().empty()) {
        for (auto& o : overlaps(r1.rhs, r2.lhs, tg, options, r1.name + "/" + r2.name)) {
            bool critical = false;
            for (const auto& [b, a] : o.b_nodes) critical = critical || (r1.rhs.has_node(a) && r1.is_created(a));
            for (const auto& [b, a] : o.b_edges) critical = critical || (r1.rhs.has_edge(a) && r1.is_created(a));
            if (!critical || !consistent(o.graph, tg)) continue;
            auto m2 = embed(r2.lhs, o.graph, tg, seed_from(o.b_nodes, o.b_edges, p2));
            if (!m2 || !applicable_at(r2, o.graph, *m2, tg)) continue;
            Embedding seed1;
            auto g = undo(r1, o.graph, seed1);
            if (!g || !consistent(*g, tg)) continue;
            seed1.bindings = p1;
            auto m1 = embed(r1.lhs, *g, tg, seed1);
            if (!m1 || !applicable_at(r1, *g, *m1, tg)) continue;
            auto comatch = embed(r1.rhs, o.graph, tg, identity_seed(r1.rhs, p1));
            out.push_back({ConflictKind::ProduceUse, o.graph, comatch.value_or(*m1), *m2,
                           describe(r1, r2, "r2 matches an element created by r1")});
        }
    }

    // delete-forbid: r1 deletes something whose presence a NAC of r2 forbids.
    if (!r1.deleted_nodes().empty() || !r1.deleted_edges().empty()) {
        for (const auto& nac : r2.nacs) {
            for (auto& o : overlaps(r1.lhs, nac.pattern, tg, options, r1.name + "/" + r2.name + "." + nac.name)) {
                bool critical = false, lhs_deleted = false;
                for (const auto& [b, a] : o.b_nodes) {
                    if (!r1.lhs.has_node(a) || !r1.is_deleted(a)) continue;
                    (nac_only(r2, b) ? critical : lhs_deleted) = true;
                }
                for (const auto& [b, a] : o.b_edges) {
                    if (!r1.lhs.has_edge(a) || !r1.is_deleted(a)) continue;
                    (nac_only(r2, b) ? critical : lhs_deleted) = true;
                }
                if (!critical || lhs_deleted || !consistent(o.graph, tg)) continue;
                auto m1 = embed(r1.lhs, o.graph, tg, identity_seed(r1.lhs, p1));
                if (!m1 || !applicable_at(r1, o.graph, *m1, tg)) continue;
                Graph h = apply_at(r1, o.graph, *m1);
                Embedding seed2 = restrict_to(o, r2.lhs);
                seed2.bindings = p2;
                auto m2 = embed(r2.lhs, h, tg, seed2);
                if (!m2 || !applicable_at(r2, h, *m2, tg)) continue;
                out.push_back({ConflictKind::DeleteForbid, o.graph, *m1, *m2,
                               describe(r1, r2, "r1 deletes an element that NAC " + nac.name + " forbids")});
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

const std::vector<Conflict>& CpaMatrix::cell(const std::string& r1, const std::string& r2) const {
    static const std::vector<Conflict> none;
    auto it = cells.find({r1, r2});
    return it == cells.end() ? none : it->second;
}

std::vector<ConflictKind> CpaMatrix::kinds(const std::string& r1, const std::string& r2) const {
    std::set<ConflictKind> ks;
    for (const auto& c : cell(r1, r2)) ks.insert(c.kind);
    return {ks.begin(), ks.end()};
}

CpaMatrix cpa_matrix(std::span<const Rule> rules, const TypeGraph& tg, const CpaOptions& options) {
    if (rules.empty()) throw DefinitionError("critical pair analysis needs at least one rule");
    CpaMatrix m;
    for (const auto& r : rules) m.rules.push_back(r.name);
    for (const auto& r1 : rules) {
        for (const auto& r2 : rules) {
            auto found = critical_pairs(r1, r2, tg, options);
            auto deps = sequential_dependencies(r1, r2, tg, options);
            found.insert(found.end(), std::make_move_iterator(deps.begin()), std::make_move_iterator(deps.end()));
            m.cells[{r1.name, r2.name}] = std::move(found);
        }
    }
    return m;
}

namespace {

std::string abbreviation(ConflictKind k) {
    switch (k) {
        case ConflictKind::DeleteUse: return "DU";
        case ConflictKind::ProduceForbid: return "PF";
        case ConflictKind::ProduceUse: return "PU";
        default: return "DF";
    }
}

}  // namespace

std::string format_table(const CpaMatrix& m) {
    std::size_t label = 0;
    for (const auto& r : m.rules) label = std::max(label, r.size());
    std::vector<std::string> cells;
    std::size_t width = 3;
    for (const auto& r1 : m.rules)
        for (const auto& r2 : m.rules) {
            std::string s;
            for (auto k : m.kinds(r1, r2)) s += (s.empty() ? "" : ",") + abbreviation(k);
            if (s.empty()) s = "-";
            width = std::max(width, s.size());
            cells.push_back(s);
        }
    auto pad = [](std::string s, std::size_t w) {
        s.resize(std::max(w, s.size()), ' ');
        return s;
    };
    std::ostringstream out;
    out << pad("", label + 5);
    for (std::size_t j = 0; j < m.rules.size(); ++j) out << "  " << pad("[" + std::to_string(j + 1) + "]", width);
    out << "\n";
    std::size_t idx = 0;
    for (std::size_t i = 0; i < m.rules.size(); ++i) {
        out << pad("[" + std::to_string(i + 1) + "]", 5) << pad(m.rules[i], label);
        for (std::size_t j = 0; j < m.rules.size(); ++j) out << "  " << pad(cells[idx++], width);
        out << "\n";
    }
    out << "DU delete-use, PF produce-forbid (parallel conflicts); "
           "PU produce-use, DF delete-forbid (sequential dependencies)\n";
    return out.str();
}

std::string format_adjacency(const CpaMatrix& m) {
    std::ostringstream out;
    for (const auto& r1 : m.rules)
        for (const auto& r2 : m.rules)
            for (auto k : m.kinds(r1, r2))
                out << r1 << "\t" << r2 << "\t" << (is_parallel(k) ? "solid" : "dotted") << "\t" << to_string(k)
                    << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------

SequenceReport analyze_sequence(const RuleSequence& seq, const TypeGraph& tg,
                                std::span<const std::string> assumed_types, const Graph* host,
                                const SequenceOptions& options) {
    SequenceReport report;
    report.sequence = seq.to_string();

    const std::set<std::string> assumed(assumed_types.begin(), assumed_types.end());
    std::set<std::string> produced, consumed;
    auto provided_by = [&](const std::set<std::string>& types, const Node& need) {
        return std::any_of(types.begin(), types.end(), [&](const std::string& t) {
            return need.exact ? t == need.type : tg.is_subtype(t, need.type);
        });
    };

    for (std::size_t pos = 0; pos < seq.items.size(); ++pos) {
        const auto& item = seq.items[pos];
        const Rule& r = item.rule;
        if (item.repetition == Repetition::Once) {
            for (const auto& [id, n] : r.lhs.nodes()) {
                if (provided_by(assumed, n) || provided_by(produced, n)) continue;
                if (provided_by(consumed, n))
                    report.static_findings.push_back(
                        {pos, FindingKind::ConsumedBeforeUse,
                         r.name + " needs a " + n.type + " (node " + std::to_string(id.value) +
                             ") that an earlier rule creates but a later one may delete"});
                else
                    report.static_findings.push_back({pos, FindingKind::NoEnabler,
                                                      r.name + " needs a " + n.type + " (node " +
                                                          std::to_string(id.value) +
                                                          ") that no earlier rule creates"});
            }
        }
        // Deletions may happen for repeated items too; creations only count
        // when they are guaranteed.
        for (NodeId id : r.deleted_nodes()) {
            const std::string& t = r.lhs.node(id).type;
            for (auto it = produced.begin(); it != produced.end();) {
                if (tg.is_subtype(*it, t)) {
                    consumed.insert(*it);
                    it = produced.erase(it);
                } else {
                    ++it;
                }
            }
        }
        if (item.repetition == Repetition::Once)
            for (NodeId id : r.created_nodes()) produced.insert(r.rhs.node(id).type);
    }

    if (host) {
        DynamicResult dyn;
        try {
            auto res = apply_sequence(seq, *host, tg, options);
            dyn.applicable = true;
            dyn.trace = std::move(res.trace);
            dyn.result = std::move(res.graph);
        } catch (const SequenceError& e) {
            dyn.failing_position = e.position;
            dyn.message = e.what();
        } catch (const Error& e) {
            dyn.message = e.what();
        }
        report.dynamic = std::move(dyn);
    }
    return report;
}

}  // namespace archevol
