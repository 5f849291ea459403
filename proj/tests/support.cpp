#include "support.hpp"

#include <algorithm>
#include <functional>

#include "archevol/formats.hpp"

namespace archevol::testing {

std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(ARCHEVOL_FIXTURE_DIR) / name;
}

Architecture load_fixture(const std::string& name) { return load_architecture(fixture(name)); }

// ---------------------------------------------------------------------------

namespace {

bool type_ok(const TypeGraph& tg, const Node& p, const Node& h) {
    return p.exact ? p.type == h.type : tg.is_subtype(h.type, p.type);
}

bool attrs_ok(const Attrs& pattern, const Attrs& host, Bindings& b) {
    for (const auto& [key, pv] : pattern) {
        auto it = host.find(key);
        if (it == host.end()) return false;
        const Value& hv = it->second;
        if (std::holds_alternative<Var>(hv)) continue;
        if (const auto* v = std::get_if<Var>(&pv)) {
            auto bound = b.find(v->name);
            if (bound == b.end())
                b[v->name] = hv;
            else if (!std::holds_alternative<Var>(bound->second) && bound->second != hv)
                return false;
        } else if (pv != hv) {
            return false;
        }
    }
    return true;
}

}  // namespace

std::vector<RawEmbedding> brute_embeddings(const Graph& pattern, const Graph& host, const TypeGraph& tg,
                                           const RawEmbedding& fixed) {
    std::vector<const Node*> pnodes;
    for (const auto& [id, n] : pattern.nodes()) pnodes.push_back(&n);
    std::vector<const Edge*> pedges;
    for (const auto& [id, e] : pattern.edges()) pedges.push_back(&e);
    std::vector<const Node*> hnodes;
    for (const auto& [id, n] : host.nodes()) hnodes.push_back(&n);
    std::vector<const Edge*> hedges;
    for (const auto& [id, e] : host.edges()) hedges.push_back(&e);

    std::vector<RawEmbedding> out;
    RawEmbedding cur;
    cur.bindings = fixed.bindings;
    std::set<std::uint32_t> used_nodes, used_edges;

    std::function<void(std::size_t)> edges_from = [&](std::size_t i) {
        if (i == pedges.size()) {
            out.push_back(cur);
            return;
        }
        const Edge& pe = *pedges[i];
        auto f = fixed.edges.find(pe.id.value);
        for (const Edge* he : hedges) {
            if (f != fixed.edges.end() && f->second != he->id.value) continue;
            if (used_edges.count(he->id.value) || he->type != pe.type) continue;
            if (cur.nodes.at(pe.src.value) != he->src.value || cur.nodes.at(pe.tgt.value) != he->tgt.value)
                continue;
            Bindings saved = cur.bindings;
            if (attrs_ok(pe.attrs, he->attrs, cur.bindings)) {
                used_edges.insert(he->id.value);
                cur.edges[pe.id.value] = he->id.value;
                edges_from(i + 1);
                cur.edges.erase(pe.id.value);
                used_edges.erase(he->id.value);
            }
            cur.bindings = saved;
        }
    };

    std::function<void(std::size_t)> nodes_from = [&](std::size_t i) {
        if (i == pnodes.size()) {
            edges_from(0);
            return;
        }
        const Node& pn = *pnodes[i];
        auto f = fixed.nodes.find(pn.id.value);
        for (const Node* hn : hnodes) {
            if (f != fixed.nodes.end() && f->second != hn->id.value) continue;
            if (used_nodes.count(hn->id.value) || !type_ok(tg, pn, *hn)) continue;
            Bindings saved = cur.bindings;
            if (attrs_ok(pn.attrs, hn->attrs, cur.bindings)) {
                used_nodes.insert(hn->id.value);
                cur.nodes[pn.id.value] = hn->id.value;
                nodes_from(i + 1);
                cur.nodes.erase(pn.id.value);
                used_nodes.erase(hn->id.value);
            }
            cur.bindings = saved;
        }
    };
    nodes_from(0);
    return out;
}

std::set<RawEmbedding> brute_matches(const Rule& rule, const Graph& host, const TypeGraph& tg,
                                     const Bindings& bindings) {
    RawEmbedding seed;
    seed.bindings = bindings;
    std::set<RawEmbedding> out;
    for (auto& m : brute_embeddings(rule.lhs, host, tg, seed)) {
        bool blocked = false;
        for (const auto& nac : rule.nacs)
            if (!brute_embeddings(nac.pattern, host, tg, m).empty()) blocked = true;
        if (!blocked) {
            m.bindings.clear();
            out.insert(m);
        }
    }
    return out;
}

RawEmbedding raw(const Embedding& e) {
    RawEmbedding r;
    for (const auto& [p, h] : e.nodes) r.nodes[p.value] = h.value;
    for (const auto& [p, h] : e.edges) r.edges[p.value] = h.value;
    return r;
}

std::multiset<WitnessKey> brute_forbidden(const Graph& g, const GraphConstraint& c, const TypeGraph& tg) {
    std::multiset<WitnessKey> out;
    for (const auto& p : c.patterns)
        for (const auto& e : brute_embeddings(p, g, tg)) {
            WitnessKey k;
            for (const auto& [pid, hid] : e.nodes) k.first.push_back(hid);
            for (const auto& [pid, hid] : e.edges) k.second.push_back(hid);
            std::sort(k.first.begin(), k.first.end());
            std::sort(k.second.begin(), k.second.end());
            out.insert(k);
        }
    return out;
}

std::multiset<WitnessKey> witness_keys(const ConformanceReport& r) {
    std::multiset<WitnessKey> out;
    for (const auto& v : r.violations) {
        WitnessKey k;
        for (auto n : v.witness.nodes) k.first.push_back(n.value);
        for (auto e : v.witness.edges) k.second.push_back(e.value);
        std::sort(k.first.begin(), k.first.end());
        std::sort(k.second.begin(), k.second.end());
        out.insert(k);
    }
    return out;
}

// ---------------------------------------------------------------------------

DependencyPairs closure_pairs(const Architecture& a) {
    std::vector<std::string> refs = port_refs(a);
    const std::size_t n = refs.size();
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) index[refs[i]] = i;
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    auto dir = [&](const std::string& ref) { return find_port(a, ref)->direction; };

    for (const auto& u : a.uses) reach[index.at(u.from)][index.at(u.to)] = true;
    for (const auto& p : a.attachments)
        for (const auto& q : a.attachments) {
            if (split_port_ref(p.role).component != split_port_ref(q.role).component) continue;
            if (find_role(a, p.role)->direction == Direction::Required &&
                find_role(a, q.role)->direction == Direction::Provided)
                reach[index.at(p.port)][index.at(q.port)] = true;
        }
    for (const auto& b : a.bindings) {
        if (dir(b.outer) == Direction::Provided)
            reach[index.at(b.outer)][index.at(b.inner)] = true;
        else
            reach[index.at(b.inner)][index.at(b.outer)] = true;
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (reach[i][k])
                for (std::size_t j = 0; j < n; ++j)
                    if (reach[k][j]) reach[i][j] = true;

    DependencyPairs out;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && reach[i][j] && dir(refs[i]) == Direction::Provided && dir(refs[j]) == Direction::Required)
                out.emplace(refs[i], refs[j]);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

template <typename T>
T pick(std::mt19937& rng, const std::vector<T>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

bool chance(std::mt19937& rng, double p) { return std::bernoulli_distribution(p)(rng); }

}  // namespace

Graph random_graph(std::mt19937& rng, std::size_t max_nodes) {
    using namespace cosa;
    const std::vector<std::string> names{"a", "b", "c"};
    const std::vector<std::string> comp_types{cosa::Component, cosa::Component, Client, Server};
    Graph g;
    std::vector<NodeId> comps, confs, ports;
    auto room = [&](std::size_t k) { return g.node_count() + k <= max_nodes; };
    auto named = [&] { return Attrs{{"n", pick(rng, names)}}; };

    std::size_t steps = std::uniform_int_distribution<std::size_t>(1, 10)(rng);
    for (std::size_t s = 0; s < steps; ++s) {
        switch (std::uniform_int_distribution<int>(0, 5)(rng)) {
            case 0:
            case 1:
                if (room(1)) comps.push_back(g.add_node(pick(rng, comp_types), named()));
                break;
            case 2:
                if (!comps.empty() && room(1)) {
                    NodeId conf = g.add_node(Configuration);
                    g.add_edge(configuration, pick(rng, comps), conf);
                    confs.push_back(conf);
                }
                break;
            case 3:
                if (!confs.empty() && !comps.empty()) g.add_edge(contains, pick(rng, confs), pick(rng, comps));
                break;
            case 4:
                if (!comps.empty() && room(1)) {
                    NodeId p = g.add_node(chance(rng, 0.5) ? ProvPort : ReqPort, named());
                    g.add_edge(hasPort, pick(rng, comps), p);
                    ports.push_back(p);
                }
                break;
            case 5:
                if (ports.size() >= 2) {
                    NodeId x = pick(rng, ports), y = pick(rng, ports);
                    if (x != y) g.add_edge(chance(rng, 0.7) ? binding : uses, x, y);
                }
                break;
        }
    }
    if (chance(rng, 0.3) && room(3) && ports.size() >= 2) {
        NodeId k = g.add_node(cosa::Connector, named());
        NodeId r1 = g.add_node(ProvRole, named());
        NodeId r2 = g.add_node(ReqRole, named());
        g.add_edge(hasRole, k, r1);
        g.add_edge(hasRole, k, r2);
        g.add_edge(attachment, pick(rng, ports), r1);
        g.add_edge(attachment, pick(rng, ports), r2);
    }
    return g;
}

Architecture random_architecture(std::mt19937& rng) {
    for (;;) {
        const std::size_t count = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
        std::vector<int> parent(count, -1);
        std::vector<int> depth(count, 0);
        for (std::size_t i = 1; i < count; ++i)
            if (chance(rng, 0.35)) {
                int p = std::uniform_int_distribution<int>(0, static_cast<int>(i) - 1)(rng);
                if (depth[p] < 2) {
                    parent[i] = p;
                    depth[i] = depth[p] + 1;
                }
            }

        std::vector<Component> flat(count);
        for (std::size_t i = 0; i < count; ++i) {
            flat[i].name = "C" + std::to_string(i);
            const int ports = std::uniform_int_distribution<int>(1, 4)(rng);
            for (int k = 0; k < ports; ++k)
                flat[i].ports.push_back({flat[i].name + "P" + std::to_string(k),
                                         chance(rng, 0.5) ? Direction::Provided : Direction::Required});
        }
        std::vector<std::string> path(count);
        for (std::size_t i = 0; i < count; ++i)
            path[i] = parent[i] < 0 ? flat[i].name : child_path(path[parent[i]], flat[i].name);

        Architecture a;
        a.name = "random";
        // uses: index-ordered pairs inside each component keep them acyclic
        for (std::size_t i = 0; i < count; ++i)
            for (std::size_t x = 0; x < flat[i].ports.size(); ++x)
                for (std::size_t y = x + 1; y < flat[i].ports.size(); ++y)
                    if (chance(rng, 0.3)) {
                        auto from = port_ref(path[i], flat[i].ports[x].name);
                        auto to = port_ref(path[i], flat[i].ports[y].name);
                        if (chance(rng, 0.5)) std::swap(from, to);
                        a.uses.push_back({from, to});
                    }
        // delegation bindings from parent ports to child ports
        std::set<std::string> inner_bound, outer_bound;
        for (std::size_t i = 0; i < count; ++i) {
            if (parent[i] < 0) continue;
            const auto& par = flat[parent[i]];
            for (const auto& cp : flat[i].ports) {
                if (!chance(rng, 0.4)) continue;
                for (const auto& pp : par.ports) {
                    auto outer = port_ref(path[parent[i]], pp.name);
                    if (pp.direction != cp.direction || outer_bound.count(outer)) continue;
                    auto inner = port_ref(path[i], cp.name);
                    a.bindings.push_back({outer, inner});
                    outer_bound.insert(outer);
                    inner_bound.insert(inner);
                    break;
                }
            }
        }
        // connectors between siblings
        int k = 0;
        for (std::size_t i = 0; i < count; ++i)
            for (std::size_t j = 0; j < count; ++j) {
                if (i == j || parent[i] != parent[j] || !chance(rng, 0.35)) continue;
                std::vector<std::string> prov, req;
                for (const auto& p : flat[i].ports)
                    if (p.direction == Direction::Provided) prov.push_back(port_ref(path[i], p.name));
                for (const auto& p : flat[j].ports)
                    if (p.direction == Direction::Required) req.push_back(port_ref(path[j], p.name));
                if (prov.empty() || req.empty()) continue;
                std::string name = "K" + std::to_string(k++);
                a.connectors.push_back({name, {{"prov", Direction::Provided}, {"req", Direction::Required}}});
                a.attachments.push_back({pick(rng, prov), name + "#prov"});
                a.attachments.push_back({pick(rng, req), name + "#req"});
            }

        // assemble the containment tree (children after parents by index)
        std::function<Component(std::size_t)> build = [&](std::size_t i) {
            Component c = flat[i];
            for (std::size_t j = i + 1; j < count; ++j)
                if (parent[j] == static_cast<int>(i)) {
                    if (!c.configuration) c.configuration.emplace();
                    c.configuration->push_back(build(j));
                }
            return c;
        };
        for (std::size_t i = 0; i < count; ++i)
            if (parent[i] < 0) a.components.push_back(build(i));

        if (validate_architecture(a).ok()) return a;
    }
}

// ---------------------------------------------------------------------------

std::optional<Evolved> random_operation(const Architecture& a, std::mt19937& rng, std::string* what) {
    std::string scratch;
    std::string& desc = what ? *what : scratch;
    auto paths = component_paths(a);
    auto pick = [&](const auto& v) { return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)]; };
    std::string comp = pick(paths);
    const Component* c = find_component(a, comp);
    switch (std::uniform_int_distribution<int>(0, 5)(rng)) {
        case 0: {  // split
            if (c->ports.size() < 2) return std::nullopt;
            std::vector<std::string> ports;
            for (const auto& p : c->ports)
                if (rng() % 2) ports.push_back(p.name);
            if (ports.empty() || ports.size() == c->ports.size()) return std::nullopt;
            desc = "split " + comp;
            for (const auto& p : ports) desc += " " + p;
            return split_component(a, comp, ports);
        }
        case 1: {  // move port to a sibling
            if (c->ports.empty()) return std::nullopt;
            std::vector<std::string> sibs;
            for (const auto& p : paths)
                if (p != comp && parent_path(p) == parent_path(comp)) sibs.push_back(p);
            if (sibs.empty()) return std::nullopt;
            std::string port = port_ref(comp, pick(c->ports).name), target = pick(sibs);
            desc = "move " + port + " to " + target;
            return move_port(a, port, target);
        }
        case 2: {  // merge with a sibling
            std::vector<std::string> sibs;
            for (const auto& p : paths)
                if (p != comp && parent_path(p) == parent_path(comp)) sibs.push_back(p);
            if (sibs.empty()) return std::nullopt;
            std::string other = pick(sibs);
            desc = "merge " + comp + " " + other;
            return merge_components(a, {comp, other});
        }
        case 3: {  // move in
            std::vector<std::string> sibs;
            for (const auto& p : paths)
                if (p != comp && parent_path(p) == parent_path(comp)) sibs.push_back(p);
            if (sibs.empty()) return std::nullopt;
            std::string parent = pick(sibs);
            desc = "move_in " + comp + " " + parent;
            return move_in(a, comp, parent);
        }
        case 4:
            if (parent_path(comp).empty()) return std::nullopt;
            desc = "move_out " + comp;
            return move_out(a, comp);
        default:
            if (parent_path(comp).empty() || c->ports.empty()) return std::nullopt;
            desc = "delegate " + port_ref(comp, pick(c->ports).name);
            return delegate_port(a, desc.substr(9));
    }
}

}  // namespace archevol::testing
