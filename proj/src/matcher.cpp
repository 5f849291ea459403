#include "archevol/matcher.hpp"

#include <algorithm>
#include <set>

namespace archevol {

bool node_type_matches(const TypeGraph& tg, const Node& pattern, const Node& host) {
    if (pattern.exact) return host.type == pattern.type;
    return tg.is_subtype(host.type, pattern.type);
}

bool attrs_match(const Attrs& pattern, const Attrs& host, Bindings& bindings) {
    for (const auto& [key, term] : pattern) {
        auto it = host.find(key);
        if (it == host.end()) return false;
        const Value& actual = it->second;
        if (const auto* var = std::get_if<Var>(&term)) {
            auto bound = bindings.find(var->name);
            if (bound == bindings.end()) {
                bindings.emplace(var->name, actual);
            } else if (!is_variable(bound->second) && !is_variable(actual) &&
                       bound->second != actual) {
                return false;
            }
        } else if (!is_variable(actual) && actual != term) {
            return false;
        }
    }
    return true;
}

namespace {

class Search {
public:
    Search(const Graph& pattern, const Graph& host, const TypeGraph& tg, std::size_t limit)
        : p_(pattern), h_(host), tg_(tg), limit_(limit) {}

    std::vector<Embedding> run(const Embedding& seed) {
        Embedding start;
        start.bindings = seed.bindings;
        for (const auto& [pid, hid] : seed.nodes)
            if (p_.has_node(pid)) start.nodes[pid] = hid;
        for (const auto& [pe, he] : seed.edges) {
            if (!p_.has_edge(pe)) continue;
            if (!h_.has_edge(he)) return {};
            const Edge& pedge = p_.edge(pe);
            const Edge& hedge = h_.edge(he);
            if (pedge.type != hedge.type) return {};
            if (!force(start, pedge.src, hedge.src) || !force(start, pedge.tgt, hedge.tgt)) return {};
            start.edges[pe] = he;
        }
        // Validate the seeded node images.
        std::set<NodeId> used;
        for (const auto& [pid, hid] : start.nodes) {
            if (!h_.has_node(hid) || !used.insert(hid).second) return {};
            const Node& pn = p_.node(pid);
            const Node& hn = h_.node(hid);
            if (!node_type_matches(tg_, pn, hn) || !attrs_match(pn.attrs, hn.attrs, start.bindings))
                return {};
        }
        std::set<EdgeId> used_edges;
        for (const auto& [pe, he] : start.edges)
            if (!used_edges.insert(he).second) return {};
        for (const auto& [pid, hid] : start.nodes)
            if (!edges_feasible(start, pid)) return {};

        plan(start);
        used_nodes_ = std::move(used);
        used_edges_ = std::move(used_edges);
        match_nodes(start, 0);
        if (limit_ == 0) std::sort(results_.begin(), results_.end());
        return std::move(results_);
    }

private:
    bool force(Embedding& e, NodeId pid, NodeId hid) {
        auto [it, inserted] = e.nodes.emplace(pid, hid);
        return inserted || it->second == hid;
    }

    bool done() const { return limit_ != 0 && results_.size() >= limit_; }

    // Orders the unassigned pattern nodes so each one (where possible) is
    // adjacent to an earlier one; candidates then come from host adjacency.
    void plan(const Embedding& start) {
        std::set<NodeId> placed;
        for (const auto& [pid, hid] : start.nodes) placed.insert(pid);
        std::vector<NodeId> rest;
        for (const auto& [pid, n] : p_.nodes())
            if (!placed.count(pid)) rest.push_back(pid);
        while (!rest.empty()) {
            std::size_t best = 0;
            int best_score = -1;
            for (std::size_t i = 0; i < rest.size(); ++i) {
                int score = 0;
                for (const auto& [eid, e] : p_.edges()) {
                    if ((e.src == rest[i] && placed.count(e.tgt)) ||
                        (e.tgt == rest[i] && placed.count(e.src)))
                        ++score;
                }
                if (score > best_score) {
                    best_score = score;
                    best = i;
                }
            }
            order_.push_back(rest[best]);
            placed.insert(rest[best]);
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(best));
        }
        for (const auto& [eid, e] : p_.edges())
            if (!start.edges.count(eid)) pending_edges_.push_back(eid);
    }

    std::vector<NodeId> candidates(const Embedding& cur, NodeId pid) const {
        for (const auto& [eid, e] : p_.edges()) {
            NodeId other;
            bool outgoing;
            if (e.src == pid && e.tgt != pid && cur.nodes.count(e.tgt)) {
                other = e.tgt;
                outgoing = true;
            } else if (e.tgt == pid && e.src != pid && cur.nodes.count(e.src)) {
                other = e.src;
                outgoing = false;
            } else {
                continue;
            }
            NodeId anchor = cur.nodes.at(other);
            std::set<NodeId> out;
            for (const auto& [hid, he] : h_.edges()) {
                if (he.type != e.type) continue;
                if (outgoing && he.tgt == anchor) out.insert(he.src);
                if (!outgoing && he.src == anchor) out.insert(he.tgt);
            }
            return {out.begin(), out.end()};
        }
        std::vector<NodeId> all;
        for (const auto& [hid, n] : h_.nodes()) all.push_back(hid);
        return all;
    }

    // Every pattern edge between `pid` and assigned nodes needs at least
    // one host edge of its type between the images.
    bool edges_feasible(const Embedding& cur, NodeId pid) const {
        for (const auto& [eid, e] : p_.edges()) {
            if (e.src != pid && e.tgt != pid) continue;
            auto s = cur.nodes.find(e.src);
            auto t = cur.nodes.find(e.tgt);
            if (s == cur.nodes.end() || t == cur.nodes.end()) continue;
            bool found = false;
            for (const auto& [hid, he] : h_.edges()) {
                if (he.type == e.type && he.src == s->second && he.tgt == t->second) {
                    found = true;
                    break;
                }
            }
            if (!found) return false;
        }
        return true;
    }

    void match_nodes(Embedding& cur, std::size_t depth) {
        if (done()) return;
        if (depth == order_.size()) {
            match_edges(cur, 0);
            return;
        }
        NodeId pid = order_[depth];
        const Node& pn = p_.node(pid);
        for (NodeId hid : candidates(cur, pid)) {
            if (used_nodes_.count(hid)) continue;
            const Node& hn = h_.node(hid);
            if (!node_type_matches(tg_, pn, hn)) continue;
            Bindings saved = cur.bindings;
            if (!attrs_match(pn.attrs, hn.attrs, cur.bindings)) {
                cur.bindings = std::move(saved);
                continue;
            }
            cur.nodes[pid] = hid;
            if (edges_feasible(cur, pid)) {
                used_nodes_.insert(hid);
                match_nodes(cur, depth + 1);
                used_nodes_.erase(hid);
            }
            cur.nodes.erase(pid);
            cur.bindings = std::move(saved);
            if (done()) return;
        }
    }

    void match_edges(Embedding& cur, std::size_t k) {
        if (done()) return;
        if (k == pending_edges_.size()) {
            results_.push_back(cur);
            return;
        }
        EdgeId pe = pending_edges_[k];
        const Edge& e = p_.edge(pe);
        NodeId s = cur.nodes.at(e.src);
        NodeId t = cur.nodes.at(e.tgt);
        for (const auto& [hid, he] : h_.edges()) {
            if (he.type != e.type || he.src != s || he.tgt != t || used_edges_.count(hid)) continue;
            Bindings saved = cur.bindings;
            if (!attrs_match(e.attrs, he.attrs, cur.bindings)) {
                cur.bindings = std::move(saved);
                continue;
            }
            used_edges_.insert(hid);
            cur.edges[pe] = hid;
            match_edges(cur, k + 1);
            cur.edges.erase(pe);
            used_edges_.erase(hid);
            cur.bindings = std::move(saved);
            if (done()) return;
        }
    }

    const Graph& p_;
    const Graph& h_;
    const TypeGraph& tg_;
    std::size_t limit_;
    std::vector<NodeId> order_;
    std::vector<EdgeId> pending_edges_;
    std::set<NodeId> used_nodes_;
    std::set<EdgeId> used_edges_;
    std::vector<Embedding> results_;
};

}  // namespace

std::vector<Embedding> find_embeddings(const Graph& pattern, const Graph& host,
                                       const TypeGraph& tg, const Embedding& seed,
                                       std::size_t limit) {
    return Search(pattern, host, tg, limit).run(seed);
}

bool has_embedding(const Graph& pattern, const Graph& host, const TypeGraph& tg,
                   const Embedding& seed) {
    return !find_embeddings(pattern, host, tg, seed, 1).empty();
}

}  // namespace archevol
