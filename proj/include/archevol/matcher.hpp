#pragma once

#include <map>
#include <vector>

#include "archevol/graph.hpp"

namespace archevol {

/// An injective, type- and attribute-respecting embedding of a pattern graph
/// into a host graph. Keys are pattern ids, values host ids.
struct Embedding {
    std::map<NodeId, NodeId> nodes;
    std::map<EdgeId, EdgeId> edges;
    Bindings bindings;

    auto operator<=>(const Embedding& o) const {
        if (auto c = nodes <=> o.nodes; c != 0) return c;
        return edges <=> o.edges;
    }
    bool operator==(const Embedding& o) const { return nodes == o.nodes && edges == o.edges; }
};

/// True when a host node may be the image of a pattern node: the host type is
/// a subtype of the pattern type (or equal, for exact pattern nodes).
bool node_type_matches(const TypeGraph& tg, const Node& pattern, const Node& host);

/// Unifies pattern attribute terms with host values, extending `bindings`.
/// Host variables (symbolic overlap graphs) are compatible with any constant.
bool attrs_match(const Attrs& pattern, const Attrs& host, Bindings& bindings);

/// Enumerates embeddings of `pattern` into `host` that extend `seed`. Seed
/// entries for ids absent from the pattern are ignored. Results come in
/// canonical order: lexicographic on host node ids taken in pattern-id order,
/// then on host edge ids. A nonzero `limit` stops after that many results
/// (the order is then that of discovery).
std::vector<Embedding> find_embeddings(const Graph& pattern, const Graph& host,
                                       const TypeGraph& tg, const Embedding& seed = {},
                                       std::size_t limit = 0);

bool has_embedding(const Graph& pattern, const Graph& host, const TypeGraph& tg,
                   const Embedding& seed = {});

}  // namespace archevol
