#pragma once
// Shared helpers for the test suites: fixture lookup, independent
// brute-force oracles and random generators.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "archevol/architecture.hpp"
#include "archevol/cosa.hpp"
#include "archevol/evolution.hpp"
#include "archevol/graph.hpp"
#include "archevol/rewrite.hpp"

namespace archevol::testing {

std::filesystem::path fixture(const std::string& name);
Architecture load_fixture(const std::string& name);

// ---------------------------------------------------------------------------
// Brute-force embedding enumeration. Tries every injective assignment of
// pattern nodes to host nodes and of pattern edges to host edges and keeps
// the structure-, type- and attribute-preserving ones. Ids are raw values so
// results compare directly with the engine's Embedding maps.

struct RawEmbedding {
    std::map<std::uint32_t, std::uint32_t> nodes;
    std::map<std::uint32_t, std::uint32_t> edges;
    Bindings bindings;
    bool operator<(const RawEmbedding& o) const {
        return std::tie(nodes, edges) < std::tie(o.nodes, o.edges);
    }
    bool operator==(const RawEmbedding& o) const { return nodes == o.nodes && edges == o.edges; }
};

std::vector<RawEmbedding> brute_embeddings(const Graph& pattern, const Graph& host, const TypeGraph& tg,
                                           const RawEmbedding& fixed = {});

/// LHS embeddings that no NAC extends.
std::set<RawEmbedding> brute_matches(const Rule& rule, const Graph& host, const TypeGraph& tg,
                                     const Bindings& bindings = {});

RawEmbedding raw(const Embedding& e);

/// Sorted (nodes, edges) witness sets of every forbidden-pattern occurrence.
using WitnessKey = std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>;
std::multiset<WitnessKey> brute_forbidden(const Graph& g, const GraphConstraint& c, const TypeGraph& tg);
std::multiset<WitnessKey> witness_keys(const ConformanceReport& r);

// ---------------------------------------------------------------------------
// Dependency oracle: builds the port dependency relation as a boolean
// matrix and closes it with Floyd–Warshall.

DependencyPairs closure_pairs(const Architecture& a);

// ---------------------------------------------------------------------------
// Random generators.

/// Typed graph over the architecture type graph, built from component,
/// configuration, port, binding and connector motifs plus random extra
/// edges, with at most `max_nodes` nodes.
Graph random_graph(std::mt19937& rng, std::size_t max_nodes = 12);

/// Valid architecture with at most 6 components (some nested), at most 4
/// ports per component, connectors between siblings, delegation bindings
/// and an acyclic uses relation inside each component.
Architecture random_architecture(std::mt19937& rng);

/// One random evolution operation (split, move port, merge, move in, move
/// out or delegate) on a random element of `a`; nullopt when the drawn
/// operation has no suitable element. Rejected operations throw
/// OperationError. `what` receives a description of the operation.
std::optional<Evolved> random_operation(const Architecture& a, std::mt19937& rng, std::string* what = nullptr);

}  // namespace archevol::testing
