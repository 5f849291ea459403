#pragma once

#include <span>

#include "archevol/graph.hpp"

namespace archevol {

struct TypingOptions {
    bool node_counts = true;
    bool edge_multiplicities = true;
    /// Only upper bounds of multiplicities and counts; used for partial
    /// (pattern or overlap) graphs that may lack context.
    bool upper_bounds_only = false;
};

/// Checks a graph against its type graph. Unknown type references throw
/// UnknownTypeError; everything else is reported as a violation.
ConformanceReport check_typing(const Graph& g, const TypeGraph& tg, TypingOptions options = {});

ConformanceReport check_constraint(const Graph& g, const GraphConstraint& c, const TypeGraph& tg);
ConformanceReport check_constraints(const Graph& g, std::span<const GraphConstraint> cs,
                                    const TypeGraph& tg);

/// Returns a copy of `g` with one edge per distinct (source, target) pair
/// connected by each derived edge type's path. Path nodes are pairwise
/// distinct except that the two ends may coincide.
Graph materialize_derived(const Graph& g, const TypeGraph& tg);

/// Removes every edge whose type is derived.
Graph strip_derived(const Graph& g, const TypeGraph& tg);

/// Builds the pattern graph traced by a derived edge type's path. Node ids
/// 1..k+1 follow the path; the first node is the source, the last the target.
Graph path_pattern(const EdgeType& derived);

}  // namespace archevol
