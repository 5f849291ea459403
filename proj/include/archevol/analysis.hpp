#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "archevol/rewrite.hpp"

namespace archevol {

enum class ConflictKind { DeleteUse, ProduceForbid, ProduceUse, DeleteForbid };

std::string to_string(ConflictKind k);
/// Parallel conflicts are delete-use and produce-forbid; the other two
/// kinds are sequential dependencies.
bool is_parallel(ConflictKind k);

/// One critical pair or dependency. `witness` is the overlap graph G (for
/// parallel conflicts, the graph both rules match) or H (for sequential
/// dependencies, the graph r1 produces and r2 matches). `m1` and `m2` embed
/// the respective left-hand sides (r1's right-hand side for dependencies);
/// pattern variables appear in the witness as symbolic attribute values.
struct Conflict {
    ConflictKind kind = ConflictKind::DeleteUse;
    Graph witness;
    Embedding m1;
    Embedding m2;
    std::string detail;
};

struct CpaOptions {
    /// Largest combined node count of the two glued patterns.
    std::size_t overlap_ceiling = 14;
};

/// Parallel conflicts of applying r1 and r2 to the same graph: r1 deletes
/// something r2's match uses (delete-use) or creates something one of r2's
/// NACs forbids (produce-forbid). Empty iff the pair is parallel independent.
/// For r1 == r2 the trivial overlap of a match with itself is excluded,
/// except for rules with an empty left-hand side.
std::vector<Conflict> critical_pairs(const Rule& r1, const Rule& r2, const TypeGraph& tg,
                                     const CpaOptions& options = {});

/// Sequential dependencies of r2 on r1: r1 creates something r2's match
/// uses (produce-use) or deletes something one of r2's NACs forbids
/// (delete-forbid).
std::vector<Conflict> sequential_dependencies(const Rule& r1, const Rule& r2, const TypeGraph& tg,
                                              const CpaOptions& options = {});

struct CpaMatrix {
    std::vector<std::string> rules;
    /// (r1, r2) -> findings; absent or empty means independent.
    std::map<std::pair<std::string, std::string>, std::vector<Conflict>> cells;

    const std::vector<Conflict>& cell(const std::string& r1, const std::string& r2) const;
    /// Distinct kinds present in a cell, in enum order.
    std::vector<ConflictKind> kinds(const std::string& r1, const std::string& r2) const;
};

/// Every ordered pair, self-pairs included, with both analyses combined.
CpaMatrix cpa_matrix(std::span<const Rule> rules, const TypeGraph& tg, const CpaOptions& options = {});

/// Rows/columns labelled by rule; a cell lists its kinds or "-".
std::string format_table(const CpaMatrix& m);
/// Tab-separated "r1 r2 solid|dotted kind" lines, one per nonempty cell
/// and kind (solid: parallel conflict, dotted: sequential dependency).
std::string format_adjacency(const CpaMatrix& m);

// ---------------------------------------------------------------------------

enum class FindingKind { NoEnabler, ConsumedBeforeUse };
std::string to_string(FindingKind k);

struct StaticFinding {
    std::size_t position = 0;
    FindingKind kind = FindingKind::NoEnabler;
    std::string detail;
};

struct DynamicResult {
    bool applicable = false;
    std::optional<std::size_t> failing_position;
    std::string message;
    ApplicationTrace trace;
    Graph result;
};

struct SequenceReport {
    std::string sequence;
    std::vector<StaticFinding> static_findings;
    std::optional<DynamicResult> dynamic;
};

/// The static pass inspects every single (non-repeated) item: each node type
/// its left-hand side needs must be a supertype of a type that is assumed
/// (`assumed_types`), or created by an earlier single item and not deleted
/// in between. Repeated items may apply zero times and neither enable nor
/// get checked. The dynamic pass runs apply_sequence when a host is given.
SequenceReport analyze_sequence(const RuleSequence& seq, const TypeGraph& tg,
                                std::span<const std::string> assumed_types,
                                const Graph* host = nullptr, const SequenceOptions& options = {});

}  // namespace archevol
