#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "archevol/graph.hpp"
#include "archevol/matcher.hpp"

namespace archevol {

struct Nac {
    std::string name;
    /// Extends the rule's LHS; shares ids with it.
    Graph pattern;
};

struct RuleParam {
    std::string name;
    AttrKind kind = AttrKind::String;
};

/// A graph transformation rule. Elements whose ids occur in both `lhs` and
/// `rhs` are preserved; LHS-only elements are deleted, RHS-only created.
struct Rule {
    std::string name;
    Graph lhs;
    Graph rhs;
    std::vector<Nac> nacs;
    std::vector<RuleParam> params;

    std::vector<NodeId> preserved_nodes() const;
    std::vector<EdgeId> preserved_edges() const;
    std::vector<NodeId> deleted_nodes() const;
    std::vector<EdgeId> deleted_edges() const;
    std::vector<NodeId> created_nodes() const;
    std::vector<EdgeId> created_edges() const;
    bool is_deleted(NodeId id) const { return lhs.has_node(id) && !rhs.has_node(id); }
    bool is_deleted(EdgeId id) const { return lhs.has_edge(id) && !rhs.has_edge(id); }
    bool is_created(NodeId id) const { return rhs.has_node(id) && !lhs.has_node(id); }
    bool is_created(EdgeId id) const { return rhs.has_edge(id) && !lhs.has_edge(id); }

    /// Variables used by created elements that no LHS attribute binds.
    std::vector<std::string> free_variables() const;

    /// Throws DefinitionError (or UnknownTypeError) when the rule is malformed.
    void validate(const TypeGraph& tg) const;
};

struct Match {
    std::shared_ptr<const Rule> rule;
    std::shared_ptr<const Graph> host;
    Embedding embedding;
    std::uint64_t host_digest = 0;
};

/// True when no NAC of `rule` extends `m` into `host`.
bool nacs_hold(const Rule& rule, const Graph& host, const Embedding& m, const TypeGraph& tg);

/// Host edges that would dangle if `rule` were applied at `m`.
std::vector<EdgeId> dangling_edges(const Rule& rule, const Graph& host, const Embedding& m);

/// All NAC-satisfying matches in canonical order. Throws
/// UnboundParameterError when a free rule variable has no binding.
std::vector<Match> find_matches(const Rule& rule, const Graph& host, const TypeGraph& tg,
                                const Bindings& bindings = {});

/// Applies `rule` at `m` without re-checking NACs. Preserved elements keep
/// their ids; created ones get fresh ids in RHS id order. Throws GluingError.
Graph apply_at(const Rule& rule, const Graph& host, const Embedding& m);

Graph apply(const Match& m);
/// Applies `m` to `host`, which must be the graph the match was found on.
Graph apply(const Match& m, const Graph& host);

enum class Repetition { Once, Star };

struct RuleSequence {
    struct Item {
        Rule rule;
        Repetition repetition = Repetition::Once;
    };
    std::vector<Item> items;

    /// "A; (B)*; C" notation.
    std::string to_string() const;
};

/// Parses "A; (B)*; C" against a rule set; throws DefinitionError.
RuleSequence parse_sequence(const std::string& text, std::span<const Rule> rules);

struct ApplicationTrace {
    struct Step {
        std::size_t position = 0;
        std::string rule;
        std::string match;
        std::uint64_t pre_digest = 0;
        std::uint64_t post_digest = 0;
    };
    std::vector<Step> steps;
};

/// Picks one of the offered matches, or nullopt to decline (which ends a
/// starred item and fails a single one).
using Chooser = std::function<std::optional<std::size_t>(const Rule&, std::span<const Match>)>;

/// Default rewrite ceiling: ARCHEVOL_MAX_REWRITES when set, else 10000.
std::size_t default_max_rewrites();

struct SequenceOptions {
    Chooser chooser;
    Bindings bindings;
    std::size_t max_rewrites = default_max_rewrites();
};

struct SequenceResult {
    Graph graph;
    ApplicationTrace trace;
};

/// Throws SequenceError naming the failing position and rule.
SequenceResult apply_sequence(const RuleSequence& seq, const Graph& host, const TypeGraph& tg,
                              const SequenceOptions& options = {});

/// Human-readable "patternId=hostName" listing of a match.
std::string summarize(const Rule& rule, const Graph& host, const Embedding& m);

}  // namespace archevol
