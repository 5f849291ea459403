#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace archevol {

struct NodeId {
    std::uint32_t value = 0;
    auto operator<=>(const NodeId&) const = default;
};

struct EdgeId {
    std::uint32_t value = 0;
    auto operator<=>(const EdgeId&) const = default;
};

enum class AttrKind { String, Integer };

/// Attribute variable; only meaningful inside pattern graphs.
struct Var {
    std::string name;
    auto operator<=>(const Var&) const = default;
};

using Value = std::variant<std::string, std::int64_t, Var>;
using Attrs = std::map<std::string, Value>;
using Bindings = std::map<std::string, Value>;

std::string to_string(const Value& v);
bool is_variable(const Value& v);

// ---------------------------------------------------------------------------
// Type graph

struct AttributeDecl {
    std::string name;
    AttrKind kind = AttrKind::String;
};

/// Multiplicity interval; an empty `max` means unbounded.
struct Bounds {
    std::size_t min = 0;
    std::optional<std::size_t> max;

    bool contains(std::size_t n) const { return n >= min && (!max || n <= *max); }
    static Bounds exactly(std::size_t n) { return {n, n}; }
    static Bounds at_most(std::size_t n) { return {0, n}; }
    static Bounds any() { return {0, std::nullopt}; }
};

struct NodeType {
    std::string name;
    bool abstract = false;
    std::optional<std::string> supertype;
    std::vector<AttributeDecl> attributes;
    Bounds count = Bounds::any();
};

/// One hop of a derived-edge path: traverse `edge_type` (forward or against
/// its direction) and land on a node of `node_type`.
struct PathStep {
    std::string edge_type;
    bool forward = true;
    std::string node_type;
};

struct EdgeType {
    std::string name;
    std::string source;
    std::string target;
    /// Number of sources per target node.
    Bounds source_mult = Bounds::any();
    /// Number of targets per source node.
    Bounds target_mult = Bounds::any();
    bool derived = false;
    std::vector<PathStep> path;
};

class TypeGraph {
public:
    void add_node_type(NodeType t);
    void add_edge_type(EdgeType t);
    /// Replaces the count bounds of an existing node type.
    void set_count(const std::string& node_type, Bounds count);

    bool has_node_type(const std::string& name) const;
    bool has_edge_type(const std::string& name) const;
    /// Throws UnknownTypeError when absent.
    const NodeType& node_type(const std::string& name) const;
    const EdgeType& edge_type(const std::string& name) const;

    const std::vector<NodeType>& node_types() const { return nodes_; }
    const std::vector<EdgeType>& edge_types() const { return edges_; }

    /// Reflexive-transitive subtype test.
    bool is_subtype(const std::string& sub, const std::string& super) const;
    /// Attributes declared on the type and all its ancestors.
    std::vector<AttributeDecl> attributes_of(const std::string& name) const;
    /// Non-abstract types that are subtypes of `name` (including itself).
    std::vector<std::string> concrete_subtypes(const std::string& name) const;

private:
    std::vector<NodeType> nodes_;
    std::vector<EdgeType> edges_;
    std::unordered_map<std::string, std::size_t> node_index_;
    std::unordered_map<std::string, std::size_t> edge_index_;
};

// ---------------------------------------------------------------------------
// Instance and pattern graphs

struct Node {
    NodeId id;
    std::string type;
    Attrs attrs;
    /// Pattern-only: match nodes of exactly this type, not its subtypes.
    bool exact = false;

    bool operator==(const Node&) const = default;
};

struct Edge {
    EdgeId id;
    std::string type;
    NodeId src;
    NodeId tgt;
    Attrs attrs;

    bool operator==(const Edge&) const = default;
};

/// A typed attributed graph. Used both for host graphs and for the pattern
/// graphs of rules and constraints. Node and edge ids are stable across
/// copies; fresh ids are allocated above the current maximum.
class Graph {
public:
    NodeId add_node(std::string type, Attrs attrs = {}, bool exact = false);
    void add_node(Node node);
    EdgeId add_edge(std::string type, NodeId src, NodeId tgt, Attrs attrs = {});
    void add_edge(Edge edge);

    void remove_node(NodeId id);
    void remove_edge(EdgeId id);

    bool has_node(NodeId id) const { return nodes_.count(id) != 0; }
    bool has_edge(EdgeId id) const { return edges_.count(id) != 0; }
    const Node& node(NodeId id) const;
    const Edge& edge(EdgeId id) const;
    Node& node(NodeId id);

    const std::map<NodeId, Node>& nodes() const { return nodes_; }
    const std::map<EdgeId, Edge>& edges() const { return edges_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    bool empty() const { return nodes_.empty() && edges_.empty(); }

    std::vector<EdgeId> incident_edges(NodeId id) const;
    NodeId next_node_id() const;
    EdgeId next_edge_id() const;

    /// Stable 64-bit fingerprint of the full graph content.
    std::uint64_t digest() const;

    bool operator==(const Graph&) const = default;

private:
    std::map<NodeId, Node> nodes_;
    std::map<EdgeId, Edge> edges_;
};

/// Name attribute helper; the COSA vocabulary stores names under "n".
std::string name_of(const Node& node);

// ---------------------------------------------------------------------------
// Constraints and reports

enum class ConstraintKind { Forbidden, Conditional };

/// A graph constraint. Forbidden constraints are violated by every injective
/// occurrence of any of `patterns`. Conditional constraints are violated by
/// every occurrence of `premise` that extends to none of `conclusions`;
/// conclusions share ids with the premise for the elements they extend.
struct GraphConstraint {
    std::string name;
    ConstraintKind kind = ConstraintKind::Forbidden;
    std::vector<Graph> patterns;
    Graph premise;
    std::vector<Graph> conclusions;
    std::string message;
};

struct Witness {
    std::vector<NodeId> nodes;
    std::vector<EdgeId> edges;
    bool operator==(const Witness&) const = default;
};

struct Violation {
    std::string code;
    std::string message;
    Witness witness;
    bool operator==(const Violation&) const = default;
};

struct ConformanceReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    void merge(const ConformanceReport& other);
    std::size_t count(const std::string& code) const;
};

}  // namespace archevol

template <>
struct std::hash<archevol::NodeId> {
    std::size_t operator()(const archevol::NodeId& id) const noexcept { return id.value; }
};

namespace archevol {

/// Terse construction of pattern graphs with explicit ids.
class PatternBuilder {
public:
    PatternBuilder& node(std::uint32_t id, std::string type, Attrs attrs = {}, bool exact = false) {
        g_.add_node(Node{NodeId{id}, std::move(type), std::move(attrs), exact});
        return *this;
    }
    PatternBuilder& exact(std::uint32_t id, std::string type, Attrs attrs = {}) {
        return node(id, std::move(type), std::move(attrs), true);
    }
    PatternBuilder& edge(std::uint32_t id, std::string type, std::uint32_t src, std::uint32_t tgt) {
        g_.add_edge(Edge{EdgeId{id}, std::move(type), NodeId{src}, NodeId{tgt}, {}});
        return *this;
    }
    Graph build() const { return g_; }
    operator Graph() const { return g_; }

private:
    Graph g_;
};

}  // namespace archevol
