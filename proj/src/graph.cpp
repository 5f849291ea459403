#include "archevol/graph.hpp"

#include <algorithm>

#include "archevol/error.hpp"

namespace archevol {

std::string to_string(const Value& v) {
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    return "?" + std::get<Var>(v).name;
}

bool is_variable(const Value& v) { return std::holds_alternative<Var>(v); }

// ---------------------------------------------------------------------------

void TypeGraph::add_node_type(NodeType t) {
    if (t.name.empty()) throw DefinitionError("node type without a name");
    if (node_index_.count(t.name)) throw DefinitionError("duplicate node type '" + t.name + "'");
    if (t.count.max && t.count.min > *t.count.max)
        throw DefinitionError("node type '" + t.name + "': count min exceeds max");
    if (t.supertype) {
        if (!node_index_.count(*t.supertype))
            throw DefinitionError("node type '" + t.name + "': unknown supertype '" +
                                  *t.supertype + "'");
    }
    node_index_.emplace(t.name, nodes_.size());
    nodes_.push_back(std::move(t));
}

void TypeGraph::add_edge_type(EdgeType t) {
    if (edge_index_.count(t.name)) throw DefinitionError("duplicate edge type '" + t.name + "'");
    if (!node_index_.count(t.source) || !node_index_.count(t.target))
        throw DefinitionError("edge type '" + t.name + "' references an unknown node type");
    for (const Bounds* b : {&t.source_mult, &t.target_mult}) {
        if (b->max && b->min > *b->max)
            throw DefinitionError("edge type '" + t.name + "': multiplicity min exceeds max");
    }
    if (t.derived == t.path.empty())
        throw DefinitionError("edge type '" + t.name +
                              "': derived edges need a path, plain edges must not have one");
    for (const auto& step : t.path) {
        if (!node_index_.count(step.node_type))
            throw DefinitionError("edge type '" + t.name + "': path node type '" + step.node_type +
                                  "' unknown");
        if (!edge_index_.count(step.edge_type))
            throw DefinitionError("edge type '" + t.name + "': path edge type '" + step.edge_type +
                                  "' unknown");
    }
    edge_index_.emplace(t.name, edges_.size());
    edges_.push_back(std::move(t));
}

void TypeGraph::set_count(const std::string& name, Bounds count) {
    auto it = node_index_.find(name);
    if (it == node_index_.end()) throw UnknownTypeError("unknown node type '" + name + "'");
    if (count.max && count.min > *count.max)
        throw DefinitionError("node type '" + name + "': count min exceeds max");
    nodes_[it->second].count = count;
}

bool TypeGraph::has_node_type(const std::string& name) const { return node_index_.count(name) != 0; }
bool TypeGraph::has_edge_type(const std::string& name) const { return edge_index_.count(name) != 0; }

const NodeType& TypeGraph::node_type(const std::string& name) const {
    auto it = node_index_.find(name);
    if (it == node_index_.end()) throw UnknownTypeError("unknown node type '" + name + "'");
    return nodes_[it->second];
}

const EdgeType& TypeGraph::edge_type(const std::string& name) const {
    auto it = edge_index_.find(name);
    if (it == edge_index_.end()) throw UnknownTypeError("unknown edge type '" + name + "'");
    return edges_[it->second];
}

bool TypeGraph::is_subtype(const std::string& sub, const std::string& super) const {
    // Supertypes must exist when a type is added, so chains are acyclic.
    const NodeType* t = &node_type(sub);
    while (true) {
        if (t->name == super) return true;
        if (!t->supertype) return false;
        t = &node_type(*t->supertype);
    }
}

std::vector<AttributeDecl> TypeGraph::attributes_of(const std::string& name) const {
    std::vector<AttributeDecl> out;
    const NodeType* t = &node_type(name);
    while (true) {
        for (const auto& a : t->attributes) {
            bool shadowed = std::any_of(out.begin(), out.end(),
                                        [&](const AttributeDecl& d) { return d.name == a.name; });
            if (!shadowed) out.push_back(a);
        }
        if (!t->supertype) break;
        t = &node_type(*t->supertype);
    }
    return out;
}

std::vector<std::string> TypeGraph::concrete_subtypes(const std::string& name) const {
    std::vector<std::string> out;
    for (const auto& t : nodes_)
        if (!t.abstract && is_subtype(t.name, name)) out.push_back(t.name);
    return out;
}

// ---------------------------------------------------------------------------

NodeId Graph::add_node(std::string type, Attrs attrs, bool exact) {
    NodeId id = next_node_id();
    nodes_.emplace(id, Node{id, std::move(type), std::move(attrs), exact});
    return id;
}

void Graph::add_node(Node node) {
    if (nodes_.count(node.id))
        throw DefinitionError("duplicate node id " + std::to_string(node.id.value));
    NodeId id = node.id;
    nodes_.emplace(id, std::move(node));
}

EdgeId Graph::add_edge(std::string type, NodeId src, NodeId tgt, Attrs attrs) {
    EdgeId id = next_edge_id();
    add_edge(Edge{id, std::move(type), src, tgt, std::move(attrs)});
    return id;
}

void Graph::add_edge(Edge edge) {
    if (edges_.count(edge.id))
        throw DefinitionError("duplicate edge id " + std::to_string(edge.id.value));
    if (!nodes_.count(edge.src) || !nodes_.count(edge.tgt))
        throw DefinitionError("edge " + std::to_string(edge.id.value) + " has a missing endpoint");
    EdgeId id = edge.id;
    edges_.emplace(id, std::move(edge));
}

void Graph::remove_node(NodeId id) {
    for (const auto& [eid, e] : edges_) {
        if (e.src == id || e.tgt == id)
            throw DefinitionError("cannot remove node " + std::to_string(id.value) +
                                  " with incident edges");
    }
    nodes_.erase(id);
}

void Graph::remove_edge(EdgeId id) { edges_.erase(id); }

const Node& Graph::node(NodeId id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw DefinitionError("no node " + std::to_string(id.value));
    return it->second;
}

Node& Graph::node(NodeId id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw DefinitionError("no node " + std::to_string(id.value));
    return it->second;
}

const Edge& Graph::edge(EdgeId id) const {
    auto it = edges_.find(id);
    if (it == edges_.end()) throw DefinitionError("no edge " + std::to_string(id.value));
    return it->second;
}

std::vector<EdgeId> Graph::incident_edges(NodeId id) const {
    std::vector<EdgeId> out;
    for (const auto& [eid, e] : edges_)
        if (e.src == id || e.tgt == id) out.push_back(eid);
    return out;
}

NodeId Graph::next_node_id() const {
    return nodes_.empty() ? NodeId{1} : NodeId{nodes_.rbegin()->first.value + 1};
}

EdgeId Graph::next_edge_id() const {
    return edges_.empty() ? EdgeId{1} : EdgeId{edges_.rbegin()->first.value + 1};
}

namespace {

struct Fnv {
    std::uint64_t h = 1469598103934665603ull;
    void byte(unsigned char c) {
        h ^= c;
        h *= 1099511628211ull;
    }
    void str(const std::string& s) {
        for (unsigned char c : s) byte(c);
        byte(0xff);
    }
    void num(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) byte(static_cast<unsigned char>(v >> (8 * i)));
    }
    void attrs(const Attrs& a) {
        num(a.size());
        for (const auto& [k, v] : a) {
            str(k);
            num(v.index());
            str(to_string(v));
        }
    }
};

}  // namespace

std::uint64_t Graph::digest() const {
    Fnv f;
    f.num(nodes_.size());
    for (const auto& [id, n] : nodes_) {
        f.num(id.value);
        f.str(n.type);
        f.byte(n.exact ? 1 : 0);
        f.attrs(n.attrs);
    }
    f.num(edges_.size());
    for (const auto& [id, e] : edges_) {
        f.num(id.value);
        f.str(e.type);
        f.num(e.src.value);
        f.num(e.tgt.value);
        f.attrs(e.attrs);
    }
    return f.h;
}

std::string name_of(const Node& node) {
    auto it = node.attrs.find("n");
    if (it == node.attrs.end()) return {};
    return to_string(it->second);
}

// ---------------------------------------------------------------------------

void ConformanceReport::merge(const ConformanceReport& other) {
    violations.insert(violations.end(), other.violations.begin(), other.violations.end());
}

std::size_t ConformanceReport::count(const std::string& code) const {
    return static_cast<std::size_t>(std::count_if(
        violations.begin(), violations.end(), [&](const Violation& v) { return v.code == code; }));
}

}  // namespace archevol
