#include "archevol/formats.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "archevol/error.hpp"

namespace archevol {

namespace {

std::string describe(const Json& j) { return j.dump(); }

void check_keys(const Json& j, std::initializer_list<const char*> allowed, std::string_view where) {
    if (!j.is_object()) throw FormatError(std::string(where) + ": expected an object, got " + describe(j));
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) throw FormatError(std::string(where) + ": unknown key '" + key + "'");
    }
}

const Json& field(const Json& j, const char* key, std::string_view where) {
    auto it = j.find(key);
    if (it == j.end()) throw FormatError(std::string(where) + ": missing key '" + key + "'");
    return *it;
}

std::string string_field(const Json& j, const char* key, std::string_view where) {
    const Json& v = field(j, key, where);
    if (!v.is_string()) throw FormatError(std::string(where) + ": '" + key + "' must be a string");
    return v.get<std::string>();
}

const Json& array_field(const Json& j, const char* key, std::string_view where) {
    static const Json empty = Json::array();
    auto it = j.find(key);
    if (it == j.end()) return empty;
    if (!it->is_array()) throw FormatError(std::string(where) + ": '" + key + "' must be an array");
    return *it;
}

std::uint32_t id_field(const Json& j, const char* key, std::string_view where) {
    const Json& v = field(j, key, where);
    if (!v.is_number_unsigned()) throw FormatError(std::string(where) + ": '" + key + "' must be a non-negative integer");
    return v.get<std::uint32_t>();
}

Json component_to_json(const Component& c) {
    Json ports = Json::array();
    for (const auto& p : c.ports) ports.push_back({{"name", p.name}, {"direction", to_string(p.direction)}});
    Json out = {{"name", c.name}, {"kind", to_string(c.kind)}, {"ports", ports}};
    if (c.configuration) {
        Json children = Json::array();
        for (const auto& child : *c.configuration) children.push_back(component_to_json(child));
        out["children"] = children;
    }
    return out;
}

Component component_from_json(const Json& j) {
    check_keys(j, {"name", "kind", "ports", "children"}, "component");
    Component c;
    c.name = string_field(j, "name", "component");
    std::string where = "component " + c.name;
    c.kind = j.contains("kind") ? parse_kind(string_field(j, "kind", where)) : ComponentKind::Plain;
    for (const auto& p : array_field(j, "ports", where)) {
        check_keys(p, {"name", "direction"}, where + " port");
        c.ports.push_back({string_field(p, "name", where), parse_direction(string_field(p, "direction", where))});
    }
    if (j.contains("children")) {
        c.configuration.emplace();
        for (const auto& child : array_field(j, "children", where)) c.configuration->push_back(component_from_json(child));
    }
    return c;
}

}  // namespace

Json parse_json(std::string_view text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw FormatError(std::string("malformed JSON: ") + e.what());
    }
}

std::string dump_canonical(const Json& j) { return j.dump(2) + "\n"; }

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path.string());
    out << text;
    if (!out) throw FormatError("failed writing " + path.string());
}

void require_format(const Json& j, std::string_view expected) {
    if (!j.is_object()) throw FormatError("document must be a JSON object");
    auto it = j.find("format");
    if (it == j.end() || !it->is_string())
        throw FormatError("document lacks a \"format\" tag (expected " + std::string(expected) + ")");
    if (it->get<std::string>() != expected)
        throw FormatError("unsupported format '" + it->get<std::string>() + "' (expected " + std::string(expected) + ")");
}

// ---------------------------------------------------------------------------

Json to_json(const Architecture& a) {
    Json comps = Json::array(), conns = Json::array(), atts = Json::array(), binds = Json::array(),
         uses = Json::array();
    for (const auto& c : a.components) comps.push_back(component_to_json(c));
    for (const auto& c : a.connectors) {
        Json roles = Json::array();
        for (const auto& r : c.roles) roles.push_back({{"name", r.name}, {"direction", to_string(r.direction)}});
        conns.push_back({{"name", c.name}, {"roles", roles}});
    }
    for (const auto& x : a.attachments) atts.push_back({{"port", x.port}, {"role", x.role}});
    for (const auto& x : a.bindings) binds.push_back({{"outer", x.outer}, {"inner", x.inner}});
    for (const auto& x : a.uses) uses.push_back({{"from", x.from}, {"to", x.to}});
    return {{"format", format::architecture}, {"name", a.name},           {"components", comps},
            {"connectors", conns},            {"attachments", atts},      {"bindings", binds},
            {"uses", uses}};
}

Architecture architecture_from_json(const Json& j) {
    require_format(j, format::architecture);
    check_keys(j, {"format", "name", "components", "connectors", "attachments", "bindings", "uses"},
               "architecture");
    Architecture a;
    if (j.contains("name")) a.name = string_field(j, "name", "architecture");
    for (const auto& c : array_field(j, "components", "architecture")) a.components.push_back(component_from_json(c));
    for (const auto& c : array_field(j, "connectors", "architecture")) {
        check_keys(c, {"name", "roles"}, "connector");
        Connector conn{string_field(c, "name", "connector"), {}};
        for (const auto& r : array_field(c, "roles", "connector " + conn.name)) {
            check_keys(r, {"name", "direction"}, "role");
            conn.roles.push_back({string_field(r, "name", "role"), parse_direction(string_field(r, "direction", "role"))});
        }
        a.connectors.push_back(std::move(conn));
    }
    for (const auto& x : array_field(j, "attachments", "architecture")) {
        check_keys(x, {"port", "role"}, "attachment");
        a.attachments.push_back({string_field(x, "port", "attachment"), string_field(x, "role", "attachment")});
    }
    for (const auto& x : array_field(j, "bindings", "architecture")) {
        check_keys(x, {"outer", "inner"}, "binding");
        a.bindings.push_back({string_field(x, "outer", "binding"), string_field(x, "inner", "binding")});
    }
    for (const auto& x : array_field(j, "uses", "architecture")) {
        check_keys(x, {"from", "to"}, "uses");
        a.uses.push_back({string_field(x, "from", "uses"), string_field(x, "to", "uses")});
    }
    return a;
}

std::string serialize(const Architecture& a) { return dump_canonical(to_json(a)); }
Architecture parse_architecture(std::string_view text) { return architecture_from_json(parse_json(text)); }
Architecture load_architecture(const std::filesystem::path& path) { return parse_architecture(read_file(path)); }
void save_architecture(const Architecture& a, const std::filesystem::path& path) { write_file(path, serialize(a)); }

// ---------------------------------------------------------------------------

Json value_to_json(const Value& v) {
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
    return {{"var", std::get<Var>(v).name}};
}

Value value_from_json(const Json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_object() && j.size() == 1 && j.contains("var") && j["var"].is_string())
        return Var{j["var"].get<std::string>()};
    throw FormatError("attribute value must be a string, an integer or {\"var\": name}, got " + describe(j));
}

namespace {

Json attrs_to_json(const Attrs& attrs) {
    Json out = Json::object();
    for (const auto& [k, v] : attrs) out[k] = value_to_json(v);
    return out;
}

Attrs attrs_from_json(const Json& j) {
    Attrs out;
    if (!j.is_object()) throw FormatError("attrs must be an object");
    for (const auto& [k, v] : j.items()) out[k] = value_from_json(v);
    return out;
}

Json id_list(const auto& ids) {
    Json out = Json::array();
    for (auto id : ids) out.push_back(id.value);
    return out;
}

}  // namespace

Json to_json(const Graph& g) {
    Json nodes = Json::array(), edges = Json::array();
    for (const auto& [id, n] : g.nodes()) {
        Json jn = {{"id", id.value}, {"type", n.type}, {"attrs", attrs_to_json(n.attrs)}};
        if (n.exact) jn["exact"] = true;
        nodes.push_back(jn);
    }
    for (const auto& [id, e] : g.edges()) {
        Json je = {{"id", id.value}, {"type", e.type}, {"src", e.src.value}, {"tgt", e.tgt.value}};
        if (!e.attrs.empty()) je["attrs"] = attrs_to_json(e.attrs);
        edges.push_back(je);
    }
    return {{"nodes", nodes}, {"edges", edges}};
}

Graph graph_from_json(const Json& j) {
    check_keys(j, {"nodes", "edges"}, "graph");
    Graph g;
    try {
        for (const auto& n : array_field(j, "nodes", "graph")) {
            check_keys(n, {"id", "type", "attrs", "exact"}, "node");
            Node node{NodeId{id_field(n, "id", "node")}, string_field(n, "type", "node"), {}, false};
            if (n.contains("attrs")) node.attrs = attrs_from_json(n["attrs"]);
            if (n.contains("exact")) {
                if (!n["exact"].is_boolean()) throw FormatError("node: 'exact' must be a boolean");
                node.exact = n["exact"].get<bool>();
            }
            g.add_node(std::move(node));
        }
        for (const auto& e : array_field(j, "edges", "graph")) {
            check_keys(e, {"id", "type", "src", "tgt", "attrs"}, "edge");
            Edge edge{EdgeId{id_field(e, "id", "edge")}, string_field(e, "type", "edge"),
                      NodeId{id_field(e, "src", "edge")}, NodeId{id_field(e, "tgt", "edge")}, {}};
            if (e.contains("attrs")) edge.attrs = attrs_from_json(e["attrs"]);
            g.add_edge(std::move(edge));
        }
    } catch (const FormatError&) {
        throw;
    } catch (const Error& e) {
        throw FormatError(std::string("graph: ") + e.what());
    }
    return g;
}

Json to_json(const Rule& r) {
    Json nacs = Json::array(), params = Json::array();
    for (const auto& n : r.nacs) nacs.push_back({{"name", n.name}, {"graph", to_json(n.pattern)}});
    for (const auto& p : r.params)
        params.push_back({{"name", p.name}, {"kind", p.kind == AttrKind::String ? "string" : "integer"}});
    return {{"name", r.name},
            {"lhs", to_json(r.lhs)},
            {"rhs", to_json(r.rhs)},
            {"preservedIds", {{"nodes", id_list(r.preserved_nodes())}, {"edges", id_list(r.preserved_edges())}}},
            {"nacs", nacs},
            {"params", params}};
}

Rule rule_from_json(const Json& j) {
    check_keys(j, {"name", "lhs", "rhs", "preservedIds", "nacs", "params"}, "rule");
    Rule r;
    r.name = string_field(j, "name", "rule");
    std::string where = "rule " + r.name;
    r.lhs = graph_from_json(field(j, "lhs", where));
    r.rhs = graph_from_json(field(j, "rhs", where));
    for (const auto& n : array_field(j, "nacs", where)) {
        check_keys(n, {"name", "graph"}, where + " nac");
        r.nacs.push_back({string_field(n, "name", where), graph_from_json(field(n, "graph", where))});
    }
    for (const auto& p : array_field(j, "params", where)) {
        check_keys(p, {"name", "kind"}, where + " param");
        RuleParam param{string_field(p, "name", where), AttrKind::String};
        if (p.contains("kind")) {
            std::string k = string_field(p, "kind", where);
            if (k == "integer")
                param.kind = AttrKind::Integer;
            else if (k != "string")
                throw FormatError(where + ": unknown parameter kind '" + k + "'");
        }
        r.params.push_back(std::move(param));
    }
    if (j.contains("preservedIds")) {
        const Json& p = j["preservedIds"];
        check_keys(p, {"nodes", "edges"}, where + " preservedIds");
        if (array_field(p, "nodes", where) != id_list(r.preserved_nodes()) ||
            array_field(p, "edges", where) != id_list(r.preserved_edges()))
            throw FormatError(where + ": preservedIds disagree with the ids shared by lhs and rhs");
    }
    return r;
}

Json rules_document(std::span<const Rule> rules) {
    Json arr = Json::array();
    for (const auto& r : rules) arr.push_back(to_json(r));
    return {{"format", format::rules}, {"rules", arr}};
}

std::vector<Rule> rules_from_document(const Json& j) {
    require_format(j, format::rules);
    check_keys(j, {"format", "rules"}, "rules document");
    std::vector<Rule> out;
    for (const auto& r : array_field(j, "rules", "rules document")) out.push_back(rule_from_json(r));
    return out;
}

std::vector<Rule> load_rules(const std::filesystem::path& path) {
    return rules_from_document(parse_json(read_file(path)));
}

Json to_json(const ConformanceReport& r) {
    Json vs = Json::array();
    for (const auto& v : r.violations)
        vs.push_back({{"code", v.code},
                      {"message", v.message},
                      {"witness", {{"nodes", id_list(v.witness.nodes)}, {"edges", id_list(v.witness.edges)}}}});
    return {{"ok", r.ok()}, {"violations", vs}};
}

}  // namespace archevol
