#include "archevol/styles.hpp"

#include "archevol/cosa.hpp"
#include "archevol/error.hpp"
#include "archevol/typing.hpp"

namespace archevol {

Style client_server_style() {
    Style s;
    s.name = "client-server";
    s.node_types.push_back({cosa::Server, false, std::string(cosa::Component), {}, Bounds::exactly(1)});
    s.node_types.push_back({cosa::Client, false, std::string(cosa::Component), {}, Bounds{1, std::nullopt}});

    GraphConstraint connected;
    connected.name = "CS-1";
    connected.kind = ConstraintKind::Conditional;
    connected.message = "every client must be connected to the server through one of its ports";
    connected.premise = PatternBuilder().node(1, cosa::Client);
    connected.conclusions.push_back(
        PatternBuilder().node(1, cosa::Client).node(2, cosa::Server).edge(1, cosa::connectsTo, 1, 2));
    connected.conclusions.push_back(
        PatternBuilder().node(1, cosa::Client).node(2, cosa::Server).edge(1, cosa::connectsTo, 2, 1));
    s.constraints.push_back(std::move(connected));

    GraphConstraint top;
    top.name = "CS-2";
    top.kind = ConstraintKind::Conditional;
    top.message = "only the client and the server may be top-level components";
    top.premise = PatternBuilder().exact(1, cosa::Component);
    top.conclusions.push_back(PatternBuilder()
                                  .exact(1, cosa::Component)
                                  .node(2, cosa::Configuration)
                                  .edge(1, cosa::contains, 2, 1));
    s.constraints.push_back(std::move(top));

    GraphConstraint nested;
    nested.name = "CS-3";
    nested.kind = ConstraintKind::Forbidden;
    nested.message = "the client and the server must be top-level components";
    for (const char* kind : {cosa::Client, cosa::Server})
        nested.patterns.push_back(
            PatternBuilder().node(1, cosa::Configuration).node(2, kind).edge(1, cosa::contains, 1, 2));
    s.constraints.push_back(std::move(nested));
    return s;
}

std::vector<Style> builtin_styles() { return {client_server_style()}; }

std::optional<Style> find_builtin_style(const std::string& name) {
    for (auto& s : builtin_styles())
        if (s.name == name) return s;
    return std::nullopt;
}

TypeGraph style_type_graph(const Style& s) {
    TypeGraph tg = cosa_type_graph();
    const TypeGraph base = tg;
    for (const auto& t : s.node_types) {
        if (tg.has_node_type(t.name)) {
            if (t.supertype && tg.node_type(t.name).supertype != t.supertype)
                throw DefinitionError("style " + s.name + ": type " + t.name + " already exists with another supertype");
            tg.set_count(t.name, t.count);
            continue;
        }
        if (!t.supertype || !base.has_node_type(*t.supertype))
            throw DefinitionError("style " + s.name + ": new type " + t.name +
                                  " must refine a type of the COSA vocabulary");
        tg.add_node_type(t);
    }
    return tg;
}

ConformanceReport check_style(const Architecture& a, const Style& s) {
    ConformanceReport report;
    for (auto& p : model_problems(a)) report.violations.push_back({"model", std::move(p), {}});
    if (!report.ok()) return report;

    TypeGraph tg = style_type_graph(s);
    Graph g = encode(a);
    report.merge(check_typing(g, tg));
    Graph full = materialize_derived(g, tg);
    auto invariants = base_invariants();
    report.merge(check_constraints(full, invariants, tg));
    report.merge(check_constraints(full, s.constraints, tg));
    return report;
}

// ---------------------------------------------------------------------------

namespace {

Json constraint_to_json(const GraphConstraint& c) {
    Json out = {{"name", c.name}, {"message", c.message}};
    if (c.kind == ConstraintKind::Forbidden) {
        out["kind"] = "forbidden";
        Json ps = Json::array();
        for (const auto& p : c.patterns) ps.push_back(to_json(p));
        out["patterns"] = ps;
    } else {
        out["kind"] = "conditional";
        out["premise"] = to_json(c.premise);
        Json cs = Json::array();
        for (const auto& p : c.conclusions) cs.push_back(to_json(p));
        out["conclusions"] = cs;
    }
    return out;
}

std::string get_string(const Json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_string()) throw FormatError(where + ": '" + key + "' must be a string");
    return j[key].get<std::string>();
}

const Json& get_array(const Json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_array()) throw FormatError(where + ": '" + key + "' must be an array");
    return j[key];
}

GraphConstraint constraint_from_json(const Json& j) {
    if (!j.is_object()) throw FormatError("style constraint must be an object");
    GraphConstraint c;
    c.name = get_string(j, "name", "style constraint");
    std::string where = "constraint " + c.name;
    if (j.contains("message")) c.message = get_string(j, "message", where);
    std::string kind = get_string(j, "kind", where);
    if (kind == "forbidden") {
        c.kind = ConstraintKind::Forbidden;
        for (const auto& p : get_array(j, "patterns", where)) c.patterns.push_back(graph_from_json(p));
    } else if (kind == "conditional") {
        c.kind = ConstraintKind::Conditional;
        if (!j.contains("premise")) throw FormatError(where + ": missing premise");
        c.premise = graph_from_json(j["premise"]);
        for (const auto& p : get_array(j, "conclusions", where)) c.conclusions.push_back(graph_from_json(p));
    } else {
        throw FormatError(where + ": unknown kind '" + kind + "'");
    }
    for (const auto& [key, v] : j.items())
        if (key != "name" && key != "message" && key != "kind" && key != "patterns" && key != "premise" &&
            key != "conclusions")
            throw FormatError(where + ": unknown key '" + key + "'");
    return c;
}

}  // namespace

Json to_json(const Style& s) {
    Json types = Json::array(), cs = Json::array();
    for (const auto& t : s.node_types) {
        Json jt = {{"name", t.name}, {"countMin", t.count.min}};
        jt["supertype"] = t.supertype ? Json(*t.supertype) : Json(nullptr);
        jt["countMax"] = t.count.max ? Json(*t.count.max) : Json(nullptr);
        types.push_back(jt);
    }
    for (const auto& c : s.constraints) cs.push_back(constraint_to_json(c));
    return {{"format", format::style}, {"name", s.name}, {"nodeTypes", types}, {"constraints", cs}};
}

Style style_from_json(const Json& j) {
    require_format(j, format::style);
    Style s;
    s.name = get_string(j, "name", "style");
    for (const auto& t : get_array(j, "nodeTypes", "style " + s.name)) {
        if (!t.is_object()) throw FormatError("style " + s.name + ": node type must be an object");
        NodeType nt;
        nt.name = get_string(t, "name", "style node type");
        std::string where = "style node type " + nt.name;
        if (t.contains("supertype") && !t["supertype"].is_null()) nt.supertype = get_string(t, "supertype", where);
        if (t.contains("countMin")) {
            if (!t["countMin"].is_number_unsigned()) throw FormatError(where + ": countMin must be a non-negative integer");
            nt.count.min = t["countMin"].get<std::size_t>();
        }
        if (t.contains("countMax") && !t["countMax"].is_null()) {
            if (!t["countMax"].is_number_unsigned()) throw FormatError(where + ": countMax must be a non-negative integer or null");
            nt.count.max = t["countMax"].get<std::size_t>();
        }
        s.node_types.push_back(std::move(nt));
    }
    if (j.contains("constraints"))
        for (const auto& c : get_array(j, "constraints", "style " + s.name)) s.constraints.push_back(constraint_from_json(c));
    style_type_graph(s);  // validates the type extension
    return s;
}

Style load_style(const std::filesystem::path& path) { return style_from_json(parse_json(read_file(path))); }

}  // namespace archevol
