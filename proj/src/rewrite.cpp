#include "archevol/rewrite.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

#include "archevol/error.hpp"

namespace archevol {

namespace {

void collect_vars(const Attrs& attrs, std::set<std::string>& out) {
    for (const auto& [k, v] : attrs)
        if (const auto* var = std::get_if<Var>(&v)) out.insert(var->name);
}

}  // namespace

std::vector<NodeId> Rule::preserved_nodes() const {
    std::vector<NodeId> out;
    for (const auto& [id, n] : lhs.nodes())
        if (rhs.has_node(id)) out.push_back(id);
    return out;
}

std::vector<EdgeId> Rule::preserved_edges() const {
    std::vector<EdgeId> out;
    for (const auto& [id, e] : lhs.edges())
        if (rhs.has_edge(id)) out.push_back(id);
    return out;
}

std::vector<NodeId> Rule::deleted_nodes() const {
    std::vector<NodeId> out;
    for (const auto& [id, n] : lhs.nodes())
        if (!rhs.has_node(id)) out.push_back(id);
    return out;
}

std::vector<EdgeId> Rule::deleted_edges() const {
    std::vector<EdgeId> out;
    for (const auto& [id, e] : lhs.edges())
        if (!rhs.has_edge(id)) out.push_back(id);
    return out;
}

std::vector<NodeId> Rule::created_nodes() const {
    std::vector<NodeId> out;
    for (const auto& [id, n] : rhs.nodes())
        if (!lhs.has_node(id)) out.push_back(id);
    return out;
}

std::vector<EdgeId> Rule::created_edges() const {
    std::vector<EdgeId> out;
    for (const auto& [id, e] : rhs.edges())
        if (!lhs.has_edge(id)) out.push_back(id);
    return out;
}

std::vector<std::string> Rule::free_variables() const {
    std::set<std::string> bound;
    for (const auto& [id, n] : lhs.nodes()) collect_vars(n.attrs, bound);
    for (const auto& [id, e] : lhs.edges()) collect_vars(e.attrs, bound);
    std::set<std::string> used;
    for (NodeId id : created_nodes()) collect_vars(rhs.node(id).attrs, used);
    for (EdgeId id : created_edges()) collect_vars(rhs.edge(id).attrs, used);
    std::vector<std::string> out;
    for (const auto& v : used)
        if (!bound.count(v)) out.push_back(v);
    return out;
}

void Rule::validate(const TypeGraph& tg) const {
    auto fail = [&](const std::string& why) { throw DefinitionError("rule " + name + ": " + why); };
    for (const Graph* g : {&lhs, &rhs}) {
        for (const auto& [id, n] : g->nodes()) tg.node_type(n.type);
        for (const auto& [id, e] : g->edges()) tg.edge_type(e.type);
    }
    for (NodeId id : preserved_nodes())
        if (lhs.node(id).type != rhs.node(id).type)
            fail("preserved node " + std::to_string(id.value) + " changes type");
    for (EdgeId id : preserved_edges()) {
        const Edge& a = lhs.edge(id);
        const Edge& b = rhs.edge(id);
        if (a.type != b.type || a.src != b.src || a.tgt != b.tgt)
            fail("preserved edge " + std::to_string(id.value) + " changes type or endpoints");
    }
    for (const auto& nac : nacs) {
        for (const auto& [id, n] : lhs.nodes()) {
            if (!nac.pattern.has_node(id) || nac.pattern.node(id).type != n.type)
                fail("NAC " + nac.name + " does not contain LHS node " + std::to_string(id.value));
        }
        for (const auto& [id, e] : lhs.edges()) {
            if (!nac.pattern.has_edge(id)) fail("NAC " + nac.name + " does not contain LHS edge");
            const Edge& ne = nac.pattern.edge(id);
            if (ne.type != e.type || ne.src != e.src || ne.tgt != e.tgt)
                fail("NAC " + nac.name + " alters LHS edge " + std::to_string(id.value));
        }
        for (const auto& [id, n] : nac.pattern.nodes()) tg.node_type(n.type);
        for (const auto& [id, e] : nac.pattern.edges()) tg.edge_type(e.type);
    }
    for (const auto& v : free_variables()) {
        bool declared = std::any_of(params.begin(), params.end(),
                                    [&](const RuleParam& p) { return p.name == v; });
        if (!declared) fail("variable '" + v + "' is bound neither by the LHS nor by a parameter");
    }
}

// ---------------------------------------------------------------------------

bool nacs_hold(const Rule& rule, const Graph& host, const Embedding& m, const TypeGraph& tg) {
    for (const auto& nac : rule.nacs)
        if (has_embedding(nac.pattern, host, tg, m)) return false;
    return true;
}

std::vector<EdgeId> dangling_edges(const Rule& rule, const Graph& host, const Embedding& m) {
    std::set<NodeId> doomed;
    for (NodeId id : rule.deleted_nodes()) doomed.insert(m.nodes.at(id));
    std::set<EdgeId> deleted;
    for (EdgeId id : rule.deleted_edges()) deleted.insert(m.edges.at(id));
    std::vector<EdgeId> out;
    for (const auto& [id, e] : host.edges())
        if ((doomed.count(e.src) || doomed.count(e.tgt)) && !deleted.count(id)) out.push_back(id);
    return out;
}

std::vector<Match> find_matches(const Rule& rule, const Graph& host, const TypeGraph& tg,
                                const Bindings& bindings) {
    for (const auto& v : rule.free_variables())
        if (!bindings.count(v))
            throw UnboundParameterError("rule " + rule.name + ": parameter '" + v +
                                        "' needs a binding");
    Embedding seed;
    seed.bindings = bindings;
    auto shared_rule = std::make_shared<const Rule>(rule);
    auto shared_host = std::make_shared<const Graph>(host);
    std::uint64_t digest = host.digest();
    std::vector<Match> out;
    for (auto& e : find_embeddings(rule.lhs, host, tg, seed)) {
        if (!nacs_hold(rule, host, e, tg)) continue;
        out.push_back({shared_rule, shared_host, std::move(e), digest});
    }
    return out;
}

namespace {

Attrs evaluate(const Attrs& terms, const Bindings& bindings, const std::string& rule) {
    Attrs out;
    for (const auto& [k, v] : terms) {
        if (const auto* var = std::get_if<Var>(&v)) {
            auto it = bindings.find(var->name);
            if (it == bindings.end())
                throw UnboundParameterError("rule " + rule + ": variable '" + var->name +
                                            "' is unbound");
            out[k] = it->second;
        } else {
            out[k] = v;
        }
    }
    return out;
}

}  // namespace

Graph apply_at(const Rule& rule, const Graph& host, const Embedding& m) {
    auto dangling = dangling_edges(rule, host, m);
    if (!dangling.empty()) {
        std::string msg = "rule " + rule.name + " violates the gluing condition: dangling edges";
        std::vector<std::uint32_t> ids;
        for (EdgeId id : dangling) {
            msg += " " + std::to_string(id.value);
            ids.push_back(id.value);
        }
        throw GluingError(msg, std::move(ids));
    }
    Graph out = host;
    for (EdgeId id : rule.deleted_edges()) out.remove_edge(m.edges.at(id));
    for (NodeId id : rule.deleted_nodes()) out.remove_node(m.nodes.at(id));

    std::map<NodeId, NodeId> image = m.nodes;
    for (NodeId id : rule.created_nodes()) {
        const Node& n = rule.rhs.node(id);
        image[id] = out.add_node(n.type, evaluate(n.attrs, m.bindings, rule.name));
    }
    for (EdgeId id : rule.created_edges()) {
        const Edge& e = rule.rhs.edge(id);
        out.add_edge(e.type, image.at(e.src), image.at(e.tgt),
                     evaluate(e.attrs, m.bindings, rule.name));
    }
    return out;
}

Graph apply(const Match& m) { return apply_at(*m.rule, *m.host, m.embedding); }

Graph apply(const Match& m, const Graph& host) {
    if (host.digest() != m.host_digest)
        throw StaleMatchError("match for rule " + m.rule->name +
                              " was computed on a different host graph");
    return apply_at(*m.rule, host, m.embedding);
}

// ---------------------------------------------------------------------------

std::string RuleSequence::to_string() const {
    std::string out;
    for (const auto& item : items) {
        if (!out.empty()) out += "; ";
        if (item.repetition == Repetition::Star)
            out += "(" + item.rule.name + ")*";
        else
            out += item.rule.name;
    }
    return out;
}

RuleSequence parse_sequence(const std::string& text, std::span<const Rule> rules) {
    RuleSequence seq;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find(';', pos);
        if (end == std::string::npos) end = text.size();
        std::string tok = text.substr(pos, end - pos);
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\n");
            auto e = s.find_last_not_of(" \t\n");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        tok = trim(tok);
        pos = end + 1;
        if (tok.empty()) {
            if (end == text.size()) break;
            throw DefinitionError("empty item in rule sequence '" + text + "'");
        }
        Repetition rep = Repetition::Once;
        if (tok.size() >= 2 && tok.substr(tok.size() - 1) == "*") {
            rep = Repetition::Star;
            tok = trim(tok.substr(0, tok.size() - 1));
        }
        if (tok.size() >= 2 && tok.front() == '(' && tok.back() == ')') tok = trim(tok.substr(1, tok.size() - 2));
        auto it = std::find_if(rules.begin(), rules.end(), [&](const Rule& r) { return r.name == tok; });
        if (it == rules.end()) throw DefinitionError("unknown rule '" + tok + "' in sequence");
        seq.items.push_back({*it, rep});
    }
    if (seq.items.empty()) throw DefinitionError("rule sequence is empty");
    return seq;
}

std::size_t default_max_rewrites() {
    if (const char* env = std::getenv("ARCHEVOL_MAX_REWRITES")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return 10000;
}

std::string summarize(const Rule& rule, const Graph& host, const Embedding& m) {
    std::string out = "{";
    bool first = true;
    for (const auto& [pid, hid] : m.nodes) {
        if (!first) out += ", ";
        first = false;
        out += std::to_string(pid.value) + "=" + rule.lhs.node(pid).type;
        std::string n = name_of(host.node(hid));
        if (!n.empty()) out += ":" + n;
    }
    return out + "}";
}

SequenceResult apply_sequence(const RuleSequence& seq, const Graph& host, const TypeGraph& tg,
                              const SequenceOptions& options) {
    if (seq.items.empty()) throw SequenceError("rule sequence is empty", 0, "");
    SequenceResult result{host, {}};
    std::size_t rewrites = 0;
    auto choose = [&](const Rule& r, const std::vector<Match>& ms) -> std::optional<std::size_t> {
        if (!options.chooser) return 0;
        auto pick = options.chooser(r, std::span<const Match>(ms));
        if (pick && *pick >= ms.size())
            throw SequenceError("chooser returned an out-of-range match", 0, r.name);
        return pick;
    };
    auto step = [&](std::size_t pos, const Rule& r, const Match& m) {
        if (++rewrites > options.max_rewrites)
            throw SequenceError("rewrite ceiling of " + std::to_string(options.max_rewrites) +
                                    " exceeded at rule " + r.name + " (non-terminating repetition?)",
                                pos, r.name);
        Graph next = apply(m);
        result.trace.steps.push_back({pos, r.name, summarize(r, result.graph, m.embedding),
                                      result.graph.digest(), next.digest()});
        result.graph = std::move(next);
    };
    for (std::size_t pos = 0; pos < seq.items.size(); ++pos) {
        const auto& item = seq.items[pos];
        if (item.repetition == Repetition::Once) {
            auto ms = find_matches(item.rule, result.graph, tg, options.bindings);
            std::optional<std::size_t> pick;
            if (!ms.empty()) pick = choose(item.rule, ms);
            if (!pick)
                throw SequenceError("rule " + item.rule.name + " at position " +
                                        std::to_string(pos + 1) + " has no match",
                                    pos, item.rule.name);
            step(pos, item.rule, ms[*pick]);
            continue;
        }
        while (true) {
            auto ms = find_matches(item.rule, result.graph, tg, options.bindings);
            if (ms.empty()) break;
            auto pick = choose(item.rule, ms);
            if (!pick) break;
            step(pos, item.rule, ms[*pick]);
        }
    }
    return result;
}

}  // namespace archevol
