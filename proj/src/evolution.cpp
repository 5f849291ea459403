#include "archevol/evolution.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "archevol/cosa.hpp"
#include "archevol/error.hpp"

namespace archevol {

namespace {

bool within(std::string_view path, std::string_view root) {
    return path == root || (path.size() > root.size() && path.substr(0, root.size()) == root &&
                            path[root.size()] == '/');
}

std::string owner_of(const std::string& ref) { return split_port_ref(ref).component; }

/// An architecture under modification plus the port renaming so far.
struct Tx {
    Architecture a;
    PortMap ports;

    explicit Tx(const Architecture& in) : a(in) {
        for (const auto& r : port_refs(a)) ports[r] = r;
    }

    std::string component(const std::string& ref) const {
        auto path = resolve_component(a, ref);
        if (!path) throw OperationError("unknown or ambiguous component '" + ref + "'");
        return *path;
    }

    Component& comp(const std::string& path) {
        Component* c = find_component(a, path);
        if (!c) throw OperationError("unknown component '" + path + "'");
        return *c;
    }

    std::string port(const std::string& ref) const {
        PortRef r = split_port_ref(ref);
        if (r.port.empty()) throw OperationError("'" + ref + "' is not a port reference (component#port)");
        std::string full = port_ref(component(r.component), r.port);
        if (!find_port(a, full)) throw OperationError("unknown port '" + ref + "'");
        return full;
    }

    Port& port_at(const std::string& ref) {
        PortRef r = split_port_ref(ref);
        Port* p = comp(r.component).find_port(r.port);
        if (!p) throw OperationError("unknown port '" + ref + "'");
        return *p;
    }

    void for_each_ref(const std::function<void(std::string&)>& fn) {
        for (auto& x : a.attachments) fn(x.port);
        for (auto& x : a.bindings) {
            fn(x.outer);
            fn(x.inner);
        }
        for (auto& x : a.uses) {
            fn(x.from);
            fn(x.to);
        }
        for (auto& [from, to] : ports) fn(to);
    }

    void replace_port(const std::string& from, const std::string& to) {
        for_each_ref([&](std::string& r) {
            if (r == from) r = to;
        });
    }

    void rename_path(const std::string& from, const std::string& to) {
        for_each_ref([&](std::string& r) {
            PortRef p = split_port_ref(r);
            if (within(p.component, from)) r = port_ref(to + p.component.substr(from.size()), p.port);
        });
    }

    bool linked(const std::string& ref) const {
        for (const auto& x : a.attachments)
            if (x.port == ref) return true;
        for (const auto& x : a.bindings)
            if (x.outer == ref || x.inner == ref) return true;
        for (const auto& x : a.uses)
            if (x.from == ref || x.to == ref) return true;
        return false;
    }

    void remove_port(const std::string& ref) {
        PortRef r = split_port_ref(ref);
        auto& ps = comp(r.component).ports;
        ps.erase(std::remove_if(ps.begin(), ps.end(), [&](const Port& p) { return p.name == r.port; }), ps.end());
        std::erase_if(a.attachments, [&](const Attachment& x) { return x.port == ref; });
        std::erase_if(a.bindings, [&](const Binding& x) { return x.outer == ref || x.inner == ref; });
        std::erase_if(a.uses, [&](const Uses& x) { return x.from == ref || x.to == ref; });
        std::erase_if(ports, [&](const auto& kv) { return kv.second == ref; });
    }

    /// Detaches a component from its sibling list.
    Component take(const std::string& path) {
        auto* list = siblings_of(a, path);
        auto it = std::find_if(list->begin(), list->end(), [&](const Component& c) { return c.name == leaf_name(path); });
        Component c = std::move(*it);
        list->erase(it);
        return c;
    }

    /// A port name for `c` starting from `base`, with a `_k` suffix on collision.
    static std::string fresh_port_name(const Component& c, const std::string& base) {
        if (!c.find_port(base)) return base;
        for (int k = 2;; ++k) {
            std::string n = base + "_" + std::to_string(k);
            if (!c.find_port(n)) return n;
        }
    }

    /// Adds a parent port bound to `inner` (whose owner is a child of
    /// `parent`) and returns its reference.
    std::string delegate(const std::string& parent, const std::string& inner) {
        Port p = port_at(inner);
        Component& pc = comp(parent);
        std::string name = fresh_port_name(pc, p.name);
        pc.ports.push_back({name, p.direction});
        std::string outer = port_ref(parent, name);
        a.bindings.push_back({outer, inner});
        return outer;
    }

    Evolved finish(const std::string& op) {
        auto report = validate_architecture(a);
        if (!report.ok()) {
            std::string msg = op + " would break the architecture:";
            for (const auto& v : report.violations) msg += "\n  - " + v.message;
            throw OperationError(msg);
        }
        std::set<std::string> live;
        for (const auto& r : port_refs(a)) live.insert(r);
        std::erase_if(ports, [&](const auto& kv) { return !live.count(kv.second); });
        return {std::move(a), std::move(ports)};
    }
};

void require_name(const Architecture& a, const std::string& name) {
    if (name.empty() || name.find_first_of("/#") != std::string::npos)
        throw OperationError("invalid component name '" + name + "'");
    for (const auto& p : component_paths(a))
        if (leaf_name(p) == name) throw OperationError("a component named '" + name + "' already exists");
}

// The move itself, over resolved references. Returns nothing; `tx` carries
// the result.
void move_ports_in(Tx& tx, const std::vector<std::string>& refs, const std::string& target) {
    if (refs.empty()) throw OperationError("no ports to move");
    const std::string source = owner_of(refs.front());
    if (source == target) throw OperationError("ports already belong to " + target);
    std::set<std::string> moving(refs.begin(), refs.end());
    for (const auto& r : refs)
        if (owner_of(r) != source) throw OperationError("moved ports must belong to one component");
    Component& tc = tx.comp(target);
    for (const auto& r : refs) {
        std::string name = split_port_ref(r).port;
        if (tc.find_port(name))
            throw OperationError("component " + target + " already has a port named '" + name + "'");
    }

    // Bridge every uses edge the move splits.
    auto& a = tx.a;
    std::vector<Uses> uses;
    std::vector<Attachment> bridges;
    struct NewPort {
        std::string owner;
        Port port;
    };
    std::vector<NewPort> added;
    auto taken = [&](const std::string& owner, const std::string& name) {
        if (tx.comp(owner).find_port(name)) return true;
        return std::any_of(added.begin(), added.end(),
                           [&](const NewPort& n) { return n.owner == owner && n.port.name == name; });
    };
    for (const auto& u : a.uses) {
        bool from_moves = moving.count(u.from) > 0, to_moves = moving.count(u.to) > 0;
        if (from_moves == to_moves || (owner_of(u.from) != source && !from_moves) ||
            (owner_of(u.to) != source && !to_moves)) {
            uses.push_back(u);
            continue;
        }
        const std::string u_owner = from_moves ? target : source;
        const std::string v_owner = to_moves ? target : source;
        int k = 1;
        while (taken(v_owner, "Pro" + std::to_string(k)) || taken(u_owner, "Req" + std::to_string(k)) ||
               find_connector(a, "Bridge" + std::to_string(k)) ||
               std::any_of(bridges.begin(), bridges.end(), [&](const Attachment& b) {
                   return owner_of(b.role) == "Bridge" + std::to_string(k);
               }))
            ++k;
        const std::string ks = std::to_string(k);
        added.push_back({v_owner, {"Pro" + ks, Direction::Provided}});
        added.push_back({u_owner, {"Req" + ks, Direction::Required}});
        const std::string pro = port_ref(v_owner, "Pro" + ks), req = port_ref(u_owner, "Req" + ks);
        // Endpoint refs are rewritten below for moving ports.
        uses.push_back({pro, u.to});
        uses.push_back({u.from, req});
        bridges.push_back({pro, "Bridge" + ks + "#prov"});
        bridges.push_back({req, "Bridge" + ks + "#req"});
    }
    a.uses = std::move(uses);

    // Move the ports themselves.
    Component& sc = tx.comp(source);
    for (const auto& r : refs) {
        std::string name = split_port_ref(r).port;
        auto it = std::find_if(sc.ports.begin(), sc.ports.end(), [&](const Port& p) { return p.name == name; });
        Port p = *it;
        sc.ports.erase(it);
        tx.comp(target).ports.push_back(p);
        tx.replace_port(r, port_ref(target, name));
    }
    for (auto& n : added) tx.comp(n.owner).ports.push_back(n.port);
    for (std::size_t i = 0; i < bridges.size(); i += 2) {
        a.connectors.push_back({owner_of(bridges[i].role),
                                {{"prov", Direction::Provided}, {"req", Direction::Required}}});
        a.attachments.push_back(bridges[i]);
        a.attachments.push_back(bridges[i + 1]);
    }
}

}  // namespace

// ---------------------------------------------------------------------------

Evolved move_ports(const Architecture& a, const std::vector<std::string>& ports, const std::string& target) {
    Tx tx(a);
    std::vector<std::string> refs;
    for (const auto& p : ports) refs.push_back(tx.port(p));
    move_ports_in(tx, refs, tx.component(target));
    return tx.finish("moving ports to " + target);
}

Evolved move_port(const Architecture& a, const std::string& port, const std::string& target) {
    return move_ports(a, {port}, target);
}

Evolved split_component(const Architecture& a, const std::string& comp, const std::vector<std::string>& ports,
                        const std::optional<std::string>& new_name) {
    Tx tx(a);
    const std::string path = tx.component(comp);
    const Component& c = tx.comp(path);
    if (ports.empty()) throw OperationError("split of " + comp + " needs at least one port to move");
    std::set<std::string> names;
    for (const auto& p : ports) {
        if (!c.find_port(p)) throw OperationError("component " + comp + " has no port '" + p + "'");
        names.insert(p);
    }
    if (names.size() == c.ports.size())
        throw OperationError("split of " + comp + " would move every port and leave it empty");
    const std::string name = new_name.value_or(c.name + "_2");
    require_name(tx.a, name);

    auto* list = siblings_of(tx.a, path);
    auto it = std::find_if(list->begin(), list->end(), [&](const Component& x) { return x.name == leaf_name(path); });
    list->insert(it + 1, Component{name, ComponentKind::Plain, {}, std::nullopt});

    std::vector<std::string> refs;
    for (const auto& p : tx.comp(path).ports)
        if (names.count(p.name)) refs.push_back(port_ref(path, p.name));
    move_ports_in(tx, refs, child_path(parent_path(path), name));
    return tx.finish("split of " + comp);
}

namespace {

/// Removes `ref` from the uses relation, replacing every x -> ref -> y by
/// x -> y at the position of x -> ref.
void contract_uses(std::vector<Uses>& uses, const std::string& ref) {
    std::vector<std::string> targets;
    for (const auto& u : uses)
        if (u.from == ref) targets.push_back(u.to);
    std::vector<Uses> out;
    auto present = [&](const Uses& u) {
        return std::find(out.begin(), out.end(), u) != out.end() ||
               std::find(uses.begin(), uses.end(), u) != uses.end();
    };
    for (const auto& u : uses) {
        if (u.from == ref) continue;
        if (u.to != ref) {
            out.push_back(u);
            continue;
        }
        for (const auto& y : targets) {
            Uses direct{u.from, y};
            if (direct.from != direct.to && !present(direct)) out.push_back(direct);
        }
    }
    uses = std::move(out);
}

}  // namespace

Evolved merge_components(const Architecture& a, const std::vector<std::string>& comps,
                         const std::optional<std::string>& new_name) {
    Tx tx(a);
    if (comps.size() < 2) throw OperationError("merge needs at least two components");
    std::vector<std::string> paths;
    for (const auto& c : comps) {
        std::string p = tx.component(c);
        if (std::find(paths.begin(), paths.end(), p) != paths.end())
            throw OperationError("component " + c + " is listed twice");
        if (!paths.empty() && parent_path(p) != parent_path(paths.front()))
            throw OperationError("merged components must be siblings; " + c + " is not a sibling of " + comps.front());
        paths.push_back(p);
    }
    std::vector<std::string> collisions;
    std::set<std::string> seen;
    for (const auto& p : paths)
        for (const auto& port : tx.comp(p).ports)
            if (!seen.insert(port.name).second) collisions.push_back(port.name);
    if (!collisions.empty()) {
        std::string msg = "merged components share port names:";
        for (const auto& n : collisions) msg += " " + n;
        throw OperationError(msg);
    }

    const std::string parent = parent_path(paths.front());
    const std::string first_name = tx.comp(paths.front()).name;
    const std::string name = new_name.value_or(first_name);
    if (name != first_name) {
        bool reused = false;
        for (const auto& p : paths) reused = reused || leaf_name(p) == name;
        if (!reused) require_name(tx.a, name);
    }
    const std::string merged_path = child_path(parent, name);

    Component merged{name, tx.comp(paths.front()).kind, {}, std::nullopt};
    for (const auto& p : paths) {
        const Component& c = tx.comp(p);
        merged.ports.insert(merged.ports.end(), c.ports.begin(), c.ports.end());
        if (c.configuration) {
            if (!merged.configuration) merged.configuration.emplace();
            merged.configuration->insert(merged.configuration->end(), c.configuration->begin(), c.configuration->end());
        }
    }
    auto* list = siblings_of(tx.a, paths.front());
    auto pos = std::find_if(list->begin(), list->end(), [&](const Component& x) { return x.name == first_name; });
    *pos = merged;
    for (std::size_t i = 1; i < paths.size(); ++i)
        std::erase_if(*list, [&](const Component& x) { return x.name == leaf_name(paths[i]); });
    for (const auto& p : paths) tx.rename_path(p, merged_path);

    // Collapse connectors that now only link the merged component's ports.
    auto& arch = tx.a;
    std::vector<std::string> collapsing;
    for (const auto& conn : arch.connectors) {
        bool any = false, internal = true;
        for (const auto& at : arch.attachments) {
            if (owner_of(at.role) != conn.name) continue;
            any = true;
            internal = internal && owner_of(at.port) == merged_path;
        }
        if (any && internal) collapsing.push_back(conn.name);
    }
    for (const auto& cname : collapsing) {
        std::vector<std::string> requirers, providers;
        for (const auto& at : arch.attachments) {
            if (owner_of(at.role) != cname) continue;
            const Role* r = find_role(arch, at.role);
            (r->direction == Direction::Provided ? providers : requirers).push_back(at.port);
        }
        std::erase_if(arch.attachments, [&](const Attachment& at) { return owner_of(at.role) == cname; });
        std::erase_if(arch.connectors, [&](const Connector& c) { return c.name == cname; });

        // Ports that only relayed through the connector: a required end with
        // nothing but incoming uses, a provided end with nothing but outgoing
        // uses. Decided before the connector turns into uses edges.
        auto pure = [&](const std::string& ref, bool required) {
            bool carried = false;
            for (const auto& at : arch.attachments)
                if (at.port == ref) return false;
            for (const auto& b : arch.bindings)
                if (b.outer == ref || b.inner == ref) return false;
            for (const auto& u : arch.uses) {
                if ((required ? u.from : u.to) == ref) return false;
                carried = carried || (required ? u.to : u.from) == ref;
            }
            return carried;
        };
        std::vector<std::string> relays;
        for (const auto& r : requirers)
            if (pure(r, true)) relays.push_back(r);
        for (const auto& p : providers)
            if (pure(p, false)) relays.push_back(p);

        // The required end depended on the provided end; say so directly.
        for (const auto& r : requirers)
            for (const auto& p : providers) {
                Uses u{r, p};
                if (std::find(arch.uses.begin(), arch.uses.end(), u) == arch.uses.end()) arch.uses.push_back(u);
            }
        for (const auto& ref : relays) {
            contract_uses(arch.uses, ref);
            tx.remove_port(ref);
        }
    }
    return tx.finish("merge of " + comps.front());
}

Evolved move_in(const Architecture& a, const std::string& comp, const std::string& parent) {
    Tx tx(a);
    const std::string path = tx.component(comp);
    const std::string ppath = tx.component(parent);
    if (path == ppath) throw OperationError("cannot move " + comp + " into itself");
    if (within(ppath, path)) throw OperationError("cannot move " + comp + " into its own descendant " + parent);
    if (parent_path(path) != parent_path(ppath))
        throw OperationError("move in requires " + comp + " and " + parent + " to be siblings");

    Component moved = tx.take(path);
    const std::string own_ports_path = child_path(ppath, moved.name);
    {
        Component& pc = tx.comp(ppath);
        if (!pc.configuration) pc.configuration.emplace();
        pc.configuration->push_back(std::move(moved));
    }
    tx.rename_path(path, own_ports_path);

    auto& arch = tx.a;
    const Component snapshot = tx.comp(own_ports_path);
    for (const auto& port : snapshot.ports) {
        const std::string ref = port_ref(own_ports_path, port.name);
        std::optional<std::string> outer;
        for (std::size_t i = 0; i < arch.attachments.size(); ++i) {
            if (arch.attachments[i].port != ref) continue;
            const std::string conn = owner_of(arch.attachments[i].role);
            bool outside = false;
            std::vector<std::size_t> at_parent;
            for (std::size_t j = 0; j < arch.attachments.size(); ++j) {
                if (j == i || owner_of(arch.attachments[j].role) != conn) continue;
                const std::string other = owner_of(arch.attachments[j].port);
                if (other == ppath)
                    at_parent.push_back(j);
                else if (!within(other, ppath))
                    outside = true;
            }
            for (std::size_t j : at_parent) {
                const std::string pp = arch.attachments[j].port;
                std::vector<std::string> inner;
                for (const auto& b : arch.bindings)
                    if (b.outer == pp) inner.push_back(b.inner);
                if (inner.size() != 1)
                    throw OperationError("connector " + conn + " reaches " + parent + " through port " + pp +
                                         (inner.empty() ? ", which is not delegated to a child"
                                                        : ", which is delegated to several children"));
                for (const auto& u : arch.uses)
                    if (u.from == pp || u.to == pp)
                        throw OperationError("connector " + conn + " reaches " + parent + " through port " + pp +
                                             ", which takes part in uses dependencies");
                arch.attachments[j].port = inner.front();
                // A parent port still linked elsewhere keeps delegating.
                auto at = std::find_if(arch.bindings.begin(), arch.bindings.end(),
                                       [&](const Binding& b) { return b.outer == pp; });
                const Binding delegation = *at;
                const auto index = at - arch.bindings.begin();
                arch.bindings.erase(at);
                if (tx.linked(pp))
                    arch.bindings.insert(arch.bindings.begin() + index, delegation);
                else
                    tx.remove_port(pp);
            }
            if (outside) {
                if (!outer) outer = tx.delegate(ppath, ref);
                arch.attachments[i].port = *outer;
            }
        }
    }
    return tx.finish("move of " + comp + " into " + parent);
}

Evolved move_out(const Architecture& a, const std::string& comp) {
    Tx tx(a);
    const std::string path = tx.component(comp);
    const std::string ppath = parent_path(path);
    if (ppath.empty()) throw OperationError(comp + " is already a top-level component");
    const std::string gpath = parent_path(ppath);
    auto& arch = tx.a;

    // Parent ports that delegate to comp.
    std::vector<std::string> dissolved;
    for (const auto& b : arch.bindings) {
        if (owner_of(b.outer) != ppath || owner_of(b.inner) != path) continue;
        const std::string x = b.outer;
        for (const auto& o : arch.bindings)
            if (o.outer == x && o.inner != b.inner)
                throw OperationError("parent port " + x + " also delegates to " + o.inner);
        for (const auto& u : arch.uses)
            if (u.from == x || u.to == x) throw OperationError("parent port " + x + " takes part in uses dependencies");
        dissolved.push_back(x);
    }

    Component moved = tx.take(path);
    {
        auto* list = siblings_of(arch, ppath);
        auto it = std::find_if(list->begin(), list->end(), [&](const Component& c) { return c.name == leaf_name(ppath); });
        list->insert(it + 1, std::move(moved));
        Component& pc = tx.comp(ppath);
        if (pc.configuration && pc.configuration->empty()) pc.configuration.reset();
    }
    const std::string new_path = child_path(gpath, leaf_name(path));
    tx.rename_path(path, new_path);

    for (const auto& x : dissolved) {
        std::string inner;
        for (const auto& b : arch.bindings)
            if (b.outer == x) inner = b.inner;
        std::erase_if(arch.bindings, [&](const Binding& b) { return b.outer == x; });
        for (auto& at : arch.attachments)
            if (at.port == x) at.port = inner;
        for (auto& b : arch.bindings)
            if (b.inner == x) b.inner = inner;
        tx.remove_port(x);
    }

    // Connectors to former siblings are rerouted through the parent.
    const Component snapshot = tx.comp(new_path);
    for (const auto& port : snapshot.ports) {
        const std::string ref = port_ref(new_path, port.name);
        std::vector<std::string> conns;
        for (const auto& at : arch.attachments)
            if (at.port == ref) conns.push_back(owner_of(at.role));
        for (const auto& conn : conns) {
            for (auto& at : arch.attachments) {
                if (owner_of(at.role) != conn || at.port == ref) continue;
                const std::string other = owner_of(at.port);
                if (!within(other, ppath) || other == ppath) continue;
                if (parent_path(other) != ppath)
                    throw OperationError("connector " + conn + " reaches " + at.port +
                                         " below a direct child of " + ppath);
                std::string existing;
                for (const auto& b : arch.bindings)
                    if (b.inner == at.port) existing = b.outer;
                // Sharing a delegating port that has uses dependencies of
                // its own would make them depend on this connector too.
                for (const auto& u : arch.uses)
                    if (!existing.empty() && (u.from == existing || u.to == existing))
                        throw OperationError("connector " + conn + " would be rerouted through " + existing +
                                             ", which takes part in uses dependencies");
                at.port = existing.empty() ? tx.delegate(ppath, at.port) : existing;
            }
        }
    }
    return tx.finish("move of " + comp + " out of " + ppath);
}

Evolved delegate_port(const Architecture& a, const std::string& port) {
    Tx tx(a);
    const std::string ref = tx.port(port);
    const std::string ppath = parent_path(owner_of(ref));
    if (ppath.empty()) throw OperationError("owner of " + port + " is a top-level component");
    for (const auto& b : tx.a.bindings)
        if (b.inner == ref) return tx.finish("delegation of " + port);
    tx.delegate(ppath, ref);
    return tx.finish("delegation of " + port);
}

// ---------------------------------------------------------------------------

Evolved create_component(const Architecture& a, const std::string& name, const std::string& parent,
                         ComponentKind kind) {
    Tx tx(a);
    require_name(tx.a, name);
    if (parent.empty()) {
        tx.a.components.push_back({name, kind, {}, std::nullopt});
    } else {
        Component& pc = tx.comp(tx.component(parent));
        if (!pc.configuration) pc.configuration.emplace();
        pc.configuration->push_back({name, kind, {}, std::nullopt});
    }
    return tx.finish("creation of " + name);
}

Evolved create_port(const Architecture& a, const std::string& comp, const std::string& name, Direction d) {
    Tx tx(a);
    Component& c = tx.comp(tx.component(comp));
    if (name.empty() || name.find_first_of("/#") != std::string::npos)
        throw OperationError("invalid port name '" + name + "'");
    if (c.find_port(name)) throw OperationError(comp + " already has a port named '" + name + "'");
    c.ports.push_back({name, d});
    return tx.finish("creation of port " + name);
}

Evolved create_connector(const Architecture& a, const std::string& name, const std::string& provided,
                         const std::string& required) {
    Tx tx(a);
    if (find_connector(tx.a, name)) throw OperationError("a connector named '" + name + "' already exists");
    const std::string p = tx.port(provided), r = tx.port(required);
    tx.a.connectors.push_back({name, {{"prov", Direction::Provided}, {"req", Direction::Required}}});
    tx.a.attachments.push_back({p, name + "#prov"});
    tx.a.attachments.push_back({r, name + "#req"});
    return tx.finish("creation of connector " + name);
}

Evolved create_uses(const Architecture& a, const std::string& from, const std::string& to) {
    Tx tx(a);
    Uses u{tx.port(from), tx.port(to)};
    if (std::find(tx.a.uses.begin(), tx.a.uses.end(), u) != tx.a.uses.end())
        throw OperationError("uses " + from + " -> " + to + " already exists");
    tx.a.uses.push_back(u);
    return tx.finish("creation of uses " + from + " -> " + to);
}

Evolved delete_component(const Architecture& a, const std::string& comp) {
    Tx tx(a);
    const std::string path = tx.component(comp);
    const Component& c = tx.comp(path);
    if (c.configuration && !c.configuration->empty()) throw OperationError(comp + " still contains components");
    for (const auto& p : c.ports)
        if (tx.linked(port_ref(path, p.name))) throw OperationError("port " + p.name + " of " + comp + " is still linked");
    Component gone = tx.take(path);
    for (const auto& p : gone.ports) std::erase_if(tx.ports, [&](const auto& kv) { return kv.second == port_ref(path, p.name); });
    if (const std::string pp = parent_path(path); !pp.empty()) {
        Component& pc = tx.comp(pp);
        if (pc.configuration->empty()) pc.configuration.reset();
    }
    return tx.finish("deletion of " + comp);
}

Evolved delete_port(const Architecture& a, const std::string& port) {
    Tx tx(a);
    const std::string ref = tx.port(port);
    if (tx.linked(ref)) throw OperationError("port " + port + " is still linked");
    tx.remove_port(ref);
    return tx.finish("deletion of port " + port);
}

Evolved delete_connector(const Architecture& a, const std::string& name) {
    Tx tx(a);
    if (!find_connector(tx.a, name)) throw OperationError("unknown connector '" + name + "'");
    std::erase_if(tx.a.attachments, [&](const Attachment& at) { return owner_of(at.role) == name; });
    std::erase_if(tx.a.connectors, [&](const Connector& c) { return c.name == name; });
    return tx.finish("deletion of connector " + name);
}

Evolved delete_uses(const Architecture& a, const std::string& from, const std::string& to) {
    Tx tx(a);
    Uses u{tx.port(from), tx.port(to)};
    auto it = std::find(tx.a.uses.begin(), tx.a.uses.end(), u);
    if (it == tx.a.uses.end()) throw OperationError("no uses " + from + " -> " + to);
    tx.a.uses.erase(it);
    return tx.finish("deletion of uses " + from + " -> " + to);
}

// ---------------------------------------------------------------------------

Json to_json(const OperationDescriptor& d) {
    return {{"op", d.op}, {"context", d.context}, {"params", d.params}};
}

OperationDescriptor operation_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("op") || !j["op"].is_string())
        throw FormatError("operation descriptor needs a string 'op'");
    OperationDescriptor d;
    d.op = j["op"].get<std::string>();
    if (j.contains("context")) {
        if (!j["context"].is_string()) throw FormatError("operation 'context' must be a string");
        d.context = j["context"].get<std::string>();
    }
    if (j.contains("params")) {
        if (!j["params"].is_object()) throw FormatError("operation 'params' must be an object");
        d.params = j["params"];
    }
    for (const auto& [k, v] : j.items())
        if (k != "op" && k != "context" && k != "params") throw FormatError("operation descriptor: unknown key '" + k + "'");
    return d;
}

namespace {

std::string param(const OperationDescriptor& d, const char* key) {
    if (!d.params.contains(key) || !d.params[key].is_string())
        throw OperationError(d.op + " needs a string parameter '" + key + "'");
    return d.params[key].get<std::string>();
}

std::optional<std::string> optional_param(const OperationDescriptor& d, const char* key) {
    if (!d.params.contains(key)) return std::nullopt;
    return param(d, key);
}

std::vector<std::string> list_param(const OperationDescriptor& d, const char* key) {
    if (!d.params.contains(key) || !d.params[key].is_array())
        throw OperationError(d.op + " needs a list parameter '" + key + "'");
    std::vector<std::string> out;
    for (const auto& v : d.params[key]) {
        if (!v.is_string()) throw OperationError(d.op + ": '" + key + "' must list strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

std::string context(const OperationDescriptor& d) {
    if (d.context.empty()) throw OperationError(d.op + " needs a context element");
    return d.context;
}

template <typename T>
T parse_or_fail(const std::function<T()>& fn) {
    try {
        return fn();
    } catch (const FormatError& e) {
        throw OperationError(e.what());
    }
}

}  // namespace

Evolved apply_operation(const Architecture& a, const OperationDescriptor& d) {
    if (d.op == "movePort") return move_port(a, context(d), param(d, "target"));
    if (d.op == "splitComponent") return split_component(a, context(d), list_param(d, "ports"), optional_param(d, "name"));
    if (d.op == "mergeComponents") {
        std::vector<std::string> comps{context(d)};
        for (auto& c : list_param(d, "with")) comps.push_back(c);
        return merge_components(a, comps, optional_param(d, "name"));
    }
    if (d.op == "moveIn") return move_in(a, context(d), param(d, "parent"));
    if (d.op == "moveOut") return move_out(a, context(d));
    if (d.op == "delegatePort") return delegate_port(a, context(d));
    if (d.op == "create" || d.op == "delete") {
        const std::string element = param(d, "element");
        const bool create = d.op == "create";
        if (element == "component") {
            if (!create) return delete_component(a, context(d));
            auto kind = parse_or_fail<ComponentKind>(
                [&] { return parse_kind(optional_param(d, "kind").value_or("plain")); });
            return create_component(a, param(d, "name"), d.context, kind);
        }
        if (element == "port") {
            if (!create) return delete_port(a, context(d));
            auto dir = parse_or_fail<Direction>([&] { return parse_direction(param(d, "direction")); });
            return create_port(a, context(d), param(d, "name"), dir);
        }
        if (element == "connector") {
            if (!create) return delete_connector(a, context(d));
            return create_connector(a, context(d), param(d, "provided"), param(d, "required"));
        }
        if (element == "uses")
            return create ? create_uses(a, param(d, "from"), param(d, "to"))
                          : delete_uses(a, param(d, "from"), param(d, "to"));
        throw OperationError("unknown element kind '" + element + "' (component, port, connector, uses)");
    }
    throw OperationError("unknown operation '" + d.op +
                         "' (create, delete, movePort, splitComponent, mergeComponents, moveIn, moveOut, delegatePort)");
}

}  // namespace archevol
