#include "archevol/architecture.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "archevol/error.hpp"

namespace archevol {

std::string to_string(Direction d) { return d == Direction::Provided ? "provided" : "required"; }

std::string to_string(ComponentKind k) {
    switch (k) {
        case ComponentKind::Client: return "client";
        case ComponentKind::Server: return "server";
        default: return "plain";
    }
}

Direction parse_direction(std::string_view s) {
    if (s == "provided") return Direction::Provided;
    if (s == "required") return Direction::Required;
    throw FormatError("unknown direction '" + std::string(s) + "'");
}

ComponentKind parse_kind(std::string_view s) {
    if (s == "plain") return ComponentKind::Plain;
    if (s == "client") return ComponentKind::Client;
    if (s == "server") return ComponentKind::Server;
    throw FormatError("unknown component kind '" + std::string(s) + "'");
}

const Port* Component::find_port(std::string_view port) const {
    for (const auto& p : ports)
        if (p.name == port) return &p;
    return nullptr;
}

Port* Component::find_port(std::string_view port) {
    for (auto& p : ports)
        if (p.name == port) return &p;
    return nullptr;
}

const Role* Connector::find_role(std::string_view role) const {
    for (const auto& r : roles)
        if (r.name == role) return &r;
    return nullptr;
}

// ---------------------------------------------------------------------------

PortRef split_port_ref(std::string_view ref) {
    auto hash = ref.rfind('#');
    if (hash == std::string_view::npos) return {std::string(ref), {}};
    return {std::string(ref.substr(0, hash)), std::string(ref.substr(hash + 1))};
}

std::string port_ref(std::string_view component_path, std::string_view port) {
    return std::string(component_path) + "#" + std::string(port);
}

std::string leaf_name(std::string_view path) {
    auto slash = path.rfind('/');
    return std::string(slash == std::string_view::npos ? path : path.substr(slash + 1));
}

std::string parent_path(std::string_view path) {
    auto slash = path.rfind('/');
    return slash == std::string_view::npos ? std::string{} : std::string(path.substr(0, slash));
}

std::string child_path(std::string_view parent, std::string_view child) {
    if (parent.empty()) return std::string(child);
    return std::string(parent) + "/" + std::string(child);
}

namespace {

template <typename Arch, typename Comp>
Comp* find_in(Arch& a, std::string_view path) {
    auto* list = &a.components;
    Comp* found = nullptr;
    std::size_t pos = 0;
    while (pos <= path.size()) {
        auto slash = path.find('/', pos);
        std::string_view seg = path.substr(pos, slash == std::string_view::npos ? std::string_view::npos
                                                                                 : slash - pos);
        found = nullptr;
        if (!list) return nullptr;
        for (auto& c : *list)
            if (c.name == seg) found = &c;
        if (!found) return nullptr;
        if (slash == std::string_view::npos) break;
        list = found->configuration ? &*found->configuration : nullptr;
        pos = slash + 1;
    }
    return found;
}

void walk(const std::vector<Component>& list, const std::string& prefix,
          const std::function<void(const std::string&, const Component&)>& fn) {
    for (const auto& c : list) {
        std::string path = child_path(prefix, c.name);
        fn(path, c);
        if (c.configuration) walk(*c.configuration, path, fn);
    }
}

}  // namespace

const Component* find_component(const Architecture& a, std::string_view path) {
    if (path.empty()) return nullptr;
    return find_in<const Architecture, const Component>(a, path);
}

Component* find_component(Architecture& a, std::string_view path) {
    if (path.empty()) return nullptr;
    return find_in<Architecture, Component>(a, path);
}

std::optional<std::string> resolve_component(const Architecture& a, std::string_view name_or_path) {
    if (find_component(a, name_or_path)) return std::string(name_or_path);
    std::optional<std::string> hit;
    for (const auto& path : component_paths(a)) {
        if (leaf_name(path) == name_or_path) {
            if (hit) return std::nullopt;
            hit = path;
        }
    }
    return hit;
}

const Port* find_port(const Architecture& a, std::string_view ref) {
    PortRef r = split_port_ref(ref);
    const Component* c = find_component(a, r.component);
    return c ? c->find_port(r.port) : nullptr;
}

const Connector* find_connector(const Architecture& a, std::string_view name) {
    for (const auto& c : a.connectors)
        if (c.name == name) return &c;
    return nullptr;
}

const Role* find_role(const Architecture& a, std::string_view ref) {
    PortRef r = split_port_ref(ref);
    const Connector* c = find_connector(a, r.component);
    return c ? c->find_role(r.port) : nullptr;
}

std::vector<std::string> component_paths(const Architecture& a) {
    std::vector<std::string> out;
    walk(a.components, "", [&](const std::string& p, const Component&) { out.push_back(p); });
    return out;
}

std::vector<std::string> port_refs(const Architecture& a) {
    std::vector<std::string> out;
    walk(a.components, "", [&](const std::string& p, const Component& c) {
        for (const auto& port : c.ports) out.push_back(port_ref(p, port.name));
    });
    return out;
}

std::vector<Component>* siblings_of(Architecture& a, std::string_view path) {
    std::string parent = parent_path(path);
    if (parent.empty()) return &a.components;
    Component* p = find_component(a, parent);
    if (!p || !p->configuration) return nullptr;
    return &*p->configuration;
}

// ---------------------------------------------------------------------------

std::vector<std::string> model_problems(const Architecture& a) {
    std::vector<std::string> out;
    auto bad_name = [](const std::string& n) {
        return n.empty() || n.find_first_of("/#") != std::string::npos;
    };

    std::set<std::string> names;
    walk(a.components, "", [&](const std::string& path, const Component& c) {
        if (bad_name(c.name)) out.push_back("component '" + path + "' has an invalid name");
        if (!names.insert(c.name).second)
            out.push_back("component name '" + c.name + "' is not unique");
        std::set<std::string> ports;
        for (const auto& p : c.ports) {
            if (bad_name(p.name)) out.push_back("port '" + port_ref(path, p.name) + "' has an invalid name");
            if (!ports.insert(p.name).second)
                out.push_back("port name '" + p.name + "' repeated on " + path);
        }
    });

    std::set<std::string> conns;
    for (const auto& c : a.connectors) {
        if (bad_name(c.name)) out.push_back("connector '" + c.name + "' has an invalid name");
        if (!conns.insert(c.name).second) out.push_back("connector name '" + c.name + "' is not unique");
        std::set<std::string> roles;
        for (const auto& r : c.roles)
            if (!roles.insert(r.name).second)
                out.push_back("role name '" + r.name + "' repeated on connector " + c.name);
    }

    std::set<std::string> bound_roles;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& at : a.attachments) {
        const Port* p = find_port(a, at.port);
        const Role* r = find_role(a, at.role);
        if (!p) out.push_back("attachment references unknown port " + at.port);
        if (!r) out.push_back("attachment references unknown role " + at.role);
        if (!p || !r) continue;
        if (p->direction != r->direction)
            out.push_back("attachment " + at.port + " -> " + at.role + " joins a " +
                          to_string(p->direction) + " port to a " + to_string(r->direction) + " role");
        if (!bound_roles.insert(at.role).second)
            out.push_back("role " + at.role + " has more than one attachment");
        if (!seen.emplace(at.port, at.role).second)
            out.push_back("duplicate attachment " + at.port + " -> " + at.role);
    }

    std::set<std::string> inner_bound;
    seen.clear();
    for (const auto& b : a.bindings) {
        const Port* o = find_port(a, b.outer);
        const Port* i = find_port(a, b.inner);
        if (!o) out.push_back("binding references unknown port " + b.outer);
        if (!i) out.push_back("binding references unknown port " + b.inner);
        if (!o || !i) continue;
        // Direction and containment level of a binding are invariant (ii)
        // of the graph semantics, reported by validate_architecture; uses
        // edges between components likewise fall under invariant (iii).
        if (!inner_bound.insert(b.inner).second)
            out.push_back("port " + b.inner + " is bound more than once");
        if (!seen.emplace(b.outer, b.inner).second)
            out.push_back("duplicate binding " + b.outer + " -> " + b.inner);
    }

    seen.clear();
    std::map<std::string, std::vector<std::string>> succ;
    for (const auto& u : a.uses) {
        const Port* f = find_port(a, u.from);
        const Port* t = find_port(a, u.to);
        if (!f) out.push_back("uses references unknown port " + u.from);
        if (!t) out.push_back("uses references unknown port " + u.to);
        if (!f || !t) continue;
        if (u.from == u.to) out.push_back("port " + u.from + " uses itself");
        if (!seen.emplace(u.from, u.to).second)
            out.push_back("duplicate uses " + u.from + " -> " + u.to);
        succ[u.from].push_back(u.to);
    }
    // Cycle detection over uses (colours: 0 new, 1 active, 2 done).
    std::map<std::string, int> colour;
    std::function<bool(const std::string&)> cyclic = [&](const std::string& n) {
        colour[n] = 1;
        for (const auto& m : succ[n]) {
            if (colour[m] == 1) return true;
            if (colour[m] == 0 && cyclic(m)) return true;
        }
        colour[n] = 2;
        return false;
    };
    for (const auto& [n, _] : succ) {
        if (colour[n] == 0 && cyclic(n)) {
            out.push_back("uses dependencies form a cycle through " + n);
            break;
        }
    }
    return out;
}

void require_valid_model(const Architecture& a) {
    auto problems = model_problems(a);
    if (!problems.empty()) throw ArchitectureError(std::move(problems));
}

}  // namespace archevol
