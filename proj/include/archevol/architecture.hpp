#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace archevol {

enum class Direction { Provided, Required };
enum class ComponentKind { Plain, Client, Server };

std::string to_string(Direction d);
std::string to_string(ComponentKind k);
Direction parse_direction(std::string_view s);
ComponentKind parse_kind(std::string_view s);

struct Port {
    std::string name;
    Direction direction = Direction::Provided;
    bool operator==(const Port&) const = default;
};

struct Component {
    std::string name;
    ComponentKind kind = ComponentKind::Plain;
    std::vector<Port> ports;
    /// Children of a composite component; nullopt when it has no configuration.
    std::optional<std::vector<Component>> configuration;

    const Port* find_port(std::string_view port) const;
    Port* find_port(std::string_view port);
    bool operator==(const Component&) const = default;
};

struct Role {
    std::string name;
    Direction direction = Direction::Provided;
    bool operator==(const Role&) const = default;
};

struct Connector {
    std::string name;
    std::vector<Role> roles;
    const Role* find_role(std::string_view role) const;
    bool operator==(const Connector&) const = default;
};

/// Port references use `Component[/Child...]#Port`; role references use
/// `Connector#Role`.
struct Attachment {
    std::string port;
    std::string role;
    bool operator==(const Attachment&) const = default;
};

struct Binding {
    std::string outer;
    std::string inner;
    bool operator==(const Binding&) const = default;
};

struct Uses {
    std::string from;
    std::string to;
    bool operator==(const Uses&) const = default;
};

struct Architecture {
    std::string name;
    std::vector<Component> components;
    std::vector<Connector> connectors;
    std::vector<Attachment> attachments;
    std::vector<Binding> bindings;
    std::vector<Uses> uses;

    bool operator==(const Architecture&) const = default;
};

// ---------------------------------------------------------------------------
// Reference helpers

struct PortRef {
    std::string component;  // slash-separated path
    std::string port;
};

PortRef split_port_ref(std::string_view ref);
std::string port_ref(std::string_view component_path, std::string_view port);
/// Final path segment.
std::string leaf_name(std::string_view component_path);
/// Path of the containing component, or "" for top-level components.
std::string parent_path(std::string_view component_path);
std::string child_path(std::string_view parent, std::string_view child);

const Component* find_component(const Architecture& a, std::string_view path);
Component* find_component(Architecture& a, std::string_view path);
/// Resolves either a full path or a bare (globally unique) component name.
std::optional<std::string> resolve_component(const Architecture& a, std::string_view name_or_path);
const Port* find_port(const Architecture& a, std::string_view ref);
const Connector* find_connector(const Architecture& a, std::string_view name);
const Role* find_role(const Architecture& a, std::string_view ref);

/// Every component path, parents before children, in declaration order.
std::vector<std::string> component_paths(const Architecture& a);
/// Every port reference in declaration order.
std::vector<std::string> port_refs(const Architecture& a);

/// The sibling list holding the component at `path`.
std::vector<Component>* siblings_of(Architecture& a, std::string_view path);

/// Model-level invariant check: reference resolution, name uniqueness,
/// attachment/binding/uses well-formedness, acyclic uses. Empty when valid.
std::vector<std::string> model_problems(const Architecture& a);
/// Throws ArchitectureError when model_problems is nonempty.
void require_valid_model(const Architecture& a);

}  // namespace archevol
