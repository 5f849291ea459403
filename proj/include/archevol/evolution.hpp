#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "archevol/architecture.hpp"
#include "archevol/formats.hpp"

namespace archevol {

/// Old port reference -> new reference, for every port that survives an
/// operation (references change when a port or its component moves).
using PortMap = std::map<std::string, std::string>;

struct Evolved {
    Architecture architecture;
    PortMap ports;
};

// Every operation below is a pure function. Component arguments accept a
// full path or a (globally unique) bare name; port arguments accept
// `component#port` with either form of component reference. Results are
// validated (model invariants, typing, base invariants); any precondition
// or validation failure raises OperationError.

/// Moves ports of one component to another, keeping every dependency:
/// a uses edge whose ends both move goes along; a uses edge u -> v split by
/// the move is bridged by Pro<k> on v's owner, Req<k> on u's owner, a
/// connector Bridge<k> (roles prov/req) and uses edges Pro<k> -> v and
/// u -> Req<k>. Attachments and bindings follow their port.
Evolved move_ports(const Architecture& a, const std::vector<std::string>& ports, const std::string& target);
Evolved move_port(const Architecture& a, const std::string& port, const std::string& target);

/// Creates a sibling (default name `<name>_2`) right after `comp` and moves
/// the named ports of `comp` there. The ports must be a nonempty proper
/// subset.
Evolved split_component(const Architecture& a, const std::string& comp, const std::vector<std::string>& ports,
                        const std::optional<std::string>& new_name = std::nullopt);

/// Merges sibling components into the first one's position under
/// `new_name` (default: the first one's name). Connectors that only link
/// the merged ports collapse into uses edges from their required to their
/// provided end; bridge ports that only relayed through such a connector
/// are contracted away (x -> Req ~> Pro -> y becomes x -> y).
Evolved merge_components(const Architecture& a, const std::vector<std::string>& comps,
                         const std::optional<std::string>& new_name = std::nullopt);

/// Moves `comp` into the configuration of its sibling `parent`. Connectors
/// from comp's ports to outside the parent are rerouted through new parent
/// ports (delegation); connectors to a delegating port of the parent itself
/// are reattached to the delegated inner port, and that parent port goes
/// away unless it is still linked. Rerouting through a parent port that
/// takes part in uses edges is refused.
Evolved move_in(const Architecture& a, const std::string& comp, const std::string& parent);

/// Moves a contained component out to sit right after its parent. Parent
/// ports that only delegated to comp are dissolved; connectors from comp to
/// its former siblings are rerouted through parent ports; an existing
/// delegating port is shared only when it takes part in no uses edge.
Evolved move_out(const Architecture& a, const std::string& comp);

/// Gives the owner's parent a same-direction port bound to `port`. A port
/// that is already delegated is left unchanged.
Evolved delegate_port(const Architecture& a, const std::string& port);

enum class ElementKind { Component, Port, Connector, Uses };

/// Creation of plain elements. A new connector gets roles prov and req
/// attached to the given provided and required ports.
Evolved create_component(const Architecture& a, const std::string& name, const std::string& parent = {},
                         ComponentKind kind = ComponentKind::Plain);
Evolved create_port(const Architecture& a, const std::string& comp, const std::string& name, Direction d);
Evolved create_connector(const Architecture& a, const std::string& name, const std::string& provided,
                         const std::string& required);
Evolved create_uses(const Architecture& a, const std::string& from, const std::string& to);

/// Deletion of unlinked components and ports, of connectors (with their
/// attachments) and of uses edges.
Evolved delete_component(const Architecture& a, const std::string& comp);
Evolved delete_port(const Architecture& a, const std::string& port);
Evolved delete_connector(const Architecture& a, const std::string& name);
Evolved delete_uses(const Architecture& a, const std::string& from, const std::string& to);

/// A serializable operation request: `op` is one of create, delete,
/// movePort, splitComponent, mergeComponents, moveIn, moveOut,
/// delegatePort; `context` names the element operated on.
struct OperationDescriptor {
    std::string op;
    std::string context;
    Json params = Json::object();
};

Json to_json(const OperationDescriptor& d);
OperationDescriptor operation_from_json(const Json& j);

/// Dispatches a descriptor; malformed descriptors raise OperationError.
Evolved apply_operation(const Architecture& a, const OperationDescriptor& d);

}  // namespace archevol
