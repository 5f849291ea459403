#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "archevol/architecture.hpp"
#include "archevol/error.hpp"
#include "archevol/graph.hpp"

namespace archevol {

/// Node type names of the COSA vocabulary.
namespace cosa {
inline constexpr const char* Component = "Component";
inline constexpr const char* Configuration = "Configuration";
inline constexpr const char* Port = "Port";
inline constexpr const char* ProvPort = "ProvPort";
inline constexpr const char* ReqPort = "ReqPort";
inline constexpr const char* Connector = "Connector";
inline constexpr const char* Role = "Role";
inline constexpr const char* ProvRole = "ProvRole";
inline constexpr const char* ReqRole = "ReqRole";
inline constexpr const char* Client = "Client";
inline constexpr const char* Server = "Server";

inline constexpr const char* hasPort = "hasPort";
inline constexpr const char* hasRole = "hasRole";
inline constexpr const char* configuration = "configuration";
inline constexpr const char* contains = "contains";
inline constexpr const char* attachment = "attachment";
inline constexpr const char* binding = "binding";
inline constexpr const char* uses = "uses";
inline constexpr const char* connector = "connector";
inline constexpr const char* connectsTo = "connectsTo";
}  // namespace cosa

/// The COSA metamodel: components, configurations, ports, connectors and
/// roles, with the derived `connector` (port to port) and `connectsTo`
/// (component to component) edges.
TypeGraph cosa_type_graph();

/// COSA plus the Client and Server component kinds, without any count
/// requirements. Architectures are encoded over this graph.
TypeGraph architecture_type_graph();

/// Thrown when a graph does not conform well enough to be decoded.
class ConformanceError : public Error {
public:
    ConformanceError(std::string message, ConformanceReport r)
        : Error(std::move(message)), report(std::move(r)) {}
    ConformanceReport report;
};

/// Encodes an architecture as a graph. Ids follow declaration order:
/// components depth-first with their ports and configuration, then
/// connectors with roles, then attachment, binding and uses edges.
Graph encode(const Architecture& a);

/// Inverse of encode. Throws ConformanceError for non-conformant graphs and
/// ArchitectureError when the decoded model breaks its invariants.
Architecture decode(const Graph& g, std::string name = {});

/// The four structural well-formedness constraints of the ADL.
std::vector<GraphConstraint> base_invariants();

/// Model invariants, typing against architecture_type_graph (no node counts)
/// and the base invariants, aggregated.
ConformanceReport validate_architecture(const Architecture& a);

using DependencyPairs = std::set<std::pair<std::string, std::string>>;

/// All (provided port, required port) pairs where the provided port
/// transitively depends on the required one through uses edges, connectors
/// (required end depends on provided end) and bindings (outer provided
/// depends on inner, inner required depends on outer).
DependencyPairs dependency_reachability(const Architecture& a);

}  // namespace archevol
