#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "archevol/architecture.hpp"
#include "archevol/formats.hpp"
#include "archevol/graph.hpp"

namespace archevol {

/// An architectural style: node types added to (or counted within) the COSA
/// type graph, plus graph constraints over the encoded architecture.
struct Style {
    std::string name;
    /// New types must name a supertype from the COSA vocabulary. An entry
    /// naming an existing type without a supertype only sets its count.
    std::vector<NodeType> node_types;
    std::vector<GraphConstraint> constraints;
};

/// Client and Server refine Component; exactly one Server and at least one
/// Client; CS-1 every Client is connected with the Server; CS-2 every plain
/// Component sits inside some configuration; CS-3 neither Client nor Server
/// is nested inside another component.
Style client_server_style();

std::vector<Style> builtin_styles();
std::optional<Style> find_builtin_style(const std::string& name);

/// COSA extended by the style; throws DefinitionError for a malformed style.
TypeGraph style_type_graph(const Style& s);

/// Model invariants, typing with node counts, base invariants and the style
/// constraints, aggregated. Architecture elements whose kind the style does
/// not define raise UnknownTypeError.
ConformanceReport check_style(const Architecture& a, const Style& s);

Json to_json(const Style& s);
Style style_from_json(const Json& j);
Style load_style(const std::filesystem::path& path);

}  // namespace archevol
