#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "archevol/architecture.hpp"
#include "archevol/graph.hpp"
#include "archevol/rewrite.hpp"

namespace archevol {

using Json = nlohmann::json;

/// Version tags carried in the "format" key of every document.
namespace format {
inline constexpr const char* architecture = "archevol/architecture@1";
inline constexpr const char* rules = "archevol/rules@1";
inline constexpr const char* style = "archevol/style@1";
inline constexpr const char* decisions = "archevol/decisions@1";
}  // namespace format

/// Parses JSON text; throws FormatError with the parser's position.
Json parse_json(std::string_view text);
/// Canonical text: sorted keys, two-space indent, trailing newline.
std::string dump_canonical(const Json& j);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view text);

/// Throws FormatError unless `j` is an object whose "format" equals `expected`.
void require_format(const Json& j, std::string_view expected);

// Architecture documents --------------------------------------------------

Json to_json(const Architecture& a);
/// Structural parse only; model invariants are checked separately.
Architecture architecture_from_json(const Json& j);

std::string serialize(const Architecture& a);
Architecture parse_architecture(std::string_view text);
Architecture load_architecture(const std::filesystem::path& path);
void save_architecture(const Architecture& a, const std::filesystem::path& path);

// Graphs and rules ---------------------------------------------------------

Json value_to_json(const Value& v);
Value value_from_json(const Json& j);

Json to_json(const Graph& g);
Graph graph_from_json(const Json& j);

Json to_json(const Rule& r);
Rule rule_from_json(const Json& j);

Json rules_document(std::span<const Rule> rules);
std::vector<Rule> rules_from_document(const Json& j);
std::vector<Rule> load_rules(const std::filesystem::path& path);

// Reports ------------------------------------------------------------------

Json to_json(const ConformanceReport& r);

}  // namespace archevol
