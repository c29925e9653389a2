#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hexvessel/branch.hpp"
#include "hexvessel/tree.hpp"

namespace hexvessel {

struct GeometryInput {
  std::vector<BranchGeometry> branches;
  std::vector<JunctionSpec> junctions;
  MeshOptions options;
};

/// Parses and validates geometry JSON (docs/geometry.schema.json). Schema
/// violations raise SchemaError prefixed with the JSON pointer of the
/// offending value; invalid splines raise SplineError naming the branch.
GeometryInput parse_geometry(std::string_view text);
GeometryInput read_geometry(const std::filesystem::path& path);

/// Serializes with explicit knot vectors; parse_geometry(to_json_text(g))
/// reproduces g.
std::string to_json_text(const GeometryInput& geometry);
void write_geometry(const GeometryInput& geometry, const std::filesystem::path& path);

}  // namespace hexvessel
