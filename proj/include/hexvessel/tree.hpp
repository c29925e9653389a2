#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hexvessel/branch.hpp"
#include "hexvessel/disc.hpp"
#include "hexvessel/hexmesh.hpp"
#include "hexvessel/junction.hpp"

namespace hexvessel {

struct JunctionEnd {
  std::string branch;
  bool head = true;  // head = t 0 end, tail = t 1 end

  bool operator==(const JunctionEnd&) const = default;
};

struct JunctionSpec {
  std::string id;
  std::vector<JunctionEnd> ends;
  std::optional<BlendMode> mode;
  std::optional<double> tangent_scale;
  std::optional<int> layers;

  bool operator==(const JunctionSpec&) const = default;
};

struct MeshOptions {
  DiscOptions disc;
  int cells_per_side = 10;
  int sections = 0;  // per branch; 0 selects a spacing of one mean diameter / 2
  bool arclength_spacing = false;
  double boundary_layer_alpha = 0.0;
  bool straighten = true;
  BlendMode mode = BlendMode::Hermite;
  double tangent_scale = 1.0;
  /// Diameter-proportional Hermite tangents; defaults on for trees with
  /// more than one junction.
  std::optional<bool> diameter_rule;
  double source_tangent_scale = 1.0;
  double kink_threshold = kPi / 4;

  bool operator==(const MeshOptions&) const = default;
};

struct BlockInfo {
  enum class Kind { Branch, Junction } kind;
  std::string id;
  std::size_t first_cell = 0;
  std::size_t num_cells = 0;
  double axis_kink = 0.0;  // junctions: largest butterfly kink across the X axis, radians
};

struct TreeMesh {
  HexMesh mesh;
  std::vector<BlockInfo> blocks;
  std::vector<std::string> warnings;
};

/// Builds the template, frames every branch (junction frames first, then
/// torsion-aligning rotations), meshes branches and junctions and welds them.
TreeMesh assemble_tree(const std::vector<BranchGeometry>& branches, const std::vector<JunctionSpec>& junctions,
                       const MeshOptions& options = {});

/// Disc template with the boundary layer applied per the options.
DiscTemplate make_template(const MeshOptions& options);

}  // namespace hexvessel
