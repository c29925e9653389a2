#pragma once

#include <array>
#include <memory>
#include <vector>

#include "hexvessel/disc.hpp"

namespace hexvessel {

/// Uniform (m+1) x (m+1) grid of parameter points in every patch, shared
/// points identified once. Evaluating a map on the grid is a sparse product
/// of a fixed weight matrix (CSR) with the control points.
struct SectionSampling {
  int cells_per_side = 0;
  MultiPatchNumbering numbering;             // (m+1) points per side
  std::vector<std::array<int, 4>> quads;     // counter-clockwise
  std::vector<std::array<double, 3>> params; // (patch, u, v) per point
  std::vector<bool> on_boundary;
  std::vector<int> row_offsets;
  std::vector<int> columns;
  std::vector<double> weights;

  /// `cells_per_side` must be even so the template axes are grid lines.
  static std::shared_ptr<const SectionSampling> build(const MultiPatchLayout& layout, int cells_per_side);

  int num_points() const { return numbering.num_unique; }
  int num_quads() const { return static_cast<int>(quads.size()); }

  std::vector<Vec2> sample(const MultiPatchSplineMap& map) const;
  std::vector<Vec3> sample3(const std::vector<Vec3>& control_values) const;
};

}  // namespace hexvessel
