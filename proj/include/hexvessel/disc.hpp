#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "hexvessel/spline.hpp"
#include "hexvessel/vec.hpp"

namespace hexvessel {

// Five-patch covering of the disc. Patch 0 is the central square (u along +x,
// v along +y). Patches 1..4 surround it, centred on the azimuths 0, pi/2, pi
// and 3pi/2; their u runs radially outward (u = 0 on the central square,
// u = 1 on the boundary) and v runs counter-clockwise. All patches share one
// clamped uniform knot vector in each direction and are C0-coupled through
// shared control points.

inline constexpr int kNumPatches = 5;

enum class PatchEdge { UMin, UMax, VMin, VMax };

struct InterfacePair {
  int patch_a;
  PatchEdge edge_a;
  int patch_b;
  PatchEdge edge_b;
};

/// Index bookkeeping for a five-patch structured grid with `n` points per
/// patch side. Shared points on patch interfaces receive one global index.
struct MultiPatchNumbering {
  int points_per_side = 0;
  int num_unique = 0;
  std::vector<int> index;  // [patch * n * n + i * n + j]

  static MultiPatchNumbering build(int points_per_side);

  int at(int patch, int i, int j) const {
    return index[(patch * points_per_side + i) * points_per_side + j];
  }
};

/// Immutable description of the spline space shared by a template and every
/// section map built from it.
struct MultiPatchLayout {
  int degree = 3;
  int points_per_side = 6;
  KnotVector knots;
  MultiPatchNumbering numbering;
  std::vector<InterfacePair> interfaces;
  std::vector<int> boundary_dofs;  // counter-clockwise from azimuth -pi/4
  std::vector<int> interior_dofs;
  std::vector<int> interior_position;  // dof -> row in interior system, -1 on the boundary
  std::vector<int> boundary_position;  // dof -> index in boundary_dofs, -1 inside

  static std::shared_ptr<const MultiPatchLayout> make(int degree, int points_per_side);

  int num_dofs() const { return numbering.num_unique; }
  int dof(int patch, int i, int j) const { return numbering.at(patch, i, j); }
  bool is_boundary(int dof) const { return interior_position[dof] < 0; }
};

/// Basis values of one patch at (u, v): the (degree+1)^2 active functions
/// with their global indices and first derivatives.
struct PatchBasis {
  std::vector<int> dofs;
  std::vector<double> value, du, dv;
};

PatchBasis eval_patch_basis(const MultiPatchLayout& layout, int patch, double u, double v);

/// Planar five-patch spline map (reference disc, template, or a solved
/// cross-section).
class MultiPatchSplineMap {
public:
  MultiPatchSplineMap() = default;
  MultiPatchSplineMap(std::shared_ptr<const MultiPatchLayout> layout, std::vector<Vec2> control_points);

  const MultiPatchLayout& layout() const { return *layout_; }
  const std::shared_ptr<const MultiPatchLayout>& layout_ptr() const { return layout_; }
  const std::vector<Vec2>& control_points() const { return control_points_; }
  const Vec2& control_point(int patch, int i, int j) const {
    return control_points_[layout_->dof(patch, i, j)];
  }

  Vec2 eval(int patch, double u, double v) const;
  Eigen::Matrix2d jacobian(int patch, double u, double v) const;

  /// Smallest Jacobian determinant over a per-knot-span grid of
  /// `per_span` x `per_span` points in every patch.
  double min_jacobian(int per_span = 8) const;

  /// Point on the boundary at azimuth parameter theta in [0, 2pi), where the
  /// parameter runs linearly along each outer patch boundary.
  Vec2 boundary_point(double theta) const;

  std::vector<Vec2> boundary_control_points() const;

private:
  std::shared_ptr<const MultiPatchLayout> layout_;
  std::vector<Vec2> control_points_;
};

using SectionMap = MultiPatchSplineMap;

/// Boundary data for a harmonic section: counter-clockwise samples of a
/// convex contour starting at the +x anchor, closed (first == last).
class BoundaryCorrespondence {
public:
  static BoundaryCorrespondence from_samples(std::vector<Vec2> closed_samples);
  /// Closed spline curve; sampled densely and treated like point samples.
  static BoundaryCorrespondence from_curve(const Curve2& closed_curve, int samples = 512);
  /// Canonical unit-circle samples used to build the disc template.
  static BoundaryCorrespondence unit_circle(int samples = kCanonicalSamples);

  static constexpr int kCanonicalSamples = 256;

  const std::vector<Vec2>& samples() const { return samples_; }

  /// Arc-length-proportional azimuth of each sample in [0, 2pi].
  const std::vector<double>& azimuths() const { return azimuths_; }

  /// Throws ConvexityError naming the offending vertex.
  void require_convex() const;
  bool is_convex() const;

  /// Area centroid of the closed polygon.
  Vec2 centroid() const;

  BoundaryCorrespondence transformed(const Eigen::Matrix2d& linear, const Vec2& offset) const;

private:
  explicit BoundaryCorrespondence(std::vector<Vec2> samples);
  BoundaryCorrespondence(std::vector<Vec2> samples, std::vector<double> azimuths);
  std::vector<Vec2> samples_;
  std::vector<double> azimuths_;
};

struct DiscOptions {
  int degree = 3;
  int points_per_side = 6;
  /// Relax interior control points by a harmonic solve in the patch
  /// parameter metric after the Coons construction.
  bool smooth = true;
  /// Radial length of the outer patches in the parameter metric, relative
  /// to the side of the central square.
  double radial_aspect = 0.75;
  /// Half-width of the central square of the initial Coons net.
  double core_half_width = 0.45;

  bool operator==(const DiscOptions&) const = default;
};

struct DiscOperators;

/// Unit-disc template with cached factorizations of the interior Laplace
/// operator (for harmonic sections) and of the mass matrix (for projections).
class DiscTemplate {
public:
  const MultiPatchSplineMap& map() const { return map_; }
  const MultiPatchLayout& layout() const { return map_.layout(); }
  const DiscOptions& options() const { return options_; }
  std::optional<double> boundary_layer_alpha() const { return alpha_; }
  bool straightened() const { return straightened_; }

  /// Solves for interior control values given boundary values (one column
  /// per coordinate). Uses the cached factorization.
  Eigen::MatrixXd solve_interior(const Eigen::MatrixXd& boundary_values) const;

  /// L2 projection of a field sampled through `field(point)` onto the
  /// template space; returns one row of coefficients per dof.
  Eigen::MatrixXd project(const std::function<Eigen::RowVectorXd(const Vec2&)>& field, int components) const;

  /// Least-squares fit of boundary data onto the boundary dofs (rows ordered
  /// like layout().boundary_dofs).
  Eigen::MatrixXd fit_boundary(const BoundaryCorrespondence& data) const;

  /// Address of the shared operator block; equal across copies of one template.
  const void* operator_identity() const { return ops_.get(); }

private:
  friend DiscTemplate build_disc_template(const DiscOptions&);
  friend DiscTemplate apply_boundary_layer(const DiscTemplate&, double, bool);
  friend DiscTemplate rebuild_operators(const DiscTemplate&);

  MultiPatchSplineMap map_;
  DiscOptions options_;
  std::optional<double> alpha_;
  bool straightened_ = false;
  std::shared_ptr<const DiscOperators> ops_;
};

DiscTemplate build_disc_template(const DiscOptions& options = {});

/// Convenience overload mirroring the two sizing parameters.
DiscTemplate build_disc_template(int degree, int points_per_side);

/// Radial accumulation profile r + alpha (1 - r) r.
double boundary_layer_profile(double r, double alpha);

/// Moves interior control points radially by the accumulation profile and,
/// when `straighten` is set and alpha > 0, projects the outer patches'
/// radial control polygons onto straight segments. Operators are rebuilt.
DiscTemplate apply_boundary_layer(const DiscTemplate& disc, double alpha, bool straighten = true);

/// Fresh template with operators re-assembled from scratch (testing aid).
DiscTemplate rebuild_operators(const DiscTemplate& disc);

/// Circular section of radius R: every control point scaled by R.
SectionMap scale_disc(const DiscTemplate& disc, double radius);

/// Harmonic map from the template onto the convex region bounded by F.
SectionMap harmonic_section(const DiscTemplate& disc, const BoundaryCorrespondence& boundary);

/// Parameter (patch, u, v) of the anchor at azimuth k*pi/2, k = 0..3.
std::array<double, 3> anchor_parameter(int k);

}  // namespace hexvessel
