#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hexvessel/disc.hpp"
#include "hexvessel/frames.hpp"
#include "hexvessel/hexmesh.hpp"
#include "hexvessel/sampling.hpp"
#include "hexvessel/spline.hpp"

namespace hexvessel {

/// Convex cross-section given at centerline parameter t, in the section
/// frame coordinates (normal, binormal). Counter-clockwise; need not be closed.
struct Contour {
  double t = 0.0;
  std::vector<Vec2> points;
};

struct BranchGeometry {
  std::string id;
  Curve3 centerline;
  std::optional<ScalarSpline> radius;
  std::vector<Contour> contours;  // used when radius is absent; sorted by t

  bool circular() const { return radius.has_value(); }

  /// Checks radius positivity, contour convexity and centerline regularity;
  /// messages name the branch.
  void validate() const;

  /// Contour at t, linearly interpolated between the given ones, resampled
  /// by arclength, recentred on its centroid and started on the +x axis.
  BoundaryCorrespondence contour_at(double t) const;

  /// Radius, or the equal-area radius of the contour.
  double mean_radius_at(double t) const;
};

struct LiftedSection {
  SectionMap section;
  Frame frame;
  Vec3 center = Vec3::Zero();
  double t = 0.0;

  Vec3 lift(const Vec2& x) const { return center + x.x() * frame.normal + x.y() * frame.binormal; }
};

struct CatalogueOptions {
  bool arclength_spacing = false;
  std::optional<Frame> initial_frame;
  /// Extra rotation about the tangent reached at the last section, ramped
  /// linearly in t from zero at the first section.
  double end_twist = 0.0;
  /// Uniform rotation applied to every frame.
  double base_twist = 0.0;
  double kink_threshold = kPi / 4;
  std::vector<std::string>* warnings = nullptr;
};

/// Frames along the branch only (no section solves).
FramedPath branch_frames(const BranchGeometry& geom, int sections, const CatalogueOptions& options = {});

std::vector<LiftedSection> catalogue_sections(const BranchGeometry& geom, int sections,
                                              const DiscTemplate& disc, const CatalogueOptions& options = {});

struct StructuredBranchMesh {
  HexMesh mesh;
  int points_per_ring = 0;
  int rings = 0;
  /// Vertex index of point k on ring r.
  int vertex(int ring, int k) const { return ring * points_per_ring + k; }
};

/// Connectivity of a swept block; depends only on the sampling and ring count.
std::vector<std::array<int, 8>> sweep_connectivity(const SectionSampling& sampling, int rings);

StructuredBranchMesh sweep_branch(std::span<const LiftedSection> sections, const SectionSampling& sampling);

struct RadiusTarget {
  double t = 0.0;
  double radius = 0.0;
};

/// Adds to r on [t_start, t_end] a correction that reaches the targets and
/// vanishes at both ends of the interval, then re-fits the whole profile on
/// the original knot vector with a second-derivative penalty. Local edits
/// need a radius spline with enough coefficients to resolve them.
BranchGeometry edit_radius(const BranchGeometry& geom, double t_start, double t_end,
                           std::span<const RadiusTarget> targets, double smoothing_weight = 1e-6);

}  // namespace hexvessel
