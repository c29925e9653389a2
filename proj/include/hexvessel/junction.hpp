#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hexvessel/disc.hpp"
#include "hexvessel/frames.hpp"
#include "hexvessel/hexmesh.hpp"
#include "hexvessel/sampling.hpp"
#include "hexvessel/spline.hpp"

namespace hexvessel {

enum class EndRole { Inlet, Outlet };

/// A branch end meeting a junction. The section lives in the branch's flow
/// frame coordinates; flow_tangent points downstream.
struct EndSeed {
  Vec3 center = Vec3::Zero();
  Vec3 flow_tangent = Vec3::UnitZ();
  EndRole role = EndRole::Outlet;
  SectionMap section;
};

struct EndSection {
  int input_index = 0;  // 0 for the inlet, 1 + position in the outlet list otherwise
  EndRole role = EndRole::Outlet;
  Vec3 center = Vec3::Zero();
  Frame flow_frame;    // lifts the section: x3 = center + x n + y b
  Frame inward_frame;  // tangent into the junction, same normal
  SectionMap section;

  /// +1 for the inlet, -1 for outlets: inward y = sign * section y.
  double sign() const { return role == EndRole::Inlet ? 1.0 : -1.0; }
  Vec3 lift(const Vec2& x) const { return center + x.x() * flow_frame.normal + x.y() * flow_frame.binormal; }

  // Boundary anchors. Top and bottom lie along +/- the junction axis,
  // right and left along +/- the inward binormal.
  Vec3 top() const;
  Vec3 bottom() const;
  Vec3 right() const;
  Vec3 left() const;
};

/// Frames for the sections of one junction, returned counter-clockwise about
/// the junction axis with the inlet first. `reference_normal` resolves the
/// configurations where neither tangents nor centers fix an axis.
std::vector<EndSection> orient_sections(const EndSeed& inlet, std::span<const EndSeed> outlets,
                                        const std::optional<Vec3>& reference_normal = std::nullopt);

/// Junction axis used by orient_sections (unit, orthogonal to the inlet tangent).
Vec3 junction_axis(const EndSeed& inlet, std::span<const EndSeed> outlets,
                   const std::optional<Vec3>& reference_normal = std::nullopt);

struct SkeletonOptions {
  double tangent_scale = 1.0;
  /// Replace tangent_scale per pair by mean diameter / distance, clamped to [0.25, 2].
  bool diameter_rule = false;
};

/// Hermite scaffold. Entry k of every family joins section k to section k+1
/// (cyclically).
struct JunctionSkeleton {
  std::vector<EndSection> sections;
  std::vector<HermiteCurve> lateral, top, center, bottom;
  std::vector<Vec3> lateral_points;  // lateral[k](0.5): saddle and apex points
  Vec3 x_top = Vec3::Zero(), x_center = Vec3::Zero(), x_bottom = Vec3::Zero();

  int num_sections() const { return static_cast<int>(sections.size()); }
  int num_curves() const {
    return static_cast<int>(lateral.size() + top.size() + center.size() + bottom.size());
  }
};

JunctionSkeleton build_skeleton(std::vector<EndSection> sections, const SkeletonOptions& options = {});

/// Ellipse quadrant origin + a * axis_a + b * axis_b over the quarter disc a, b >= 0.
struct EllipseQuadrant {
  Vec3 origin = Vec3::Zero();
  Vec3 axis_a = Vec3::Zero();  // towards X_top (upper) or X_bottom (lower)
  Vec3 axis_b = Vec3::Zero();  // towards the lateral point
  int lateral_index = 0;
  bool upper = true;

  Vec3 eval(double a, double b) const { return origin + a * axis_a + b * axis_b; }
};

struct ButterflyStructure {
  Vec3 x_top = Vec3::Zero(), x_center = Vec3::Zero(), x_bottom = Vec3::Zero();
  std::vector<Vec3> lateral_points;
  std::vector<EllipseQuadrant> quadrants;  // upper and lower quadrant per lateral point

  int num_quadrants() const { return static_cast<int>(quadrants.size()); }

  /// Point of the half facing section k at inward disc coordinates w.
  Vec3 half_point(int k, const Vec2& w) const;
};

ButterflyStructure build_butterfly(const JunctionSkeleton& skeleton);

enum class BlendMode { Linear, Hermite };

struct VolumetricBlend {
  std::vector<Vec3> source;          // t = 0 slice (sampled section)
  std::vector<Vec3> target;          // t = 1 slice (sampled butterfly half)
  Vec3 source_tangent = Vec3::Zero();
  std::vector<Vec3> target_tangent;  // sampled projected tangent field
  BlendMode mode = BlendMode::Hermite;

  Vec3 eval(std::size_t point, double t) const;
};

/// Hex block of `layers` slabs; `flip` reverses the quad orientation.
HexMesh blend_volume(const VolumetricBlend& blend, const SectionSampling& sampling, int layers, bool flip = false);

struct JunctionOptions {
  SkeletonOptions skeleton;
  BlendMode mode = BlendMode::Hermite;
  int layers = 0;  // 0 selects max(2, round(distance / cell_height))
  double cell_height = 0.0;  // 0 falls back to the section cell size
  double source_tangent_scale = 1.0;
  double target_tangent_scale = 1.0;
};

struct JunctionMesh {
  HexMesh mesh;
  JunctionSkeleton skeleton;
  ButterflyStructure butterfly;
  std::vector<int> layers;  // per sorted section
  std::vector<VolumetricBlend> blends;
  std::vector<double> axis_kinks;  // per sorted section, see axis_kinks()
};

/// Tangent discontinuity of each butterfly half across the X axis: pi minus
/// the dihedral angle between the two petals the half spans. Zero for a
/// flat half; n-furcations are not C1 there.
std::vector<double> axis_kinks(const ButterflyStructure& butterfly);

/// Tangent field of the blend towards section k, projected onto the
/// template space and sampled.
std::vector<Vec3> butterfly_tangent_field(const JunctionSkeleton& skeleton, int k, const DiscTemplate& disc,
                                          const SectionSampling& sampling);

JunctionMesh mesh_junction(const std::vector<EndSection>& sections, const DiscTemplate& disc,
                           const SectionSampling& sampling, const JunctionOptions& options = {});

}  // namespace hexvessel
