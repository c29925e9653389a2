#pragma once

#include <span>
#include <string>
#include <vector>

#include "hexvessel/spline.hpp"
#include "hexvessel/vec.hpp"

namespace hexvessel {

/// Right-handed orthonormal frame: tangent x normal = binormal.
struct Frame {
  Vec3 tangent = Vec3::UnitZ();
  Vec3 normal = Vec3::UnitX();
  Vec3 binormal = Vec3::UnitY();

  /// Builds a frame from a tangent and an approximate normal (Gram-Schmidt).
  static Frame from_tangent_normal(const Vec3& tangent, const Vec3& normal_hint);

  /// Deterministic frame for a tangent: the normal is the coordinate axis
  /// least aligned with the tangent, orthogonalized.
  static Frame default_for(const Vec3& tangent);

  /// Rotates (normal, binormal) by `angle` about the tangent.
  Frame rotated(double angle) const;

  /// Rotation matrix with columns (normal, binormal, tangent).
  Mat3 matrix() const;

  double orthonormality_error() const;
};

/// Angle of the rotation that takes frame `a` to frame `b`.
double rotation_angle_between(const Frame& a, const Frame& b);

/// Discrete rotation-minimizing frames by the double-reflection rule.
/// tangents[0] must match initial.tangent to within 1e-8.
std::vector<Frame> rotation_minimizing_frames(std::span<const Vec3> centers,
                                              std::span<const Vec3> tangents,
                                              const Frame& initial);

/// In-plane angle theta such that frame.rotated(theta) equals target. Both
/// frames must share their tangent.
double align_rotation(const Frame& frame, const Frame& target);

struct FramedPath {
  std::vector<double> abscissae;
  std::vector<Vec3> centers;
  std::vector<Frame> frames;
  std::vector<std::string> warnings;
};

std::vector<double> uniform_abscissae(int count);

/// Abscissae whose images are equally spaced in arclength.
std::vector<double> arclength_abscissae(const Curve3& centerline, int count);

/// Unit tangent of a centerline; throws DegeneratePathError if s'(t) vanishes.
Vec3 unit_tangent(const Curve3& centerline, double t);

/// Frames along a centerline at the given abscissae. Consecutive frames that
/// rotate by more than `kink_threshold` trigger a warning and the interval is
/// propagated on a locally doubled sampling before reporting the frames.
FramedPath frame_path(const Curve3& centerline, std::span<const double> abscissae,
                      const Frame& initial, double kink_threshold = kPi / 4);

FramedPath frame_path(const Curve3& centerline, std::span<const double> abscissae,
                      double kink_threshold = kPi / 4);

}  // namespace hexvessel
