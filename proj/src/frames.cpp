#include "hexvessel/frames.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hexvessel/error.hpp"

namespace hexvessel {

Frame Frame::from_tangent_normal(const Vec3& tangent, const Vec3& normal_hint) {
  Frame f;
  f.tangent = tangent.normalized();
  Vec3 n = normal_hint - normal_hint.dot(f.tangent) * f.tangent;
  if (n.norm() < 1e-12) throw DegeneratePathError("frame: normal hint parallel to tangent");
  f.normal = n.normalized();
  f.binormal = f.tangent.cross(f.normal).normalized();
  return f;
}

Frame Frame::default_for(const Vec3& tangent) {
  const Vec3 t = tangent.normalized();
  Eigen::Index axis = 0;
  t.cwiseAbs().minCoeff(&axis);
  return from_tangent_normal(t, Vec3::Unit(axis));
}

Frame Frame::rotated(double angle) const {
  const double c = std::cos(angle), s = std::sin(angle);
  Frame f;
  f.tangent = tangent;
  f.normal = c * normal + s * binormal;
  f.binormal = -s * normal + c * binormal;
  return f;
}

Mat3 Frame::matrix() const {
  Mat3 m;
  m.col(0) = normal;
  m.col(1) = binormal;
  m.col(2) = tangent;
  return m;
}

double Frame::orthonormality_error() const {
  double e = 0.0;
  e = std::max(e, std::abs(tangent.norm() - 1.0));
  e = std::max(e, std::abs(normal.norm() - 1.0));
  e = std::max(e, std::abs(binormal.norm() - 1.0));
  e = std::max(e, std::abs(tangent.dot(normal)));
  e = std::max(e, std::abs(tangent.dot(binormal)));
  e = std::max(e, std::abs(normal.dot(binormal)));
  e = std::max(e, (tangent.cross(normal) - binormal).norm());
  return e;
}

double rotation_angle_between(const Frame& a, const Frame& b) {
  const Mat3 r = b.matrix() * a.matrix().transpose();
  const double c = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
  return std::acos(c);
}

std::vector<Frame> rotation_minimizing_frames(std::span<const Vec3> centers,
                                              std::span<const Vec3> tangents,
                                              const Frame& initial) {
  if (centers.size() < 2) throw DegeneratePathError("rmf: need at least two points");
  if (centers.size() != tangents.size()) throw ParameterError("rmf: center/tangent count mismatch");
  if ((initial.tangent - tangents[0]).norm() > 1e-8)
    throw ParameterError("rmf: initial frame tangent does not match the first tangent");

  std::vector<Frame> frames;
  frames.reserve(centers.size());
  frames.push_back(initial);
  for (std::size_t i = 0; i + 1 < centers.size(); ++i) {
    const Frame f = frames.back();
    const Vec3 v1 = centers[i + 1] - centers[i];
    const double c1 = v1.squaredNorm();
    if (c1 < 1e-24) {
      std::ostringstream os;
      os << "rmf: zero-length segment between points " << i << " and " << i + 1;
      throw DegeneratePathError(os.str());
    }
    const Vec3 t_next = tangents[i + 1].normalized();
    // Straight segment: the frame is carried unchanged.
    if (t_next == f.tangent && v1.cross(t_next).squaredNorm() <= 1e-24 * c1) {
      frames.push_back(f);
      continue;
    }
    const Vec3 r_l = f.normal - (2.0 / c1) * v1.dot(f.normal) * v1;
    const Vec3 t_l = f.tangent - (2.0 / c1) * v1.dot(f.tangent) * v1;
    const Vec3 v2 = t_next - t_l;
    const double c2 = v2.squaredNorm();
    const Vec3 r_next = c2 > 1e-30 ? Vec3(r_l - (2.0 / c2) * v2.dot(r_l) * v2) : r_l;
    frames.push_back(Frame::from_tangent_normal(t_next, r_next));
  }
  return frames;
}

double align_rotation(const Frame& frame, const Frame& target) {
  if (frame.tangent.dot(target.tangent) < 1.0 - 1e-6)
    throw MisalignedTangentError("align_rotation: frames do not share a tangent");
  return std::atan2(target.normal.dot(frame.binormal), target.normal.dot(frame.normal));
}

std::vector<double> uniform_abscissae(int count) {
  if (count < 2) throw ParameterError("abscissae: need at least two sections");
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i) t[i] = static_cast<double>(i) / (count - 1);
  t.back() = 1.0;
  return t;
}

std::vector<double> arclength_abscissae(const Curve3& centerline, int count) {
  if (count < 2) throw ParameterError("abscissae: need at least two sections");
  constexpr int kTable = 4096;
  std::vector<double> s(kTable + 1, 0.0);
  Vec3 prev = centerline.eval(0.0);
  for (int i = 1; i <= kTable; ++i) {
    const Vec3 cur = centerline.eval(static_cast<double>(i) / kTable);
    s[i] = s[i - 1] + (cur - prev).norm();
    prev = cur;
  }
  std::vector<double> t(count);
  for (int k = 0; k < count; ++k) {
    const double target = s.back() * k / (count - 1);
    const auto it = std::lower_bound(s.begin(), s.end(), target);
    const auto j = static_cast<int>(std::clamp<std::ptrdiff_t>(it - s.begin(), 1, kTable));
    const double frac = s[j] > s[j - 1] ? (target - s[j - 1]) / (s[j] - s[j - 1]) : 0.0;
    t[k] = (j - 1 + frac) / kTable;
  }
  t.front() = 0.0;
  t.back() = 1.0;
  return t;
}

Vec3 unit_tangent(const Curve3& centerline, double t) {
  const Vec3 d = centerline.eval(t, 1);
  if (d.norm() < 1e-12) {
    std::ostringstream os;
    os << "centerline is not regular at t=" << t;
    throw DegeneratePathError(os.str());
  }
  return d.normalized();
}

FramedPath frame_path(const Curve3& centerline, std::span<const double> abscissae,
                      const Frame& initial, double kink_threshold) {
  if (abscissae.size() < 2) throw ParameterError("frame_path: need at least two abscissae");
  for (std::size_t i = 1; i < abscissae.size(); ++i)
    if (!(abscissae[i] > abscissae[i - 1]))
      throw ParameterError("frame_path: abscissae must be strictly increasing");

  FramedPath path;
  path.abscissae.assign(abscissae.begin(), abscissae.end());
  path.centers.reserve(abscissae.size());
  for (double t : abscissae) path.centers.push_back(centerline.eval(t));

  Frame seed = initial;
  const Vec3 t0 = unit_tangent(centerline, abscissae.front());
  if ((seed.tangent - t0).norm() > 1e-8) seed = Frame::from_tangent_normal(t0, seed.normal);

  path.frames.reserve(abscissae.size());
  path.frames.push_back(seed);
  for (std::size_t i = 0; i + 1 < abscissae.size(); ++i) {
    // Propagate across [t_i, t_{i+1}], doubling the local sampling while the
    // step rotates the frame by more than the kink threshold.
    int pieces = 1;
    Frame next;
    for (int level = 0;; ++level) {
      std::vector<Vec3> c(pieces + 1), tan(pieces + 1);
      for (int k = 0; k <= pieces; ++k) {
        const double t = abscissae[i] + (abscissae[i + 1] - abscissae[i]) * k / pieces;
        c[k] = centerline.eval(t);
        tan[k] = unit_tangent(centerline, t);
      }
      const Frame start = Frame::from_tangent_normal(tan[0], path.frames.back().normal);
      const auto local = rotation_minimizing_frames(c, tan, start);
      double worst = 0.0;
      for (std::size_t k = 1; k < local.size(); ++k)
        worst = std::max(worst, rotation_angle_between(local[k - 1], local[k]));
      next = local.back();
      if (worst <= kink_threshold) break;
      if (level == 0) {
        std::ostringstream os;
        os << "frame rotation " << worst << " rad between t=" << abscissae[i] << " and t="
           << abscissae[i + 1] << " exceeds kink threshold; oversampling locally";
        path.warnings.push_back(os.str());
      }
      if (level >= 6) break;
      pieces *= 2;
    }
    path.frames.push_back(next);
  }
  return path;
}

FramedPath frame_path(const Curve3& centerline, std::span<const double> abscissae,
                      double kink_threshold) {
  const Vec3 t0 = unit_tangent(centerline, abscissae.front());
  return frame_path(centerline, abscissae, Frame::default_for(t0), kink_threshold);
}

}  // namespace hexvessel
