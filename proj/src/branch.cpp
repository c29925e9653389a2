#include "hexvessel/branch.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>

#include "hexvessel/error.hpp"
#include "hexvessel/kernels.hpp"
#include "hexvessel/quality.hpp"

namespace hexvessel {

namespace {

constexpr int kContourSamples = 256;

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

std::vector<Vec2> closed(std::vector<Vec2> pts) {
  if (pts.size() < 3) throw InvalidProfileError("contour needs at least three points");
  if ((pts.front() - pts.back()).norm() > 1e-12) pts.push_back(pts.front());
  else pts.back() = pts.front();
  return pts;
}

// Arclength resampling of a closed polygon into `count` segments (count+1 points).
std::vector<Vec2> resample(const std::vector<Vec2>& poly, int count) {
  std::vector<double> s(poly.size(), 0.0);
  for (std::size_t i = 1; i < poly.size(); ++i) s[i] = s[i - 1] + (poly[i] - poly[i - 1]).norm();
  if (!(s.back() > 0)) throw InvalidProfileError("contour has zero length");
  std::vector<Vec2> out(count + 1);
  std::size_t seg = 1;
  for (int k = 0; k < count; ++k) {
    const double target = s.back() * k / count;
    while (seg + 1 < poly.size() && s[seg] < target) ++seg;
    const double len = s[seg] - s[seg - 1];
    const double f = len > 0 ? (target - s[seg - 1]) / len : 0.0;
    out[k] = poly[seg - 1] + f * (poly[seg] - poly[seg - 1]);
  }
  out.back() = out.front();
  return out;
}

Vec2 area_centroid(const std::vector<Vec2>& poly) {
  double area = 0.0;
  Vec2 c = Vec2::Zero();
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
    const double w = cross2(poly[i], poly[i + 1]);
    area += w;
    c += w * (poly[i] + poly[i + 1]);
  }
  if (!(area > 0)) throw InvalidProfileError("contour is degenerate or clockwise");
  return c / (3.0 * area);
}

// Recentres on the area centroid and restarts the polygon where it crosses
// the positive x axis.
std::vector<Vec2> normalize_contour(std::vector<Vec2> poly) {
  poly = closed(std::move(poly));
  const Vec2 c = area_centroid(poly);
  for (auto& p : poly) p -= c;
  const std::size_t m = poly.size() - 1;
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[i + 1];
    if (a.y() <= 0.0 && b.y() > 0.0) {
      const double f = -a.y() / (b.y() - a.y());
      const Vec2 x = a + f * (b - a);
      if (x.x() <= 0.0) continue;
      std::vector<Vec2> out;
      out.reserve(m + 2);
      out.push_back(Vec2(x.x(), 0.0));
      for (std::size_t k = 1; k <= m; ++k) out.push_back(poly[(i + k) % m]);
      out.push_back(out.front());
      return resample(out, kContourSamples);
    }
  }
  throw InvalidProfileError("contour does not enclose its centroid");
}

std::vector<double> abscissae_for(const BranchGeometry& geom, int sections, bool arclength) {
  if (sections < 2) throw ParameterError("branch '" + geom.id + "': need at least two sections");
  return arclength ? arclength_abscissae(geom.centerline, sections) : uniform_abscissae(sections);
}

}  // namespace

void BranchGeometry::validate() const {
  const std::string where = "branch '" + id + "': ";
  for (int i = 0; i <= 1024; ++i) {
    const double t = static_cast<double>(i) / 1024;
    if (centerline.eval(t, 1).norm() < 1e-12) {
      std::ostringstream os;
      os << where << "centerline is not regular at t=" << t;
      throw DegeneratePathError(os.str());
    }
  }
  if (radius) {
    try {
      radius->require_positive(1024);
    } catch (const InvalidProfileError& e) {
      throw InvalidProfileError(where + e.what());
    }
    return;
  }
  if (contours.empty()) throw InvalidProfileError(where + "needs a radius profile or contours");
  for (std::size_t i = 0; i < contours.size(); ++i) {
    const double t = contours[i].t;
    if (t < 0.0 || t > 1.0) throw InvalidProfileError(where + "contour t outside [0, 1]");
    if (i > 0 && !(t > contours[i - 1].t))
      throw InvalidProfileError(where + "contour t values must be strictly increasing");
    try {
      BoundaryCorrespondence::from_samples(normalize_contour(contours[i].points)).require_convex();
    } catch (const InputError& e) {
      std::ostringstream os;
      os << where << "contour " << i << ": " << e.what();
      throw ConvexityError(os.str());
    }
  }
}

BoundaryCorrespondence BranchGeometry::contour_at(double t) const {
  if (contours.empty()) throw InvalidProfileError("branch '" + id + "': no contours");
  std::size_t hi = 0;
  while (hi < contours.size() && contours[hi].t < t) ++hi;
  if (hi == 0) return BoundaryCorrespondence::from_samples(normalize_contour(contours.front().points));
  if (hi == contours.size()) return BoundaryCorrespondence::from_samples(normalize_contour(contours.back().points));
  const auto a = normalize_contour(contours[hi - 1].points);
  const auto b = normalize_contour(contours[hi].points);
  const double f = (t - contours[hi - 1].t) / (contours[hi].t - contours[hi - 1].t);
  std::vector<Vec2> mix(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) mix[k] = (1 - f) * a[k] + f * b[k];
  return BoundaryCorrespondence::from_samples(normalize_contour(std::move(mix)));
}

double BranchGeometry::mean_radius_at(double t) const {
  if (radius) return radius->eval(t);
  const auto& s = contour_at(t).samples();
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) area += 0.5 * cross2(s[i], s[i + 1]);
  return std::sqrt(area / kPi);
}

FramedPath branch_frames(const BranchGeometry& geom, int sections, const CatalogueOptions& options) {
  const auto t = abscissae_for(geom, sections, options.arclength_spacing);
  const Vec3 t0 = unit_tangent(geom.centerline, 0.0);
  const Frame initial = options.initial_frame ? *options.initial_frame : Frame::default_for(t0);
  FramedPath path = frame_path(geom.centerline, t, initial, options.kink_threshold);
  const double span = t.back() - t.front();
  for (std::size_t i = 0; i < path.frames.size(); ++i) {
    const double angle = options.base_twist + options.end_twist * (t[i] - t.front()) / span;
    if (angle != 0.0) path.frames[i] = path.frames[i].rotated(angle);
  }
  if (options.warnings)
    for (const auto& w : path.warnings) options.warnings->push_back("branch '" + geom.id + "': " + w);
  return path;
}

std::vector<LiftedSection> catalogue_sections(const BranchGeometry& geom, int sections,
                                              const DiscTemplate& disc, const CatalogueOptions& options) {
  const FramedPath path = branch_frames(geom, sections, options);
  const int n = static_cast<int>(path.abscissae.size());
  std::vector<LiftedSection> out(n);
  std::exception_ptr error;
  std::mutex error_mutex;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      const double t = path.abscissae[i];
      LiftedSection& s = out[i];
      s.t = t;
      s.frame = path.frames[i];
      s.center = path.centers[i];
      if (geom.circular()) {
        const double r = geom.radius->eval(t);
        if (!(r > 0)) {
          std::ostringstream os;
          os << "branch '" << geom.id << "': radius " << r << " is not positive at t=" << t;
          throw InvalidProfileError(os.str());
        }
        s.section = scale_disc(disc, r);
      } else {
        s.section = harmonic_section(disc, geom.contour_at(t));
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

std::vector<std::array<int, 8>> sweep_connectivity(const SectionSampling& sampling, int rings) {
  const int v = sampling.num_points();
  std::vector<std::array<int, 8>> hexes;
  hexes.reserve(static_cast<std::size_t>(std::max(rings - 1, 0)) * sampling.quads.size());
  for (int r = 0; r + 1 < rings; ++r)
    for (const auto& q : sampling.quads) {
      const int lo = r * v, hi = (r + 1) * v;
      hexes.push_back({lo + q[0], lo + q[1], lo + q[2], lo + q[3], hi + q[0], hi + q[1], hi + q[2], hi + q[3]});
    }
  return hexes;
}

StructuredBranchMesh sweep_branch(std::span<const LiftedSection> sections, const SectionSampling& sampling) {
  if (sections.size() < 2) throw ParameterError("sweep: need at least two sections");
  const auto& layout = sections.front().section.layout_ptr();
  std::vector<SectionPlacement> placements(sections.size());
  for (std::size_t i = 0; i < sections.size(); ++i) {
    if (sections[i].section.layout_ptr() != layout)
      throw ParameterError("sweep: sections were built from different templates");
    placements[i] = {&sections[i].section.control_points(), sections[i].frame, sections[i].center};
  }
  StructuredBranchMesh out;
  out.points_per_ring = sampling.num_points();
  out.rings = static_cast<int>(sections.size());
  out.mesh.vertices.resize(static_cast<std::size_t>(out.rings) * out.points_per_ring);
  kernels::omp::lift_sections(sampling, placements, out.mesh.vertices);
  out.mesh.hexes = sweep_connectivity(sampling, out.rings);

  const long cells = static_cast<long>(out.mesh.hexes.size());
  long first_bad = cells;
#pragma omp parallel for reduction(min : first_bad)
  for (long c = 0; c < cells; ++c)
    if (!(scaled_jacobian(out.mesh.cell(c)) > 0.0)) first_bad = std::min(first_bad, c);
  if (first_bad < cells) {
    const long ring = first_bad / static_cast<long>(sampling.quads.size());
    std::ostringstream os;
    os << "sweep: inverted cell between sections " << ring << " and " << ring + 1
       << "; stack the sections more tightly";
    throw SweepError(os.str());
  }
  return out;
}

BranchGeometry edit_radius(const BranchGeometry& geom, double t_start, double t_end,
                           std::span<const RadiusTarget> targets, double smoothing_weight) {
  const std::string where = "edit of branch '" + geom.id + "': ";
  if (!geom.radius) throw ParameterError(where + "only radius profiles can be edited");
  if (!(t_start >= 0.0 && t_start < t_end && t_end <= 1.0))
    throw ParameterError(where + "need 0 <= t_start < t_end <= 1");
  if (targets.empty()) throw ParameterError(where + "need at least one target");
  if (smoothing_weight < 0) throw ParameterError(where + "smoothing weight must be non-negative");
  const ScalarSpline& r = *geom.radius;

  // The edited tract is r + c, where c interpolates the target offsets and
  // vanishes at both ends of the tract.
  std::vector<double> s{0.0}, offset{0.0};
  const double len = t_end - t_start;
  for (const auto& tg : targets) {
    if (!(tg.radius > 0)) throw InvalidProfileError(where + "target radii must be positive");
    if (!(tg.t > t_start && tg.t < t_end)) throw ParameterError(where + "targets must lie inside (t_start, t_end)");
    const double local = (tg.t - t_start) / len;
    if (!(local > s.back())) throw ParameterError(where + "targets must be sorted by t");
    s.push_back(local);
    offset.push_back(tg.radius - r.eval(tg.t));
  }
  s.push_back(1.0);
  offset.push_back(0.0);
  const int count = static_cast<int>(s.size());
  const ScalarSpline correction =
      fit_least_squares(s, offset, KnotVector::clamped_uniform(std::min(3, count - 1), count));

  constexpr int kDense = 512;
  std::vector<double> t(kDense), values(kDense);
  for (int i = 0; i < kDense; ++i) {
    t[i] = static_cast<double>(i) / (kDense - 1);
    values[i] = r.eval(t[i]);
    if (t[i] > t_start && t[i] < t_end) values[i] += correction.eval((t[i] - t_start) / len);
  }
  BranchGeometry out = geom;
  out.radius = interpolate_with_smoothing(t, values, r.knot_vector(), smoothing_weight);
  try {
    out.radius->require_positive(1024);
  } catch (const InvalidProfileError& e) {
    throw InvalidProfileError(where + e.what());
  }
  return out;
}

}  // namespace hexvessel
