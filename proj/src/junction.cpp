#include "hexvessel/junction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "hexvessel/error.hpp"
#include "hexvessel/kernels.hpp"

namespace hexvessel {

Vec3 EndSection::top() const { return lift(section.boundary_point(0.0)); }
Vec3 EndSection::bottom() const { return lift(section.boundary_point(kPi)); }
Vec3 EndSection::right() const { return lift(section.boundary_point(sign() > 0 ? kPi / 2 : 3 * kPi / 2)); }
Vec3 EndSection::left() const { return lift(section.boundary_point(sign() > 0 ? 3 * kPi / 2 : kPi / 2)); }

namespace {

Vec3 project_out(const Vec3& v, const Vec3& unit) { return v - v.dot(unit) * unit; }

// Unit eigenvector of the smallest eigenvalue, with the two smallest eigenvalues.
std::pair<Vec3, Eigen::Vector2d> smallest_eigen(const Mat3& m) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(m);
  return {es.eigenvectors().col(0), Eigen::Vector2d(es.eigenvalues()(0), es.eigenvalues()(1))};
}

double scene_scale(const EndSeed& inlet, std::span<const EndSeed> outlets) {
  double s = 0.0;
  for (const auto& o : outlets) s = std::max(s, (o.center - inlet.center).norm());
  return std::max(s, 1e-300);
}

}  // namespace

Vec3 junction_axis(const EndSeed& inlet, std::span<const EndSeed> outlets,
                   const std::optional<Vec3>& reference_normal) {
  if (outlets.empty()) throw ParameterError("junction: need at least one outlet");
  const Vec3 t_in = inlet.flow_tangent.normalized();
  constexpr double kTol = 1e-8;

  // From the outlet tangents.
  Vec3 axis = Vec3::Zero();
  if (outlets.size() >= 2) {
    const Vec3 c12 = outlets[0].flow_tangent.normalized().cross(outlets[1].flow_tangent.normalized());
    if (outlets.size() == 2) {
      axis = c12;
    } else {
      Mat3 m = t_in * t_in.transpose();
      for (const auto& o : outlets) {
        const Vec3 d = o.flow_tangent.normalized();
        m += d * d.transpose();
      }
      auto [v, lambda] = smallest_eigen(m);
      if (lambda(1) - lambda(0) > kTol) {
        axis = v;
        if (axis.dot(c12) < 0) axis = -axis;
      }
    }
  }
  axis = project_out(axis, t_in);
  if (axis.norm() > kTol) return axis.normalized();

  // From the plane through the centers.
  const double scale = scene_scale(inlet, outlets);
  Vec3 mean = inlet.center;
  for (const auto& o : outlets) mean += o.center;
  mean /= static_cast<double>(outlets.size() + 1);
  Mat3 cov = (inlet.center - mean) * (inlet.center - mean).transpose();
  for (const auto& o : outlets) cov += (o.center - mean) * (o.center - mean).transpose();
  auto [v, lambda] = smallest_eigen(cov / (scale * scale));
  if (lambda(1) > kTol) {
    axis = project_out(v, t_in);
    if (outlets.size() >= 2) {
      const Vec3 ref = (outlets[0].center - inlet.center).cross(outlets[1].center - inlet.center);
      if (axis.dot(ref) < 0) axis = -axis;
    }
    if (axis.norm() > kTol) return axis.normalized();
  }

  if (reference_normal) {
    axis = project_out(*reference_normal, t_in);
    if (axis.norm() > kTol) return axis.normalized();
  }
  throw OrientationError("junction: tangents and centers do not determine an axis; supply a reference frame");
}

std::vector<EndSection> orient_sections(const EndSeed& inlet, std::span<const EndSeed> outlets,
                                        const std::optional<Vec3>& reference_normal) {
  const Vec3 axis = junction_axis(inlet, outlets, reference_normal);
  const Vec3 t_in = inlet.flow_tangent.normalized();
  const Frame f_in = Frame::from_tangent_normal(t_in, axis);

  std::vector<EndSection> out;
  auto make = [&](const EndSeed& seed, int index, const Frame& flow) {
    EndSection s;
    s.input_index = index;
    s.role = index == 0 ? EndRole::Inlet : EndRole::Outlet;
    s.center = seed.center;
    s.flow_frame = flow;
    const Vec3 inward = index == 0 ? flow.tangent : Vec3(-flow.tangent);
    s.inward_frame = Frame::from_tangent_normal(inward, flow.normal);
    s.section = seed.section;
    return s;
  };
  out.push_back(make(inlet, 0, f_in));
  for (std::size_t j = 0; j < outlets.size(); ++j) {
    const Vec3 t_j = outlets[j].flow_tangent.normalized();
    const Vec3 centers[2] = {inlet.center, outlets[j].center};
    const Vec3 tangents[2] = {t_in, t_j};
    std::vector<Frame> step;
    try {
      step = rotation_minimizing_frames(centers, tangents, f_in);
    } catch (const DegeneratePathError&) {
      std::ostringstream os;
      os << "junction: outlet " << j << " shares its center with the inlet";
      throw DegenerateJunctionError(os.str());
    }
    out.push_back(make(outlets[j], static_cast<int>(j) + 1, step[1]));
  }

  // Counter-clockwise about the axis, starting from the inlet.
  Vec3 mean = Vec3::Zero();
  for (const auto& s : out) mean += s.center;
  mean /= static_cast<double>(out.size());
  Vec3 e0 = project_out(out[0].center - mean, axis);
  if (e0.norm() < 1e-12 * scene_scale(inlet, outlets)) e0 = project_out(-t_in, axis);
  e0.normalize();
  const Vec3 e1 = axis.cross(e0);
  std::vector<double> angle(out.size(), 0.0);
  for (std::size_t k = 1; k < out.size(); ++k) {
    Vec3 r = project_out(out[k].center - mean, axis);
    if (r.norm() < 1e-12 * scene_scale(inlet, outlets)) r = project_out(-out[k].inward_frame.tangent, axis);
    double a = std::atan2(r.dot(e1), r.dot(e0));
    if (a <= 0) a += 2 * kPi;
    angle[k] = a;
  }
  std::vector<std::size_t> order(out.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin() + 1, order.end(), [&](std::size_t a, std::size_t b) { return angle[a] < angle[b]; });
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double next = k + 1 < order.size() ? angle[order[k + 1]] : 2 * kPi;
    if (next - angle[order[k]] < 1e-6) {
      std::ostringstream os;
      os << "junction: sections " << order[k] << " and " << (k + 1 < order.size() ? order[k + 1] : 0)
         << " coincide in azimuth about the junction axis";
      throw DegenerateJunctionError(os.str());
    }
  }
  std::vector<EndSection> sorted;
  for (std::size_t k : order) sorted.push_back(out[k]);
  return sorted;
}

namespace {

HermiteCurve hermite(const Vec3& p, const Vec3& q, const Vec3& d_p, const Vec3& d_q, double length) {
  // d_p points into the junction from p, d_q from q; the curve leaves p along
  // d_p and arrives at q against d_q.
  return HermiteCurve{p, q, length * d_p, -length * d_q};
}

double section_diameter(const EndSection& s) { return (s.right() - s.left()).norm(); }

}  // namespace

JunctionSkeleton build_skeleton(std::vector<EndSection> sections, const SkeletonOptions& options) {
  const int nb = static_cast<int>(sections.size());
  if (nb < 2) throw ParameterError("junction: need at least two sections");
  if (!(options.tangent_scale > 0)) throw ParameterError("junction: tangent scale must be positive");
  JunctionSkeleton sk;
  sk.sections = std::move(sections);
  for (int k = 0; k < nb; ++k) {
    const EndSection& a = sk.sections[k];
    const EndSection& b = sk.sections[(k + 1) % nb];
    const Vec3 da = a.inward_frame.tangent, db = b.inward_frame.tangent;
    const Vec3 pr = a.right(), pl = b.left();
    const double d_lat = (pr - pl).norm();
    const double d_cen = (a.center - b.center).norm();
    if (d_lat < 1e-9 || d_cen < 1e-9 || (a.top() - b.top()).norm() < 1e-9 ||
        (a.bottom() - b.bottom()).norm() < 1e-9) {
      std::ostringstream os;
      os << "junction: sections " << k << " and " << (k + 1) % nb << " are too close";
      throw DegenerateJunctionError(os.str());
    }
    double s = options.tangent_scale;
    if (options.diameter_rule)
      s = std::clamp(0.5 * (section_diameter(a) + section_diameter(b)) / d_cen, 0.25, 2.0);
    sk.lateral.push_back(hermite(pr, pl, da, db, s * d_lat));
    // The top, center and bottom families share the center distance so that
    // their midpoints differ by the mean anchor offsets only.
    sk.top.push_back(hermite(a.top(), b.top(), da, db, s * d_cen));
    sk.center.push_back(hermite(a.center, b.center, da, db, s * d_cen));
    sk.bottom.push_back(hermite(a.bottom(), b.bottom(), da, db, s * d_cen));
  }
  for (int k = 0; k < nb; ++k) {
    sk.lateral_points.push_back(sk.lateral[k].eval(0.5));
    sk.x_top += sk.top[k].eval(0.5);
    sk.x_center += sk.center[k].eval(0.5);
    sk.x_bottom += sk.bottom[k].eval(0.5);
  }
  sk.x_top /= nb;
  sk.x_center /= nb;
  sk.x_bottom /= nb;
  return sk;
}

ButterflyStructure build_butterfly(const JunctionSkeleton& sk) {
  ButterflyStructure bf;
  bf.x_top = sk.x_top;
  bf.x_center = sk.x_center;
  bf.x_bottom = sk.x_bottom;
  bf.lateral_points = sk.lateral_points;
  const Vec3 r = sk.x_top - sk.x_center;
  const Vec3 l = sk.x_bottom - sk.x_center;
  if (r.norm() < 1e-9 || l.norm() < 1e-9) throw DegenerateJunctionError("butterfly: vanishing axis semi-axis");
  for (std::size_t j = 0; j < sk.lateral_points.size(); ++j) {
    const Vec3 p = sk.lateral_points[j] - sk.x_center;
    if (p.norm() < 1e-9) {
      std::ostringstream os;
      os << "butterfly: petal " << j << " has a vanishing semi-axis";
      throw DegenerateJunctionError(os.str());
    }
    bf.quadrants.push_back({sk.x_center, r, p, static_cast<int>(j), true});
    bf.quadrants.push_back({sk.x_center, l, p, static_cast<int>(j), false});
  }
  return bf;
}

Vec3 ButterflyStructure::half_point(int k, const Vec2& w) const {
  const int nb = static_cast<int>(lateral_points.size());
  const int j = w.y() >= 0.0 ? k : (k + nb - 1) % nb;
  const Vec3 vertical = w.x() >= 0.0 ? Vec3(x_top - x_center) : Vec3(x_bottom - x_center);
  return x_center + std::abs(w.x()) * vertical + std::abs(w.y()) * (lateral_points[j] - x_center);
}

Vec3 VolumetricBlend::eval(std::size_t i, double t) const {
  if (mode == BlendMode::Linear) return (1.0 - t) * source[i] + t * target[i];
  const auto h = hermite_basis(t);
  return h[0] * source[i] + h[1] * source_tangent + h[2] * target[i] + h[3] * target_tangent[i];
}

HexMesh blend_volume(const VolumetricBlend& blend, const SectionSampling& sampling, int layers, bool flip) {
  if (layers < 1) throw ParameterError("blend: need at least one layer");
  const std::size_t v = sampling.num_points();
  if (blend.source.size() != v || blend.target.size() != v)
    throw ParameterError("blend: source and target must share the sampling layout");
  if (blend.mode == BlendMode::Hermite && blend.target_tangent.size() != v)
    throw ParameterError("blend: tangent field must share the sampling layout");
  HexMesh mesh;
  mesh.vertices.resize(v * (layers + 1));
  for (int l = 0; l <= layers; ++l) {
    const double t = static_cast<double>(l) / layers;
    for (std::size_t i = 0; i < v; ++i) {
      if (l == 0) mesh.vertices[i] = blend.source[i];
      else if (l == layers) mesh.vertices[l * v + i] = blend.target[i];
      else mesh.vertices[l * v + i] = blend.eval(i, t);
    }
  }
  for (int l = 0; l < layers; ++l) {
    const int lo = static_cast<int>(l * v), hi = static_cast<int>((l + 1) * v);
    for (auto q : sampling.quads) {
      if (flip) std::swap(q[1], q[3]);
      mesh.hexes.push_back({lo + q[0], lo + q[1], lo + q[2], lo + q[3], hi + q[0], hi + q[1], hi + q[2], hi + q[3]});
    }
  }
  return mesh;
}

std::vector<Vec3> butterfly_tangent_field(const JunctionSkeleton& sk, int k, const DiscTemplate& disc,
                                          const SectionSampling& sampling) {
  const int nb = sk.num_sections();
  const EndSection& s = sk.sections[k];
  const Vec3 to_prev = -sk.lateral[(k + nb - 1) % nb].eval(0.5, 1);
  const Vec3 to_center = sk.x_center - s.center;
  const Vec3 to_next = sk.lateral[k].eval(0.5, 1);
  const double sign = s.sign();
  const Eigen::MatrixXd coef = disc.project(
      [&](const Vec2& x) {
        const double y = std::clamp(sign * x.y(), -1.0, 1.0);
        const double f0 = std::max(0.0, -y), f2 = std::max(0.0, y), f1 = 1.0 - std::abs(y);
        const Vec3 v = f0 * to_prev + f1 * to_center + f2 * to_next;
        return Eigen::RowVectorXd(v.transpose());
      },
      3);
  std::vector<Vec3> cps(coef.rows());
  for (Eigen::Index i = 0; i < coef.rows(); ++i) cps[i] = coef.row(i).transpose();
  return sampling.sample3(cps);
}

std::vector<double> axis_kinks(const ButterflyStructure& b) {
  const Vec3 axis = (b.x_top - b.x_center).normalized();
  const int nb = static_cast<int>(b.lateral_points.size());
  std::vector<Vec3> petal(nb);
  for (int j = 0; j < nb; ++j) petal[j] = project_out(b.lateral_points[j] - b.x_center, axis).normalized();
  std::vector<double> kinks(nb);
  for (int k = 0; k < nb; ++k) {
    const Vec3& a = petal[k];
    const Vec3& c = petal[(k + nb - 1) % nb];
    kinks[k] = kPi - std::atan2(a.cross(c).norm(), a.dot(c));
  }
  return kinks;
}

JunctionMesh mesh_junction(const std::vector<EndSection>& sections, const DiscTemplate& disc,
                           const SectionSampling& sampling, const JunctionOptions& options) {
  JunctionMesh jm;
  jm.skeleton = build_skeleton(sections, options.skeleton);
  jm.butterfly = build_butterfly(jm.skeleton);
  const int nb = jm.skeleton.num_sections();
  const std::vector<Vec2> disc_points = sampling.sample(disc.map());
  const std::size_t v = disc_points.size();

  std::vector<HexMesh> blocks;
  double diameter = 0.0;
  for (int k = 0; k < nb; ++k) {
    const EndSection& s = jm.skeleton.sections[k];
    diameter += 0.5 * ((s.right() - s.left()).norm() + (s.top() - s.bottom()).norm());
    VolumetricBlend blend;
    blend.mode = options.mode;
    blend.source.resize(v);
    blend.target.resize(v);
    const SectionPlacement placement{&s.section.control_points(), s.flow_frame, s.center};
    kernels::omp::lift_sections(sampling, std::span(&placement, 1), blend.source);
    for (std::size_t i = 0; i < v; ++i)
      blend.target[i] = jm.butterfly.half_point(k, Vec2(disc_points[i].x(), s.sign() * disc_points[i].y()));
    blend.source_tangent = options.source_tangent_scale * s.inward_frame.tangent;
    if (options.mode == BlendMode::Hermite) {
      blend.target_tangent = butterfly_tangent_field(jm.skeleton, k, disc, sampling);
      for (auto& t : blend.target_tangent) t *= options.target_tangent_scale;
    }

    int layers = options.layers;
    if (layers <= 0) {
      const double dist = (jm.skeleton.x_center - s.center).norm();
      double h = options.cell_height;
      if (!(h > 0)) h = (s.top() - s.bottom()).norm() / sampling.cells_per_side;
      layers = std::max(2, static_cast<int>(std::lround(dist / h)));
    }
    jm.layers.push_back(layers);
    blocks.push_back(blend_volume(blend, sampling, layers, s.role == EndRole::Outlet));
    jm.blends.push_back(std::move(blend));
  }
  diameter /= nb;
  jm.mesh = weld(blocks, 1e-6 * diameter).mesh;
  jm.axis_kinks = axis_kinks(jm.butterfly);
  return jm;
}

}  // namespace hexvessel
