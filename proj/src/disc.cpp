#include "hexvessel/disc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "hexvessel/error.hpp"
#include "hexvessel/quadrature.hpp"

namespace hexvessel {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct DiscOperators {
  SparseMatrix a_ib;
  Eigen::SimplicialLLT<SparseMatrix> a_ii;
  Eigen::SimplicialLLT<SparseMatrix> mass;
};

MultiPatchNumbering MultiPatchNumbering::build(int n) {
  MultiPatchNumbering num;
  num.points_per_side = n;
  num.index.assign(static_cast<std::size_t>(kNumPatches) * n * n, -1);
  auto slot = [&](int patch, int i, int j) -> int& {
    return num.index[(static_cast<std::size_t>(patch) * n + i) * n + j];
  };
  int count = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) slot(0, i, j) = count++;
  // East
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) slot(1, i, j) = i == 0 ? slot(0, n - 1, j) : count++;
  // North
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == 0) slot(2, i, j) = slot(0, n - 1 - j, n - 1);
      else if (j == 0) slot(2, i, j) = slot(1, i, n - 1);
      else slot(2, i, j) = count++;
    }
  // West
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == 0) slot(3, i, j) = slot(0, 0, n - 1 - j);
      else if (j == 0) slot(3, i, j) = slot(2, i, n - 1);
      else slot(3, i, j) = count++;
    }
  // South
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == 0) slot(4, i, j) = slot(0, j, 0);
      else if (j == 0) slot(4, i, j) = slot(3, i, n - 1);
      else if (j == n - 1) slot(4, i, j) = slot(1, i, 0);
      else slot(4, i, j) = count++;
    }
  num.num_unique = count;
  return num;
}

std::shared_ptr<const MultiPatchLayout> MultiPatchLayout::make(int degree, int points_per_side) {
  if (degree < 2) throw ParameterError("disc template: degree must be at least 2");
  if (points_per_side < 4 || points_per_side < degree + 1)
    throw ParameterError("disc template: need at least max(4, degree+1) control points per side");

  auto layout = std::make_shared<MultiPatchLayout>();
  const int n = points_per_side;
  layout->degree = degree;
  layout->points_per_side = n;
  layout->knots = KnotVector::clamped_uniform(degree, n);
  layout->numbering = MultiPatchNumbering::build(n);
  layout->interfaces = {
      {0, PatchEdge::UMax, 1, PatchEdge::UMin}, {0, PatchEdge::VMax, 2, PatchEdge::UMin},
      {0, PatchEdge::UMin, 3, PatchEdge::UMin}, {0, PatchEdge::VMin, 4, PatchEdge::UMin},
      {1, PatchEdge::VMax, 2, PatchEdge::VMin}, {2, PatchEdge::VMax, 3, PatchEdge::VMin},
      {3, PatchEdge::VMax, 4, PatchEdge::VMin}, {4, PatchEdge::VMax, 1, PatchEdge::VMin},
  };

  const int ndof = layout->numbering.num_unique;
  layout->boundary_position.assign(ndof, -1);
  layout->interior_position.assign(ndof, -1);
  for (int k = 1; k < kNumPatches; ++k)
    for (int j = 0; j + 1 < n; ++j) {
      const int d = layout->numbering.at(k, n - 1, j);
      layout->boundary_position[d] = static_cast<int>(layout->boundary_dofs.size());
      layout->boundary_dofs.push_back(d);
    }
  for (int d = 0; d < ndof; ++d)
    if (layout->boundary_position[d] < 0) {
      layout->interior_position[d] = static_cast<int>(layout->interior_dofs.size());
      layout->interior_dofs.push_back(d);
    }
  return layout;
}

PatchBasis eval_patch_basis(const MultiPatchLayout& layout, int patch, double u, double v) {
  const int p = layout.degree;
  Eigen::MatrixXd bu, bv;
  const int su = layout.knots.eval_basis(std::clamp(u, 0.0, 1.0), 1, bu);
  const int sv = layout.knots.eval_basis(std::clamp(v, 0.0, 1.0), 1, bv);
  PatchBasis out;
  const int m = (p + 1) * (p + 1);
  out.dofs.resize(m);
  out.value.resize(m);
  out.du.resize(m);
  out.dv.resize(m);
  for (int a = 0; a <= p; ++a)
    for (int b = 0; b <= p; ++b) {
      const int k = a * (p + 1) + b;
      out.dofs[k] = layout.dof(patch, su - p + a, sv - p + b);
      out.value[k] = bu(0, a) * bv(0, b);
      out.du[k] = bu(1, a) * bv(0, b);
      out.dv[k] = bu(0, a) * bv(1, b);
    }
  return out;
}

MultiPatchSplineMap::MultiPatchSplineMap(std::shared_ptr<const MultiPatchLayout> layout,
                                         std::vector<Vec2> control_points)
    : layout_(std::move(layout)), control_points_(std::move(control_points)) {
  if (static_cast<int>(control_points_.size()) != layout_->num_dofs())
    throw ParameterError("multipatch map: control point count does not match the layout");
}

Vec2 MultiPatchSplineMap::eval(int patch, double u, double v) const {
  const PatchBasis b = eval_patch_basis(*layout_, patch, u, v);
  Vec2 x = Vec2::Zero();
  for (std::size_t k = 0; k < b.dofs.size(); ++k) x += b.value[k] * control_points_[b.dofs[k]];
  return x;
}

Eigen::Matrix2d MultiPatchSplineMap::jacobian(int patch, double u, double v) const {
  const PatchBasis b = eval_patch_basis(*layout_, patch, u, v);
  Eigen::Matrix2d j = Eigen::Matrix2d::Zero();
  for (std::size_t k = 0; k < b.dofs.size(); ++k) {
    j.col(0) += b.du[k] * control_points_[b.dofs[k]];
    j.col(1) += b.dv[k] * control_points_[b.dofs[k]];
  }
  return j;
}

namespace {

// Nonempty knot spans of the shared knot vector as [lo, hi] pairs.
std::vector<std::pair<double, double>> knot_spans(const KnotVector& kv) {
  std::vector<std::pair<double, double>> spans;
  const auto& k = kv.knots();
  for (int i = kv.degree(); i < kv.num_basis(); ++i)
    if (k[i + 1] > k[i]) spans.emplace_back(k[i], k[i + 1]);
  return spans;
}

// Maps an azimuth in [0, 2pi] to (outer patch, v).
std::pair<int, double> boundary_parameter(double theta) {
  double s = std::fmod(theta + kPi / 4, 2 * kPi);
  if (s < 0) s += 2 * kPi;
  int k = static_cast<int>(std::floor(s / (kPi / 2)));
  k = std::clamp(k, 0, 3);
  const double v = std::clamp((s - k * kPi / 2) / (kPi / 2), 0.0, 1.0);
  return {k + 1, v};
}

enum class Metric { Physical, Parametric };

// Stiffness (Laplace) matrix over all dofs. In the parametric metric the
// central patch is a unit square and each outer patch an aspect x 1 rectangle.
SparseMatrix assemble_stiffness(const MultiPatchLayout& layout, const std::vector<Vec2>* cps,
                                Metric metric, double aspect) {
  const int ndof = layout.num_dofs();
  const auto rule = gauss_legendre(layout.degree + 1);
  const auto spans = knot_spans(layout.knots);
  std::vector<Eigen::Triplet<double>> trip;
  for (int patch = 0; patch < kNumPatches; ++patch)
    for (const auto& [u0, u1] : spans)
      for (const auto& [v0, v1] : spans)
        for (std::size_t qa = 0; qa < rule.points.size(); ++qa)
          for (std::size_t qb = 0; qb < rule.points.size(); ++qb) {
            const double u = u0 + (u1 - u0) * rule.points[qa];
            const double v = v0 + (v1 - v0) * rule.points[qb];
            const double w = rule.weights[qa] * rule.weights[qb] * (u1 - u0) * (v1 - v0);
            const PatchBasis b = eval_patch_basis(layout, patch, u, v);
            const std::size_t m = b.dofs.size();
            std::vector<Vec2> grad(m);
            double scale = w;
            if (metric == Metric::Physical) {
              Eigen::Matrix2d j = Eigen::Matrix2d::Zero();
              for (std::size_t k = 0; k < m; ++k) {
                j.col(0) += b.du[k] * (*cps)[b.dofs[k]];
                j.col(1) += b.dv[k] * (*cps)[b.dofs[k]];
              }
              const double det = j.determinant();
              const Eigen::Matrix2d jit = j.inverse().transpose();
              for (std::size_t k = 0; k < m; ++k) grad[k] = jit * Vec2(b.du[k], b.dv[k]);
              scale *= std::abs(det);
            } else {
              const double h = patch == 0 ? 1.0 : aspect;
              for (std::size_t k = 0; k < m; ++k) grad[k] = Vec2(b.du[k] / h, b.dv[k]);
              scale *= h;
            }
            for (std::size_t a = 0; a < m; ++a)
              for (std::size_t c = 0; c < m; ++c)
                trip.emplace_back(b.dofs[a], b.dofs[c], scale * grad[a].dot(grad[c]));
          }
  SparseMatrix k(ndof, ndof);
  k.setFromTriplets(trip.begin(), trip.end());
  return k;
}

SparseMatrix assemble_mass(const MultiPatchLayout& layout, const std::vector<Vec2>& cps) {
  const int ndof = layout.num_dofs();
  const auto rule = gauss_legendre(layout.degree + 1);
  const auto spans = knot_spans(layout.knots);
  std::vector<Eigen::Triplet<double>> trip;
  for (int patch = 0; patch < kNumPatches; ++patch)
    for (const auto& [u0, u1] : spans)
      for (const auto& [v0, v1] : spans)
        for (std::size_t qa = 0; qa < rule.points.size(); ++qa)
          for (std::size_t qb = 0; qb < rule.points.size(); ++qb) {
            const double u = u0 + (u1 - u0) * rule.points[qa];
            const double v = v0 + (v1 - v0) * rule.points[qb];
            const double w = rule.weights[qa] * rule.weights[qb] * (u1 - u0) * (v1 - v0);
            const PatchBasis b = eval_patch_basis(layout, patch, u, v);
            Eigen::Matrix2d j = Eigen::Matrix2d::Zero();
            for (std::size_t k = 0; k < b.dofs.size(); ++k) {
              j.col(0) += b.du[k] * cps[b.dofs[k]];
              j.col(1) += b.dv[k] * cps[b.dofs[k]];
            }
            const double scale = w * std::abs(j.determinant());
            for (std::size_t a = 0; a < b.dofs.size(); ++a)
              for (std::size_t c = 0; c < b.dofs.size(); ++c)
                trip.emplace_back(b.dofs[a], b.dofs[c], scale * b.value[a] * b.value[c]);
          }
  SparseMatrix m(ndof, ndof);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

struct Partition {
  SparseMatrix ii, ib;
};

Partition partition(const MultiPatchLayout& layout, const SparseMatrix& k) {
  const int ni = static_cast<int>(layout.interior_dofs.size());
  const int nb = static_cast<int>(layout.boundary_dofs.size());
  std::vector<Eigen::Triplet<double>> ii, ib;
  for (int col = 0; col < k.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(k, col); it; ++it) {
      const int r = layout.interior_position[it.row()];
      if (r < 0) continue;
      const int ci = layout.interior_position[it.col()];
      if (ci >= 0) ii.emplace_back(r, ci, it.value());
      else ib.emplace_back(r, layout.boundary_position[it.col()], it.value());
    }
  Partition p{SparseMatrix(ni, ni), SparseMatrix(ni, nb)};
  p.ii.setFromTriplets(ii.begin(), ii.end());
  p.ib.setFromTriplets(ib.begin(), ib.end());
  return p;
}

std::shared_ptr<const DiscOperators> build_operators(const MultiPatchSplineMap& map) {
  auto ops = std::make_shared<DiscOperators>();
  const auto& layout = map.layout();
  const Partition part =
      partition(layout, assemble_stiffness(layout, &map.control_points(), Metric::Physical, 1.0));
  ops->a_ib = part.ib;
  ops->a_ii.compute(part.ii);
  if (ops->a_ii.info() != Eigen::Success)
    throw TemplateError("disc template: interior stiffness matrix is not positive definite");
  ops->mass.compute(assemble_mass(layout, map.control_points()));
  if (ops->mass.info() != Eigen::Success)
    throw TemplateError("disc template: mass matrix is not positive definite");
  return ops;
}

Eigen::MatrixXd fit_boundary_dofs(const MultiPatchLayout& layout, const BoundaryCorrespondence& data) {
  const int p = layout.degree;
  const int n = layout.points_per_side;
  const int nb = static_cast<int>(layout.boundary_dofs.size());
  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(nb, nb);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nb, 2);
  const auto& pts = data.samples();
  const auto& az = data.azimuths();
  Eigen::MatrixXd basis;
  std::vector<int> rows(p + 1);
  // L2 fit against the closed polyline, sampled uniformly in azimuth so that
  // sparse or clustered input still constrains every boundary function.
  const int dense = std::max(1024, 4 * static_cast<int>(pts.size()));
  std::size_t seg = 0;
  for (int s = 0; s < dense; ++s) {
    const double theta = 2 * kPi * (s + 0.5) / dense;
    while (seg + 2 < pts.size() && az[seg + 1] <= theta) ++seg;
    const double len = az[seg + 1] - az[seg];
    const double w = len > 0 ? std::clamp((theta - az[seg]) / len, 0.0, 1.0) : 0.0;
    const Vec2 x = (1 - w) * pts[seg] + w * pts[seg + 1];
    const auto [patch, v] = boundary_parameter(theta);
    const int span = layout.knots.eval_basis(v, 0, basis);
    for (int b = 0; b <= p; ++b) rows[b] = layout.boundary_position[layout.dof(patch, n - 1, span - p + b)];
    for (int a = 0; a <= p; ++a) {
      rhs.row(rows[a]) += basis(0, a) * x.transpose();
      for (int b = 0; b <= p; ++b) normal(rows[a], rows[b]) += basis(0, a) * basis(0, b);
    }
  }
  normal.diagonal().array() += 1e-12;
  Eigen::LLT<Eigen::MatrixXd> llt(normal);
  if (llt.info() != Eigen::Success) throw SingularFitError("boundary fit: normal matrix is singular");
  return llt.solve(rhs);
}

std::vector<Vec2> assemble_control_points(const MultiPatchLayout& layout, const Eigen::MatrixXd& xb,
                                          const Eigen::MatrixXd& xi) {
  std::vector<Vec2> cps(layout.num_dofs());
  for (std::size_t i = 0; i < layout.boundary_dofs.size(); ++i)
    cps[layout.boundary_dofs[i]] = xb.row(i).transpose();
  for (std::size_t i = 0; i < layout.interior_dofs.size(); ++i)
    cps[layout.interior_dofs[i]] = xi.row(i).transpose();
  return cps;
}

// Discrete Coons net: central square on Greville points, outer patches filled
// from their four boundary polygons.
std::vector<Vec2> coons_net(const MultiPatchLayout& layout, const Eigen::MatrixXd& xb, double c) {
  const int n = layout.points_per_side;
  const auto g = layout.knots.greville();
  std::vector<Vec2> cps(layout.num_dofs(), Vec2::Zero());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cps[layout.dof(0, i, j)] = Vec2(-c + 2 * c * g[i], -c + 2 * c * g[j]);
  for (std::size_t i = 0; i < layout.boundary_dofs.size(); ++i)
    cps[layout.boundary_dofs[i]] = xb.row(i).transpose();
  for (int k = 1; k < kNumPatches; ++k) {
    auto at = [&](int i, int j) -> Vec2 { return cps[layout.dof(k, i, j)]; };
    std::vector<Vec2> side0(n), side1(n);
    for (int i = 0; i < n; ++i) {
      side0[i] = (1 - g[i]) * at(0, 0) + g[i] * at(n - 1, 0);
      side1[i] = (1 - g[i]) * at(0, n - 1) + g[i] * at(n - 1, n - 1);
    }
    std::vector<Vec2> net(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Vec2 ruled_u = (1 - g[i]) * at(0, j) + g[i] * at(n - 1, j);
        const Vec2 ruled_v = (1 - g[j]) * side0[i] + g[j] * side1[i];
        const Vec2 bilinear = (1 - g[i]) * (1 - g[j]) * at(0, 0) + g[i] * (1 - g[j]) * at(n - 1, 0) +
                              (1 - g[i]) * g[j] * at(0, n - 1) + g[i] * g[j] * at(n - 1, n - 1);
        net[i * n + j] = ruled_u + ruled_v - bilinear;
      }
    for (int i = 1; i < n - 1; ++i)
      for (int j = 0; j < n; ++j) cps[layout.dof(k, i, j)] = net[i * n + j];
  }
  return cps;
}

}  // namespace

double MultiPatchSplineMap::min_jacobian(int per_span) const {
  const auto rule = gauss_legendre(per_span);
  const auto spans = knot_spans(layout_->knots);
  double worst = std::numeric_limits<double>::infinity();
  for (int patch = 0; patch < kNumPatches; ++patch)
    for (const auto& [u0, u1] : spans)
      for (const auto& [v0, v1] : spans)
        for (double a : rule.points)
          for (double b : rule.points)
            worst = std::min(worst, jacobian(patch, u0 + (u1 - u0) * a, v0 + (v1 - v0) * b).determinant());
  return worst;
}

Vec2 MultiPatchSplineMap::boundary_point(double theta) const {
  const auto [patch, v] = boundary_parameter(theta);
  return eval(patch, 1.0, v);
}

std::vector<Vec2> MultiPatchSplineMap::boundary_control_points() const {
  std::vector<Vec2> out;
  out.reserve(layout_->boundary_dofs.size());
  for (int d : layout_->boundary_dofs) out.push_back(control_points_[d]);
  return out;
}

BoundaryCorrespondence::BoundaryCorrespondence(std::vector<Vec2> samples) : samples_(std::move(samples)) {
  if (samples_.size() < 4) throw ParameterError("boundary: need at least three distinct samples");
  for (const auto& p : samples_)
    if (!p.allFinite()) throw ParameterError("boundary: non-finite sample");
  if ((samples_.front() - samples_.back()).norm() > 1e-12)
    throw ParameterError("boundary: sample polygon is not closed (first != last)");
  azimuths_.assign(samples_.size(), 0.0);
  for (std::size_t i = 1; i < samples_.size(); ++i)
    azimuths_[i] = azimuths_[i - 1] + (samples_[i] - samples_[i - 1]).norm();
  const double total = azimuths_.back();
  if (!(total > 0)) throw ParameterError("boundary: zero-length contour");
  for (double& a : azimuths_) a *= 2 * kPi / total;
}

BoundaryCorrespondence::BoundaryCorrespondence(std::vector<Vec2> samples, std::vector<double> azimuths)
    : samples_(std::move(samples)), azimuths_(std::move(azimuths)) {}

BoundaryCorrespondence BoundaryCorrespondence::from_samples(std::vector<Vec2> closed_samples) {
  return BoundaryCorrespondence(std::move(closed_samples));
}

BoundaryCorrespondence BoundaryCorrespondence::from_curve(const Curve2& closed_curve, int samples) {
  if (samples < 3) throw ParameterError("boundary: need at least three curve samples");
  const auto& kv = closed_curve.knot_vector();
  std::vector<Vec2> pts(samples + 1);
  for (int i = 0; i <= samples; ++i)
    pts[i] = closed_curve.eval(kv.front() + (kv.back() - kv.front()) * i / samples);
  const double scale = std::max(1.0, pts.front().norm());
  if ((pts.front() - pts.back()).norm() > 1e-9 * scale)
    throw ParameterError("boundary: contour curve is not closed");
  pts.back() = pts.front();
  return BoundaryCorrespondence(std::move(pts));
}

BoundaryCorrespondence BoundaryCorrespondence::unit_circle(int samples) {
  std::vector<Vec2> pts(samples + 1);
  for (int i = 0; i < samples; ++i) {
    const double a = 2 * kPi * i / samples;
    pts[i] = Vec2(std::cos(a), std::sin(a));
  }
  pts.back() = pts.front();
  return BoundaryCorrespondence(std::move(pts));
}

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Index of the first non-convex vertex, -1 if convex; -2 if clockwise.
int convexity_violation(const std::vector<Vec2>& s) {
  const std::size_t m = s.size() - 1;
  double area = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    area += cross2(s[i], s[i + 1]);
    scale = std::max(scale, (s[i + 1] - s[i]).squaredNorm());
  }
  if (!(area > 0)) return -2;
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 e0 = s[i + 1] - s[i];
    const Vec2 e1 = s[(i + 2) % m] - s[(i + 1) % m];
    if (cross2(e0, e1) < -1e-12 * scale) return static_cast<int>((i + 1) % m);
  }
  return -1;
}

}  // namespace

bool BoundaryCorrespondence::is_convex() const { return convexity_violation(samples_) == -1; }

void BoundaryCorrespondence::require_convex() const {
  const int v = convexity_violation(samples_);
  if (v == -2) throw ConvexityError("boundary: contour is not counter-clockwise");
  if (v >= 0) {
    std::ostringstream os;
    os << "boundary: contour is not convex at vertex " << v << " (" << samples_[v].x() << ", "
       << samples_[v].y() << ")";
    throw ConvexityError(os.str());
  }
}

Vec2 BoundaryCorrespondence::centroid() const {
  double area = 0.0;
  Vec2 c = Vec2::Zero();
  for (std::size_t i = 0; i + 1 < samples_.size(); ++i) {
    const double w = cross2(samples_[i], samples_[i + 1]);
    area += w;
    c += w * (samples_[i] + samples_[i + 1]);
  }
  if (std::abs(area) < 1e-300) throw ParameterError("boundary: contour encloses no area");
  return c / (3.0 * area);
}

BoundaryCorrespondence BoundaryCorrespondence::transformed(const Eigen::Matrix2d& linear,
                                                           const Vec2& offset) const {
  std::vector<Vec2> pts(samples_.size());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = linear * samples_[i] + offset;
  return BoundaryCorrespondence(std::move(pts), azimuths_);
}

Eigen::MatrixXd DiscTemplate::solve_interior(const Eigen::MatrixXd& boundary_values) const {
  const Eigen::MatrixXd rhs = -(ops_->a_ib * boundary_values);
  return ops_->a_ii.solve(rhs);
}

Eigen::MatrixXd DiscTemplate::project(const std::function<Eigen::RowVectorXd(const Vec2&)>& field,
                                      int components) const {
  const auto& layout = map_.layout();
  const auto rule = gauss_legendre(layout.degree + 1);
  const auto spans = knot_spans(layout.knots);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(layout.num_dofs(), components);
  const auto& cps = map_.control_points();
  for (int patch = 0; patch < kNumPatches; ++patch)
    for (const auto& [u0, u1] : spans)
      for (const auto& [v0, v1] : spans)
        for (std::size_t qa = 0; qa < rule.points.size(); ++qa)
          for (std::size_t qb = 0; qb < rule.points.size(); ++qb) {
            const double u = u0 + (u1 - u0) * rule.points[qa];
            const double v = v0 + (v1 - v0) * rule.points[qb];
            const double w = rule.weights[qa] * rule.weights[qb] * (u1 - u0) * (v1 - v0);
            const PatchBasis b = eval_patch_basis(layout, patch, u, v);
            Eigen::Matrix2d j = Eigen::Matrix2d::Zero();
            Vec2 x = Vec2::Zero();
            for (std::size_t k = 0; k < b.dofs.size(); ++k) {
              x += b.value[k] * cps[b.dofs[k]];
              j.col(0) += b.du[k] * cps[b.dofs[k]];
              j.col(1) += b.dv[k] * cps[b.dofs[k]];
            }
            const Eigen::RowVectorXd f = field(x);
            if (f.size() != components) throw ParameterError("project: field returned the wrong size");
            const double scale = w * std::abs(j.determinant());
            for (std::size_t k = 0; k < b.dofs.size(); ++k) rhs.row(b.dofs[k]) += scale * b.value[k] * f;
          }
  return ops_->mass.solve(rhs);
}

Eigen::MatrixXd DiscTemplate::fit_boundary(const BoundaryCorrespondence& data) const {
  return fit_boundary_dofs(map_.layout(), data);
}

DiscTemplate build_disc_template(const DiscOptions& options) {
  if (!(options.radial_aspect > 0)) throw ParameterError("disc template: radial_aspect must be positive");
  if (!(options.core_half_width > 0 && options.core_half_width < 0.7071))
    throw ParameterError("disc template: core_half_width must lie in (0, 1/sqrt(2))");
  auto layout = MultiPatchLayout::make(options.degree, options.points_per_side);
  const Eigen::MatrixXd xb = fit_boundary_dofs(*layout, BoundaryCorrespondence::unit_circle());
  std::vector<Vec2> cps = coons_net(*layout, xb, options.core_half_width);

  if (options.smooth) {
    const Partition part =
        partition(*layout, assemble_stiffness(*layout, nullptr, Metric::Parametric, options.radial_aspect));
    Eigen::SimplicialLLT<SparseMatrix> llt(part.ii);
    if (llt.info() != Eigen::Success) throw TemplateError("disc template: smoothing operator is singular");
    const Eigen::MatrixXd xi = llt.solve(-(part.ib * xb));
    cps = assemble_control_points(*layout, xb, xi);
  }

  DiscTemplate disc;
  disc.map_ = MultiPatchSplineMap(layout, std::move(cps));
  disc.options_ = options;
  const double jmin = disc.map_.min_jacobian();
  if (!(jmin > 0)) {
    std::ostringstream os;
    os << "disc template: non-positive Jacobian " << jmin << " after construction";
    throw TemplateError(os.str());
  }
  disc.ops_ = build_operators(disc.map_);
  return disc;
}

DiscTemplate build_disc_template(int degree, int points_per_side) {
  DiscOptions o;
  o.degree = degree;
  o.points_per_side = points_per_side;
  return build_disc_template(o);
}

double boundary_layer_profile(double r, double alpha) { return r + alpha * (1.0 - r) * r; }

DiscTemplate apply_boundary_layer(const DiscTemplate& disc, double alpha, bool straighten) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ParameterError("boundary layer: alpha must lie in [0, 1)");
  const auto& layout = disc.layout();
  std::vector<Vec2> cps = disc.map().control_points();
  for (int d : layout.interior_dofs) {
    const double r = cps[d].norm();
    if (r > 0) cps[d] *= boundary_layer_profile(r, alpha) / r;
  }
  if (alpha > 0 && straighten) {
    const int n = layout.points_per_side;
    for (int k = 1; k < kNumPatches; ++k)
      for (int j = 0; j < n; ++j) {
        const Vec2 a = cps[layout.dof(k, 0, j)];
        const Vec2 b = cps[layout.dof(k, n - 1, j)];
        const Vec2 e = b - a;
        for (int i = 1; i < n - 1; ++i) {
          Vec2& c = cps[layout.dof(k, i, j)];
          const double t = std::clamp((c - a).dot(e) / e.squaredNorm(), 0.0, 1.0);
          c = a + t * e;
        }
      }
  }
  DiscTemplate out;
  out.map_ = MultiPatchSplineMap(disc.map().layout_ptr(), std::move(cps));
  out.options_ = disc.options();
  out.alpha_ = alpha;
  out.straightened_ = alpha > 0 && straighten;
  if (!(out.map_.min_jacobian() > 0)) throw TemplateError("boundary layer: folded template");
  out.ops_ = build_operators(out.map_);
  return out;
}

DiscTemplate rebuild_operators(const DiscTemplate& disc) {
  DiscTemplate out = disc;
  out.ops_ = build_operators(out.map_);
  return out;
}

SectionMap scale_disc(const DiscTemplate& disc, double radius) {
  if (!(radius > 0) || !std::isfinite(radius)) throw ParameterError("scale_disc: radius must be positive");
  std::vector<Vec2> cps = disc.map().control_points();
  for (auto& c : cps) c *= radius;
  return SectionMap(disc.map().layout_ptr(), std::move(cps));
}

SectionMap harmonic_section(const DiscTemplate& disc, const BoundaryCorrespondence& boundary) {
  boundary.require_convex();
  const Eigen::MatrixXd xb = disc.fit_boundary(boundary);
  const Eigen::MatrixXd xi = disc.solve_interior(xb);
  SectionMap map(disc.map().layout_ptr(), assemble_control_points(disc.layout(), xb, xi));
  const double jmin = map.min_jacobian();
  if (!(jmin > 0)) {
    std::ostringstream os;
    os << "harmonic section: fold detected (min Jacobian " << jmin
       << "); use a finer template (more control points per side)";
    throw FoldError(os.str());
  }
  return map;
}

std::array<double, 3> anchor_parameter(int k) {
  if (k < 0 || k > 3) throw ParameterError("anchor index must be 0..3");
  return {static_cast<double>(k + 1), 1.0, 0.5};
}

}  // namespace hexvessel
