#include "hexvessel/spline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>

#include "hexvessel/error.hpp"
#include "hexvessel/quadrature.hpp"

namespace hexvessel {

namespace {

constexpr double kDomainSlack = 1e-12;

}  // namespace

GaussRule gauss_legendre(int n) {
  if (n < 1) throw ParameterError("gauss_legendre: need at least one point");
  GaussRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[i] = 0.5 * (1.0 - x);
    rule.points[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

// ---------------------------------------------------------------------------
// KnotVector

KnotVector::KnotVector(int degree, std::vector<double> knots) : degree_(degree), knots_(std::move(knots)) {
  if (degree_ < 0) throw SplineError("knot vector: negative degree");
  const auto m = static_cast<int>(knots_.size());
  if (m < 2 * (degree_ + 1)) {
    std::ostringstream os;
    os << "knot vector: need at least " << 2 * (degree_ + 1) << " knots for degree " << degree_
       << ", got " << m;
    throw SplineError(os.str());
  }
  for (int i = 1; i < m; ++i) {
    if (!(knots_[i] >= knots_[i - 1])) throw SplineError("knot vector: knots must be non-decreasing");
  }
  for (int i = 1; i <= degree_; ++i) {
    if (knots_[i] != knots_[0] || knots_[m - 1 - i] != knots_[m - 1]) {
      throw SplineError("knot vector: end knots must be repeated degree+1 times (clamped)");
    }
  }
  if (!(knots_.back() > knots_.front())) throw SplineError("knot vector: empty parameter range");
  for (int i = degree_ + 1; i < m - degree_ - 1; ++i) {
    int mult = 1;
    while (i + mult < m - degree_ - 1 && knots_[i + mult] == knots_[i]) ++mult;
    if (mult > degree_) throw SplineError("knot vector: interior knot multiplicity exceeds degree");
    i += mult - 1;
  }
}

KnotVector KnotVector::clamped_uniform(int degree, int num_basis) {
  if (num_basis < degree + 1) throw SplineError("clamped_uniform: need at least degree+1 basis functions");
  std::vector<double> knots;
  knots.reserve(num_basis + degree + 1);
  for (int i = 0; i <= degree; ++i) knots.push_back(0.0);
  const int interior = num_basis - degree - 1;
  for (int i = 1; i <= interior; ++i) knots.push_back(static_cast<double>(i) / (interior + 1));
  for (int i = 0; i <= degree; ++i) knots.push_back(1.0);
  return KnotVector(degree, std::move(knots));
}

int KnotVector::find_span(double t) const {
  const int n = num_basis();
  if (t >= knots_[n]) return n - 1;
  if (t <= knots_[degree_]) return degree_;
  const auto it = std::upper_bound(knots_.begin() + degree_, knots_.begin() + n + 1, t);
  return static_cast<int>(it - knots_.begin()) - 1;
}

int KnotVector::eval_basis(double t, int num_derivatives, Eigen::MatrixXd& out) const {
  // Piegl & Tiller, algorithm A2.3.
  const int p = degree_;
  const int span = find_span(t);
  const int nd = std::min(num_derivatives, p);
  out.setZero(num_derivatives + 1, p + 1);

  Eigen::MatrixXd ndu(p + 1, p + 1);
  std::vector<double> left(p + 1), right(p + 1);
  ndu(0, 0) = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = t - knots_[span + 1 - j];
    right[j] = knots_[span + j] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu(j, r) = right[r + 1] + left[j - r];
      const double temp = ndu(r, j - 1) / ndu(j, r);
      ndu(r, j) = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu(j, j) = saved;
  }
  for (int j = 0; j <= p; ++j) out(0, j) = ndu(j, p);

  Eigen::MatrixXd a(2, p + 1);
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a.setZero();
    a(0, 0) = 1.0;
    for (int k = 1; k <= nd; ++k) {
      double d = 0.0;
      const int rk = r - k;
      const int pk = p - k;
      if (r >= k) {
        a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
        d = a(s2, 0) * ndu(rk, pk);
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
        d += a(s2, j) * ndu(rk + j, pk);
      }
      if (r <= pk) {
        a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
        d += a(s2, k) * ndu(r, pk);
      }
      out(k, r) = d;
      std::swap(s1, s2);
    }
  }
  double factor = p;
  for (int k = 1; k <= nd; ++k) {
    out.row(k) *= factor;
    factor *= (p - k);
  }
  return span;
}

std::vector<double> KnotVector::greville() const {
  std::vector<double> g(num_basis());
  for (int i = 0; i < num_basis(); ++i) {
    double s = 0.0;
    for (int k = 1; k <= degree_; ++k) s += knots_[i + k];
    g[i] = degree_ > 0 ? s / degree_ : knots_[i];
  }
  return g;
}

namespace {

void check_domain(const KnotVector& kv, double t) {
  if (!(t >= kv.front() - kDomainSlack && t <= kv.back() + kDomainSlack)) {
    std::ostringstream os;
    os << "parameter " << t << " outside [" << kv.front() << ", " << kv.back() << "]";
    throw DomainError(os.str());
  }
}

double clamp_to(const KnotVector& kv, double t) { return std::clamp(t, kv.front(), kv.back()); }

}  // namespace

// ---------------------------------------------------------------------------
// Curves

template <int Dim>
BSplineCurve<Dim>::BSplineCurve(KnotVector knots, std::vector<Point> control_points)
    : knots_(std::move(knots)), control_points_(std::move(control_points)) {
  if (static_cast<int>(control_points_.size()) != knots_.num_basis()) {
    std::ostringstream os;
    os << "curve: knot vector implies " << knots_.num_basis() << " control points, got "
       << control_points_.size();
    throw SplineError(os.str());
  }
}

template <int Dim>
typename BSplineCurve<Dim>::Point BSplineCurve<Dim>::eval(double t, int derivative_order) const {
  check_domain(knots_, t);
  if (derivative_order < 0) throw ParameterError("curve: negative derivative order");
  if (derivative_order > degree()) return Point::Zero();
  Eigen::MatrixXd basis;
  const int span = knots_.eval_basis(clamp_to(knots_, t), derivative_order, basis);
  Point out = Point::Zero();
  const int p = degree();
  for (int j = 0; j <= p; ++j) out += basis(derivative_order, j) * control_points_[span - p + j];
  return out;
}

template class BSplineCurve<2>;
template class BSplineCurve<3>;

ScalarSpline::ScalarSpline(KnotVector knots, std::vector<double> coefficients)
    : knots_(std::move(knots)), coefficients_(std::move(coefficients)) {
  if (static_cast<int>(coefficients_.size()) != knots_.num_basis()) {
    std::ostringstream os;
    os << "scalar spline: knot vector implies " << knots_.num_basis() << " coefficients, got "
       << coefficients_.size();
    throw SplineError(os.str());
  }
}

double ScalarSpline::eval(double t, int derivative_order) const {
  check_domain(knots_, t);
  if (derivative_order < 0) throw ParameterError("scalar spline: negative derivative order");
  if (derivative_order > knots_.degree()) return 0.0;
  Eigen::MatrixXd basis;
  const int span = knots_.eval_basis(clamp_to(knots_, t), derivative_order, basis);
  const int p = knots_.degree();
  double out = 0.0;
  for (int j = 0; j <= p; ++j) out += basis(derivative_order, j) * coefficients_[span - p + j];
  return out;
}

void ScalarSpline::require_positive(int samples) const {
  for (int i = 0; i < samples; ++i) {
    const double t = knots_.front() + (knots_.back() - knots_.front()) * i / (samples - 1);
    const double v = eval(t);
    if (!(v > 0.0)) {
      std::ostringstream os;
      os << "radius not positive at t=" << t << " (value " << v << ")";
      throw InvalidProfileError(os.str());
    }
  }
}

// ---------------------------------------------------------------------------
// Hermite

std::array<double, 4> hermite_basis(double t, int derivative_order) {
  const double t2 = t * t, t3 = t2 * t;
  if (derivative_order == 0) {
    return {2 * t3 - 3 * t2 + 1, t3 - 2 * t2 + t, -2 * t3 + 3 * t2, t3 - t2};
  }
  if (derivative_order == 1) {
    return {6 * t2 - 6 * t, 3 * t2 - 4 * t + 1, -6 * t2 + 6 * t, 3 * t2 - 2 * t};
  }
  throw ParameterError("hermite: derivative order must be 0 or 1");
}

Vec3 HermiteCurve::eval(double t, int derivative_order) const {
  if (!(t >= -kDomainSlack && t <= 1.0 + kDomainSlack)) {
    std::ostringstream os;
    os << "hermite: parameter " << t << " outside [0, 1]";
    throw DomainError(os.str());
  }
  const auto h = hermite_basis(t, derivative_order);
  return h[0] * p + h[1] * m1 + h[2] * q + h[3] * m2;
}

// ---------------------------------------------------------------------------
// Fitting

template <int Dim>
std::vector<double> chord_length_parameters(std::span<const Eigen::Matrix<double, Dim, 1>> points) {
  std::vector<double> t(points.size(), 0.0);
  if (points.size() < 2) return t;
  for (std::size_t i = 1; i < points.size(); ++i) t[i] = t[i - 1] + (points[i] - points[i - 1]).norm();
  const double total = t.back();
  if (!(total > 0.0)) throw SingularFitError("chord-length parameterization: all points coincide");
  for (auto& v : t) v /= total;
  t.back() = 1.0;
  return t;
}

template std::vector<double> chord_length_parameters<2>(std::span<const Vec2>);
template std::vector<double> chord_length_parameters<3>(std::span<const Vec3>);

namespace {

// Integral of N_i'' N_j'' over the parameter range.
Eigen::MatrixXd second_derivative_gram(const KnotVector& kv) {
  const int n = kv.num_basis();
  const int p = kv.degree();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  if (p < 2) return gram;
  const auto rule = gauss_legendre(p + 1);
  const auto& k = kv.knots();
  Eigen::MatrixXd basis;
  for (int s = p; s < n; ++s) {
    const double a = k[s], b = k[s + 1];
    if (b <= a) continue;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double t = a + (b - a) * rule.points[q];
      const double w = (b - a) * rule.weights[q];
      const int span = kv.eval_basis(t, 2, basis);
      for (int i = 0; i <= p; ++i)
        for (int j = 0; j <= p; ++j) gram(span - p + i, span - p + j) += w * basis(2, i) * basis(2, j);
    }
  }
  return gram;
}

// Solves (B^T B + weight * G) C = B^T Y for the coefficient matrix C.
Eigen::MatrixXd solve_fit(std::span<const double> abscissae, const Eigen::MatrixXd& values,
                          const KnotVector& kv, double weight) {
  const int n = kv.num_basis();
  const int p = kv.degree();
  if (static_cast<int>(abscissae.size()) < n) {
    std::ostringstream os;
    os << "fit: " << abscissae.size() << " samples for a space of dimension " << n;
    throw SingularFitError(os.str());
  }
  if (weight < 0.0) throw ParameterError("fit: negative smoothing weight");

  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, values.cols());
  std::vector<double> coverage(n, 0.0);
  Eigen::MatrixXd basis;
  for (std::size_t s = 0; s < abscissae.size(); ++s) {
    check_domain(kv, abscissae[s]);
    const int span = kv.eval_basis(clamp_to(kv, abscissae[s]), 0, basis);
    for (int i = 0; i <= p; ++i) {
      const int gi = span - p + i;
      coverage[gi] += basis(0, i) * basis(0, i);
      rhs.row(gi) += basis(0, i) * values.row(static_cast<Eigen::Index>(s));
      for (int j = 0; j <= p; ++j) normal(gi, span - p + j) += basis(0, i) * basis(0, j);
    }
  }
  const auto& k = kv.knots();
  for (int i = 0; i < n; ++i) {
    if (coverage[i] < 1e-14) {
      std::ostringstream os;
      os << "fit: no samples support basis function " << i << " on span [" << k[i] << ", "
         << k[i + p + 1] << "]";
      throw SingularFitError(os.str());
    }
  }
  if (weight > 0.0) normal += weight * second_derivative_gram(kv);

  Eigen::LLT<Eigen::MatrixXd> llt(normal);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-15) {
    // Locate the weakest pivot to name the deficient span.
    Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
    const auto d = ldlt.vectorD();
    Eigen::Index worst = 0;
    d.cwiseAbs().minCoeff(&worst);
    const auto idx = ldlt.transpositionsP().indices();
    int basis_index = static_cast<int>(worst);
    for (Eigen::Index r = 0; r < idx.size(); ++r)
      if (r == worst) basis_index = static_cast<int>(idx[r]);
    std::ostringstream os;
    os << "fit: normal matrix is rank deficient near span [" << k[basis_index] << ", "
       << k[basis_index + p + 1] << "]; samples are too clustered";
    throw SingularFitError(os.str());
  }
  return llt.solve(rhs);
}

}  // namespace

template <int Dim>
BSplineCurve<Dim> fit_least_squares(std::span<const double> abscissae,
                                    std::span<const Eigen::Matrix<double, Dim, 1>> values,
                                    const KnotVector& space) {
  if (abscissae.size() != values.size()) throw ParameterError("fit: abscissae/value count mismatch");
  Eigen::MatrixXd y(values.size(), Dim);
  for (std::size_t i = 0; i < values.size(); ++i) y.row(static_cast<Eigen::Index>(i)) = values[i].transpose();
  const Eigen::MatrixXd c = solve_fit(abscissae, y, space, 0.0);
  std::vector<Eigen::Matrix<double, Dim, 1>> cps(c.rows());
  for (Eigen::Index i = 0; i < c.rows(); ++i) cps[i] = c.row(i).transpose();
  return BSplineCurve<Dim>(space, std::move(cps));
}

template <int Dim>
BSplineCurve<Dim> fit_least_squares(std::span<const Eigen::Matrix<double, Dim, 1>> points,
                                    const KnotVector& space) {
  const auto t = chord_length_parameters<Dim>(points);
  return fit_least_squares<Dim>(std::span<const double>(t), points, space);
}

template Curve2 fit_least_squares<2>(std::span<const double>, std::span<const Vec2>, const KnotVector&);
template Curve3 fit_least_squares<3>(std::span<const double>, std::span<const Vec3>, const KnotVector&);
template Curve2 fit_least_squares<2>(std::span<const Vec2>, const KnotVector&);
template Curve3 fit_least_squares<3>(std::span<const Vec3>, const KnotVector&);

ScalarSpline fit_least_squares(std::span<const double> abscissae, std::span<const double> values,
                               const KnotVector& space) {
  return interpolate_with_smoothing(abscissae, values, space, 0.0);
}

ScalarSpline interpolate_with_smoothing(std::span<const double> abscissae,
                                        std::span<const double> values, const KnotVector& space,
                                        double smoothing_weight) {
  if (abscissae.size() != values.size()) throw ParameterError("fit: abscissae/value count mismatch");
  Eigen::MatrixXd y(values.size(), 1);
  for (std::size_t i = 0; i < values.size(); ++i) y(static_cast<Eigen::Index>(i), 0) = values[i];
  const Eigen::MatrixXd c = solve_fit(abscissae, y, space, smoothing_weight);
  return ScalarSpline(space, std::vector<double>(c.data(), c.data() + c.rows()));
}

}  // namespace hexvessel
