#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "hexvessel/vec.hpp"

namespace hexvessel {

/// Open (clamped) knot vector: the end knots carry multiplicity degree+1.
class KnotVector {
public:
  KnotVector() = default;
  KnotVector(int degree, std::vector<double> knots);

  /// Clamped knot vector on [0, 1] with uniformly spaced interior knots.
  static KnotVector clamped_uniform(int degree, int num_basis);

  int degree() const noexcept { return degree_; }
  const std::vector<double>& knots() const noexcept { return knots_; }
  int num_basis() const noexcept { return static_cast<int>(knots_.size()) - degree_ - 1; }
  double front() const noexcept { return knots_[degree_]; }
  double back() const noexcept { return knots_[num_basis()]; }

  /// Index of the knot span containing t. The last span is closed on the right.
  int find_span(double t) const;

  /// Values and derivatives of the degree+1 basis functions that are nonzero
  /// on the span of t. Row k holds the k-th derivative; column j belongs to
  /// basis function span-degree+j. Returns the span index.
  int eval_basis(double t, int num_derivatives, Eigen::MatrixXd& out) const;

  /// Greville abscissae, one per basis function.
  std::vector<double> greville() const;

  bool operator==(const KnotVector&) const = default;

private:
  int degree_ = 0;
  std::vector<double> knots_;
};

/// Polynomial B-spline curve in R^Dim.
template <int Dim>
class BSplineCurve {
public:
  using Point = Eigen::Matrix<double, Dim, 1>;

  BSplineCurve() = default;
  BSplineCurve(KnotVector knots, std::vector<Point> control_points);

  const KnotVector& knot_vector() const noexcept { return knots_; }
  const std::vector<Point>& control_points() const noexcept { return control_points_; }
  int degree() const noexcept { return knots_.degree(); }

  /// Point (order 0) or derivative of the given order at t. Orders above the
  /// degree yield the zero vector. Throws DomainError outside the knot range.
  Point eval(double t, int derivative_order = 0) const;

private:
  KnotVector knots_;
  std::vector<Point> control_points_;
};

using Curve2 = BSplineCurve<2>;
using Curve3 = BSplineCurve<3>;

extern template class BSplineCurve<2>;
extern template class BSplineCurve<3>;

class ScalarSpline {
public:
  ScalarSpline() = default;
  ScalarSpline(KnotVector knots, std::vector<double> coefficients);

  const KnotVector& knot_vector() const noexcept { return knots_; }
  const std::vector<double>& coefficients() const noexcept { return coefficients_; }

  double eval(double t, int derivative_order = 0) const;

  /// Throws InvalidProfileError unless the spline is positive at `samples`
  /// uniform abscissae.
  void require_positive(int samples = 1024) const;

private:
  KnotVector knots_;
  std::vector<double> coefficients_;
};

/// Cubic Hermite segment with the tangents already scaled.
struct HermiteCurve {
  Vec3 p = Vec3::Zero();
  Vec3 q = Vec3::Zero();
  Vec3 m1 = Vec3::Zero();
  Vec3 m2 = Vec3::Zero();

  /// Throws DomainError for t outside [0,1]; order must be 0 or 1.
  Vec3 eval(double t, int derivative_order = 0) const;
};

/// Cubic Hermite basis {H00, H01, H10, H11} (or its first derivative) at t,
/// weighting p, m1, q and m2 respectively.
std::array<double, 4> hermite_basis(double t, int derivative_order = 0);

/// Chord-length abscissae in [0,1] for an ordered point sequence.
template <int Dim>
std::vector<double> chord_length_parameters(std::span<const Eigen::Matrix<double, Dim, 1>> points);

/// Least-squares fit over the spline space spanned by `space`.
template <int Dim>
BSplineCurve<Dim> fit_least_squares(std::span<const double> abscissae,
                                    std::span<const Eigen::Matrix<double, Dim, 1>> values,
                                    const KnotVector& space);

/// Least-squares fit with chord-length abscissae.
template <int Dim>
BSplineCurve<Dim> fit_least_squares(std::span<const Eigen::Matrix<double, Dim, 1>> points,
                                    const KnotVector& space);

ScalarSpline fit_least_squares(std::span<const double> abscissae, std::span<const double> values,
                               const KnotVector& space);

/// Penalized fit: minimizes the squared residual plus
/// smoothing_weight * integral of the squared second derivative.
ScalarSpline interpolate_with_smoothing(std::span<const double> abscissae,
                                        std::span<const double> values, const KnotVector& space,
                                        double smoothing_weight);

}  // namespace hexvessel
