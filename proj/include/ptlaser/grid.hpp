#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

namespace ptlaser {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

/// Thrown when an algorithm fails numerically (as opposed to a bad argument).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Uniform 1-D grid of interior points on (x_min, x_max).
///
/// The endpoints themselves are not stored: fields satisfy homogeneous
/// Dirichlet conditions there, so x_j = x_min + j*h for j = 1..n with
/// h = (x_max - x_min)/(n + 1).
struct Grid {
  int n = 0;
  double x_min = 0.0;
  double x_max = 0.0;
  double h = 0.0;
  VectorXd points;

  bool symmetric() const { return std::abs(x_min + x_max) <= 1e-12 * (x_max - x_min); }
};

inline Grid build_grid(double x_min, double x_max, int n) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max))
    throw std::invalid_argument("build_grid: bounds must be finite");
  if (!(x_max > x_min))
    throw std::invalid_argument("build_grid: x_max must exceed x_min");
  if (n < 3) throw std::invalid_argument("build_grid: need at least 3 interior points");
  Grid g;
  g.n = n;
  g.x_min = x_min;
  g.x_max = x_max;
  g.h = (x_max - x_min) / (n + 1);
  g.points.resize(n);
  for (int j = 0; j < n; ++j) g.points[j] = x_min + (j + 1) * g.h;
  return g;
}

/// Trapezoidal quadrature of samples on the interior points of `grid`,
/// with implicit zeros at both endpoints. For Dirichlet fields this is
/// simply h * sum(f).
template <typename Derived>
auto trapezoid(const Eigen::MatrixBase<Derived>& f, const Grid& grid) ->
    typename Derived::Scalar {
  return f.sum() * grid.h;
}

/// Reverse a sampled function in x (realizes f(-x) on a symmetric grid).
inline VectorXcd reflect(const VectorXcd& f) { return f.reverse(); }

}  // namespace ptlaser
