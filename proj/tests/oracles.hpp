// Test-only reference implementations, kept independent of the production
// solver paths they check.
#pragma once

#include <algorithm>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// Characteristic polynomial coefficients by the Faddeev-LeVerrier recursion:
// p(x) = x^n + c[1] x^(n-1) + ... + c[n].
inline std::vector<Complex> char_poly(const MatrixXcd& A) {
  const int n = static_cast<int>(A.rows());
  std::vector<Complex> c(n + 1);
  c[0] = 1.0;
  MatrixXcd M = MatrixXcd::Zero(n, n);
  for (int k = 1; k <= n; ++k) {
    M = A * M + c[k - 1] * MatrixXcd::Identity(n, n);
    c[k] = -(A * M).trace() / static_cast<double>(k);
  }
  return c;
}

// All roots of a monic polynomial by Durand-Kerner iteration.
inline std::vector<Complex> poly_roots(const std::vector<Complex>& coeffs,
                                       int max_iter = 2000, double tol = 1e-14) {
  const int n = static_cast<int>(coeffs.size()) - 1;
  auto eval = [&](Complex x) {
    Complex p = coeffs[0];
    for (int i = 1; i <= n; ++i) p = p * x + coeffs[i];
    return p;
  };
  // Initial guesses on a circle of radius set by the coefficient bound.
  double radius = 0.0;
  for (int i = 1; i <= n; ++i)
    radius = std::max(radius, 1.0 + std::pow(std::abs(coeffs[i]), 1.0 / i));
  std::vector<Complex> z(n);
  for (int i = 0; i < n; ++i) {
    double t = 2.0 * M_PI * i / n + 0.4;  // avoid axis alignment
    z[i] = radius * Complex(std::cos(t), std::sin(t));
  }
  for (int it = 0; it < max_iter; ++it) {
    double moved = 0.0;
    for (int i = 0; i < n; ++i) {
      Complex denom = 1.0;
      for (int j = 0; j < n; ++j)
        if (j != i) denom *= (z[i] - z[j]);
      Complex delta = eval(z[i]) / denom;
      z[i] -= delta;
      moved = std::max(moved, std::abs(delta));
    }
    if (moved < tol * std::max(1.0, radius)) break;
  }
  return z;
}

inline std::vector<Complex> eigenvalues_via_charpoly(const MatrixXcd& A) {
  return poly_roots(char_poly(A));
}

// Greatest distance after optimal greedy matching of two multisets.
inline double multiset_distance(std::vector<Complex> a, std::vector<Complex> b) {
  double worst = 0.0;
  for (const Complex& x : a) {
    size_t best = 0;
    double bestd = 1e300;
    for (size_t j = 0; j < b.size(); ++j) {
      double d = std::abs(x - b[j]);
      if (d < bestd) {
        bestd = d;
        best = j;
      }
    }
    worst = std::max(worst, bestd);
    b.erase(b.begin() + best);
  }
  return worst;
}

inline MatrixXcd random_complex_matrix(int n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatrixXcd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = Complex(u(gen), u(gen));
  return A;
}

}  // namespace oracle
