#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "ptlaser/grid.hpp"

namespace ptlaser {

/// LU factorization of a tridiagonal matrix without pivoting (Thomas
/// algorithm). Requires diagonal dominance; used for the Crank-Nicolson
/// matrices, whose diagonal carries 1 + dt/h^2.
template <typename Scalar>
class TridiagonalLU {
 public:
  TridiagonalLU() = default;

  TridiagonalLU(const Eigen::Vector<Scalar, Eigen::Dynamic>& diag,
                const Eigen::Vector<Scalar, Eigen::Dynamic>& lower,
                const Eigen::Vector<Scalar, Eigen::Dynamic>& upper) {
    const int n = static_cast<int>(diag.size());
    d_.resize(n);
    l_.resize(n - 1);
    u_ = upper;
    d_[0] = diag[0];
    for (int i = 1; i < n; ++i) {
      l_[i - 1] = lower[i - 1] / d_[i - 1];
      d_[i] = diag[i] - l_[i - 1] * upper[i - 1];
    }
  }

  Eigen::Vector<Scalar, Eigen::Dynamic> solve(
      const Eigen::Vector<Scalar, Eigen::Dynamic>& rhs) const {
    const int n = static_cast<int>(d_.size());
    Eigen::Vector<Scalar, Eigen::Dynamic> x = rhs;
    for (int i = 1; i < n; ++i) x[i] -= l_[i - 1] * x[i - 1];
    x[n - 1] /= d_[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = (x[i] - u_[i] * x[i + 1]) / d_[i];
    return x;
  }

 private:
  Eigen::Vector<Scalar, Eigen::Dynamic> d_, u_;
  Eigen::Vector<Scalar, Eigen::Dynamic> l_;
};

/// Factor (T - shift*I) for a complex symmetric tridiagonal T given by
/// (diag, constant off-diagonal), with partial pivoting so that the nearly
/// singular shifts of inverse iteration stay stable. Classic gttrf/gttrs
/// band scheme: U gains one fill-in superdiagonal.
class ShiftedTridiagonalSolver {
 public:
  ShiftedTridiagonalSolver(const VectorXcd& diag, Complex off, Complex shift) {
    n_ = static_cast<int>(diag.size());
    d_.resize(n_);
    du_.assign(std::max(n_ - 1, 0), off);
    dl_.assign(std::max(n_ - 1, 0), off);
    du2_.assign(std::max(n_ - 2, 0), Complex(0));
    piv_.assign(std::max(n_ - 1, 0), 0);
    for (int i = 0; i < n_; ++i) d_[i] = diag[i] - shift;

    for (int i = 0; i + 1 < n_; ++i) {
      if (std::abs(d_[i]) >= std::abs(dl_[i])) {
        Complex fact = (d_[i] != Complex(0)) ? dl_[i] / d_[i] : Complex(0);
        dl_[i] = fact;
        d_[i + 1] -= fact * du_[i];
      } else {
        Complex fact = d_[i] / dl_[i];
        d_[i] = dl_[i];
        dl_[i] = fact;
        Complex temp = du_[i];
        du_[i] = d_[i + 1];
        d_[i + 1] = temp - fact * d_[i + 1];
        if (i + 2 < n_) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -fact * du_[i + 1];
        }
        piv_[i] = 1;
      }
    }
    // An exactly singular pivot only happens when the shift is an eigenvalue
    // to machine precision; nudge so the solve stays usable.
    const double tiny = 1e-290;
    for (int i = 0; i < n_; ++i)
      if (std::abs(d_[i]) < tiny) d_[i] = tiny;
  }

  VectorXcd solve(const VectorXcd& rhs) const {
    VectorXcd b = rhs;
    for (int i = 0; i + 1 < n_; ++i) {
      if (!piv_[i]) {
        b[i + 1] -= dl_[i] * b[i];
      } else {
        Complex t = b[i];
        b[i] = b[i + 1];
        b[i + 1] = t - dl_[i] * b[i];
      }
    }
    b[n_ - 1] /= d_[n_ - 1];
    if (n_ > 1) b[n_ - 2] = (b[n_ - 2] - du_[n_ - 2] * b[n_ - 1]) / d_[n_ - 2];
    for (int i = n_ - 3; i >= 0; --i)
      b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
    return b;
  }

 private:
  int n_ = 0;
  std::vector<Complex> d_, du_, dl_, du2_;
  std::vector<char> piv_;
};

}  // namespace ptlaser
