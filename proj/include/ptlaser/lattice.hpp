#pragma once

#include <variant>

#include "ptlaser/grid.hpp"

namespace ptlaser {

/// Hard-walled well of half-width u with a linear imaginary tilt:
/// V(x) = i*gamma*x on (-u, u), infinite walls at +-u (encoded purely by
/// the Dirichlet boundary of the grid, never by large finite potentials).
struct SquireWell {
  double u = 6.0;
  double gamma = 0.0;
};

/// Quartic double well with tilt: V(x) = beta*(x^2 - x0^2)^2 + i*gamma*x.
struct QuarticDoubleWell {
  double beta = 7e-6;
  double x0 = 10.0;
  double gamma = 0.0;
};

/// Mirror sampled as power reflectance R in (0,1] and phase Delta (radians),
/// aligned with the grid the operator will be assembled on.
struct MirrorProfile {
  VectorXd R;
  VectorXd Delta;
};

using PotentialSpec = std::variant<SquireWell, QuarticDoubleWell, MirrorProfile>;

/// V_j = -ln sqrt(R_j) - i*Delta_j. Rejects nonpositive reflectance samples;
/// a genuine hard aperture belongs to SquireWell, not to a sampled profile.
VectorXcd potential_from_mirror(const VectorXd& R, const VectorXd& Delta);

/// Evaluate a potential spec on the interior points of `grid`.
VectorXcd evaluate_potential(const PotentialSpec& spec, const Grid& grid);

/// Return a copy of `spec` with its tilt parameter replaced. For sampled
/// mirrors the tilt is added to the phase as Delta -= gamma*x (which
/// composes to V += i*gamma*x).
PotentialSpec with_gamma(const PotentialSpec& spec, double gamma);

double gamma_of(const PotentialSpec& spec);

/// Discretized H = -d^2/dx^2 + V(x) - g0 with second-order central
/// differences and Dirichlet boundaries. Complex symmetric (non-conjugated)
/// tridiagonal: off-diagonals are the constant -1/h^2.
struct OperatorMatrix {
  Grid grid;
  VectorXcd diag;
  double off = 0.0;
  double g0 = 0.0;

  int size() const { return static_cast<int>(diag.size()); }
  bool is_real() const { return diag.imag().cwiseAbs().maxCoeff() == 0.0; }
  double inf_norm() const {
    double m = 0.0;
    for (int i = 0; i < size(); ++i) {
      double row = std::abs(diag[i]) + (i > 0 ? std::abs(off) : 0.0) +
                   (i + 1 < size() ? std::abs(off) : 0.0);
      m = std::max(m, row);
    }
    return m;
  }
  MatrixXcd dense() const;
  VectorXcd apply(const VectorXcd& v) const;
};

OperatorMatrix assemble_hamiltonian(const PotentialSpec& spec, const Grid& grid,
                                    double g0);

}  // namespace ptlaser
