#include "ptlaser/lattice.hpp"

#include <cmath>

namespace ptlaser {

VectorXcd potential_from_mirror(const VectorXd& R, const VectorXd& Delta) {
  if (R.size() != Delta.size())
    throw std::invalid_argument("potential_from_mirror: R and Delta size mismatch");
  VectorXcd v(R.size());
  for (Eigen::Index j = 0; j < R.size(); ++j) {
    if (!(R[j] > 0.0) || R[j] > 1.0)
      throw std::invalid_argument(
          "potential_from_mirror: reflectance samples must lie in (0,1]");
    v[j] = Complex(-std::log(std::sqrt(R[j])), -Delta[j]);
  }
  return v;
}

VectorXcd evaluate_potential(const PotentialSpec& spec, const Grid& grid) {
  const VectorXd& x = grid.points;
  return std::visit(
      [&](const auto& s) -> VectorXcd {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SquireWell>) {
          // The infinite wall lives at the grid boundary: the grid must span
          // exactly (-u, u).
          double tol = 1e-9 * s.u;
          if (std::abs(grid.x_min + s.u) > tol || std::abs(grid.x_max - s.u) > tol)
            throw std::invalid_argument(
                "evaluate_potential: SquireWell grid must span exactly (-u, u)");
          return Complex(0, 1) * s.gamma * x.cast<Complex>();
        } else if constexpr (std::is_same_v<T, QuarticDoubleWell>) {
          VectorXd re = s.beta * (x.array().square() - s.x0 * s.x0).square();
          return re.cast<Complex>() + Complex(0, 1) * s.gamma * x.cast<Complex>();
        } else {
          if (s.R.size() != grid.n)
            throw std::invalid_argument(
                "evaluate_potential: mirror samples not aligned with grid");
          return potential_from_mirror(s.R, s.Delta);
        }
      },
      spec);
}

PotentialSpec with_gamma(const PotentialSpec& spec, double gamma) {
  return std::visit(
      [&](auto s) -> PotentialSpec {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, MirrorProfile>) {
          // Adding a tilt means Delta -> Delta - gamma*x, which requires the
          // grid; sampled mirrors carry their tilt in Delta already.
          throw std::invalid_argument(
              "with_gamma: sampled mirror profiles carry tilt in Delta");
        } else {
          s.gamma = gamma;
          return s;
        }
      },
      spec);
}

double gamma_of(const PotentialSpec& spec) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, MirrorProfile>)
          return 0.0;
        else
          return s.gamma;
      },
      spec);
}

MatrixXcd OperatorMatrix::dense() const {
  int n = size();
  MatrixXcd m = MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = diag[i];
    if (i + 1 < n) {
      m(i, i + 1) = off;
      m(i + 1, i) = off;
    }
  }
  return m;
}

VectorXcd OperatorMatrix::apply(const VectorXcd& v) const {
  int n = size();
  VectorXcd out(n);
  for (int i = 0; i < n; ++i) {
    Complex s = diag[i] * v[i];
    if (i > 0) s += off * v[i - 1];
    if (i + 1 < n) s += off * v[i + 1];
    out[i] = s;
  }
  return out;
}

OperatorMatrix assemble_hamiltonian(const PotentialSpec& spec, const Grid& grid,
                                    double g0) {
  OperatorMatrix op;
  op.grid = grid;
  op.g0 = g0;
  double h2 = grid.h * grid.h;
  op.off = -1.0 / h2;
  VectorXcd v = evaluate_potential(spec, grid);
  op.diag = v.array() + Complex(2.0 / h2 - g0, 0.0);
  return op;
}

}  // namespace ptlaser
