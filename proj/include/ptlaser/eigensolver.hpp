#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ptlaser/grid.hpp"

namespace ptlaser {

/// All eigenvalues of an upper Hessenberg complex matrix by the explicit
/// single-shift QR iteration with Wilkinson shifts and deflation. The matrix
/// is consumed. Throws NumericalError if a window exceeds the sweep budget.
std::vector<Complex> hessenberg_qr_eigenvalues(MatrixXcd H,
                                               int max_sweeps_per_eigenvalue = 40);

/// All eigenvalues of a general dense complex matrix: Householder reduction
/// to Hessenberg form followed by the shifted QR iteration above.
std::vector<Complex> dense_eigenvalues(MatrixXcd A);

struct RefinedPair {
  Complex lambda;
  VectorXcd vec;       // unit 2-norm
  double residual;     // ||T v - lambda v||_2
  int iterations = 0;
};

/// Inverse iteration with shift updates on a complex symmetric tridiagonal
/// matrix (diag, constant off-diagonal). `start` may be empty, in which case
/// a deterministic pseudo-random start is used. The final eigenvalue is the
/// Rayleigh quotient of the converged vector.
RefinedPair tridiagonal_inverse_iteration(const VectorXcd& diag, Complex off,
                                          Complex shift, VectorXcd start,
                                          int max_iters = 10,
                                          double target_residual = 1e-13);

/// Dense counterpart used for small/general matrices.
RefinedPair dense_inverse_iteration(const MatrixXcd& A, Complex shift,
                                    VectorXcd start, int max_iters = 8);

}  // namespace ptlaser
