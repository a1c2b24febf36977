#pragma once

#include <optional>
#include <vector>

#include "ptlaser/lattice.hpp"

namespace ptlaser {

/// k eigenpairs sorted ascending by real part (ties by imaginary part).
/// Vectors have unit Euclidean norm with the phase fixed so the
/// largest-magnitude entry is real positive.
struct Spectrum {
  VectorXcd eigenvalues;
  MatrixXcd right_vectors;  // N x k, columns aligned with eigenvalues

  int size() const { return static_cast<int>(eigenvalues.size()); }
};

/// The k eigenvalues of smallest real part with right eigenvectors.
///
/// Algorithm: dense complex eigensolver (the matrix is already upper
/// Hessenberg; general inputs get a Householder reduction first) with
/// shifted QR iteration for the values, followed by inverse iteration on
/// the original matrix for the vectors. For large tridiagonal operators
/// the QR iteration runs on a Rayleigh-Ritz projection onto the low
/// eigenspace of Re(H); the projected values only seed shifts, and every
/// returned pair is refined on the full matrix to the residual bound
/// ||H v - E v|| <= 1e-10 ||H||_inf.
Spectrum eig(const OperatorMatrix& op, int k);

/// Same contract for a general dense complex matrix.
Spectrum eig(const MatrixXcd& A, int k);

double max_abs_imag(const Spectrum& s);

struct ThresholdResult {
  double gamma_pt = 0.0;
  double gamma_lo = 0.0;
  double gamma_hi = 0.0;
  int pair_index = 0;        // index of the lower of the coalescing pair
  double max_imag_at_hi = 0.0;
};

struct ThresholdOptions {
  double tol_real = 1e-7;
  double tol_gamma = 1e-4;
  int k = 6;
};

/// Bisection on gamma for the onset of complex eigenvalues (max |Im E| over
/// the k lowest modes crossing tol_real). The range must bracket the
/// transition or "no transition in range" is thrown.
ThresholdResult scan_threshold(const PotentialSpec& family, const Grid& grid,
                               double g0, double gamma_lo, double gamma_hi,
                               const ThresholdOptions& opts = {});

/// The coalesced mode pair above the PT-breaking point, with adjoint (left)
/// eigenvectors computed independently from the conjugate-transpose matrix
/// and biorthonormalized: <u_i_adj | u_j> = delta_ij.
struct ModePair {
  double omega = 0.0;   // |Im E| of the pair
  double g0_th = 0.0;   // Re E of the pair, in terms of H(g0 = 0)
  Complex E1, E2;       // E1 has Im < 0 (so that -H u1 = +i*omega*u1 at threshold)
  VectorXcd u1, u2;
  VectorXcd u1_adj, u2_adj;
  bool near_defective = false;
};

ModePair mode_pair_at(const OperatorMatrix& op);

/// Per-gamma sorted spectra with eigenvalue branches matched across
/// adjacent gamma samples by nearest-neighbor continuation in the complex
/// plane (ties broken by smaller index).
struct SpectrumTable {
  VectorXd gammas;
  MatrixXcd energies;  // row per gamma sample, k branch columns
};

SpectrumTable spectrum_vs_gamma(const PotentialSpec& family, const Grid& grid,
                                double g0, const VectorXd& gamma_samples, int k,
                                int jobs = 1);

}  // namespace ptlaser
