#include "ptlaser/eigensolver.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "ptlaser/tridiagonal.hpp"

namespace ptlaser {

namespace {

// Unitary plane rotation G = [[c, s], [-conj(s), c]] with real c >= 0 that
// maps (a, b) to (r, 0).
inline void make_rotation(Complex a, Complex b, double& c, Complex& s, Complex& r) {
  double absa = std::abs(a), absb = std::abs(b);
  if (absb == 0.0) {
    c = 1.0;
    s = Complex(0);
    r = a;
    return;
  }
  if (absa == 0.0) {
    c = 0.0;
    s = std::conj(b) / absb;
    r = absb;
    return;
  }
  double nrm = std::hypot(absa, absb);
  Complex u = a / absa;
  c = absa / nrm;
  s = u * std::conj(b) / nrm;
  r = u * nrm;
}

// Eigenvalues of [[a, b], [c, d]].
inline std::pair<Complex, Complex> eig2x2(Complex a, Complex b, Complex c,
                                          Complex d) {
  Complex half_tr = 0.5 * (a + d);
  Complex q = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
  return {half_tr + q, half_tr - q};
}

inline Complex wilkinson_shift(const MatrixXcd& H, int hi) {
  auto [l1, l2] = eig2x2(H(hi - 1, hi - 1), H(hi - 1, hi), H(hi, hi - 1), H(hi, hi));
  Complex d = H(hi, hi);
  return (std::abs(l1 - d) < std::abs(l2 - d)) ? l1 : l2;
}

// One explicit-shift QR sweep confined to the Hessenberg window [l, hi].
// Off-window blocks are not updated; they do not influence the eigenvalues
// of the diagonal blocks, and eigenvectors are recovered later by inverse
// iteration on the original matrix.
void qr_sweep(MatrixXcd& H, int l, int hi, Complex mu) {
  const int m = hi - l + 1;
  std::vector<double> cs(m - 1);
  std::vector<Complex> sn(m - 1);
  for (int j = l; j <= hi; ++j) H(j, j) -= mu;
  for (int j = l; j < hi; ++j) {
    double c;
    Complex s, r;
    make_rotation(H(j, j), H(j + 1, j), c, s, r);
    cs[j - l] = c;
    sn[j - l] = s;
    H(j, j) = r;
    H(j + 1, j) = Complex(0);
    for (int col = j + 1; col <= hi; ++col) {
      Complex t1 = H(j, col), t2 = H(j + 1, col);
      H(j, col) = c * t1 + s * t2;
      H(j + 1, col) = -std::conj(s) * t1 + c * t2;
    }
  }
  for (int j = l; j < hi; ++j) {
    double c = cs[j - l];
    Complex s = sn[j - l];
    int rmax = std::min(j + 1, hi);
    for (int row = l; row <= rmax; ++row) {
      Complex t1 = H(row, j), t2 = H(row, j + 1);
      H(row, j) = c * t1 + std::conj(s) * t2;
      H(row, j + 1) = -s * t1 + c * t2;
    }
  }
  for (int j = l; j <= hi; ++j) H(j, j) += mu;
}

}  // namespace

std::vector<Complex> hessenberg_qr_eigenvalues(MatrixXcd H,
                                               int max_sweeps_per_eigenvalue) {
  const int n = static_cast<int>(H.rows());
  if (n == 0) return {};
  const double eps = std::numeric_limits<double>::epsilon();
  double hnorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - 1); j < n; ++j) hnorm = std::max(hnorm, std::abs(H(i, j)));
  if (hnorm == 0.0) return std::vector<Complex>(n, Complex(0));

  std::vector<Complex> evals(n);
  int hi = n - 1;
  int sweeps = 0;
  while (hi >= 0) {
    if (hi == 0) {
      evals[0] = H(0, 0);
      break;
    }
    // Deflation scan for the active window ending at hi.
    int l = hi;
    while (l > 0) {
      double s = std::abs(H(l - 1, l - 1)) + std::abs(H(l, l));
      if (s == 0.0) s = hnorm;
      if (std::abs(H(l, l - 1)) <= eps * s) {
        H(l, l - 1) = Complex(0);
        break;
      }
      --l;
    }
    if (l == hi) {
      evals[hi] = H(hi, hi);
      --hi;
      sweeps = 0;
      continue;
    }
    if (hi - l == 1) {
      auto [l1, l2] = eig2x2(H(l, l), H(l, hi), H(hi, l), H(hi, hi));
      evals[l] = l2;
      evals[hi] = l1;
      hi = l - 1;
      sweeps = 0;
      continue;
    }
    if (++sweeps > max_sweeps_per_eigenvalue)
      throw NumericalError("QR iteration failed to converge (window " +
                           std::to_string(l) + ".." + std::to_string(hi) + ")");
    Complex mu = wilkinson_shift(H, hi);
    if (sweeps % 12 == 0)  // exceptional shift to break rare cycles
      mu = H(hi, hi) + Complex(1.5 * std::abs(H(hi, hi - 1)), 0.0);
    qr_sweep(H, l, hi, mu);
  }
  return evals;
}

std::vector<Complex> dense_eigenvalues(MatrixXcd A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("dense_eigenvalues: square matrix required");
  const int n = static_cast<int>(A.rows());
  if (n == 1) return {A(0, 0)};
  bool hessenberg = true;
  for (int j = 0; j < n - 2 && hessenberg; ++j)
    for (int i = j + 2; i < n; ++i)
      if (A(i, j) != Complex(0)) {
        hessenberg = false;
        break;
      }
  if (!hessenberg) {
    Eigen::HessenbergDecomposition<MatrixXcd> hd(A);
    A = hd.matrixH();
  }
  return hessenberg_qr_eigenvalues(std::move(A));
}

namespace {

// Deterministic start vector so results are reproducible run to run.
VectorXcd pseudo_random_start(int n, uint64_t seed) {
  VectorXcd v(n);
  uint64_t s = seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL;
  auto next = [&s]() {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return s;
  };
  for (int i = 0; i < n; ++i) {
    double a = (next() >> 11) * (1.0 / 9007199254740992.0) - 0.5;
    double b = (next() >> 11) * (1.0 / 9007199254740992.0) - 0.5;
    v[i] = Complex(a, b);
  }
  v.normalize();
  return v;
}

}  // namespace

RefinedPair tridiagonal_inverse_iteration(const VectorXcd& diag, Complex off,
                                          Complex shift, VectorXcd start,
                                          int max_iters, double target_residual) {
  const int n = static_cast<int>(diag.size());
  VectorXcd v = start.size() == n ? start.normalized()
                                  : pseudo_random_start(n, 0x5eedULL + n);
  auto apply = [&](const VectorXcd& y) {
    VectorXcd out(n);
    for (int i = 0; i < n; ++i) {
      Complex s = diag[i] * y[i];
      if (i > 0) s += off * y[i - 1];
      if (i + 1 < n) s += off * y[i + 1];
      out[i] = s;
    }
    return out;
  };
  double scale = diag.cwiseAbs().maxCoeff() + 2.0 * std::abs(off);
  Complex lambda = shift;
  RefinedPair best{shift, v, std::numeric_limits<double>::infinity(), 0};
  for (int it = 0; it < max_iters; ++it) {
    ShiftedTridiagonalSolver solver(diag, off, lambda);
    VectorXcd w = solver.solve(v);
    double wn = w.norm();
    if (!std::isfinite(wn) || wn == 0.0) {
      v = pseudo_random_start(n, 0xabcdULL + it);
      continue;
    }
    // Wielandt update: w ~ v / (lambda_true - lambda).
    Complex corr = v.dot(w) / w.squaredNorm();  // v.dot(w) = v^H w
    lambda += corr;
    v = w / wn;
    VectorXcd Tv = apply(v);
    Complex rq = v.dot(Tv);  // Hermitian Rayleigh quotient, ||v|| = 1
    double resid = (Tv - rq * v).norm();
    if (resid < best.residual) best = {rq, v, resid, it + 1};
    if (resid <= target_residual * scale) break;
    lambda = rq;
  }
  return best;
}

RefinedPair dense_inverse_iteration(const MatrixXcd& A, Complex shift,
                                    VectorXcd start, int max_iters) {
  const int n = static_cast<int>(A.rows());
  double scale = A.cwiseAbs().maxCoeff();
  VectorXcd v = start.size() == n ? start.normalized()
                                  : pseudo_random_start(n, 0xd15eULL + n);
  // Tiny deterministic detuning keeps the factorization usable when the
  // shift equals an eigenvalue to machine precision.
  Complex lambda = shift + scale * Complex(1e-14, 1e-14);
  RefinedPair best{shift, v, std::numeric_limits<double>::infinity(), 0};
  for (int it = 0; it < max_iters; ++it) {
    MatrixXcd M = A - lambda * MatrixXcd::Identity(n, n);
    Eigen::PartialPivLU<MatrixXcd> lu(M);
    VectorXcd w = lu.solve(v);
    double wn = w.norm();
    if (!std::isfinite(wn) || wn == 0.0) {
      v = pseudo_random_start(n, 0xfaceULL + it);
      continue;
    }
    Complex corr = v.dot(w) / w.squaredNorm();
    lambda += corr;
    v = w / wn;
    VectorXcd Av = A * v;
    Complex rq = v.dot(Av);
    double resid = (Av - rq * v).norm();
    if (resid < best.residual) best = {rq, v, resid, it + 1};
    if (resid <= 1e-13 * scale) break;
    lambda = rq + scale * Complex(2e-15, -1e-15);
  }
  return best;
}

}  // namespace ptlaser
