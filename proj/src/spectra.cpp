#include "ptlaser/spectra.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

#include "ptlaser/eigensolver.hpp"

namespace ptlaser {

namespace {

constexpr int kSmallDense = 220;
constexpr double kResidualBound = 1e-10;  // times ||H||_inf, per returned pair

void fix_phase(Eigen::Ref<VectorXcd> v) {
  int imax = 0;
  double best = -1.0;
  for (int i = 0; i < v.size(); ++i) {
    double a = std::abs(v[i]);
    if (a > best) {
      best = a;
      imax = i;
    }
  }
  if (best > 0.0) v *= std::conj(v[imax]) / best;
}

std::vector<int> sort_order(const std::vector<Complex>& w) {
  std::vector<int> idx(w.size());
  std::iota(idx.begin(), idx.end(), 0);
  double scale = 0.0;
  for (const Complex& z : w) scale = std::max(scale, std::abs(z));
  // Conjugate pairs have equal real parts analytically; a small tolerance
  // keeps the (Re, then Im) order stable against rounding noise.
  double tie = 1e-9 * (1.0 + scale);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (std::abs(w[a].real() - w[b].real()) > tie)
      return w[a].real() < w[b].real();
    if (w[a].imag() != w[b].imag()) return w[a].imag() < w[b].imag();
    return a < b;
  });
  return idx;
}

Spectrum finalize(std::vector<Complex> vals, std::vector<VectorXcd> vecs, int k) {
  auto idx = sort_order(vals);
  Spectrum s;
  s.eigenvalues.resize(k);
  s.right_vectors.resize(vecs[idx[0]].size(), k);
  for (int i = 0; i < k; ++i) {
    s.eigenvalues[i] = vals[idx[i]];
    VectorXcd v = vecs[idx[i]].normalized();
    fix_phase(v);
    s.right_vectors.col(i) = v;
  }
  return s;
}

// Lowest M eigenpairs of the real symmetric tridiagonal Re(H).
void real_tridiagonal_lowest(const VectorXd& adiag, double off, int M,
                             VectorXd& vals, MatrixXd& vecs) {
  const int n = static_cast<int>(adiag.size());
  VectorXd sub = VectorXd::Constant(n - 1, off);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es;
  es.computeFromTridiagonal(adiag, sub, Eigen::EigenvaluesOnly);
  vals = es.eigenvalues().head(M);
  vecs.resize(n, M);
  VectorXcd cdiag = adiag.cast<Complex>();
  double scale = adiag.cwiseAbs().maxCoeff() + 2.0 * std::abs(off);
  for (int i = 0; i < M; ++i) {
    RefinedPair p =
        tridiagonal_inverse_iteration(cdiag, Complex(off), Complex(vals[i]), {});
    VectorXd v = p.vec.real();
    // Guard against clustered levels: project out previously converged
    // vectors of (numerically) equal eigenvalue.
    for (int j = 0; j < i; ++j)
      if (std::abs(vals[j] - vals[i]) < 1e-8 * scale)
        v -= v.dot(vecs.col(j)) * vecs.col(j);
    vecs.col(i) = v.normalized();
    vals[i] = vecs.col(i).dot(adiag.cwiseProduct(vecs.col(i))) +
              2.0 * off * (vecs.col(i).head(n - 1).dot(vecs.col(i).tail(n - 1)));
  }
}

struct Candidate {
  Complex lambda;
  VectorXcd vec;
  double residual;
};

// Shift seeds for the k lowest modes of a large complex tridiagonal H:
// Rayleigh-Ritz values on the low eigenspace of Re(H).
std::vector<Candidate> projected_candidates(const OperatorMatrix& op, int k,
                                            int M) {
  VectorXd adiag = op.diag.real();
  VectorXd bdiag = op.diag.imag();
  VectorXd avals;
  MatrixXd U;
  real_tridiagonal_lowest(adiag, op.off, M, avals, U);

  MatrixXd W = U.transpose() * bdiag.asDiagonal() * U;
  MatrixXcd Hm = W.cast<Complex>() * Complex(0, 1);
  Hm.diagonal() += avals.cast<Complex>();

  std::vector<Complex> ritz = dense_eigenvalues(Hm);
  auto order = sort_order(ritz);
  int want = std::min(M, k + 4);

  std::vector<Candidate> out;
  for (int i = 0; i < want; ++i) {
    Complex theta = ritz[order[i]];
    RefinedPair py = dense_inverse_iteration(Hm, theta, {});
    VectorXcd start = U * py.vec;
    RefinedPair p = tridiagonal_inverse_iteration(op.diag, Complex(op.off),
                                                  theta, start);
    out.push_back({p.lambda, p.vec, p.residual});
  }
  return out;
}

// Member of the free-gamma family: analytic variants carry gamma as a
// field; a sampled mirror gets the tilt composed onto its phase,
// Delta -> Delta - gamma*x (which is V += i*gamma*x).
PotentialSpec family_member(const PotentialSpec& family, const Grid& grid,
                            double gamma) {
  if (std::holds_alternative<MirrorProfile>(family)) {
    MirrorProfile mp = std::get<MirrorProfile>(family);
    mp.Delta -= gamma * grid.points;
    return mp;
  }
  return with_gamma(family, gamma);
}

bool distinct(const std::vector<Candidate>& cs, double scale) {
  for (size_t i = 0; i < cs.size(); ++i)
    for (size_t j = i + 1; j < cs.size(); ++j) {
      if (std::abs(cs[i].lambda - cs[j].lambda) >
          std::max(1e-9 * scale, 1e-12))
        continue;
      if (std::abs(cs[i].vec.dot(cs[j].vec)) > 0.99) return false;
    }
  return true;
}

}  // namespace

Spectrum eig(const OperatorMatrix& op, int k) {
  const int n = op.size();
  if (k < 1 || k > n) throw std::invalid_argument("eig: need 1 <= k <= N");
  const double scale = op.inf_norm();

  if (op.is_real()) {
    VectorXd adiag = op.diag.real();
    VectorXd avals;
    MatrixXd U;
    real_tridiagonal_lowest(adiag, op.off, k, avals, U);
    std::vector<Complex> vals(k);
    std::vector<VectorXcd> vecs(k);
    for (int i = 0; i < k; ++i) {
      vals[i] = Complex(avals[i]);
      vecs[i] = U.col(i).cast<Complex>();
    }
    return finalize(std::move(vals), std::move(vecs), k);
  }

  std::vector<Candidate> cands;
  if (n <= kSmallDense) {
    std::vector<Complex> all = hessenberg_qr_eigenvalues(op.dense());
    auto order = sort_order(all);
    int want = std::min(n, k + 2);
    for (int i = 0; i < want; ++i) {
      Complex theta = all[order[i]];
      RefinedPair p =
          tridiagonal_inverse_iteration(op.diag, Complex(op.off), theta, {});
      cands.push_back({p.lambda, p.vec, p.residual});
    }
  } else {
    int M = std::min(n, std::max(48, 4 * k + 8));
    cands = projected_candidates(op, k, M);
    if (!distinct(cands, scale)) {
      M = std::min(n, 2 * M);
      cands = projected_candidates(op, k, M);
      if (!distinct(cands, scale)) {
        // Last resort: full dense QR on the entire matrix.
        std::vector<Complex> all = hessenberg_qr_eigenvalues(op.dense());
        auto order = sort_order(all);
        cands.clear();
        for (int i = 0; i < std::min(n, k + 2); ++i) {
          Complex theta = all[order[i]];
          RefinedPair p = tridiagonal_inverse_iteration(op.diag,
                                                        Complex(op.off), theta, {});
          cands.push_back({p.lambda, p.vec, p.residual});
        }
      }
    }
  }

  for (const auto& c : cands)
    if (!(c.residual <= kResidualBound * scale))
      throw NumericalError("eig: eigenpair residual " + std::to_string(c.residual) +
                           " exceeds bound " + std::to_string(kResidualBound * scale));

  std::vector<Complex> vals;
  std::vector<VectorXcd> vecs;
  for (auto& c : cands) {
    vals.push_back(c.lambda);
    vecs.push_back(std::move(c.vec));
  }
  return finalize(std::move(vals), std::move(vecs), k);
}

Spectrum eig(const MatrixXcd& A, int k) {
  const int n = static_cast<int>(A.rows());
  if (A.rows() != A.cols()) throw std::invalid_argument("eig: square matrix required");
  if (k < 1 || k > n) throw std::invalid_argument("eig: need 1 <= k <= N");
  double scale = A.cwiseAbs().maxCoeff();
  std::vector<Complex> all = dense_eigenvalues(A);
  auto order = sort_order(all);
  std::vector<Complex> vals;
  std::vector<VectorXcd> vecs;
  for (int i = 0; i < k; ++i) {
    Complex theta = all[order[i]];
    RefinedPair p = dense_inverse_iteration(A, theta, {});
    if (!(p.residual <= 1e-8 * std::max(scale, 1.0)))
      throw NumericalError("eig: inverse iteration failed at eigenvalue " +
                           std::to_string(theta.real()));
    // Keep the QR eigenvalue, which is accurate even for clustered modes.
    vals.push_back(std::abs(p.lambda - theta) <= 1e-6 * std::max(scale, 1.0)
                       ? p.lambda
                       : theta);
    vecs.push_back(std::move(p.vec));
  }
  return finalize(std::move(vals), std::move(vecs), k);
}

double max_abs_imag(const Spectrum& s) {
  if (s.size() == 0) throw std::invalid_argument("max_abs_imag: empty spectrum");
  return s.eigenvalues.imag().cwiseAbs().maxCoeff();
}

ThresholdResult scan_threshold(const PotentialSpec& family, const Grid& grid,
                               double g0, double gamma_lo, double gamma_hi,
                               const ThresholdOptions& opts) {
  if (!(gamma_lo < gamma_hi))
    throw std::invalid_argument("scan_threshold: need gamma_lo < gamma_hi");
  auto probe = [&](double gamma) {
    OperatorMatrix op = assemble_hamiltonian(with_gamma(family, gamma), grid, g0);
    return eig(op, opts.k);
  };
  Spectrum s_lo = probe(gamma_lo);
  if (max_abs_imag(s_lo) > opts.tol_real)
    throw std::invalid_argument(
        "scan_threshold: no transition in range (already broken at gamma_lo)");
  Spectrum s_hi = probe(gamma_hi);
  if (!(max_abs_imag(s_hi) > opts.tol_real))
    throw std::invalid_argument(
        "scan_threshold: no transition in range (still real at gamma_hi)");

  double lo = gamma_lo, hi = gamma_hi;
  while (hi - lo > opts.tol_gamma) {
    double mid = 0.5 * (lo + hi);
    Spectrum s = probe(mid);
    if (max_abs_imag(s) > opts.tol_real) {
      hi = mid;
      s_hi = std::move(s);
    } else {
      lo = mid;
    }
  }

  ThresholdResult r;
  r.gamma_lo = lo;
  r.gamma_hi = hi;
  r.gamma_pt = 0.5 * (lo + hi);
  r.max_imag_at_hi = max_abs_imag(s_hi);
  r.pair_index = 0;
  for (int i = 0; i + 1 < s_hi.size(); ++i) {
    if (s_hi.eigenvalues[i].imag() < -opts.tol_real &&
        s_hi.eigenvalues[i + 1].imag() > opts.tol_real) {
      r.pair_index = i;
      break;
    }
  }
  return r;
}

ModePair mode_pair_at(const OperatorMatrix& op) {
  Spectrum s = eig(op, std::min(op.size(), 2));
  if (s.size() < 2) throw std::invalid_argument("mode_pair_at: operator too small");
  Complex E1 = s.eigenvalues[0], E2 = s.eigenvalues[1];
  double tol = 1e-8 * (1.0 + std::abs(E1));
  bool conj_pair = E1.imag() < -tol && E2.imag() > tol &&
                   std::abs(E1 - std::conj(E2)) < 1e-6 * (1.0 + std::abs(E1));
  if (!conj_pair)
    throw std::invalid_argument("mode_pair_at: below threshold (lowest pair is real)");

  ModePair mp;
  mp.E1 = E1;
  mp.E2 = E2;
  mp.omega = std::abs(E1.imag());
  mp.g0_th = E1.real() + op.g0;
  mp.u1 = s.right_vectors.col(0);
  mp.u2 = s.right_vectors.col(1);
  mp.near_defective = std::abs(E1 - E2) < 1e-6;

  // Adjoint eigenvectors from H^dagger = conj(H) (the matrix is complex
  // symmetric), computed independently by inverse iteration.
  VectorXcd cdiag = op.diag.conjugate();
  RefinedPair a1 = tridiagonal_inverse_iteration(cdiag, Complex(op.off),
                                                 std::conj(E1), mp.u1.conjugate());
  RefinedPair a2 = tridiagonal_inverse_iteration(cdiag, Complex(op.off),
                                                 std::conj(E2), mp.u2.conjugate());
  mp.u1_adj = a1.vec;
  mp.u2_adj = a2.vec;
  if (!mp.near_defective) {
    // Scale so <u_i_adj | u_i> = 1; left/right products vanish at the
    // exceptional point, where this normalization is skipped.
    Complex p1 = mp.u1_adj.dot(mp.u1);
    Complex p2 = mp.u2_adj.dot(mp.u2);
    if (std::abs(p1) < 1e-12 || std::abs(p2) < 1e-12) {
      mp.near_defective = true;
    } else {
      mp.u1_adj /= std::conj(p1);
      mp.u2_adj /= std::conj(p2);
    }
  }
  return mp;
}

SpectrumTable spectrum_vs_gamma(const PotentialSpec& family, const Grid& grid,
                                double g0, const VectorXd& gamma_samples, int k,
                                int jobs) {
  const int m = static_cast<int>(gamma_samples.size());
  if (m == 0) throw std::invalid_argument("spectrum_vs_gamma: no samples");
  for (int i = 0; i < m; ++i)
    if (!std::isfinite(gamma_samples[i]))
      throw std::invalid_argument("spectrum_vs_gamma: non-finite gamma sample");

  std::vector<VectorXcd> raw(m);
  auto compute = [&](int i) {
    OperatorMatrix op =
        assemble_hamiltonian(with_gamma(family, gamma_samples[i]), grid, g0);
    raw[i] = eig(op, k).eigenvalues;
  };
  if (jobs <= 1) {
    for (int i = 0; i < m; ++i) compute(i);
  } else {
    std::vector<std::future<void>> pool;
    int next = 0;
    while (next < m || !pool.empty()) {
      while (static_cast<int>(pool.size()) < jobs && next < m) {
        pool.push_back(std::async(std::launch::async, compute, next));
        ++next;
      }
      pool.front().get();
      pool.erase(pool.begin());
    }
  }

  SpectrumTable table;
  table.gammas = gamma_samples;
  table.energies.resize(m, k);
  table.energies.row(0) = raw[0].transpose();
  for (int r = 1; r < m; ++r) {
    std::vector<bool> used(k, false);
    for (int i = 0; i < k; ++i) {
      Complex prev = table.energies(r - 1, i);
      int best = -1;
      double bestd = 0.0;
      for (int j = 0; j < k; ++j) {
        if (used[j]) continue;
        double d = std::abs(raw[r][j] - prev);
        if (best < 0 || d < bestd) {
          best = j;
          bestd = d;
        }
      }
      used[best] = true;
      table.energies(r, i) = raw[r][best];
    }
  }
  return table;
}

}  // namespace ptlaser
