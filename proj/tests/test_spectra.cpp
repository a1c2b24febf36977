#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "ptlaser/spectra.hpp"

using namespace ptlaser;

namespace {

Spectrum squire_spectrum(double gamma, int n, int k, double g0 = 0.0) {
  Grid g = build_grid(-6.0, 6.0, n);
  return eig(assemble_hamiltonian(SquireWell{6.0, gamma}, g, g0), k);
}

}  // namespace

TEST_CASE("below threshold the Squire spectrum is entirely real") {
  Spectrum s = squire_spectrum(0.04, 1200, 4);
  CHECK(max_abs_imag(s) < 1e-8);
  // and at gamma = 0.07 the lowest pair is complex conjugate
  Spectrum b = squire_spectrum(0.07, 1200, 4);
  CHECK(max_abs_imag(b) > 1e-3);
  CHECK(b.eigenvalues[0].imag() < 0.0);
  CHECK(std::abs(b.eigenvalues[0] - std::conj(b.eigenvalues[1])) < 1e-8);
}

TEST_CASE("max_abs_imag") {
  Spectrum s;
  s.eigenvalues.resize(2);
  s.eigenvalues << Complex(1.0, 2.0), Complex(1.0, -2.0);
  s.right_vectors = MatrixXcd::Identity(2, 2);
  CHECK(max_abs_imag(s) == doctest::Approx(2.0));
  s.eigenvalues << Complex(0.5, 0.0), Complex(1.5, 0.0);
  CHECK(max_abs_imag(s) == 0.0);
  Spectrum empty;
  CHECK_THROWS_AS(max_abs_imag(empty), std::invalid_argument);
}

TEST_CASE("PT conjugation symmetry on randomized configurations") {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> uu(4.0, 8.0), ug(0.0, 0.1);
  for (int trial = 0; trial < 6; ++trial) {
    double u = uu(gen), gamma = ug(gen);
    Grid g = build_grid(-u, u, 400);
    Spectrum s = eig(assemble_hamiltonian(SquireWell{u, gamma}, g, 0.0), 6);
    std::vector<Complex> w(s.eigenvalues.data(), s.eigenvalues.data() + 6);
    std::vector<Complex> wc;
    for (auto z : w) wc.push_back(std::conj(z));
    CHECK(oracle::multiset_distance(w, wc) < 1e-8);
  }
}

TEST_CASE("residual bound holds for returned pairs") {
  Grid g = build_grid(-6.0, 6.0, 900);
  OperatorMatrix op = assemble_hamiltonian(SquireWell{6.0, 0.065}, g, 0.0);
  Spectrum s = eig(op, 5);
  double scale = op.inf_norm();
  for (int i = 0; i < 5; ++i) {
    VectorXcd v = s.right_vectors.col(i);
    CHECK((op.apply(v) - s.eigenvalues[i] * v).norm() <= 1e-10 * scale);
  }
}

TEST_CASE("scan_threshold finds the Squire PT point") {
  Grid g = build_grid(-6.0, 6.0, 800);
  ThresholdOptions opts;
  ThresholdResult r = scan_threshold(SquireWell{6.0, 0.0}, g, 0.0, 0.0, 0.1, opts);
  CHECK(r.gamma_pt > 0.054);
  CHECK(r.gamma_pt < 0.058);
  CHECK(r.gamma_hi - r.gamma_lo <= opts.tol_gamma * (1 + 1e-12));
  CHECK(r.gamma_lo < r.gamma_pt);
  CHECK(r.gamma_pt <= r.gamma_hi);
  CHECK(r.pair_index == 0);
  CHECK(r.max_imag_at_hi > opts.tol_real);

  SUBCASE("monotone bracket: real below, growing above") {
    auto probe = [&](double gamma) {
      return max_abs_imag(
          eig(assemble_hamiltonian(SquireWell{6.0, gamma}, g, 0.0), 6));
    };
    CHECK(probe(0.9 * r.gamma_pt) <= opts.tol_real);
    double a = probe(1.05 * r.gamma_pt), b = probe(1.2 * r.gamma_pt);
    CHECK(a > opts.tol_real);
    CHECK(b > a);
  }
}

TEST_CASE("scan_threshold rejects a range without a transition") {
  Grid g = build_grid(-6.0, 6.0, 400);
  CHECK_THROWS_WITH_AS(
      scan_threshold(SquireWell{6.0, 0.0}, g, 0.0, 0.0, 0.02, {}),
      doctest::Contains("no transition in range"), std::invalid_argument);
}

TEST_CASE("mode_pair_at returns the coalesced pair with adjoints") {
  Grid g = build_grid(-6.0, 6.0, 1200);
  OperatorMatrix op = assemble_hamiltonian(SquireWell{6.0, 0.07}, g, 0.0);
  ModePair mp = mode_pair_at(op);
  CHECK(mp.omega > 0.0);
  CHECK_FALSE(mp.near_defective);

  double scale = op.inf_norm();
  // L = -H(g0 = g0_th): L u1 = +i omega u1 and L u2 = -i omega u2.
  VectorXcd Lu1 = -(op.apply(mp.u1) - mp.g0_th * mp.u1);
  VectorXcd Lu2 = -(op.apply(mp.u2) - mp.g0_th * mp.u2);
  CHECK((Lu1 - Complex(0, mp.omega) * mp.u1).norm() < 1e-8 * scale);
  CHECK((Lu2 + Complex(0, mp.omega) * mp.u2).norm() < 1e-8 * scale);

  SUBCASE("u2(x) = conj(u1(-x)) after phase alignment") {
    VectorXcd ref = mp.u1.conjugate().reverse();
    Complex phase = ref.dot(mp.u2) / ref.squaredNorm();
    CHECK((mp.u2 - phase * ref).norm() < 1e-7);
    CHECK(std::abs(std::abs(phase) - 1.0) < 1e-7);
  }

  SUBCASE("adjoint vectors equal conjugates up to a global factor") {
    VectorXcd ref = mp.u1.conjugate();
    Complex c = ref.dot(mp.u1_adj) / ref.squaredNorm();
    CHECK((mp.u1_adj - c * ref).norm() < 1e-7 * mp.u1_adj.norm());
  }

  SUBCASE("biorthonormality") {
    CHECK(std::abs(mp.u1_adj.dot(mp.u1) - Complex(1.0)) < 1e-8);
    CHECK(std::abs(mp.u2_adj.dot(mp.u2) - Complex(1.0)) < 1e-8);
    CHECK(std::abs(mp.u1_adj.dot(mp.u2)) < 1e-8 * mp.u1_adj.norm());
    CHECK(std::abs(mp.u2_adj.dot(mp.u1)) < 1e-8 * mp.u2_adj.norm());
  }

  SUBCASE("asymmetric localization of the pair") {
    // |u1| carries more weight on one side of x = 0 (PT-broken profiles).
    int n = g.n;
    double left = mp.u1.head(n / 2).squaredNorm();
    double right = mp.u1.tail(n / 2).squaredNorm();
    CHECK(std::abs(left - right) / (left + right) > 0.05);
  }
}

TEST_CASE("mode_pair_at rejects Hermitian input") {
  Grid g = build_grid(-6.0, 6.0, 500);
  OperatorMatrix op = assemble_hamiltonian(SquireWell{6.0, 0.0}, g, 0.0);
  CHECK_THROWS_WITH_AS(mode_pair_at(op), doctest::Contains("below threshold"),
                       std::invalid_argument);
  // and below-threshold tilted input as well
  OperatorMatrix op2 = assemble_hamiltonian(SquireWell{6.0, 0.03}, g, 0.0);
  CHECK_THROWS_AS(mode_pair_at(op2), std::invalid_argument);
}

TEST_CASE("spectrum_vs_gamma: table shape and branch continuity") {
  Grid g = build_grid(-6.0, 6.0, 400);
  SUBCASE("single sample gives one row") {
    VectorXd gs(1);
    gs << 0.02;
    SpectrumTable t = spectrum_vs_gamma(SquireWell{6.0, 0.0}, g, 0.0, gs, 4);
    CHECK(t.energies.rows() == 1);
    CHECK(t.energies.cols() == 4);
  }
  SUBCASE("branches merge pairwise above the PT point") {
    VectorXd gs = VectorXd::LinSpaced(21, 0.0, 0.1);
    SpectrumTable t = spectrum_vs_gamma(SquireWell{6.0, 0.0}, g, 0.0, gs, 6, 2);
    // Continuity: consecutive branch values stay close.
    for (int r = 1; r < t.energies.rows(); ++r)
      for (int c = 0; c < 6; ++c)
        CHECK(std::abs(t.energies(r, c) - t.energies(r - 1, c)) < 0.12);
    // At the top of the range the lowest two branches form a conjugate pair.
    Complex e0 = t.energies(20, 0), e1 = t.energies(20, 1);
    CHECK(std::abs(e0 - std::conj(e1)) < 1e-7);
    CHECK(std::abs(e0.imag()) > 1e-3);
  }
}

TEST_CASE("double-well splitting at gamma = 0 is 2 kappa") {
  Grid g = build_grid(-30.0, 30.0, 1500);
  VectorXd gs(1);
  gs << 0.0;
  SpectrumTable t =
      spectrum_vs_gamma(QuarticDoubleWell{7e-6, 10.0, 0.0}, g, 0.0, gs, 2);
  double split = t.energies(0, 1).real() - t.energies(0, 0).real();
  CHECK(split == doctest::Approx(0.0103).epsilon(0.05));
}

TEST_CASE("production solver matches the charpoly oracle on small operators") {
  // A tilted well coarse enough that the whole spectrum fits in N <= 8.
  Grid g = build_grid(-6.0, 6.0, 8);
  OperatorMatrix op = assemble_hamiltonian(SquireWell{6.0, 0.09}, g, 0.0);
  Spectrum s = eig(op, 8);
  auto ref = oracle::eigenvalues_via_charpoly(op.dense());
  std::vector<Complex> mine(s.eigenvalues.data(), s.eigenvalues.data() + 8);
  CHECK(oracle::multiset_distance(mine, ref) < 1e-8 * op.inf_norm());
}
