#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ptlaser/dynamics.hpp"
#include "ptlaser/spectra.hpp"
#include "ptlaser/weaknl.hpp"

using namespace ptlaser;

namespace {

struct SquireMode {
  Grid grid;
  ModePair pair;
  SaturationCoefficients coeffs;
};

SquireMode squire_mode(double gamma, int n) {
  SquireMode sm{build_grid(-6.0, 6.0, n), {}, {}};
  OperatorMatrix op = assemble_hamiltonian(SquireWell{6.0, gamma}, sm.grid, 0.0);
  sm.pair = mode_pair_at(op);
  sm.coeffs = saturation_coeffs(sm.pair.u1, sm.grid);
  return sm;
}

}  // namespace

TEST_CASE("saturation ratio of the broken-phase pair at gamma = 0.07") {
  SquireMode sm = squire_mode(0.07, 2000);
  double ratio = sm.coeffs.alpha.real() / sm.coeffs.beta.real();
  CHECK(ratio > 4.6);
  CHECK(ratio < 5.0);
  CHECK(ratio == doctest::Approx(4.698).epsilon(0.01));
  // Converged reference values from a fine-grid run of this module.
  CHECK(sm.coeffs.alpha.real() == doctest::Approx(0.18988).epsilon(0.001));
  CHECK(sm.coeffs.alpha.imag() == doctest::Approx(-0.02789).epsilon(0.002));
  CHECK(sm.coeffs.beta.real() == doctest::Approx(0.04042).epsilon(0.002));
  CHECK(sm.coeffs.beta.imag() == doctest::Approx(-0.08760).epsilon(0.002));
}

TEST_CASE("symmetric real mode gives beta = 2 alpha") {
  Grid g = build_grid(-6.0, 6.0, 501);
  VectorXcd u(g.n);
  for (int j = 0; j < g.n; ++j)
    u[j] = std::cos(M_PI * g.points[j] / 12.0);  // even, real
  SaturationCoefficients c = saturation_coeffs(u, g);
  CHECK(std::abs(c.beta - 2.0 * c.alpha) < 1e-12);
}

TEST_CASE("coefficients are invariant under rescaling the mode") {
  SquireMode sm = squire_mode(0.065, 600);
  SaturationCoefficients scaled =
      saturation_coeffs(Complex(2.0, -0.7) * sm.pair.u1, sm.grid);
  CHECK(std::abs(scaled.alpha - sm.coeffs.alpha) < 1e-12);
  CHECK(std::abs(scaled.beta - sm.coeffs.beta) < 1e-12);
}

TEST_CASE("self-orthogonal modes are rejected") {
  Grid g = build_grid(-1.0, 1.0, 64);  // even count: sum u^2 cancels exactly
  VectorXcd u(g.n);
  for (int j = 0; j < g.n; ++j) u[j] = (j % 2 == 0) ? Complex(1, 0) : Complex(0, 1);
  CHECK_THROWS_WITH_AS(saturation_coeffs(u, g), doctest::Contains("self-orthogonal"),
                       NumericalError);
}

TEST_CASE("quadrature convergence of the coefficients") {
  SquireMode coarse = squire_mode(0.07, 1000);
  SquireMode fine = squire_mode(0.07, 2000);
  CHECK(std::abs(coarse.coeffs.alpha - fine.coeffs.alpha) /
            std::abs(fine.coeffs.alpha) <
        1e-3);
  CHECK(std::abs(coarse.coeffs.beta - fine.coeffs.beta) /
            std::abs(fine.coeffs.beta) <
        1e-3);
}

TEST_CASE("amplitude_rhs algebra") {
  SaturationCoefficients k{Complex(0.19, -0.028), Complex(0.04, -0.088)};
  SUBCASE("origin is a fixed point") {
    AmplitudeState d = amplitude_rhs({Complex(0), Complex(0)}, 0.3, 0.2, k);
    CHECK(std::abs(d.c1) == 0.0);
    CHECK(std::abs(d.c2) == 0.0);
  }
  SUBCASE("c2 = 0 decouples to Stuart-Landau form") {
    Complex c1(0.3, -0.1);
    AmplitudeState d = amplitude_rhs({c1, Complex(0)}, 0.3, 0.2, k);
    Complex expect = (0.1 - k.alpha * std::norm(c1)) * c1;
    CHECK(std::abs(d.c1 - expect) < 1e-15);
    CHECK(std::abs(d.c2) == 0.0);
  }
  SUBCASE("single-mode steady state has stationary |c1|^2") {
    double mu = 0.1;
    Complex c1 = std::sqrt(mu / k.alpha.real());
    AmplitudeState d = amplitude_rhs({c1, Complex(0)}, 0.3, 0.2, k);
    double ddt_abs2 = 2.0 * (std::conj(c1) * d.c1).real();
    CHECK(std::abs(ddt_abs2) < 1e-15);
  }
}

TEST_CASE("limit cycles: existence and stability") {
  SUBCASE("squire case: two-mode wins") {
    SquireMode sm = squire_mode(0.07, 1200);
    auto cycles = limit_cycles(sm.pair.g0_th + 0.04, sm.pair.g0_th, sm.coeffs);
    CHECK(cycles[0].exists);
    CHECK_FALSE(cycles[0].stable);
    CHECK(cycles[1].exists);
    CHECK_FALSE(cycles[1].stable);
    CHECK(cycles[2].exists);
    CHECK(cycles[2].stable);
    CHECK(cycles[2].amplitude_sq ==
          doctest::Approx(0.04 / (sm.coeffs.alpha.real() + sm.coeffs.beta.real())));
  }
  SUBCASE("marginal alpha_R = beta_R") {
    SaturationCoefficients k{Complex(0.2, 0.01), Complex(0.2, -0.03)};
    auto cycles = limit_cycles(0.3, 0.2, k);
    for (const auto& lc : cycles) {
      CHECK(lc.exists);
      CHECK_FALSE(lc.stable);
      CHECK(lc.degenerate);
    }
  }
  SUBCASE("negative saturation: no cycles") {
    SaturationCoefficients k{Complex(-0.1, 0.0), Complex(-0.05, 0.0)};
    auto cycles = limit_cycles(0.3, 0.2, k);
    for (const auto& lc : cycles) CHECK_FALSE(lc.exists);
  }
  SUBCASE("below threshold: nothing exists") {
    SaturationCoefficients k{Complex(0.2, 0.0), Complex(0.05, 0.0)};
    auto cycles = limit_cycles(0.1, 0.2, k);
    for (const auto& lc : cycles) CHECK_FALSE(lc.exists);
  }
}

TEST_CASE("two forms of the amplitude equations agree") {
  // The conjugated-coefficient form in the slow variables, and the
  // epsilon-scaled form integrated in laboratory time; they must map onto
  // each other via c1 = eps a1, c2 = eps conj(a2), t = T2 / eps^2.
  SaturationCoefficients k{Complex(0.19, -0.028), Complex(0.081, -0.175)};
  double eps2 = 0.01;
  double eps = std::sqrt(eps2);

  Complex a1(0.21, 0.12), a2(-0.05, 0.33);
  Complex c1 = eps * a1, c2 = eps * std::conj(a2);

  auto rhs_a = [&](Complex x1, Complex x2) {
    return std::pair<Complex, Complex>{
        x1 - (k.alpha * std::norm(x1) + k.beta * std::norm(x2)) * x1,
        x2 - (std::conj(k.alpha) * std::norm(x2) + std::conj(k.beta) * std::norm(x1)) * x2};
  };
  double T2 = 1.5;
  int steps = 3000;
  double dT = T2 / steps;
  for (int m = 0; m < steps; ++m) {  // RK4 on the slow form
    auto [k1a, k1b] = rhs_a(a1, a2);
    auto [k2a, k2b] = rhs_a(a1 + 0.5 * dT * k1a, a2 + 0.5 * dT * k1b);
    auto [k3a, k3b] = rhs_a(a1 + 0.5 * dT * k2a, a2 + 0.5 * dT * k2b);
    auto [k4a, k4b] = rhs_a(a1 + dT * k3a, a2 + dT * k3b);
    a1 += dT / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
    a2 += dT / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
  }
  double t_end = T2 / eps2;
  steps = 30000;
  double dt = t_end / steps;
  for (int m = 0; m < steps; ++m) {  // RK4 on the laboratory form
    auto f = [&](const AmplitudeState& s) {
      return amplitude_rhs(s, eps2, 0.0, k);
    };
    AmplitudeState s{c1, c2};
    AmplitudeState k1 = f(s);
    AmplitudeState s2{c1 + 0.5 * dt * k1.c1, c2 + 0.5 * dt * k1.c2};
    AmplitudeState k2 = f(s2);
    AmplitudeState s3{c1 + 0.5 * dt * k2.c1, c2 + 0.5 * dt * k2.c2};
    AmplitudeState k3 = f(s3);
    AmplitudeState s4{c1 + dt * k3.c1, c2 + dt * k3.c2};
    AmplitudeState k4 = f(s4);
    c1 += dt / 6.0 * (k1.c1 + 2.0 * k2.c1 + 2.0 * k3.c1 + k4.c1);
    c2 += dt / 6.0 * (k1.c2 + 2.0 * k2.c2 + 2.0 * k3.c2 + k4.c2);
  }
  CHECK(std::abs(c1 - eps * a1) < 1e-9);
  CHECK(std::abs(c2 - eps * std::conj(a2)) < 1e-9);
}

TEST_CASE("predicted_power basics") {
  SquireMode sm = squire_mode(0.07, 800);
  VectorXd ts = VectorXd::LinSpaced(200, 0.0, 100.0);
  SUBCASE("c2 = 0 gives constant power") {
    PowerTrace tr = predicted_power(Complex(0.2), Complex(0), sm.pair.u1,
                                    sm.pair.omega, sm.grid, ts);
    CHECK((tr.power.maxCoeff() - tr.power.minCoeff()) < 1e-14);
  }
  SUBCASE("orthogonal Hermitian pair gives constant power") {
    Spectrum s = eig(assemble_hamiltonian(SquireWell{6.0, 0.0}, sm.grid, 0.0), 2);
    PowerTrace tr =
        predicted_power(Complex(0.2), Complex(0.2), s.right_vectors.col(0), 0.1,
                        sm.grid, ts, s.right_vectors.col(1));
    CHECK((tr.power.maxCoeff() - tr.power.minCoeff()) / tr.power.mean() < 1e-10);
  }
  SUBCASE("PT pair beats at 2 omega") {
    PowerTrace tr = predicted_power(Complex(0.2), Complex(0.2), sm.pair.u1,
                                    sm.pair.omega, sm.grid, ts);
    CHECK((tr.power.maxCoeff() - tr.power.minCoeff()) / tr.power.mean() > 0.5);
  }
}

TEST_CASE("near threshold the full PDE follows the weakly nonlinear theory") {
  SquireMode sm = squire_mode(0.07, 800);
  const SaturationCoefficients& k = sm.coeffs;
  auto tm_cycle = [&](double dg) {
    return limit_cycles(sm.pair.g0_th + dg, sm.pair.g0_th, k)[2];
  };
  auto run = [&](double dg, double t_end) {
    RunConfig cfg;
    cfg.spec = SquireWell{6.0, 0.07};
    cfg.grid = sm.grid;
    cfg.g0 = sm.pair.g0_th + dg;
    cfg.t_end = t_end;
    cfg.seed = 11;
    return evolve(cfg).trace;
  };

  // Predicted two-mode power: mean 2 A^2 (unit-norm modes), depth 2|S|
  // with S = int u1(-x) u1(x) dx.
  VectorXcd u = sm.pair.u1 / std::sqrt(trapezoid(sm.pair.u1.cwiseAbs2().eval(), sm.grid));
  Complex S =
      trapezoid((u.reverse().array() * u.array()).matrix().eval(), sm.grid);

  double dg = 0.01;
  LimitCycle tm = tm_cycle(dg);
  PowerTrace tr = run(dg, 3000.0);
  EmissionClass ec = classify_emission(tr);
  REQUIRE(ec.kind == EmissionClass::Kind::Oscillatory);

  double mean_pred = 2.0 * tm.amplitude_sq;
  double depth_pred = 2.0 * std::abs(S);
  double mean_meas = 0.0;
  {
    int n = tr.size(), start = n / 2, cnt = 0;
    for (int i = start; i < n; ++i) {
      mean_meas += tr.power[i];
      ++cnt;
    }
    mean_meas /= cnt;
  }
  CHECK(std::abs(mean_meas / mean_pred - 1.0) < 0.20);
  CHECK(std::abs(ec.modulation_depth / depth_pred - 1.0) < 0.20);

  SUBCASE("beat period approaches 2pi/(2 Omega) near threshold") {
    PeriodEstimate pe = dominant_period(tr);
    double beat = M_PI / sm.pair.omega;
    CHECK(std::abs(pe.period / beat - 1.0) < 0.10);
  }

  SUBCASE("asymptotic consistency: smaller offsets shrink the mean error") {
    double dg2 = 0.003;
    LimitCycle tm2 = tm_cycle(dg2);
    PowerTrace tr2 = run(dg2, 6000.0);
    double mean2 = 0.0;
    int n = tr2.size(), start = n / 2, cnt = 0;
    for (int i = start; i < n; ++i) {
      mean2 += tr2.power[i];
      ++cnt;
    }
    mean2 /= cnt;
    double err2 = std::abs(mean2 / (2.0 * tm2.amplitude_sq) - 1.0);
    double err1 = std::abs(mean_meas / mean_pred - 1.0);
    CHECK(err2 < err1);
  }
}

TEST_CASE("gamma = 0 steady power matches the single-mode prediction") {
  Grid g = build_grid(-6.0, 6.0, 800);
  Spectrum s = eig(assemble_hamiltonian(SquireWell{6.0, 0.0}, g, 0.0), 1);
  double E1 = s.eigenvalues[0].real();
  SaturationCoefficients k = saturation_coeffs(s.right_vectors.col(0), g);

  RunConfig cfg;
  cfg.spec = SquireWell{6.0, 0.0};
  cfg.grid = g;
  cfg.g0 = E1 + 0.02;
  cfg.t_end = 1600.0;
  PowerTrace tr = evolve(cfg).trace;
  EmissionClass ec = classify_emission(tr);
  REQUIRE(ec.kind == EmissionClass::Kind::Stationary);
  double pred = 0.02 / k.alpha.real();  // unit-norm mode: P = (g0 - E1)/alpha_R
  CHECK(std::abs(ec.p_ss / pred - 1.0) < 0.05);
}
