#include "ptlaser/weaknl.hpp"

#include <cmath>

namespace ptlaser {

SaturationCoefficients saturation_coeffs(const VectorXcd& u1, const Grid& grid) {
  if (u1.size() != grid.n)
    throw std::invalid_argument("saturation_coeffs: mode not aligned with grid");
  if (!grid.symmetric())
    throw std::invalid_argument(
        "saturation_coeffs: grid must be symmetric so x -> -x is an index "
        "permutation");
  // Coefficients are quoted in the unit-L2-norm convention for u1, which
  // makes them invariant under rescaling of the input mode.
  double nrm2 = trapezoid(u1.cwiseAbs2().eval(), grid);
  VectorXcd u = u1 / std::sqrt(nrm2);

  Complex I2 = trapezoid((u.array() * u.array()).matrix().eval(), grid);
  double I_abs = trapezoid(u.cwiseAbs2().eval(), grid);
  if (std::abs(I2) < 1e-10 * I_abs)
    throw NumericalError(
        "saturation_coeffs: self-orthogonal mode (at exceptional point)");

  VectorXcd u2sq = u.array() * u.array();
  VectorXd absu_sq = u.cwiseAbs2();
  VectorXd absu_rev = absu_sq.reverse();

  Complex num_a = trapezoid((u2sq.array() * absu_sq.array()).matrix().eval(), grid);
  Complex num_b = trapezoid((u2sq.array() * absu_rev.array()).matrix().eval(), grid);

  SaturationCoefficients c;
  c.alpha = num_a / I2;
  c.beta = 2.0 * num_b / I2;
  return c;
}

AmplitudeState amplitude_rhs(const AmplitudeState& s, double g0, double g0_th,
                             const SaturationCoefficients& k) {
  double mu = g0 - g0_th;
  AmplitudeState d;
  d.c1 = mu * s.c1 - (k.alpha * std::norm(s.c1) + k.beta * std::norm(s.c2)) * s.c1;
  d.c2 = mu * s.c2 - (k.alpha * std::norm(s.c2) + k.beta * std::norm(s.c1)) * s.c2;
  return d;
}

std::array<LimitCycle, 3> limit_cycles(double g0, double g0_th,
                                       const SaturationCoefficients& k) {
  double mu = g0 - g0_th;
  double aR = k.alpha.real(), aI = k.alpha.imag();
  double bR = k.beta.real(), bI = k.beta.imag();
  bool degenerate = aR == bR;

  std::array<LimitCycle, 3> out;
  out[0].kind = LimitCycle::Kind::SingleMode1;
  out[1].kind = LimitCycle::Kind::SingleMode2;
  out[2].kind = LimitCycle::Kind::TwoMode;
  if (!(mu > 0.0)) return out;  // below threshold: no cycles exist

  for (int i = 0; i < 2; ++i) {
    LimitCycle& lc = out[i];
    lc.exists = aR > 0.0;
    if (lc.exists) {
      lc.amplitude_sq = mu / aR;
      lc.delta = -(aI / aR) * mu;
      lc.stable = !degenerate && bR > aR;
      lc.degenerate = degenerate;
    }
  }
  LimitCycle& tm = out[2];
  tm.exists = aR + bR > 0.0;
  if (tm.exists) {
    tm.amplitude_sq = mu / (aR + bR);
    tm.delta = -((aI + bI) / (aR + bR)) * mu;
    tm.stable = !degenerate && bR < aR;
    tm.degenerate = degenerate;
  }
  return out;
}

PowerTrace predicted_power(Complex c1, Complex c2, const VectorXcd& u1,
                           double omega, const Grid& grid,
                           const VectorXd& t_samples,
                           const std::optional<VectorXcd>& u2_opt) {
  if (u1.size() != grid.n)
    throw std::invalid_argument("predicted_power: mode not aligned with grid");
  double nrm2 = trapezoid(u1.cwiseAbs2().eval(), grid);
  VectorXcd u = u1 / std::sqrt(nrm2);
  VectorXcd v;  // second mode, same normalization convention
  if (u2_opt) {
    double n2 = trapezoid(u2_opt->cwiseAbs2().eval(), grid);
    v = *u2_opt / std::sqrt(n2);
  } else {
    v = u.conjugate().reverse();  // PT partner u2(x) = u1*(-x)
  }

  double I1 = trapezoid(u.cwiseAbs2().eval(), grid);
  Complex S = trapezoid((v.conjugate().array() * u.array()).matrix().eval(), grid);

  PowerTrace tr;
  tr.times = t_samples;
  tr.power.resize(t_samples.size());
  double base = (std::norm(c1) + std::norm(c2)) * I1;
  Complex amp = c1 * std::conj(c2) * S;
  for (Eigen::Index i = 0; i < t_samples.size(); ++i) {
    Complex phase = std::exp(Complex(0.0, 2.0 * omega * t_samples[i]));
    tr.power[i] = base + 2.0 * (amp * phase).real();
  }
  return tr;
}

}  // namespace ptlaser
