#include "ptlaser/dimer.hpp"

#include <cmath>

namespace ptlaser {

DimerState dimer_rhs(const DimerState& s, const DimerParams& p) {
  DimerState d;
  d.a1 = Complex(p.eta, -p.sigma) * s.a1 + p.kappa * s.a2 -
         p.rho * std::norm(s.a1) * s.a1;
  d.a2 = Complex(p.eta, p.sigma) * s.a2 + p.kappa * s.a1 -
         p.rho * std::norm(s.a2) * s.a2;
  return d;
}

PolarState polar_rhs(const PolarState& s, const DimerParams& p) {
  if (!(s.r1 > 0.0) || !(s.r2 > 0.0))
    throw std::invalid_argument("polar_rhs: polar chart singular at r = 0");
  PolarState d;
  double c = std::cos(s.phi), sn = std::sin(s.phi);
  d.r1 = p.eta * s.r1 + p.kappa * s.r2 * c - p.rho * s.r1 * s.r1 * s.r1;
  d.r2 = p.eta * s.r2 + p.kappa * s.r1 * c - p.rho * s.r2 * s.r2 * s.r2;
  d.phi = 2.0 * p.sigma - p.kappa * (s.r1 / s.r2 + s.r2 / s.r1) * sn;
  return d;
}

namespace {

DimerState axpy(const DimerState& s, double w, const DimerState& d) {
  return {s.a1 + w * d.a1, s.a2 + w * d.a2};
}

PolarState axpy(const PolarState& s, double w, const PolarState& d) {
  return {s.r1 + w * d.r1, s.r2 + w * d.r2, s.phi + w * d.phi};
}

template <typename State, typename Params>
State rk4_step(const State& s, const Params& p, double dt,
               State (*rhs)(const State&, const Params&)) {
  State k1 = rhs(s, p);
  State k2 = rhs(axpy(s, 0.5 * dt, k1), p);
  State k3 = rhs(axpy(s, 0.5 * dt, k2), p);
  State k4 = rhs(axpy(s, dt, k3), p);
  State out = axpy(s, dt / 6.0, k1);
  out = axpy(out, dt / 3.0, k2);
  out = axpy(out, dt / 3.0, k3);
  out = axpy(out, dt / 6.0, k4);
  return out;
}

double wrap_to_pi(double x) {
  x = std::fmod(x + M_PI, 2.0 * M_PI);
  if (x < 0) x += 2.0 * M_PI;
  return x - M_PI;
}

}  // namespace

DimerTrajectory evolve_dimer(const DimerState& s0, const DimerParams& p,
                             double dt, double t_end, int record_stride) {
  p.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("evolve_dimer: dt must be positive");
  const long steps = std::lround(t_end / dt);
  const int stride = std::max(record_stride, 1);

  DimerTrajectory traj;
  std::vector<double> ts{0.0}, phis, Ps;
  traj.states.push_back(s0);
  double phi = std::arg(s0.a2) - std::arg(s0.a1);
  phis.push_back(phi);
  Ps.push_back(std::norm(s0.a1) + std::norm(s0.a2));

  DimerState s = s0;
  double prev_raw = phi;
  for (long m = 1; m <= steps; ++m) {
    s = rk4_step(s, p, dt, &dimer_rhs);
    if (std::norm(s.a1) > 1e12 || std::norm(s.a2) > 1e12)
      throw NumericalError("evolve_dimer: trajectory diverged at t = " +
                           std::to_string(m * dt));
    double raw = std::arg(s.a2) - std::arg(s.a1);
    phi += wrap_to_pi(raw - prev_raw);
    prev_raw = raw;
    if (m % stride == 0 || m == steps) {
      ts.push_back(m * dt);
      traj.states.push_back(s);
      phis.push_back(phi);
      Ps.push_back(std::norm(s.a1) + std::norm(s.a2));
    }
  }
  traj.times = Eigen::Map<VectorXd>(ts.data(), ts.size());
  traj.phi = Eigen::Map<VectorXd>(phis.data(), phis.size());
  traj.power.times = traj.times;
  traj.power.power = Eigen::Map<VectorXd>(Ps.data(), Ps.size());
  return traj;
}

PolarTrajectory evolve_polar(const PolarState& s0, const DimerParams& p,
                             double dt, double t_end, int record_stride) {
  p.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("evolve_polar: dt must be positive");
  const long steps = std::lround(t_end / dt);
  const int stride = std::max(record_stride, 1);
  PolarTrajectory traj;
  std::vector<double> ts{0.0};
  traj.states.push_back(s0);
  PolarState s = s0;
  for (long m = 1; m <= steps; ++m) {
    s = rk4_step(s, p, dt, &polar_rhs);
    if (m % stride == 0 || m == steps) {
      ts.push_back(m * dt);
      traj.states.push_back(s);
    }
  }
  traj.times = Eigen::Map<VectorXd>(ts.data(), ts.size());
  return traj;
}

LockedState locked_state(const DimerParams& p) {
  p.validate();
  if (!(p.sigma < p.kappa))
    throw std::invalid_argument("locked_state: drift regime (sigma >= kappa)");
  LockedState ls;
  ls.phi_star = std::asin(p.sigma / p.kappa);
  ls.r2_star = (p.eta + std::sqrt(p.kappa * p.kappa - p.sigma * p.sigma)) / p.rho;
  if (!(ls.r2_star > 0.0))
    throw std::invalid_argument("locked_state: below oscillation threshold");
  return ls;
}

double drift_period(const DimerParams& p) {
  p.validate();
  if (!(p.sigma > p.kappa))
    throw std::invalid_argument("drift_period: locked regime (sigma <= kappa)");
  return M_PI / std::sqrt(p.sigma * p.sigma - p.kappa * p.kappa);
}

VectorXd asymptotic_r2(const VectorXd& phi_samples, const DimerParams& p) {
  p.validate();
  double num = (p.sigma * p.sigma + p.eta * p.eta - p.kappa * p.kappa) * p.eta / p.rho;
  VectorXd out(phi_samples.size());
  for (Eigen::Index i = 0; i < phi_samples.size(); ++i) {
    double den = p.sigma * p.sigma + p.eta * p.eta -
                 p.kappa * p.eta * std::cos(phi_samples[i]) -
                 p.kappa * p.sigma * std::sin(phi_samples[i]);
    if (std::abs(den) < 1e-14)
      throw NumericalError("asymptotic_r2: denominator vanishes at sample " +
                           std::to_string(i));
    out[i] = num / den;
  }
  return out;
}

double lyapunov_G(double phi, const DimerParams& p) {
  return -2.0 * p.sigma * phi - 2.0 * p.kappa * std::cos(phi);
}

LockReport lock_report(const DimerTrajectory& traj, const DimerParams& p) {
  LockReport rep;
  rep.locked = p.sigma < p.kappa;
  int n = static_cast<int>(traj.times.size());
  int start = n / 2;
  double mean_r2 = 0.0;
  for (int i = start; i < n; ++i)
    mean_r2 += 0.5 * (std::norm(traj.states[i].a1) + std::norm(traj.states[i].a2));
  rep.measured_r2_mean = mean_r2 / (n - start);
  if (rep.locked) {
    LockedState ls = locked_state(p);
    rep.phi_star = ls.phi_star;
    rep.r2_star = ls.r2_star;
  } else {
    rep.period_theory = drift_period(p);
    // Measured drift period between whole-turn crossings of the unwrapped
    // phase (the phase velocity varies strongly around one cycle, so
    // fractional turns would bias the estimate).
    double phi0 = traj.phi[start];
    double dir = traj.phi[n - 1] > phi0 ? 1.0 : -1.0;
    std::vector<double> crossings;
    int k = 1;
    for (int i = start + 1; i < n; ++i) {
      double target = phi0 + dir * 2.0 * M_PI * k;
      while (dir * (traj.phi[i] - target) >= 0.0) {
        double f = (target - traj.phi[i - 1]) / (traj.phi[i] - traj.phi[i - 1]);
        crossings.push_back(traj.times[i - 1] +
                            f * (traj.times[i] - traj.times[i - 1]));
        ++k;
        target = phi0 + dir * 2.0 * M_PI * k;
      }
    }
    if (crossings.size() >= 2)
      rep.measured_period = (crossings.back() - crossings.front()) /
                            (crossings.size() - 1);
  }
  return rep;
}

ReducedParams extract_reduced_params(const SpectrumTable& table) {
  const int m = static_cast<int>(table.gammas.size());
  if (m < 1 || table.energies.cols() < 2)
    throw std::invalid_argument("extract_reduced_params: need >= 2 levels");
  int i0 = -1;
  for (int i = 0; i < m; ++i)
    if (table.gammas[i] == 0.0) i0 = i;
  if (i0 < 0)
    throw std::invalid_argument("extract_reduced_params: need a gamma = 0 sample");

  Complex E1 = table.energies(i0, 0), E2 = table.energies(i0, 1);
  if (std::abs(E1.imag()) > 1e-8 * (1.0 + std::abs(E1)) ||
      std::abs(E2.imag()) > 1e-8 * (1.0 + std::abs(E2)))
    throw std::invalid_argument(
        "extract_reduced_params: fewer than two real levels at gamma = 0");

  ReducedParams rp;
  rp.kappa = 0.5 * (E2.real() - E1.real());
  rp.q = 0.5 * (E1.real() + E2.real());

  // sigma(gamma) from the level attraction below threshold, fitted through
  // the origin. Samples with a complex pair (beyond the EP) are skipped.
  double num = 0.0, den = 0.0;
  int used = 0;
  for (int i = 0; i < m; ++i) {
    double g = table.gammas[i];
    if (g <= 0.0) continue;
    Complex e1 = table.energies(i, 0), e2 = table.energies(i, 1);
    if (std::abs(e1.imag()) > 1e-7 || std::abs(e2.imag()) > 1e-7) continue;
    double half_gap = 0.5 * std::abs(e2.real() - e1.real());
    double s2 = rp.kappa * rp.kappa - half_gap * half_gap;
    if (s2 < 0.0) s2 = 0.0;
    num += std::sqrt(s2) * g;
    den += g * g;
    ++used;
  }
  if (used < 2)
    throw std::invalid_argument(
        "extract_reduced_params: need >= 2 real-spectrum samples below the EP");
  rp.sigma_slope = num / den;
  rp.gamma_pt_reduced = rp.kappa / rp.sigma_slope;
  return rp;
}

}  // namespace ptlaser
