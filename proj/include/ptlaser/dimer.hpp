#pragma once

#include <optional>

#include "ptlaser/dynamics.hpp"
#include "ptlaser/spectra.hpp"

namespace ptlaser {

/// Parameters of the two coupled laser oscillators:
///   da1/dt = (eta - i sigma) a1 + kappa a2 - rho |a1|^2 a1
///   da2/dt = (eta + i sigma) a2 + kappa a1 - rho |a2|^2 a2
/// with eta = g0 - q the net gain, kappa > 0 the hopping rate, sigma the
/// detuning from mirror tilt and rho > 0 the saturation.
struct DimerParams {
  double eta = 0.0;
  double kappa = 0.0;
  double sigma = 0.0;
  double rho = 1.0;
  std::optional<double> g0;  // optionally keep the (g0, q) split
  std::optional<double> q;

  static DimerParams from_gain(double g0, double q, double kappa, double sigma,
                               double rho) {
    DimerParams p;
    p.eta = g0 - q;
    p.kappa = kappa;
    p.sigma = sigma;
    p.rho = rho;
    p.g0 = g0;
    p.q = q;
    return p;
  }
  void validate() const {
    if (!(kappa > 0.0)) throw std::invalid_argument("DimerParams: kappa must be > 0");
    if (!(rho > 0.0)) throw std::invalid_argument("DimerParams: rho must be > 0");
  }
};

struct DimerState {
  Complex a1, a2;
};

/// Polar chart a_i = r_i exp(i phi_i) with the relative phase
/// phi = phi_2 - phi_1 accumulated continuously (never reduced mod 2*pi).
struct PolarState {
  double r1 = 0.0, r2 = 0.0;
  double phi = 0.0;
};

DimerState dimer_rhs(const DimerState& s, const DimerParams& p);

///   dr1/dt = eta r1 + kappa r2 cos(phi) - rho r1^3
///   dr2/dt = eta r2 + kappa r1 cos(phi) - rho r2^3
///   dphi/dt = 2 sigma - kappa (r1/r2 + r2/r1) sin(phi)
PolarState polar_rhs(const PolarState& s, const DimerParams& p);

struct DimerTrajectory {
  VectorXd times;
  std::vector<DimerState> states;
  VectorXd phi;  // unwrapped relative phase
  PowerTrace power;  // P = |a1|^2 + |a2|^2

  const DimerState& final_state() const { return states.back(); }
};

/// Classical fixed-step RK4. Aborts if |a| exceeds 1e6 (blow-up guard).
DimerTrajectory evolve_dimer(const DimerState& s0, const DimerParams& p,
                             double dt, double t_end, int record_stride = 1);

struct PolarTrajectory {
  VectorXd times;
  std::vector<PolarState> states;
};

PolarTrajectory evolve_polar(const PolarState& s0, const DimerParams& p,
                             double dt, double t_end, int record_stride = 1);

struct LockedState {
  double phi_star = 0.0;
  double r2_star = 0.0;  // squared amplitude
};

/// Phase-locked fixed point for sigma < kappa:
///   phi* = asin(sigma/kappa) in (-pi/2, pi/2)
///   r*^2 = (eta + sqrt(kappa^2 - sigma^2)) / rho,
/// the closed form obtained by evaluating the asymptotic amplitude law at
/// phi*. Throws "drift regime" for sigma >= kappa and "below oscillation
/// threshold" when r*^2 <= 0.
LockedState locked_state(const DimerParams& p);

/// Period of the phase-drift power oscillation, T_p = pi/sqrt(sigma^2 - kappa^2)
/// (sigma > kappa only).
double drift_period(const DimerParams& p);

/// Asymptotic slaved amplitude along a phase trajectory:
///   r^2(t) = (1/rho) (sigma^2 + eta^2 - kappa^2) eta /
///            (sigma^2 + eta^2 - kappa eta cos(phi) - kappa sigma sin(phi))
VectorXd asymptotic_r2(const VectorXd& phi_samples, const DimerParams& p);

/// Gradient-flow potential of the Adler phase equation,
/// G(phi) = -2 sigma phi - 2 kappa cos(phi); non-increasing along any
/// trajectory since dG/dt = -(dphi/dt)^2.
double lyapunov_G(double phi, const DimerParams& p);

struct LockReport {
  bool locked = false;
  double phi_star = 0.0;       // locked regime
  double r2_star = 0.0;        // locked regime
  double period_theory = 0.0;  // drift regime
  std::optional<double> measured_period;
  double measured_r2_mean = 0.0;
};

LockReport lock_report(const DimerTrajectory& traj, const DimerParams& p);

/// Reduced parameters extracted from the two lowest levels of the
/// double-well spectrum: kappa = (E2 - E1)/2 and q = (E1 + E2)/2 at
/// gamma = 0, and the detuning slope from a least-squares fit of
/// sigma(gamma) = sqrt(kappa^2 - ((E2-E1)/2)^2) against gamma over the
/// real-spectrum samples.
struct ReducedParams {
  double kappa = 0.0;
  double q = 0.0;
  double sigma_slope = 0.0;
  double gamma_pt_reduced = 0.0;  // kappa / sigma_slope
};

ReducedParams extract_reduced_params(const SpectrumTable& table);

}  // namespace ptlaser
