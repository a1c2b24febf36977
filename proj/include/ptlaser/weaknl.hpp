#pragma once

#include <array>
#include <optional>

#include "ptlaser/dynamics.hpp"
#include "ptlaser/grid.hpp"

namespace ptlaser {

/// Self- (alpha) and cross- (beta) saturation coefficients of the coalesced
/// mode pair:
///   alpha = int u1^2 |u1|^2 dx / int u1^2 dx
///   beta  = 2 int u1^2(x) |u1(-x)|^2 dx / int u1^2 dx
/// computed by trapezoidal quadrature after normalizing u1 to unit L2 norm,
/// with u1(-x) realized by index reversal on a symmetric grid.
struct SaturationCoefficients {
  Complex alpha;
  Complex beta;
};

SaturationCoefficients saturation_coeffs(const VectorXcd& u1, const Grid& grid);

/// Slowly varying modal amplitudes c1, c2 of the two-mode expansion.
struct AmplitudeState {
  Complex c1, c2;
};

/// dc1/dt = (g0 - g0_th) c1 - (alpha |c1|^2 + beta |c2|^2) c1
/// dc2/dt = (g0 - g0_th) c2 - (alpha |c2|^2 + beta |c1|^2) c2
AmplitudeState amplitude_rhs(const AmplitudeState& s, double g0, double g0_th,
                             const SaturationCoefficients& coeffs);

struct LimitCycle {
  enum class Kind { SingleMode1, SingleMode2, TwoMode };
  Kind kind = Kind::SingleMode1;
  double amplitude_sq = 0.0;
  double delta = 0.0;  // slow frequency shift of the cycle
  bool exists = false;
  bool stable = false;
  bool degenerate = false;  // alpha_R == beta_R: stability is marginal
};

/// The three limit cycles of the amplitude equations: single-mode operation
/// on either mode (amplitude^2 = (g0-g0th)/alpha_R, stable when cross-
/// saturation dominates) and simultaneous two-mode oscillation
/// (amplitude^2 = (g0-g0th)/(alpha_R+beta_R), stable when self-saturation
/// dominates).
std::array<LimitCycle, 3> limit_cycles(double g0, double g0_th,
                                       const SaturationCoefficients& coeffs);

/// Beating power of the two-mode state:
///   P(t) = (|c1|^2 + |c2|^2) int |u1|^2 + 2 Re{ c1 c2* S exp(2i omega t) }
/// with S = int u2*(x) u1(x) dx. The second member of the pair defaults to
/// the PT partner u2(x) = u1*(-x); pass `u2` explicitly to override (e.g.
/// the orthogonal pair of a Hermitian operator, for which S = 0 and P is
/// constant). `omega` is half the beat angular frequency.
PowerTrace predicted_power(Complex c1, Complex c2, const VectorXcd& u1,
                           double omega, const Grid& grid,
                           const VectorXd& t_samples,
                           const std::optional<VectorXcd>& u2 = std::nullopt);

}  // namespace ptlaser
