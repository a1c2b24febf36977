#pragma once

#include <vector>

#include "ptlaser/grid.hpp"

namespace ptlaser {

/// Cavity hardware: wavelength, lens focal length, Gaussian aperture size
/// and total cavity length, all in SI units.
struct PhysicalConfig {
  double lambda = 633e-9;
  double f = 0.10;
  double w_a = 250e-6;
  double cavity_length = 0.60;  // 4f + d

  void validate() const {
    if (!(lambda > 0) || !(f > 0) || !(w_a > 0) || !(cavity_length > 0))
      throw std::invalid_argument("PhysicalConfig: all lengths must be positive");
  }
};

/// Scales derived from the cavity: spectral-filter strength D (m^2),
/// transverse unit L = sqrt(D), round-trip time T_R = 2*length/c, and the
/// aperture parameter Theta = lambda/(pi w_a^2).
struct DerivedScales {
  double D = 0.0;
  double L = 0.0;
  double T_R = 0.0;
  double theta = 0.0;
};

DerivedScales derived_scales(const PhysicalConfig& cfg);

/// gamma = (2 pi / lambda) * alpha * L for a mirror tilted by alpha radians.
double tilt_to_gamma(double alpha, const PhysicalConfig& cfg);
double gamma_to_tilt(double gamma, const PhysicalConfig& cfg);

/// Gaussian spectral filter exp(D d^2/dx^2): Fourier mode k is multiplied
/// by exp(-D k^2). The samples are zero-padded by `pad_frac` of the length
/// on each side before the transform (the filter is periodic; the pad keeps
/// wrap-around away from the physical window). If `pad_energy` is given it
/// receives the fraction of output energy left in the pad.
VectorXcd huygens_filter(const VectorXcd& psi, double h, double D,
                         double pad_frac = 0.25, double* pad_energy = nullptr);

/// One cavity round trip P = exp(g) r(x) exp(D d^2/dx^2): the two half-gain
/// passes and the mirror collapse into a single multiplicative factor after
/// the spectral filter.
struct RoundTripOperator {
  double g = 0.0;
  VectorXcd r_profile;
  double D_norm = 1.0;
  Grid grid;

  void validate() const;
};

VectorXcd round_trip(const VectorXcd& psi, const RoundTripOperator& op,
                     double pad_frac = 0.25, double* pad_energy = nullptr);

/// Discrepancy between the exact round-trip map and the exponential of its
/// continuous generator with the commutator series dropped:
///   eps1(s) = || P_s psi - exp(s Pi0) psi || / || psi ||
/// for uniformly shrunken parameters (s g, s ln r, s D). The leading error
/// is the first commutator, so eps1 scales like s^2. Requires a mirror
/// profile bounded away from zero.
struct BchReport {
  std::vector<double> scales;
  std::vector<double> eps;
  std::vector<double> ratios;  // eps[i] / eps[i+1], ~4 for s-halving
};

BchReport bch_consistency(const VectorXcd& psi, const RoundTripOperator& op,
                          const std::vector<double>& scales = {1.0, 0.5, 0.25});

}  // namespace ptlaser
