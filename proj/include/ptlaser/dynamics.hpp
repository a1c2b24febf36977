#pragma once

#include <cstdint>
#include <optional>

#include "ptlaser/lattice.hpp"
#include "ptlaser/tridiagonal.hpp"

namespace ptlaser {

/// Complex field on the interior points of a grid at normalized time t
/// (units of the cavity round-trip time).
struct FieldState {
  VectorXcd psi;
  double t = 0.0;
};

/// P(t) = integral |psi|^2 dx sampled along an evolution.
struct PowerTrace {
  VectorXd times;
  VectorXd power;

  int size() const { return static_cast<int>(times.size()); }
};

struct RunConfig {
  PotentialSpec spec;
  Grid grid;
  double g0 = 0.0;
  double dt = 0.05;
  double t_end = 600.0;
  double noise_amp = 1e-3;
  uint64_t seed = 1;
  int record_stride = 0;    // 0: choose so that >= 4000 power samples are kept
  int snapshot_stride = 0;  // 0: choose so that ~200 intensity rows are kept
};

struct EmissionClass {
  enum class Kind { Stationary, Oscillatory, NotConverged };
  Kind kind = Kind::NotConverged;
  double p_ss = 0.0;              // Stationary only
  double period = 0.0;            // Oscillatory only
  double modulation_depth = 0.0;  // Oscillatory only
};

struct PeriodEstimate {
  double period = 0.0;
  double stddev = 0.0;
  int crossings = 0;
};

struct Snapshots {
  VectorXd times;
  MatrixXd intensity;  // row per recorded time, |psi(x)|^2 columns
};

struct EvolveResult {
  PowerTrace trace;
  FieldState final_state;
  Snapshots snapshots;
};

/// psi_j = amp * (xi_j + i*zeta_j) with xi, zeta i.i.d. uniform on [-1, 1]
/// drawn from a seeded 64-bit Mersenne twister (two draws per point, real
/// part first). Same seed, same field, bit for bit.
FieldState init_noise(const Grid& grid, double amp, uint64_t seed);

/// One Strang-split step of d_t psi = -H psi - |psi|^2 psi:
/// an exact half-step of the cubic saturation (|psi| shrinks, phase frozen),
/// a full Crank-Nicolson step of the linear flow, and a second half-step of
/// the saturation. Unconditionally stable in the linear part.
class Stepper {
 public:
  Stepper(const OperatorMatrix& op, double dt);

  void advance(FieldState& state) const;

 private:
  TridiagonalLU<Complex> lu_;
  VectorXcd rhs_diag_;
  double rhs_off_ = 0.0;
  double dt_ = 0.0;
};

FieldState step(const FieldState& state, const OperatorMatrix& op, double dt);

EvolveResult evolve(const RunConfig& cfg);

/// Modulation depth m = (P_max - P_min)/mean(P) on the post-transient
/// window; m < depth_tol is stationary, otherwise oscillatory with the
/// period taken from upward mean-crossings. Mean below the noise floor
/// 1e-12 means the laser never switched on.
EmissionClass classify_emission(const PowerTrace& trace,
                                double transient_frac = 0.5,
                                double depth_tol = 1e-3);

/// Mean (and spread) of the spacing between successive upward crossings of
/// the post-transient mean. Needs at least 3 crossings.
PeriodEstimate dominant_period(const PowerTrace& trace,
                               double transient_frac = 0.5);

}  // namespace ptlaser
