#include "ptlaser/dynamics.hpp"

#include <cmath>
#include <random>

namespace ptlaser {

FieldState init_noise(const Grid& grid, double amp, uint64_t seed) {
  if (!(amp > 0.0)) throw std::invalid_argument("init_noise: amp must be positive");
  std::mt19937_64 gen(seed);
  auto uniform_pm1 = [&gen]() {
    // 53-bit mantissa draw, identical on every conforming platform.
    double u = (gen() >> 11) * (1.0 / 9007199254740992.0);
    return 2.0 * u - 1.0;
  };
  FieldState st;
  st.t = 0.0;
  st.psi.resize(grid.n);
  for (int j = 0; j < grid.n; ++j) {
    double re = uniform_pm1();
    double im = uniform_pm1();
    st.psi[j] = amp * Complex(re, im);
  }
  return st;
}

Stepper::Stepper(const OperatorMatrix& op, double dt) : dt_(dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("Stepper: dt must be positive");
  const int n = op.size();
  Complex hdt(0.5 * dt, 0.0);
  VectorXcd lhs_diag = VectorXcd::Ones(n) + hdt * op.diag;
  VectorXcd lhs_off = VectorXcd::Constant(n - 1, hdt * op.off);
  lu_ = TridiagonalLU<Complex>(lhs_diag, lhs_off, lhs_off);
  rhs_diag_ = VectorXcd::Ones(n) - hdt * op.diag;
  rhs_off_ = -0.5 * dt * op.off;
}

void Stepper::advance(FieldState& state) const {
  VectorXcd& psi = state.psi;
  const int n = static_cast<int>(psi.size());
  const double tau = 0.5 * dt_;

  // Exact saturation half-step: |psi|^2 obeys d rho/dt = -2 rho^2.
  for (int j = 0; j < n; ++j) {
    double rho = std::norm(psi[j]);
    psi[j] /= std::sqrt(1.0 + 2.0 * rho * tau);
  }

  // Crank-Nicolson linear step: (I + dt/2 H) psi+ = (I - dt/2 H) psi-.
  VectorXcd rhs(n);
  for (int j = 0; j < n; ++j) {
    Complex s = rhs_diag_[j] * psi[j];
    if (j > 0) s += rhs_off_ * psi[j - 1];
    if (j + 1 < n) s += rhs_off_ * psi[j + 1];
    rhs[j] = s;
  }
  psi = lu_.solve(rhs);

  for (int j = 0; j < n; ++j) {
    double rho = std::norm(psi[j]);
    psi[j] /= std::sqrt(1.0 + 2.0 * rho * tau);
  }
  state.t += dt_;

  for (int j = 0; j < n; ++j)
    if (!std::isfinite(psi[j].real()) || !std::isfinite(psi[j].imag()))
      throw NumericalError("step: field became non-finite at t = " +
                           std::to_string(state.t));
}

FieldState step(const FieldState& state, const OperatorMatrix& op, double dt) {
  Stepper st(op, dt);
  FieldState out = state;
  st.advance(out);
  return out;
}

EvolveResult evolve(const RunConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("evolve: dt must be positive");
  if (!(cfg.t_end >= cfg.dt))
    throw std::invalid_argument("evolve: t_end must be at least dt");
  if (!(cfg.noise_amp > 0.0))
    throw std::invalid_argument("evolve: noise_amp must be positive");

  OperatorMatrix op = assemble_hamiltonian(cfg.spec, cfg.grid, cfg.g0);
  Stepper stepper(op, cfg.dt);
  FieldState state = init_noise(cfg.grid, cfg.noise_amp, cfg.seed);

  const long steps = std::lround(cfg.t_end / cfg.dt);
  int rstride = cfg.record_stride > 0
                    ? cfg.record_stride
                    : static_cast<int>(std::max(1L, steps / 4000));
  int sstride = cfg.snapshot_stride > 0
                    ? cfg.snapshot_stride
                    : static_cast<int>(std::max(1L, steps / 200));

  const double h = cfg.grid.h;
  auto power_of = [&](const VectorXcd& psi) { return psi.squaredNorm() * h; };

  std::vector<double> times{0.0}, power{power_of(state.psi)};
  std::vector<double> snap_times{0.0};
  std::vector<VectorXd> snap_rows{state.psi.cwiseAbs2()};

  for (long m = 1; m <= steps; ++m) {
    stepper.advance(state);
    if (m % rstride == 0 || m == steps) {
      times.push_back(state.t);
      power.push_back(power_of(state.psi));
    }
    if (m % sstride == 0 || m == steps) {
      snap_times.push_back(state.t);
      snap_rows.push_back(state.psi.cwiseAbs2());
    }
  }

  EvolveResult out;
  out.trace.times = Eigen::Map<VectorXd>(times.data(), times.size());
  out.trace.power = Eigen::Map<VectorXd>(power.data(), power.size());
  out.final_state = std::move(state);
  out.snapshots.times =
      Eigen::Map<VectorXd>(snap_times.data(), snap_times.size());
  out.snapshots.intensity.resize(snap_rows.size(), cfg.grid.n);
  for (size_t r = 0; r < snap_rows.size(); ++r)
    out.snapshots.intensity.row(r) = snap_rows[r].transpose();
  return out;
}

namespace {

struct Window {
  VectorXd t, p;
};

Window post_transient(const PowerTrace& trace, double frac) {
  const int n = trace.size();
  int start = static_cast<int>(std::floor(frac * n));
  start = std::min(std::max(start, 0), n - 1);
  Window w;
  w.t = trace.times.segment(start, n - start);
  w.p = trace.power.segment(start, n - start);
  return w;
}

std::vector<double> upward_crossings(const Window& w, double level) {
  std::vector<double> out;
  for (int i = 1; i < w.p.size(); ++i) {
    if (w.p[i - 1] < level && w.p[i] >= level) {
      double f = (level - w.p[i - 1]) / (w.p[i] - w.p[i - 1]);
      out.push_back(w.t[i - 1] + f * (w.t[i] - w.t[i - 1]));
    }
  }
  return out;
}

}  // namespace

EmissionClass classify_emission(const PowerTrace& trace, double transient_frac,
                                double depth_tol) {
  Window w = post_transient(trace, transient_frac);
  if (w.p.size() < 100)
    throw std::invalid_argument(
        "classify_emission: need >= 100 samples after the transient");
  double mean = w.p.mean();
  EmissionClass ec;
  if (mean < 1e-12) {
    ec.kind = EmissionClass::Kind::NotConverged;
    return ec;
  }
  double depth = (w.p.maxCoeff() - w.p.minCoeff()) / mean;
  if (depth < depth_tol) {
    ec.kind = EmissionClass::Kind::Stationary;
    ec.p_ss = mean;
    return ec;
  }
  // Modulated but without repeated mean crossings (e.g. a still-growing
  // transient) cannot be called periodic.
  auto cross = upward_crossings(w, mean);
  if (cross.size() < 3) {
    ec.kind = EmissionClass::Kind::NotConverged;
    return ec;
  }
  ec.kind = EmissionClass::Kind::Oscillatory;
  ec.modulation_depth = depth;
  ec.period = dominant_period(trace, transient_frac).period;
  return ec;
}

PeriodEstimate dominant_period(const PowerTrace& trace, double transient_frac) {
  Window w = post_transient(trace, transient_frac);
  if (w.p.size() < 3)
    throw std::invalid_argument("dominant_period: trace too short");
  auto cross = upward_crossings(w, w.p.mean());
  if (cross.size() < 3)
    throw std::invalid_argument("dominant_period: insufficient cycles");
  PeriodEstimate pe;
  pe.crossings = static_cast<int>(cross.size());
  double sum = 0.0, sum2 = 0.0;
  int m = pe.crossings - 1;
  for (int i = 0; i < m; ++i) {
    double d = cross[i + 1] - cross[i];
    sum += d;
    sum2 += d * d;
  }
  pe.period = sum / m;
  pe.stddev = std::sqrt(std::max(0.0, sum2 / m - pe.period * pe.period));
  return pe;
}

}  // namespace ptlaser
