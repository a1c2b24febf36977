// ptlaser: spectra, thresholds and nonlinear laser dynamics of tilted-mirror
// cavities, plus the coupled-oscillator reduction. Every subcommand writes
// CSV/JSON artifacts and a manifest with checksums.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <random>
#include <iostream>

#include "ptlaser/csv.hpp"
#include "ptlaser/dimer.hpp"
#include "ptlaser/dynamics.hpp"
#include "ptlaser/roundtrip.hpp"
#include "ptlaser/spectra.hpp"
#include "ptlaser/weaknl.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ptlaser;

namespace {

constexpr const char* kVersion = "0.1.0";

// Tracks files written for one run. If the run never commits a manifest,
// the partial outputs are removed again on destruction.
struct OutputTracker {
  fs::path dir;
  std::vector<std::string> files;
  json headlines = json::object();
  bool committed = false;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  explicit OutputTracker(const std::string& out_dir) : dir(out_dir) {
    fs::create_directories(dir);
  }
  ~OutputTracker() {
    if (committed) return;
    for (const auto& f : files) {
      std::error_code ec;
      fs::remove(dir / f, ec);
    }
  }
  fs::path path(const std::string& name) {
    files.push_back(name);
    return dir / name;
  }
  void write_json(const std::string& name, const json& j) {
    std::ofstream out(path(name));
    out << j.dump(2) << "\n";
  }
  void manifest(const std::string& command, const json& config) {
    json m;
    m["version"] = kVersion;
    m["command"] = command;
    m["config"] = config;
    m["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    m["outputs"] = json::array();
    for (const auto& f : files)
      m["outputs"].push_back(
          {{"path", f}, {"fnv1a64", fnv1a64_file((dir / f).string())}});
    m["headlines"] = headlines;
    fs::path tmp = dir / "manifest.json.tmp";
    {
      std::ofstream out(tmp);
      out << m.dump(2) << "\n";
    }
    fs::rename(tmp, dir / "manifest.json");  // atomic on POSIX
    committed = true;
  }
};

struct ModelOptions {
  std::string model = "squire";
  double u = 6.0;
  double beta = 7e-6;
  double x0 = 10.0;
  double gamma = 0.0;
  std::string mirror_csv;
  int n = 0;  // 0: per-model default
  double x_min = -30.0, x_max = 30.0;

  CLI::Option* u_opt = nullptr;
  CLI::Option* beta_opt = nullptr;
  CLI::Option* x0_opt = nullptr;
  CLI::Option* mirror_opt = nullptr;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--model", model, "squire | doublewell | mirror-file")
        ->check(CLI::IsMember({"squire", "doublewell", "mirror-file"}));
    u_opt = cmd->add_option("--u", u, "half-width of the hard aperture (squire)");
    beta_opt = cmd->add_option("--beta", beta, "quartic well strength (doublewell)");
    x0_opt = cmd->add_option("--x0", x0, "well separation (doublewell)");
    cmd->add_option("--gamma", gamma, "mirror tilt in normalized units");
    mirror_opt = cmd->add_option("--mirror-csv", mirror_csv,
                                 "two/three column CSV: x, R [, Delta]");
    cmd->add_option("--n", n, "interior grid points");
    cmd->add_option("--x-min", x_min, "grid lower edge (doublewell)");
    cmd->add_option("--x-max", x_max, "grid upper edge (doublewell)");
  }

  void check_conflicts() const {
    auto set = [](CLI::Option* o) { return o && o->count() > 0; };
    if (model == "squire" && (set(beta_opt) || set(x0_opt) || set(mirror_opt)))
      throw CLI::ValidationError("conflicting model flags for model=squire");
    if (model == "doublewell" && (set(u_opt) || set(mirror_opt)))
      throw CLI::ValidationError("conflicting model flags for model=doublewell");
    if (model == "mirror-file" && (set(u_opt) || set(beta_opt) || set(x0_opt)))
      throw CLI::ValidationError("conflicting model flags for model=mirror-file");
    if (model == "mirror-file" && mirror_csv.empty())
      throw CLI::ValidationError("mirror-file model requires --mirror-csv");
  }

  std::pair<PotentialSpec, Grid> build() const {
    check_conflicts();
    if (model == "squire") {
      int nn = n > 0 ? n : 2000;
      return {SquireWell{u, gamma}, build_grid(-u, u, nn)};
    }
    if (model == "doublewell") {
      int nn = n > 0 ? n : 3000;
      return {QuarticDoubleWell{beta, x0, gamma}, build_grid(x_min, x_max, nn)};
    }
    return load_mirror_csv();
  }

  std::pair<PotentialSpec, Grid> load_mirror_csv() const {
    std::ifstream in(mirror_csv);
    if (!in) throw CLI::ValidationError("cannot open mirror CSV " + mirror_csv);
    std::vector<double> xs, Rs, Ds;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream ss(line);
      double x, R, D = 0.0;
      if (!(ss >> x >> R)) continue;  // skip header rows
      ss >> D;
      xs.push_back(x);
      Rs.push_back(R);
      Ds.push_back(D);
    }
    if (xs.size() < 3)
      throw CLI::ValidationError("mirror CSV needs at least 3 sample rows");
    double h = xs[1] - xs[0];
    for (size_t i = 1; i < xs.size(); ++i)
      if (std::abs((xs[i] - xs[i - 1]) - h) > 1e-9 * std::abs(h))
        throw CLI::ValidationError("mirror CSV must be uniformly sampled in x");
    int nn = static_cast<int>(xs.size());
    Grid grid = build_grid(xs.front() - h, xs.back() + h, nn);
    MirrorProfile mp;
    mp.R = Eigen::Map<VectorXd>(Rs.data(), nn);
    mp.Delta = Eigen::Map<VectorXd>(Ds.data(), nn);
    // A tilt flag composes with the sampled phase: Delta -> Delta - gamma*x.
    if (gamma != 0.0) mp.Delta -= gamma * grid.points;
    return {mp, grid};
  }

  json echo() const {
    json j{{"model", model}, {"gamma", gamma}, {"n", n}};
    if (model == "squire") j["u"] = u;
    if (model == "doublewell") {
      j["beta"] = beta;
      j["x0"] = x0;
      j["x_min"] = x_min;
      j["x_max"] = x_max;
    }
    if (model == "mirror-file") j["mirror_csv"] = mirror_csv;
    return j;
  }
};

int resolve_jobs(int jobs_flag) {
  if (jobs_flag > 0) return jobs_flag;
  if (const char* env = std::getenv("PTLASER_JOBS")) {
    int j = std::atoi(env);
    if (j > 0) return j;
  }
  return 1;
}

void write_spectrum_csv(const fs::path& path, const SpectrumTable& table) {
  CsvWriter csv(path.string());
  std::vector<std::string> names{"gamma"};
  for (int i = 1; i <= table.energies.cols(); ++i)
    names.push_back("re_E" + std::to_string(i));
  for (int i = 1; i <= table.energies.cols(); ++i)
    names.push_back("im_E" + std::to_string(i));
  csv.header(names);
  for (int r = 0; r < table.energies.rows(); ++r) {
    std::vector<double> row{table.gammas[r]};
    for (int c = 0; c < table.energies.cols(); ++c)
      row.push_back(table.energies(r, c).real());
    for (int c = 0; c < table.energies.cols(); ++c)
      row.push_back(table.energies(r, c).imag());
    csv.row(row);
  }
}

void write_power_csv(const fs::path& path, const PowerTrace& tr) {
  CsvWriter csv(path.string());
  csv.header({"t", "P"});
  for (int i = 0; i < tr.size(); ++i) csv.row({tr.times[i], tr.power[i]});
}

void write_heatmap_csv(const fs::path& path, const Snapshots& snaps,
                       const Grid& grid) {
  CsvWriter csv(path.string());
  std::vector<std::string> names{"t"};
  names.reserve(grid.n + 1);
  for (int j = 0; j < grid.n; ++j) names.push_back(format_double(grid.points[j]));
  csv.header(names);
  for (int r = 0; r < snaps.intensity.rows(); ++r) {
    std::vector<double> row{snaps.times[r]};
    for (int j = 0; j < grid.n; ++j) row.push_back(snaps.intensity(r, j));
    csv.row(row);
  }
}

const char* kind_name(EmissionClass::Kind k) {
  switch (k) {
    case EmissionClass::Kind::Stationary: return "stationary";
    case EmissionClass::Kind::Oscillatory: return "oscillatory";
    default: return "not_converged";
  }
}

json classification_json(const EmissionClass& ec) {
  json j{{"kind", kind_name(ec.kind)}};
  if (ec.kind == EmissionClass::Kind::Stationary) j["p_ss"] = ec.p_ss;
  if (ec.kind == EmissionClass::Kind::Oscillatory) {
    j["period"] = ec.period;
    j["modulation_depth"] = ec.modulation_depth;
  }
  return j;
}

DimerState seeded_dimer_state(uint64_t seed) {
  std::mt19937_64 gen(seed);
  auto pm1 = [&gen]() {
    return 2.0 * ((gen() >> 11) * (1.0 / 9007199254740992.0)) - 1.0;
  };
  double a = pm1(), b = pm1(), c = pm1(), d = pm1();
  return {1e-3 * Complex(a, b), 1e-3 * Complex(c, d)};
}

// ---------------------------------------------------------------- spectrum

struct SpectrumArgs {
  ModelOptions model;
  double gamma_min = 0.0, gamma_max = 0.1;
  int gamma_steps = 51;
  int k = 6;
  double g0 = 0.0;
  std::string out = "out/spectrum";
  int jobs = 0;
};

void run_spectrum(const SpectrumArgs& a) {
  if (a.gamma_steps > 1 && !(a.gamma_min < a.gamma_max))
    throw CLI::ValidationError("gamma range: need gamma-min < gamma-max");
  auto [spec, grid] = a.model.build();
  VectorXd gs;
  if (a.gamma_steps > 1)
    gs = VectorXd::LinSpaced(a.gamma_steps, a.gamma_min, a.gamma_max);
  else
    gs = VectorXd::Constant(1, a.gamma_min);
  OutputTracker out(a.out);
  SpectrumTable table =
      spectrum_vs_gamma(spec, grid, a.g0, gs, a.k, resolve_jobs(a.jobs));
  write_spectrum_csv(out.path("spectrum.csv"), table);
  out.headlines["rows"] = static_cast<int>(table.energies.rows());
  json cfg = a.model.echo();
  cfg["gamma_min"] = a.gamma_min;
  cfg["gamma_max"] = a.gamma_max;
  cfg["gamma_steps"] = a.gamma_steps;
  cfg["k"] = a.k;
  cfg["g0"] = a.g0;
  out.manifest("spectrum", cfg);
}

// --------------------------------------------------------------- threshold

struct ThresholdArgs {
  ModelOptions model;
  double gamma_lo = 0.0, gamma_hi = -1.0;  // -1: per-model default
  double tol_real = 1e-7, tol_gamma = -1.0;
  int k = 6;
  double g0 = 0.0;
  std::string out = "out/threshold";
};

void run_threshold(const ThresholdArgs& a) {
  auto [spec, grid] = a.model.build();
  double hi = a.gamma_hi > 0 ? a.gamma_hi
                             : (a.model.model == "doublewell" ? 0.002 : 0.1);
  if (!(a.gamma_lo < hi))
    throw CLI::ValidationError("gamma range: need gamma-lo < gamma-hi");
  ThresholdOptions opts;
  opts.tol_real = a.tol_real;
  opts.tol_gamma = a.tol_gamma > 0
                       ? a.tol_gamma
                       : (a.model.model == "doublewell" ? 1e-6 : 1e-4);
  opts.k = a.k;
  OutputTracker out(a.out);
  ThresholdResult r = scan_threshold(spec, grid, a.g0, a.gamma_lo, hi, opts);
  out.write_json("threshold.json",
                 json{{"gamma_pt", r.gamma_pt},
                      {"bracket", {r.gamma_lo, r.gamma_hi}},
                      {"pair_index", r.pair_index},
                      {"max_imag_at_hi", r.max_imag_at_hi}});
  out.headlines["gamma_pt"] = r.gamma_pt;
  json cfg = a.model.echo();
  cfg["gamma_lo"] = a.gamma_lo;
  cfg["gamma_hi"] = hi;
  cfg["tol_real"] = opts.tol_real;
  cfg["tol_gamma"] = opts.tol_gamma;
  cfg["g0"] = a.g0;
  out.manifest("threshold", cfg);
}

// ------------------------------------------------------------------ evolve

struct EvolveArgs {
  ModelOptions model;
  double g0 = 0.25;
  double dt = 0.05, t_end = 600.0, noise_amp = 1e-3;
  uint64_t seed = 1;
  int record_stride = 0;
  double transient_frac = 0.5, depth_tol = 1e-3;
  std::string out = "out/evolve";
};

json evolve_to_files(const EvolveArgs& a, OutputTracker& out,
                     const std::string& tag) {
  auto [spec, grid] = a.model.build();
  RunConfig cfg;
  cfg.spec = spec;
  cfg.grid = grid;
  cfg.g0 = a.g0;
  cfg.dt = a.dt;
  cfg.t_end = a.t_end;
  cfg.noise_amp = a.noise_amp;
  cfg.seed = a.seed;
  cfg.record_stride = a.record_stride;
  EvolveResult res = evolve(cfg);
  write_power_csv(out.path("power" + tag + ".csv"), res.trace);
  write_heatmap_csv(out.path("intensity" + tag + ".csv"), res.snapshots, grid);
  return classification_json(
      classify_emission(res.trace, a.transient_frac, a.depth_tol));
}

json evolve_config_echo(const EvolveArgs& a) {
  json cfg = a.model.echo();
  cfg["g0"] = a.g0;
  cfg["dt"] = a.dt;
  cfg["t_end"] = a.t_end;
  cfg["noise_amp"] = a.noise_amp;
  cfg["seed"] = a.seed;
  cfg["transient_frac"] = a.transient_frac;
  cfg["depth_tol"] = a.depth_tol;
  return cfg;
}

void run_evolve(const EvolveArgs& a) {
  OutputTracker out(a.out);
  json cls = evolve_to_files(a, out, "");
  json cfg = evolve_config_echo(a);
  out.write_json("run.json", json{{"config", cfg}, {"classification", cls}});
  out.headlines["classification"] = cls;
  out.manifest("evolve", cfg);
}

// ------------------------------------------------------------------- dimer

struct DimerArgs {
  double kappa = 0.00515, q = 0.0469, g0 = 0.05, rho = 0.074;
  double sigma = -1.0;  // direct detuning, or --gamma with --sigma-slope
  double gamma = -1.0;
  double sigma_slope = 7.72;
  double dt = 0.1, t_end = 6000.0;
  uint64_t seed = 1;
  int record_stride = 10;
  std::string sweep;
  double sigma_min = 0.0, sigma_max = 0.01;
  int sigma_steps = 21;
  int jobs = 0;
  std::string out = "out/dimer";
};

json lock_report_json(const LockReport& rep) {
  json rj{{"locked", rep.locked}, {"r2_mean", rep.measured_r2_mean}};
  if (rep.locked) {
    rj["phi_star"] = rep.phi_star;
    rj["r2_star"] = rep.r2_star;
  } else {
    rj["period_theory"] = rep.period_theory;
    if (rep.measured_period) rj["period_measured"] = *rep.measured_period;
  }
  return rj;
}

void run_dimer(const DimerArgs& a) {
  if (!a.sweep.empty() && a.sweep != "sigma")
    throw CLI::ValidationError("unknown sweep variable '" + a.sweep + "'");
  double sigma =
      a.sigma >= 0 ? a.sigma : (a.gamma >= 0 ? a.sigma_slope * a.gamma : 0.0);
  DimerParams p = DimerParams::from_gain(a.g0, a.q, a.kappa, sigma, a.rho);
  OutputTracker out(a.out);
  json cfg{{"kappa", a.kappa}, {"q", a.q},       {"g0", a.g0},
           {"rho", a.rho},     {"sigma", sigma}, {"dt", a.dt},
           {"t_end", a.t_end}, {"seed", a.seed}};

  if (a.sweep == "sigma") {
    if (!(a.sigma_min < a.sigma_max))
      throw CLI::ValidationError("sigma sweep: need sigma-min < sigma-max");
    VectorXd sigmas =
        VectorXd::LinSpaced(a.sigma_steps, a.sigma_min, a.sigma_max);
    std::vector<LockReport> reports(a.sigma_steps);
    auto work = [&](int i) {
      DimerParams pi = p;
      pi.sigma = sigmas[i];
      DimerTrajectory traj = evolve_dimer(seeded_dimer_state(a.seed), pi, a.dt,
                                          a.t_end, a.record_stride);
      reports[i] = lock_report(traj, pi);
    };
    int jobs = resolve_jobs(a.jobs);
    std::vector<std::future<void>> pool;
    int next = 0;
    while (next < a.sigma_steps || !pool.empty()) {
      while (static_cast<int>(pool.size()) < jobs && next < a.sigma_steps)
        pool.push_back(std::async(std::launch::async, work, next++));
      pool.front().get();
      pool.erase(pool.begin());
    }
    CsvWriter csv(out.path("sweep.csv").string());
    csv.header({"sigma", "sigma_over_kappa", "locked", "period_theory",
                "period_measured", "r2_mean"});
    double boundary = 0.0;
    for (int i = 0; i < a.sigma_steps; ++i) {
      const LockReport& r = reports[i];
      csv.row({sigmas[i], sigmas[i] / p.kappa, r.locked ? 1.0 : 0.0,
               r.period_theory, r.measured_period.value_or(0.0),
               r.measured_r2_mean});
      if (i > 0 && reports[i - 1].locked && !r.locked)
        boundary = 0.5 * (sigmas[i - 1] + sigmas[i]);
    }
    out.headlines["lock_drift_boundary_sigma"] = boundary;
    out.headlines["kappa"] = a.kappa;
    cfg["sweep"] = "sigma";
    cfg["sigma_min"] = a.sigma_min;
    cfg["sigma_max"] = a.sigma_max;
    cfg["sigma_steps"] = a.sigma_steps;
    out.manifest("dimer", cfg);
    return;
  }

  DimerTrajectory traj = evolve_dimer(seeded_dimer_state(a.seed), p, a.dt,
                                      a.t_end, a.record_stride);
  {
    CsvWriter csv(out.path("trace.csv").string());
    csv.header({"t", "re_a1", "im_a1", "re_a2", "im_a2", "r1", "r2", "phi", "P"});
    for (int i = 0; i < traj.times.size(); ++i) {
      const DimerState& s = traj.states[i];
      csv.row({traj.times[i], s.a1.real(), s.a1.imag(), s.a2.real(),
               s.a2.imag(), std::abs(s.a1), std::abs(s.a2), traj.phi[i],
               traj.power.power[i]});
    }
  }
  json rj = lock_report_json(lock_report(traj, p));
  out.write_json("lock.json", rj);
  out.headlines["lock_report"] = rj;
  out.manifest("dimer", cfg);
}

// ------------------------------------------------------------------ weaknl

struct WeaknlArgs {
  ModelOptions model;
  double g0 = -1.0;  // default: g0_th + 0.01
  std::string out = "out/weaknl";
};

void run_weaknl(const WeaknlArgs& a) {
  auto [spec, grid] = a.model.build();
  OperatorMatrix op = assemble_hamiltonian(spec, grid, 0.0);
  ModePair mp = mode_pair_at(op);
  SaturationCoefficients k = saturation_coeffs(mp.u1, grid);
  double g0 = a.g0 > 0 ? a.g0 : mp.g0_th + 0.01;
  auto cycles = limit_cycles(g0, mp.g0_th, k);

  OutputTracker out(a.out);
  json rep;
  rep["g0_th"] = mp.g0_th;
  rep["omega"] = mp.omega;
  rep["alpha"] = {k.alpha.real(), k.alpha.imag()};
  rep["beta"] = {k.beta.real(), k.beta.imag()};
  rep["alpha_over_beta_real"] = k.alpha.real() / k.beta.real();
  rep["g0"] = g0;
  const char* names[3] = {"single_mode_1", "single_mode_2", "two_mode"};
  for (int i = 0; i < 3; ++i)
    rep["cycles"][names[i]] = {{"exists", cycles[i].exists},
                               {"stable", cycles[i].stable},
                               {"amplitude_sq", cycles[i].amplitude_sq},
                               {"delta", cycles[i].delta},
                               {"degenerate", cycles[i].degenerate}};
  VectorXcd u = mp.u1 / std::sqrt(trapezoid(mp.u1.cwiseAbs2().eval(), grid));
  Complex S = trapezoid((u.reverse().array() * u.array()).matrix().eval(), grid);
  rep["mode_overlap_abs"] = std::abs(S);
  rep["predicted_depth"] = 2.0 * std::abs(S);
  rep["beat_period"] = M_PI / (mp.omega + cycles[2].delta);
  out.write_json("report.json", rep);
  out.headlines["alpha_over_beta_real"] = rep["alpha_over_beta_real"];
  out.headlines["two_mode_stable"] = cycles[2].stable;
  json cfg = a.model.echo();
  cfg["g0"] = g0;
  out.manifest("weaknl", cfg);
}

// ------------------------------------------------------------------- units

struct UnitsArgs {
  std::string preset;
  double lambda_nm = 633.0, f_cm = 10.0, wa_um = 250.0, cavity_cm = 60.0;
  double u = 6.0;
  double gamma_pt_squire = 0.056, gamma_pt_dimer = 0.00065;
  std::string out = "out/units";
};

void run_units(const UnitsArgs& a) {
  if (!a.preset.empty() && a.preset != "hene")
    throw CLI::ValidationError("unknown preset '" + a.preset + "' (try: hene)");
  PhysicalConfig cfg;  // the hene preset doubles as the flag defaults
  cfg.lambda = a.lambda_nm * 1e-9;
  cfg.f = a.f_cm * 1e-2;
  cfg.w_a = a.wa_um * 1e-6;
  cfg.cavity_length = a.cavity_cm * 1e-2;
  DerivedScales d = derived_scales(cfg);

  OutputTracker out(a.out);
  json rep;
  rep["inputs"] = {{"lambda_m", cfg.lambda},
                   {"f_m", cfg.f},
                   {"w_a_m", cfg.w_a},
                   {"cavity_length_m", cfg.cavity_length}};
  rep["D_m2"] = d.D;
  rep["L_m"] = d.L;
  rep["T_R_s"] = d.T_R;
  rep["theta"] = d.theta;
  rep["aperture_2a_m"] = 2.0 * a.u * d.L;
  rep["alpha_gamma_table"] = json::array();
  for (double gamma : {a.gamma_pt_squire, a.gamma_pt_dimer})
    rep["alpha_gamma_table"].push_back(
        {{"gamma", gamma}, {"alpha_rad", gamma_to_tilt(gamma, cfg)}});
  rep["alpha_pt_squire_rad"] = gamma_to_tilt(a.gamma_pt_squire, cfg);
  rep["alpha_pt_dimer_rad"] = gamma_to_tilt(a.gamma_pt_dimer, cfg);
  out.write_json("units.json", rep);
  out.headlines["L_um"] = d.L * 1e6;
  out.headlines["T_R_ns"] = d.T_R * 1e9;
  out.headlines["alpha_pt_squire_mrad"] =
      rep["alpha_pt_squire_rad"].get<double>() * 1e3;
  out.headlines["alpha_pt_dimer_urad"] =
      rep["alpha_pt_dimer_rad"].get<double>() * 1e6;
  out.headlines["aperture_2a_um"] = rep["aperture_2a_m"].get<double>() * 1e6;
  out.manifest("units", json{{"preset", a.preset.empty() ? "custom" : a.preset},
                             {"lambda_nm", a.lambda_nm},
                             {"f_cm", a.f_cm},
                             {"wa_um", a.wa_um},
                             {"cavity_cm", a.cavity_cm},
                             {"u", a.u}});
}

// ------------------------------------------------------------------ figure

struct FigureArgs {
  std::string which;
  std::string out = "out/figure";
  int jobs = 0;
  uint64_t seed = 1;
};

void run_figure(const FigureArgs& a) {
  OutputTracker out(a.out);
  json cfg{{"figure", a.which}, {"seed", a.seed}};
  int jobs = resolve_jobs(a.jobs);

  if (a.which == "fig2a") {
    Grid grid = build_grid(-6.0, 6.0, 2000);
    VectorXd gs = VectorXd::LinSpaced(51, 0.0, 0.1);
    SpectrumTable t =
        spectrum_vs_gamma(SquireWell{6.0, 0.0}, grid, 0.0, gs, 6, jobs);
    write_spectrum_csv(out.path("fig2a_spectrum.csv"), t);
  } else if (a.which == "fig2cde") {
    const double gammas[3] = {0.0, 0.04, 0.07};
    const char* tags[3] = {"_g0.00", "_g0.04", "_g0.07"};
    // Pre-register the outputs, then fill them (possibly concurrently).
    for (int i = 0; i < 3; ++i) {
      out.path("power" + std::string(tags[i]) + ".csv");
      out.path("intensity" + std::string(tags[i]) + ".csv");
    }
    json cls[3];
    auto work = [&](int i) {
      EvolveArgs ea;
      ea.model.model = "squire";
      ea.model.gamma = gammas[i];
      ea.g0 = 0.25;
      ea.seed = a.seed;
      RunConfig rc;
      auto [spec, grid] = ea.model.build();
      rc.spec = spec;
      rc.grid = grid;
      rc.g0 = ea.g0;
      rc.seed = ea.seed;
      EvolveResult res = evolve(rc);
      write_power_csv(out.dir / ("power" + std::string(tags[i]) + ".csv"),
                      res.trace);
      write_heatmap_csv(out.dir / ("intensity" + std::string(tags[i]) + ".csv"),
                        res.snapshots, grid);
      cls[i] = classification_json(classify_emission(res.trace));
    };
    if (jobs >= 2) {
      std::future<void> f1 = std::async(std::launch::async, work, 0);
      std::future<void> f2 = std::async(std::launch::async, work, 1);
      work(2);
      f1.get();
      f2.get();
    } else {
      for (int i = 0; i < 3; ++i) work(i);
    }
    for (int i = 0; i < 3; ++i)
      out.headlines[std::string("classification") + tags[i]] = cls[i];
  } else if (a.which == "fig3b") {
    Grid grid = build_grid(-30.0, 30.0, 3000);
    QuarticDoubleWell dw{7e-6, 10.0, 0.0};
    VectorXd gs = VectorXd::LinSpaced(41, 0.0, 0.001);
    SpectrumTable t = spectrum_vs_gamma(dw, grid, 0.0, gs, 2, jobs);
    ReducedParams rp = extract_reduced_params(t);
    CsvWriter csv(out.path("fig3b_spectrum.csv").string());
    csv.header({"gamma", "re_E1", "im_E1", "re_E2", "im_E2", "red_re_E1",
                "red_im_E1", "red_re_E2", "red_im_E2"});
    for (int r = 0; r < t.energies.rows(); ++r) {
      double gamma = t.gammas[r];
      double s = rp.sigma_slope * gamma;
      Complex root = std::sqrt(Complex(rp.kappa * rp.kappa - s * s));
      Complex e1 = rp.q - root, e2 = rp.q + root;
      csv.row({gamma, t.energies(r, 0).real(), t.energies(r, 0).imag(),
               t.energies(r, 1).real(), t.energies(r, 1).imag(), e1.real(),
               e1.imag(), e2.real(), e2.imag()});
    }
    out.headlines["kappa"] = rp.kappa;
    out.headlines["q"] = rp.q;
    out.headlines["sigma_slope"] = rp.sigma_slope;
  } else if (a.which == "fig3c") {
    const double gammas[3] = {0.0, 0.0005, 0.0007};
    const char* tags[3] = {"_g0.0000", "_g0.0005", "_g0.0007"};
    for (int i = 0; i < 3; ++i)
      out.path("fig3c_power" + std::string(tags[i]) + ".csv");
    json cls[3];
    auto work = [&](int i) {
      RunConfig rc;
      rc.spec = QuarticDoubleWell{7e-6, 10.0, gammas[i]};
      rc.grid = build_grid(-30.0, 30.0, 3000);
      rc.g0 = 0.05;
      rc.dt = 0.05;
      rc.t_end = 14000.0;
      rc.seed = a.seed;
      EvolveResult res = evolve(rc);
      // Reduced model with the fitted parameters of the reference setup.
      DimerParams p = DimerParams::from_gain(0.05, 0.0469, 0.00515,
                                             7.72 * gammas[i], 0.074);
      DimerTrajectory traj =
          evolve_dimer(seeded_dimer_state(a.seed), p, 0.1, 14000.0, 10);
      double ode_spacing = 0.1 * 10;
      CsvWriter csv(
          (out.dir / ("fig3c_power" + std::string(tags[i]) + ".csv")).string());
      csv.header({"t", "P_field", "P_reduced"});
      for (int r = 0; r < res.trace.size(); ++r) {
        double t = res.trace.times[r];
        int idx = static_cast<int>(std::min<double>(
            std::round(t / ode_spacing),
            static_cast<double>(traj.power.size() - 1)));
        csv.row({t, res.trace.power[r], traj.power.power[idx]});
      }
      cls[i] =
          json{{"field", classification_json(classify_emission(res.trace))},
               {"reduced", classification_json(classify_emission(traj.power))}};
    };
    if (jobs >= 2) {
      std::future<void> f1 = std::async(std::launch::async, work, 0);
      std::future<void> f2 = std::async(std::launch::async, work, 1);
      work(2);
      f1.get();
      f2.get();
    } else {
      for (int i = 0; i < 3; ++i) work(i);
    }
    for (int i = 0; i < 3; ++i)
      out.headlines[std::string("classification") + tags[i]] = cls[i];
  } else {
    throw CLI::ValidationError("unknown figure '" + a.which +
                               "' (fig2a, fig2cde, fig3b, fig3c)");
  }
  out.manifest("figure " + a.which, cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transverse laser dynamics in tilted-mirror cavities"};
  app.set_version_flag("--version", std::string("ptlaser ") + kVersion);
  app.set_config("--config", "", "key=value config file; flags override");
  app.allow_config_extras(false);
  app.require_subcommand(1);

  SpectrumArgs sa;
  auto* sc_spectrum = app.add_subcommand("spectrum", "eigenvalues vs tilt");
  sa.model.add_flags(sc_spectrum);
  sc_spectrum->add_option("--gamma-min", sa.gamma_min, "");
  sc_spectrum->add_option("--gamma-max", sa.gamma_max, "");
  sc_spectrum->add_option("--gamma-steps", sa.gamma_steps, "");
  sc_spectrum->add_option("--k", sa.k, "eigenvalues per sample");
  sc_spectrum->add_option("--g0", sa.g0, "gain shift");
  sc_spectrum->add_option("--out", sa.out, "output directory");
  sc_spectrum->add_option("--jobs", sa.jobs, "concurrent samples");

  ThresholdArgs ta;
  auto* sc_threshold =
      app.add_subcommand("threshold", "locate the PT-breaking tilt");
  ta.model.add_flags(sc_threshold);
  sc_threshold->add_option("--gamma-lo", ta.gamma_lo, "");
  sc_threshold->add_option("--gamma-hi", ta.gamma_hi, "");
  sc_threshold->add_option("--tol-real", ta.tol_real, "");
  sc_threshold->add_option("--tol-gamma", ta.tol_gamma, "");
  sc_threshold->add_option("--k", ta.k, "");
  sc_threshold->add_option("--g0", ta.g0, "");
  sc_threshold->add_option("--out", ta.out, "");

  EvolveArgs ea;
  auto* sc_evolve =
      app.add_subcommand("evolve", "nonlinear field evolution from noise");
  ea.model.add_flags(sc_evolve);
  sc_evolve->add_option("--g0", ea.g0, "unsaturated gain");
  sc_evolve->add_option("--dt", ea.dt, "");
  sc_evolve->add_option("--t-end", ea.t_end, "");
  sc_evolve->add_option("--noise-amp", ea.noise_amp, "");
  sc_evolve->add_option("--seed", ea.seed, "");
  sc_evolve->add_option("--record-stride", ea.record_stride, "");
  sc_evolve->add_option("--transient-frac", ea.transient_frac, "");
  sc_evolve->add_option("--depth-tol", ea.depth_tol, "");
  sc_evolve->add_option("--out", ea.out, "");

  DimerArgs da;
  auto* sc_dimer = app.add_subcommand("dimer", "coupled-oscillator reduction");
  sc_dimer->add_option("--kappa", da.kappa, "");
  sc_dimer->add_option("--q", da.q, "");
  sc_dimer->add_option("--g0", da.g0, "");
  sc_dimer->add_option("--rho", da.rho, "");
  sc_dimer->add_option("--sigma", da.sigma, "detuning (overrides --gamma)");
  sc_dimer->add_option("--gamma", da.gamma, "tilt; sigma = slope * gamma");
  sc_dimer->add_option("--sigma-slope", da.sigma_slope, "");
  sc_dimer->add_option("--dt", da.dt, "");
  sc_dimer->add_option("--t-end", da.t_end, "");
  sc_dimer->add_option("--seed", da.seed, "");
  sc_dimer->add_option("--record-stride", da.record_stride, "");
  sc_dimer->add_option("--sweep", da.sweep, "sweep variable (sigma)");
  sc_dimer->add_option("--sigma-min", da.sigma_min, "");
  sc_dimer->add_option("--sigma-max", da.sigma_max, "");
  sc_dimer->add_option("--sigma-steps", da.sigma_steps, "");
  sc_dimer->add_option("--jobs", da.jobs, "");
  sc_dimer->add_option("--out", da.out, "");

  WeaknlArgs wa;
  auto* sc_weaknl =
      app.add_subcommand("weaknl", "mode-pair saturation analysis");
  wa.model.add_flags(sc_weaknl);
  sc_weaknl->add_option("--g0", wa.g0, "pump for the cycle table");
  sc_weaknl->add_option("--out", wa.out, "");

  UnitsArgs ua;
  auto* sc_units = app.add_subcommand("units", "physical unit chain");
  sc_units->add_option("--preset", ua.preset, "hene");
  sc_units->add_option("--lambda-nm", ua.lambda_nm, "");
  sc_units->add_option("--f-cm", ua.f_cm, "");
  sc_units->add_option("--wa-um", ua.wa_um, "");
  sc_units->add_option("--cavity-cm", ua.cavity_cm, "");
  sc_units->add_option("--u", ua.u, "");
  sc_units->add_option("--gamma-pt-squire", ua.gamma_pt_squire, "");
  sc_units->add_option("--gamma-pt-dimer", ua.gamma_pt_dimer, "");
  sc_units->add_option("--out", ua.out, "");

  FigureArgs fa;
  auto* sc_figure =
      app.add_subcommand("figure", "reproduce a whole figure dataset");
  sc_figure->add_option("name", fa.which, "fig2a | fig2cde | fig3b | fig3c")
      ->required();
  sc_figure->add_option("--out", fa.out, "");
  sc_figure->add_option("--jobs", fa.jobs, "");
  sc_figure->add_option("--seed", fa.seed, "");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*sc_spectrum) run_spectrum(sa);
    if (*sc_threshold) run_threshold(ta);
    if (*sc_evolve) run_evolve(ea);
    if (*sc_dimer) run_dimer(da);
    if (*sc_weaknl) run_weaknl(wa);
    if (*sc_units) run_units(ua);
    if (*sc_figure) run_figure(fa);
  } catch (const CLI::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
