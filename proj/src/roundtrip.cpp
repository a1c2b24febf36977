#include "ptlaser/roundtrip.hpp"

#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>

namespace ptlaser {

namespace {
constexpr double kSpeedOfLight = 299792458.0;  // m/s

VectorXd fft_wavenumbers(int N, double h) {
  VectorXd k(N);
  double dk = 2.0 * M_PI / (N * h);
  for (int m = 0; m < N; ++m) {
    int sm = (m <= N / 2) ? m : m - N;
    k[m] = dk * sm;
  }
  return k;
}

VectorXcd filter_padded(const VectorXcd& padded, double h, double D) {
  const int N = static_cast<int>(padded.size());
  VectorXd k = fft_wavenumbers(N, h);
  Eigen::FFT<double> fft;
  std::vector<Complex> in(padded.data(), padded.data() + N), freq(N);
  fft.fwd(freq, in);
  for (int m = 0; m < N; ++m) freq[m] *= std::exp(-D * k[m] * k[m]);
  std::vector<Complex> out(N);
  fft.inv(out, freq);
  return Eigen::Map<VectorXcd>(out.data(), N);
}

}  // namespace

DerivedScales derived_scales(const PhysicalConfig& cfg) {
  cfg.validate();
  DerivedScales d;
  double ratio = cfg.lambda * cfg.f / (2.0 * M_PI * cfg.w_a);
  d.D = 2.0 * ratio * ratio;
  d.L = std::sqrt(d.D);
  d.T_R = 2.0 * cfg.cavity_length / kSpeedOfLight;
  d.theta = cfg.lambda / (M_PI * cfg.w_a * cfg.w_a);
  return d;
}

double tilt_to_gamma(double alpha, const PhysicalConfig& cfg) {
  return (2.0 * M_PI / cfg.lambda) * alpha * derived_scales(cfg).L;
}

double gamma_to_tilt(double gamma, const PhysicalConfig& cfg) {
  return gamma * cfg.lambda / (2.0 * M_PI * derived_scales(cfg).L);
}

VectorXcd huygens_filter(const VectorXcd& psi, double h, double D,
                         double pad_frac, double* pad_energy) {
  if (!(h > 0.0)) throw std::invalid_argument("huygens_filter: need h > 0");
  if (D < 0.0) throw std::invalid_argument("huygens_filter: need D >= 0");
  const int n = static_cast<int>(psi.size());
  const int pad = static_cast<int>(std::ceil(pad_frac * n));
  const int N = n + 2 * pad;
  VectorXcd padded = VectorXcd::Zero(N);
  padded.segment(pad, n) = psi;
  VectorXcd out = filter_padded(padded, h, D);
  if (pad_energy) {
    double total = out.squaredNorm();
    double inner = out.segment(pad, n).squaredNorm();
    *pad_energy = total > 0.0 ? (total - inner) / total : 0.0;
  }
  return out.segment(pad, n);
}

void RoundTripOperator::validate() const {
  if (r_profile.size() != grid.n)
    throw std::invalid_argument("RoundTripOperator: mirror not aligned with grid");
  if (D_norm < 0.0)
    throw std::invalid_argument("RoundTripOperator: need D_norm >= 0");
  for (Eigen::Index i = 0; i < r_profile.size(); ++i)
    if (std::abs(r_profile[i]) > 1.0 + 1e-12)
      throw std::invalid_argument(
          "RoundTripOperator: passive mirror needs |r| <= 1 (gain lives in g)");
}

VectorXcd round_trip(const VectorXcd& psi, const RoundTripOperator& op,
                     double pad_frac, double* pad_energy) {
  op.validate();
  if (psi.size() != op.grid.n)
    throw std::invalid_argument("round_trip: field not aligned with grid");
  VectorXcd filtered = huygens_filter(psi, op.grid.h, op.D_norm, pad_frac, pad_energy);
  double gain = std::exp(op.g);
  return gain * op.r_profile.cwiseProduct(filtered);
}

BchReport bch_consistency(const VectorXcd& psi, const RoundTripOperator& op,
                          const std::vector<double>& scales) {
  op.validate();
  if (psi.size() != op.grid.n)
    throw std::invalid_argument("bch_consistency: field not aligned with grid");
  const int n = op.grid.n;
  const int pad = static_cast<int>(std::ceil(0.25 * n));
  const int N = n + 2 * pad;
  const double h = op.grid.h;

  // Mirror extended by its edge values so a uniform r stays uniform on the
  // whole transform domain (the commuting case must vanish to round-off).
  VectorXcd lnr(N);
  for (int j = 0; j < n; ++j) {
    Complex r = op.r_profile[j];
    if (std::abs(r) < 1e-12)
      throw std::invalid_argument(
          "bch_consistency: mirror must be bounded away from zero (ln r)");
    lnr[pad + j] = std::log(r);
  }
  for (int j = 0; j < pad; ++j) {
    lnr[j] = lnr[pad];
    lnr[N - 1 - j] = lnr[pad + n - 1];
  }

  VectorXcd padded = VectorXcd::Zero(N);
  padded.segment(pad, n) = psi;
  double psi_norm = padded.norm();
  if (psi_norm == 0.0) throw std::invalid_argument("bch_consistency: zero field");

  // Dense spectral Laplacian, consistent with the filter by construction:
  // a circulant whose first column is the inverse transform of -k^2.
  VectorXd k = fft_wavenumbers(N, h);
  Eigen::FFT<double> fft;
  std::vector<Complex> mk2(N), col0(N);
  for (int m = 0; m < N; ++m) mk2[m] = -k[m] * k[m];
  fft.inv(col0, mk2);
  MatrixXcd lap(N, N);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) lap(i, j) = col0[((i - j) % N + N) % N];

  BchReport rep;
  rep.scales = scales;
  for (double s : scales) {
    // Exact map at scale s: multiplicative part exp(s(g + ln r)), filter at s D.
    VectorXcd mapped = filter_padded(padded, h, s * op.D_norm);
    for (int j = 0; j < N; ++j)
      mapped[j] *= std::exp(s * (op.g + lnr[j]));

    MatrixXcd gen = s * op.D_norm * lap;
    for (int j = 0; j < N; ++j) gen(j, j) += s * (op.g + lnr[j]);
    VectorXcd via_generator = gen.exp() * padded;

    rep.eps.push_back((mapped - via_generator).norm() / psi_norm);
  }
  for (size_t i = 0; i + 1 < rep.eps.size(); ++i)
    rep.ratios.push_back(rep.eps[i] / rep.eps[i + 1]);
  return rep;
}

}  // namespace ptlaser
