#include "bcg/cwt.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>

#include "fft.hpp"

namespace bcg {
namespace {

constexpr double kQuarterRootPi = 0.75112554446494248;  // pi^{-1/4}
constexpr double kSupportScales = 4.0;                   // truncate at |t/s| <= 4

/// Sampled kernel h[k] = conj(psi(k dt)) dt for k in [-L, L], so that
/// trace[m] = |sum_k x[m + k] h[k]| approximates |<x, psi_{s, tau_m}>|.
std::vector<std::complex<double>> sampled_kernel(double scale, double dt,
                                                 const MorletParams& params, size_t* half_width) {
  const size_t L = static_cast<size_t>(std::ceil(kSupportScales * scale / dt));
  std::vector<std::complex<double>> h(2 * L + 1);
  for (size_t j = 0; j < h.size(); ++j) {
    double t = (static_cast<double>(j) - static_cast<double>(L)) * dt;
    h[j] = std::conj(morlet(t, scale, params)) * dt;
  }
  *half_width = L;
  return h;
}

/// Mirror padding without repeating the edge sample; indices bounce with
/// period 2n-2 so arbitrarily short signals stay well-defined.
std::vector<double> mirror_pad(const std::vector<double>& x, size_t pad) {
  const long n = static_cast<long>(x.size());
  auto mirrored = [&](long i) -> double {
    if (n == 1) return x[0];
    const long period = 2 * (n - 1);
    long m = i % period;
    if (m < 0) m += period;
    if (m >= n) m = period - m;
    return x[static_cast<size_t>(m)];
  };
  std::vector<double> out;
  out.reserve(x.size() + 2 * pad);
  for (long i = -static_cast<long>(pad); i < n + static_cast<long>(pad); ++i) {
    out.push_back(mirrored(i));
  }
  return out;
}

}  // namespace

std::complex<double> morlet(double t, double scale, const MorletParams& params) {
  params.validate();
  if (scale <= 0.0) throw Error("morlet scale must be positive");
  const double u = t / scale;
  const double envelope = kQuarterRootPi / std::sqrt(scale) * std::exp(-0.5 * u * u);
  return std::polar(envelope, params.omega0 * u);
}

double freq_to_scale(double f_hz, const MorletParams& params) {
  params.validate();
  if (f_hz <= 0.0) throw Error("frequency must be positive");
  return params.omega0 / (2.0 * std::numbers::pi * f_hz);
}

double scale_to_freq(double scale, const MorletParams& params) {
  params.validate();
  if (scale <= 0.0) throw Error("scale must be positive");
  return params.omega0 / (2.0 * std::numbers::pi * scale);
}

std::vector<double> cwt_row(const AccelSeries& signal, double f_hz, const MorletParams& params) {
  if (signal.values_mg.empty()) throw Error("cwt_row: empty signal");
  const double nyquist = signal.sample_rate_hz / 2.0;
  if (f_hz >= nyquist) {
    throw Error("cwt_row: frequency " + std::to_string(f_hz) + " Hz at or above Nyquist");
  }
  const double dt = signal.dt_s();
  const double scale = freq_to_scale(f_hz, params);
  size_t half_width = 0;
  const auto kernel = sampled_kernel(scale, dt, params, &half_width);
  const auto padded = mirror_pad(signal.values_mg, half_width);

  const auto coeffs = detail::correlate_valid(padded, kernel);
  std::vector<double> trace(coeffs.size());
  for (size_t i = 0; i < coeffs.size(); ++i) trace[i] = std::abs(coeffs[i]);
  return trace;
}

Scalogram scalogram(const AccelSeries& signal, const std::vector<double>& freqs_hz,
                    const MorletParams& params) {
  if (freqs_hz.empty()) throw Error("scalogram: no frequencies");
  for (size_t i = 1; i < freqs_hz.size(); ++i) {
    if (freqs_hz[i] <= freqs_hz[i - 1]) throw Error("scalogram: freqs must be strictly increasing");
  }
  Scalogram s;
  s.freqs_hz = freqs_hz;
  s.times_s.resize(signal.size());
  for (size_t i = 0; i < signal.size(); ++i) s.times_s[i] = signal.time_s(i);
  s.magnitude.reserve(freqs_hz.size());
  for (double f : freqs_hz) s.magnitude.push_back(cwt_row(signal, f, params));
  return s;
}

void write_scalogram_csv(const Scalogram& s, std::ostream& out) {
  out << "freq_hz";
  for (double t : s.times_s) out << ',' << t;
  out << '\n';
  for (size_t k = 0; k < s.freqs_hz.size(); ++k) {
    out << s.freqs_hz[k];
    for (double v : s.magnitude[k]) out << ',' << v;
    out << '\n';
  }
}

void write_scalogram_csv(const Scalogram& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string());
  write_scalogram_csv(s, out);
}

}  // namespace bcg
