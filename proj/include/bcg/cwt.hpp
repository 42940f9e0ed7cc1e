#pragma once

#include <complex>
#include <filesystem>
#include <vector>

#include "bcg/types.hpp"

namespace bcg {

/// Complex Morlet wavelet parameters. omega0 >= 5 so the zero-mean
/// admissibility correction term (~e^{-omega0^2/2}) is negligible.
struct MorletParams {
  double omega0 = 6.0;

  void validate() const {
    if (omega0 < 5.0) throw Error("morlet omega0 must be >= 5");
  }
};

/// psi_s(t) = pi^{-1/4} s^{-1/2} exp(i omega0 t / s) exp(-(t/s)^2 / 2).
/// L2-normalized: integral |psi_s|^2 dt == 1 for every scale.
std::complex<double> morlet(double t, double scale, const MorletParams& params = {});

/// Center-frequency relation: scale = omega0 / (2 pi f).
double freq_to_scale(double f_hz, const MorletParams& params = {});
double scale_to_freq(double scale, const MorletParams& params = {});

/// |CWT| of the signal at one analysis frequency, one value per input sample.
/// The wavelet support is truncated at |t| <= 4 s(f); boundaries are handled
/// by mirror padding (edge sample not repeated) of half the support on each
/// side, so tests should mask roughly 4 s(f) seconds at each end.
std::vector<double> cwt_row(const AccelSeries& signal, double f_hz,
                            const MorletParams& params = {});

/// |CWT| magnitude grid over (frequency, time).
struct Scalogram {
  std::vector<double> freqs_hz;
  std::vector<double> times_s;
  std::vector<std::vector<double>> magnitude;  // [freq][time]
};

/// Row k is cwt_row(signal, freqs_hz[k]); freqs must be strictly increasing
/// and below the Nyquist frequency.
Scalogram scalogram(const AccelSeries& signal, const std::vector<double>& freqs_hz,
                    const MorletParams& params = {});

/// CSV export: header row carries the sample times, first column the
/// analysis frequencies.
void write_scalogram_csv(const Scalogram& s, std::ostream& out);
void write_scalogram_csv(const Scalogram& s, const std::filesystem::path& path);

}  // namespace bcg
