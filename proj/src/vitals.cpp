#include "bcg/vitals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bcg/cwt.hpp"

namespace bcg {
namespace {

std::vector<size_t> strict_maxima(std::span<const double> trace) {
  std::vector<size_t> idx;
  for (size_t i = 1; i + 1 < trace.size(); ++i) {
    if (trace[i] > trace[i - 1] && trace[i] > trace[i + 1]) idx.push_back(i);
  }
  return idx;
}

}  // namespace

InsufficientPeaks::InsufficientPeaks(size_t count_)
    : Error("calibration trace has only " + std::to_string(count_) +
            " local maxima (need 20)"),
      count(count_) {}

double percentile(std::vector<double> values, double pct) {
  if (values.empty()) throw Error("percentile of empty set");
  std::sort(values.begin(), values.end());
  const double pos = pct / 100.0 * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  if (lo + 1 >= values.size()) return values.back();
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

PeakThreshold calibrate_threshold(std::span<const double> trace, double pct) {
  if (!(pct > 0.0 && pct < 100.0)) throw Error("percentile must be in (0, 100)");
  const auto maxima = strict_maxima(trace);
  if (maxima.size() < 20) throw InsufficientPeaks(maxima.size());
  std::vector<double> amps;
  amps.reserve(maxima.size());
  for (size_t i : maxima) amps.push_back(trace[i]);
  return PeakThreshold{percentile(std::move(amps), pct), PeakThreshold::Source::kCalibrated};
}

std::vector<double> PeakTrain::intervals_s() const {
  std::vector<double> out;
  if (peak_times_s.size() < 2) return out;
  out.reserve(peak_times_s.size() - 1);
  for (size_t i = 1; i < peak_times_s.size(); ++i) {
    out.push_back(peak_times_s[i] - peak_times_s[i - 1]);
  }
  return out;
}

size_t PeakTrain::n_in_window(double window_s, double now_s) const {
  size_t n = 0;
  for (double t : peak_times_s) {
    if (t > now_s - window_s && t <= now_s) ++n;
  }
  return n;
}

PeakTrain detect_peaks(std::span<const double> trace, double sample_rate_hz, double t0_s,
                       const PeakThreshold& threshold, double min_separation_s) {
  if (min_separation_s <= 0.0) throw Error("min_separation_s must be positive");
  std::vector<size_t> idx = strict_maxima(trace);
  std::erase_if(idx, [&](size_t i) { return !(trace[i] > threshold.value); });

  // Largest first (ties earlier); keep a candidate only if no kept peak is
  // within the refractory distance.
  std::vector<size_t> order(idx.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (trace[idx[a]] != trace[idx[b]]) return trace[idx[a]] > trace[idx[b]];
    return idx[a] < idx[b];
  });
  const double min_sep_samples = min_separation_s * sample_rate_hz;
  std::vector<size_t> kept;
  for (size_t oi : order) {
    const size_t i = idx[oi];
    bool blocked = false;
    for (size_t j : kept) {
      const double d = i > j ? static_cast<double>(i - j) : static_cast<double>(j - i);
      if (d < min_sep_samples) {
        blocked = true;
        break;
      }
    }
    if (!blocked) kept.push_back(i);
  }
  std::sort(kept.begin(), kept.end());

  PeakTrain train;
  train.peak_times_s.reserve(kept.size());
  train.peak_amplitudes.reserve(kept.size());
  for (size_t i : kept) {
    train.peak_times_s.push_back(t0_s + static_cast<double>(i) / sample_rate_hz);
    train.peak_amplitudes.push_back(trace[i]);
  }
  return train;
}

std::optional<double> rate_from_peaks(const PeakTrain& train, double window_s,
                                      std::optional<double> now_s) {
  if (train.peak_times_s.empty()) return std::nullopt;
  const double now = now_s.value_or(train.peak_times_s.back());
  std::vector<double> in_window;
  for (double t : train.peak_times_s) {
    if (t > now - window_s && t <= now) in_window.push_back(t);
  }
  if (in_window.size() < 2) return std::nullopt;
  double sum = 0.0;
  for (size_t i = 1; i < in_window.size(); ++i) sum += in_window[i] - in_window[i - 1];
  const double mean = sum / static_cast<double>(in_window.size() - 1);
  return 60.0 / mean;
}

VitalsEstimator::VitalsEstimator(const AnalysisConfig& config, const VitalsThresholds& thresholds,
                                 double sample_rate_hz)
    : config_(config), thresholds_(thresholds), fs_(sample_rate_hz) {
  config_.validate();
  MorletParams morlet{config_.morlet_omega0};
  // Rate window plus CWT support margins of the slowest band, plus one
  // second of slack. The left margin keeps window-interior peaks clear of
  // the buffer's own boundary region.
  const double support_s = 4.0 * freq_to_scale(config_.resp_freq_hz, morlet);
  capacity_ = static_cast<size_t>(std::ceil((config_.rate_window_s + 2.0 * support_s + 1.0) * fs_));
  buffer_.reserve(capacity_ + static_cast<size_t>(fs_));
}

std::optional<double> VitalsEstimator::band_rate(double freq_hz, const PeakThreshold& threshold,
                                                 double min_separation_s, double lo, double hi) {
  AccelSeries window;
  window.sample_rate_hz = fs_;
  window.values_mg = buffer_;
  const auto trace = cwt_row(window, freq_hz, MorletParams{config_.morlet_omega0});

  PeakThreshold effective = threshold;
  if (config_.rolling_recalibration) {
    try {
      effective = calibrate_threshold(trace, config_.peak_percentile);
    } catch (const InsufficientPeaks&) {
      // keep the configured threshold until the buffer warms up
    }
  }

  const double t0 = static_cast<double>(total_samples_ - static_cast<int64_t>(buffer_.size())) / fs_;
  const PeakTrain train = detect_peaks(trace, fs_, t0, effective, min_separation_s);
  const double now = static_cast<double>(total_samples_) / fs_;
  auto rate = rate_from_peaks(train, config_.rate_window_s, now);
  if (rate && !(*rate >= lo && *rate <= hi)) {
    ++gated_;
    return std::nullopt;
  }
  return rate;
}

VitalsEstimate VitalsEstimator::push_second(std::span<const double> samples_mg) {
  if (samples_mg.size() != static_cast<size_t>(fs_)) {
    throw Error("push_second expects exactly " + std::to_string(static_cast<size_t>(fs_)) +
                " samples");
  }
  buffer_.insert(buffer_.end(), samples_mg.begin(), samples_mg.end());
  total_samples_ += static_cast<int64_t>(samples_mg.size());
  if (buffer_.size() > capacity_) {
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<long>(buffer_.size() - capacity_));
  }

  VitalsEstimate estimate;
  estimate.t_s = static_cast<double>(total_samples_) / fs_;
  estimate.provisional = static_cast<double>(total_samples_) < config_.rate_window_s * fs_;
  estimate.heart_bpm = band_rate(config_.heart_freq_hz, thresholds_.heart,
                                 config_.heart_min_separation_s, kHeartPlausibleLow,
                                 kHeartPlausibleHigh);
  estimate.resp_bpm = band_rate(config_.resp_freq_hz, thresholds_.resp,
                                config_.resp_min_separation_s, kRespPlausibleLow,
                                kRespPlausibleHigh);
  return estimate;
}

std::vector<VitalsEstimate> estimate_vitals(const AccelSeries& signal,
                                            const AnalysisConfig& config,
                                            const VitalsThresholds& thresholds) {
  VitalsEstimator estimator(config, thresholds, signal.sample_rate_hz);
  const size_t per_second = static_cast<size_t>(signal.sample_rate_hz);
  std::vector<VitalsEstimate> out;
  const double t0_s = static_cast<double>(signal.t0_ms) / 1000.0;
  for (size_t start = 0; start + per_second <= signal.size(); start += per_second) {
    VitalsEstimate est =
        estimator.push_second(std::span(signal.values_mg).subspan(start, per_second));
    est.t_s += t0_s;
    out.push_back(est);
  }
  return out;
}

}  // namespace bcg
