#pragma once

#include <optional>
#include <span>
#include <vector>

#include "bcg/types.hpp"

namespace bcg {

/// Peak amplitude threshold for one analysis band, in trace units.
struct PeakThreshold {
  enum class Source { kCalibrated, kManual };
  double value = 0.0;
  Source source = Source::kManual;
};

class InsufficientPeaks : public Error {
 public:
  explicit InsufficientPeaks(size_t count);
  size_t count;
};

/// Linear-interpolated percentile of the sorted values (numpy-style).
double percentile(std::vector<double> values, double pct);

/// Detects every strict local maximum of a calibration trace and returns the
/// requested percentile of their amplitudes. Requires at least 20 maxima
/// (throws InsufficientPeaks otherwise).
///
/// The threshold population is whatever the calibration measurement contains:
/// a recording with an empty span yields a noise-floor threshold, an
/// occupied-only recording yields a peak-quantile threshold that by
/// construction rejects ~percentile% of future events.
PeakThreshold calibrate_threshold(std::span<const double> trace, double pct = 5.0);

/// Detected peaks of one magnitude trace, times strictly increasing.
struct PeakTrain {
  std::vector<double> peak_times_s;
  std::vector<double> peak_amplitudes;

  std::vector<double> intervals_s() const;
  size_t n_in_window(double window_s, double now_s) const;
};

/// Strict local maxima with amplitude > threshold; among maxima closer than
/// min_separation_s the larger wins (ties: earlier). An empty train is valid.
PeakTrain detect_peaks(std::span<const double> trace, double sample_rate_hz, double t0_s,
                       const PeakThreshold& threshold, double min_separation_s);

/// Rate over the trailing window (now_s - window_s, now_s]: 60 / mean
/// inter-peak interval, or nullopt with fewer than two peaks in the window.
/// now_s defaults to the last peak time.
std::optional<double> rate_from_peaks(const PeakTrain& train, double window_s = 60.0,
                                      std::optional<double> now_s = std::nullopt);

/// Plausibility gates: estimates outside are reported absent.
inline constexpr double kHeartPlausibleLow = 20.0, kHeartPlausibleHigh = 250.0;
inline constexpr double kRespPlausibleLow = 2.0, kRespPlausibleHigh = 60.0;

struct VitalsEstimate {
  double t_s = 0.0;  // end of the second this estimate is aligned to
  std::optional<double> heart_bpm;
  std::optional<double> resp_bpm;
  bool provisional = false;  // signal shorter than the rate window so far
};

struct VitalsThresholds {
  PeakThreshold heart;
  PeakThreshold resp;
};

/// Streaming per-second heart/respiration estimator over a trailing signal
/// buffer. One instance per sensor stream; not safe for concurrent mutation.
///
/// Each pushed second recomputes the band traces over the buffered window
/// (rate window plus CWT support margins), so estimates depend only on the
/// samples seen so far — feeding the same stream offline or online yields
/// identical estimates.
class VitalsEstimator {
 public:
  VitalsEstimator(const AnalysisConfig& config, const VitalsThresholds& thresholds,
                  double sample_rate_hz = kSampleRateHz);

  /// Consumes exactly one second of samples and returns the estimate aligned
  /// to its end.
  VitalsEstimate push_second(std::span<const double> samples_mg);

  const AnalysisConfig& config() const { return config_; }
  const VitalsThresholds& thresholds() const { return thresholds_; }

  /// Estimates suppressed by the plausibility gates so far.
  size_t gated_count() const { return gated_; }

 private:
  std::optional<double> band_rate(double freq_hz, const PeakThreshold& threshold,
                                  double min_separation_s, double lo, double hi);

  AnalysisConfig config_;
  VitalsThresholds thresholds_;
  double fs_;
  size_t capacity_;
  std::vector<double> buffer_;
  int64_t total_samples_ = 0;
  size_t gated_ = 0;
};

/// Offline convenience: runs the streaming estimator over whole seconds of
/// `signal` (a trailing partial second is ignored).
std::vector<VitalsEstimate> estimate_vitals(const AccelSeries& signal,
                                            const AnalysisConfig& config,
                                            const VitalsThresholds& thresholds);

}  // namespace bcg
