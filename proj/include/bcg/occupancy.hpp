#pragma once

#include <cstdint>
#include <deque>

#include "bcg/types.hpp"

namespace bcg {

/// Calibrated occupancy detection parameters for one ground-parallel axis.
struct OccupancyConfig {
  SensorChannel axis;
  double baseline_mg = 0.0;
  double threshold_mg = 25.0;
  double debounce_s = 2.0;
  double smoothing_window_s = 1.0;

  void validate() const {
    if (threshold_mg <= 0.0) throw Error("occupancy threshold must be positive");
    if (debounce_s < 0.0) throw Error("debounce must be >= 0");
    if (smoothing_window_s <= 0.0) throw Error("smoothing window must be positive");
  }
};

struct OccupancyState {
  bool occupied = false;
  int64_t since_ms = 0;
  double raw_level_mg = 0.0;  // smoothed |a - baseline|
};

class InsufficientSeparation : public Error {
 public:
  InsufficientSeparation(double gap_mg, double noise_mg);
  double gap_mg;
  double noise_mg;
};

/// Two-segment calibration: baseline is the empty-segment mean, the threshold
/// is half the absolute gap between the segment means (detection runs on
/// |a - baseline|, so tilt polarity does not matter). Fails when the gap is
/// under 3x the pooled standard deviation. Segments must be >= 5 s each.
OccupancyConfig calibrate_occupancy(const AccelSeries& empty_segment,
                                    const AccelSeries& occupied_segment);

/// Debounced threshold state machine over smoothed |a - baseline|.
/// Per-stream state; one instance per stream, no concurrent mutation.
class OccupancyDetector {
 public:
  explicit OccupancyDetector(const OccupancyConfig& config, double sample_rate_hz = kSampleRateHz);

  /// Feeds one sample (timestamps non-decreasing) and returns the new state.
  /// The state flips only after the smoothed level has stayed on the other
  /// side of the threshold for at least debounce_s.
  OccupancyState update(double sample_mg, int64_t t_ms);

  const OccupancyState& state() const { return state_; }
  size_t transition_count() const { return transitions_; }

 private:
  OccupancyConfig config_;
  size_t window_samples_;
  size_t debounce_samples_;
  std::deque<double> window_;
  double window_sum_ = 0.0;
  size_t candidate_run_ = 0;
  OccupancyState state_;
  size_t transitions_ = 0;
  bool first_sample_ = true;
};

}  // namespace bcg
