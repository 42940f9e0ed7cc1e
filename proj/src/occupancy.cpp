#include "bcg/occupancy.hpp"

#include <cmath>
#include <numeric>

namespace bcg {
namespace {

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v, double m) {
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace

InsufficientSeparation::InsufficientSeparation(double gap_mg_, double noise_mg_)
    : Error("occupancy levels are not separable: gap " + std::to_string(gap_mg_) +
            " mg vs noise " + std::to_string(noise_mg_) + " mg"),
      gap_mg(gap_mg_),
      noise_mg(noise_mg_) {}

OccupancyConfig calibrate_occupancy(const AccelSeries& empty_segment,
                                    const AccelSeries& occupied_segment) {
  const double min_samples = 5.0 * empty_segment.sample_rate_hz;
  if (static_cast<double>(empty_segment.size()) < min_samples ||
      static_cast<double>(occupied_segment.size()) < min_samples) {
    throw Error("calibration segments must be at least 5 s each");
  }
  const double baseline = mean(empty_segment.values_mg);
  const double occupied_mean = mean(occupied_segment.values_mg);
  const double gap = std::abs(occupied_mean - baseline);
  const double s_empty = stddev(empty_segment.values_mg, baseline);
  const double s_occ = stddev(occupied_segment.values_mg, occupied_mean);
  const double pooled = std::sqrt(0.5 * (s_empty * s_empty + s_occ * s_occ));
  if (gap <= 0.0 || gap < 3.0 * pooled) throw InsufficientSeparation(gap, pooled);

  OccupancyConfig config;
  config.axis = empty_segment.channel;
  config.baseline_mg = baseline;
  config.threshold_mg = gap / 2.0;
  return config;
}

OccupancyDetector::OccupancyDetector(const OccupancyConfig& config, double sample_rate_hz)
    : config_(config) {
  config_.validate();
  window_samples_ = std::max<size_t>(1, static_cast<size_t>(
      std::llround(config_.smoothing_window_s * sample_rate_hz)));
  debounce_samples_ = static_cast<size_t>(std::llround(config_.debounce_s * sample_rate_hz));
}

OccupancyState OccupancyDetector::update(double sample_mg, int64_t t_ms) {
  if (first_sample_) {
    state_.since_ms = t_ms;
    first_sample_ = false;
  }
  window_.push_back(std::abs(sample_mg - config_.baseline_mg));
  window_sum_ += window_.back();
  if (window_.size() > window_samples_) {
    window_sum_ -= window_.front();
    window_.pop_front();
  }
  state_.raw_level_mg = window_sum_ / static_cast<double>(window_.size());

  const bool above = state_.raw_level_mg > config_.threshold_mg;
  if (above != state_.occupied) {
    ++candidate_run_;
    if (candidate_run_ >= debounce_samples_) {
      state_.occupied = above;
      state_.since_ms = t_ms;
      candidate_run_ = 0;
      ++transitions_;
    }
  } else {
    candidate_run_ = 0;
  }
  return state_;
}

}  // namespace bcg
