#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bcg/packet.hpp"
#include "bcg/types.hpp"

namespace bcg {

/// Parameters of the synthetic BCG generator. Deterministic per seed.
///
/// Signal model, per occupied interval:
///  - heartbeat pulse train: Gaussian-windowed sinusoid at the heart carrier,
///    one pulse per beat, intervals 60/HR with white multiplicative jitter;
///  - respiration: a slow baseline sinusoid at resp_rate/60 Hz plus one
///    movement transient per breath (Gaussian envelope with a wider pedestal)
///    at the resp carrier, breath intervals wandering slowly by +-jitter;
///  - a tilt step on the ground-parallel (x) axes while occupied;
///  - white Gaussian noise, per-sample sigma = density * sqrt(rate / 2).
struct SynthParams {
  double heart_rate_bpm = 70.0;
  double resp_rate_bpm = 15.0;
  double heart_pulse_carrier_hz = 3.5;
  double heart_pulse_width_s = 0.12;  // Gaussian sigma of the pulse window
  double heart_amp_mg = 2.0;
  double resp_amp_mg = 0.5;
  double resp_pulse_carrier_hz = 0.9;
  double resp_pulse_width_s = 0.6;
  double tilt_step_mg = 50.0;
  double noise_scale = 1.0;  // scales each sensor's datasheet noise density
  double hr_jitter_pct = 3.0;
  uint64_t seed = 0;
  int64_t t0_ms = 0;
  /// Occupied intervals in seconds from t0; empty means the whole duration.
  std::vector<std::pair<double, double>> occupied_s;

  void validate() const;
};

struct GroundTruth {
  std::vector<double> beat_times_s;
  std::vector<double> breath_times_s;
  std::vector<std::pair<double, double>> occupied_s;

  bool occupied_at(double t_s) const;
};

/// All five sensor channels plus the event list that generated them.
struct SynthRecording {
  std::vector<AccelSeries> channels;
  GroundTruth truth;

  const AccelSeries& channel(SensorChannel ch) const;
};

SynthRecording generate_bcg(const SynthParams& params, double duration_s);

struct SynthPacketStream {
  std::vector<SamplePacket> packets;
  GroundTruth truth;
};

/// Slices the generated channels into per-second packets, quantizing mg to
/// raw LSB per sensor and filling the SCA10H frame with the ground-truth
/// rates and occupancy. duration_s must be a whole number of seconds.
SynthPacketStream generate_packets(const SynthParams& params, double duration_s);

}  // namespace bcg
