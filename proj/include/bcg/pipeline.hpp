#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "bcg/calibration.hpp"
#include "bcg/occupancy.hpp"
#include "bcg/packet.hpp"
#include "bcg/vitals.hpp"

namespace bcg {

/// One per-second output row. Estimate fields depend only on the packet
/// stream and configuration, never on wall-clock time.
struct SecondRecord {
  int64_t t_ms = 0;  // start-of-second timestamp from the stream itself
  uint32_t seq = 0;
  bool occupied = false;
  std::optional<double> heart_bpm;
  std::optional<double> resp_bpm;
  bool provisional = false;
  bool uncalibrated = false;
  uint64_t seq_gap = 0;  // cumulative missed packets so far
  std::optional<int> sca10h_heart_bpm;
  std::optional<int> sca10h_resp_bpm;
  std::optional<bool> sca10h_occupied;

  /// Stable JSON form; shared by `analyze` output and server session files.
  std::string to_json() const;
  static std::string csv_header();
  std::string to_csv() const;
};

/// Per-second analysis engine: occupancy state machine plus the streaming
/// vitals estimator, fed one second at a time. The same engine backs offline
/// `analyze` and the ingest server, so both produce identical estimate
/// sequences for the same stream.
///
/// Without a calibration the pipeline runs occupancy from the embedded
/// SCA10H frame only and leaves the vitals estimates absent, flagging
/// records `uncalibrated`.
class SessionPipeline {
 public:
  SessionPipeline(const AnalysisConfig& config, std::optional<SensorCalibration> calibration);

  /// Wire/.bcg path: one packet = one second.
  SecondRecord on_packet(const SamplePacket& packet);

  /// CSV path: one second of the analysis channel and of the occupancy axis.
  SecondRecord on_second(int64_t t_ms, uint32_t seq, std::span<const double> analysis_mg,
                         std::span<const double> occupancy_mg);

  bool calibrated() const { return calibration_.has_value(); }
  const std::optional<SensorCalibration>& calibration() const { return calibration_; }

 private:
  SecondRecord make_record(int64_t t_ms, uint32_t seq, std::span<const double> analysis_mg,
                           std::span<const double> occupancy_mg, const SamplePacket* packet);

  AnalysisConfig config_;
  std::optional<SensorCalibration> calibration_;
  std::optional<OccupancyDetector> occupancy_;
  std::optional<VitalsEstimator> vitals_;
  bool have_last_seq_ = false;
  uint32_t last_seq_ = 0;
  uint64_t seq_gap_total_ = 0;
};

}  // namespace bcg
