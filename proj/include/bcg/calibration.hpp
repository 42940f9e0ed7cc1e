#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "bcg/occupancy.hpp"
#include "bcg/types.hpp"
#include "bcg/vitals.hpp"

namespace bcg {

/// Per-sensor calibration produced by `bcgkit calibrate`: the occupancy
/// axis/threshold, the per-band peak thresholds, and the channel the vitals
/// pipeline analyzes.
struct SensorCalibration {
  std::string sensor_id;
  OccupancyConfig occupancy;
  VitalsThresholds peak_thresholds;
  SensorChannel analysis_channel;
};

/// Calibration file: JSON Lines, one object per sensor.
class CalibrationStore {
 public:
  static CalibrationStore load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  void upsert(SensorCalibration calibration);
  std::optional<SensorCalibration> find(const std::string& sensor_id) const;
  size_t size() const { return by_id_.size(); }

  /// The only entry, if there is exactly one (analyze's default).
  std::optional<SensorCalibration> sole_entry() const;

 private:
  std::map<std::string, SensorCalibration> by_id_;
};

}  // namespace bcg
