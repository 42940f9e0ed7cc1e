#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bcg {

/// Base class for all typed toolkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

enum class SensorKind { kLis3dhh, kSca61t };
enum class Axis { kX, kY, kZ };

std::string to_string(SensorKind kind);
std::string to_string(Axis axis);
SensorKind sensor_from_string(const std::string& s);
Axis axis_from_string(const std::string& s);

/// One physical measurement channel. The SCA61T inclinometer exposes only
/// its X and Y channels; (SCA61T, Z) is rejected at construction.
struct SensorChannel {
  SensorKind sensor = SensorKind::kLis3dhh;
  Axis axis = Axis::kX;

  static SensorChannel make(SensorKind sensor, Axis axis);
  static SensorChannel parse(const std::string& sensor, const std::string& axis);

  std::string str() const;  // "lis3dhh.x"
  bool operator==(const SensorChannel&) const = default;
};

/// Datasheet parameters of one accelerometer.
struct SensorSpec {
  double range_g;
  double sensitivity_mg_per_lsb;
  double noise_density_ug_per_rthz;
  int bits;
};

inline constexpr SensorSpec kLis3dhhSpec{2.5, 0.076, 45.0, 16};
inline constexpr SensorSpec kSca61tSpec{1.0, 1.22, 14.0, 11};

const SensorSpec& spec_for(SensorKind kind);

/// Thrown when a raw sample does not fit the sensor's two's-complement width.
class RawOutOfRange : public Error {
 public:
  RawOutOfRange(int32_t raw, int bits);
  int32_t raw;
  int bits;
};

/// raw LSB -> milli-g. Validates that `raw` fits in spec.bits.
double raw_to_mg(int32_t raw, const SensorSpec& spec);

/// milli-g -> raw LSB, rounded to nearest and saturated at the
/// representable two's-complement range.
int32_t mg_to_raw(double mg, const SensorSpec& spec);

inline constexpr double kSampleRateHz = 100.0;

/// A gap-free, uniformly sampled acceleration channel in milli-g.
/// Sample i is at t0_ms + i * 1000 / sample_rate_hz.
struct AccelSeries {
  SensorChannel channel;
  double sample_rate_hz = kSampleRateHz;
  int64_t t0_ms = 0;
  std::vector<double> values_mg;

  size_t size() const { return values_mg.size(); }
  double dt_s() const { return 1.0 / sample_rate_hz; }
  double time_s(size_t i) const {
    return static_cast<double>(t0_ms) / 1000.0 + static_cast<double>(i) * dt_s();
  }

  /// Appends `next`, which must be the adjacent block of the same channel
  /// (next.t0_ms == end of this series, same rate).
  void append(const AccelSeries& next);
};

/// Analysis parameters shared by the CWT/vitals/occupancy pipelines.
/// Defaults follow the values used throughout this repo; the respiration
/// analysis frequency (0.8 Hz) is carried verbatim even though it lies
/// outside the classical 0-0.5 Hz respiration band.
struct AnalysisConfig {
  double heart_freq_hz = 3.5;
  double resp_freq_hz = 0.8;
  double heart_band_low_hz = 1.0;
  double heart_band_high_hz = 25.0;
  double resp_band_low_hz = 0.0;
  double resp_band_high_hz = 0.5;
  double peak_percentile = 5.0;
  double rate_window_s = 60.0;
  double occupancy_debounce_s = 2.0;
  double morlet_omega0 = 6.0;
  double heart_min_separation_s = 0.25;
  double resp_min_separation_s = 1.5;
  bool rolling_recalibration = false;

  void validate() const;
};

}  // namespace bcg
