#include "bcg/types.hpp"

#include <cmath>
#include <cstdlib>

namespace bcg {

std::string to_string(SensorKind kind) {
  return kind == SensorKind::kLis3dhh ? "lis3dhh" : "sca61t";
}

std::string to_string(Axis axis) {
  switch (axis) {
    case Axis::kX: return "x";
    case Axis::kY: return "y";
    default: return "z";
  }
}

SensorKind sensor_from_string(const std::string& s) {
  if (s == "lis3dhh") return SensorKind::kLis3dhh;
  if (s == "sca61t") return SensorKind::kSca61t;
  throw Error("unknown sensor: " + s);
}

Axis axis_from_string(const std::string& s) {
  if (s == "x") return Axis::kX;
  if (s == "y") return Axis::kY;
  if (s == "z") return Axis::kZ;
  throw Error("unknown axis: " + s);
}

SensorChannel SensorChannel::make(SensorKind sensor, Axis axis) {
  if (sensor == SensorKind::kSca61t && axis == Axis::kZ) {
    throw Error("SCA61T has no Z axis");
  }
  return SensorChannel{sensor, axis};
}

SensorChannel SensorChannel::parse(const std::string& sensor, const std::string& axis) {
  return make(sensor_from_string(sensor), axis_from_string(axis));
}

std::string SensorChannel::str() const {
  return to_string(sensor) + "." + to_string(axis);
}

const SensorSpec& spec_for(SensorKind kind) {
  static constexpr SensorSpec lis = kLis3dhhSpec;
  static constexpr SensorSpec sca = kSca61tSpec;
  return kind == SensorKind::kLis3dhh ? lis : sca;
}

RawOutOfRange::RawOutOfRange(int32_t raw_, int bits_)
    : Error("raw value " + std::to_string(raw_) + " does not fit in " +
            std::to_string(bits_) + " bits"),
      raw(raw_),
      bits(bits_) {}

static int32_t raw_min(int bits) { return -(int32_t{1} << (bits - 1)); }
static int32_t raw_max(int bits) { return (int32_t{1} << (bits - 1)) - 1; }

double raw_to_mg(int32_t raw, const SensorSpec& spec) {
  if (raw < raw_min(spec.bits) || raw > raw_max(spec.bits)) {
    throw RawOutOfRange(raw, spec.bits);
  }
  return static_cast<double>(raw) * spec.sensitivity_mg_per_lsb;
}

int32_t mg_to_raw(double mg, const SensorSpec& spec) {
  double lsb = std::round(mg / spec.sensitivity_mg_per_lsb);
  double lo = raw_min(spec.bits);
  double hi = raw_max(spec.bits);
  if (lsb < lo) lsb = lo;
  if (lsb > hi) lsb = hi;
  return static_cast<int32_t>(lsb);
}

void AccelSeries::append(const AccelSeries& next) {
  if (!(next.channel == channel) || next.sample_rate_hz != sample_rate_hz) {
    throw Error("append: channel/rate mismatch");
  }
  int64_t end_ms = t0_ms + std::llround(static_cast<double>(size()) * 1000.0 / sample_rate_hz);
  if (next.t0_ms != end_ms) {
    throw Error("append: blocks are not adjacent (" + std::to_string(next.t0_ms) +
                " != " + std::to_string(end_ms) + ")");
  }
  values_mg.insert(values_mg.end(), next.values_mg.begin(), next.values_mg.end());
}

void AnalysisConfig::validate() const {
  if (!(heart_freq_hz >= heart_band_low_hz && heart_freq_hz <= heart_band_high_hz)) {
    throw Error("heart_freq_hz outside heart band");
  }
  if (!(peak_percentile > 0.0 && peak_percentile < 100.0)) {
    throw Error("peak_percentile must be in (0, 100)");
  }
  if (resp_freq_hz <= 0.0) throw Error("resp_freq_hz must be positive");
  if (rate_window_s <= 0.0) throw Error("rate_window_s must be positive");
  if (morlet_omega0 < 5.0) throw Error("morlet_omega0 must be >= 5");
}

}  // namespace bcg
