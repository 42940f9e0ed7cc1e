#include "bcg/calibration.hpp"

#include <fstream>

#include <json.hpp>

namespace bcg {

using nlohmann::json;

namespace {

json channel_to_json(const SensorChannel& ch) {
  return json{{"sensor", to_string(ch.sensor)}, {"axis", to_string(ch.axis)}};
}

SensorChannel channel_from_json(const json& j) {
  return SensorChannel::parse(j.at("sensor").get<std::string>(),
                              j.at("axis").get<std::string>());
}

}  // namespace

CalibrationStore CalibrationStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open calibration file " + path.string());
  CalibrationStore store;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
      SensorCalibration cal;
      cal.sensor_id = j.at("sensor_id").get<std::string>();
      const json& occ = j.at("occupancy");
      cal.occupancy.axis = channel_from_json(occ);
      cal.occupancy.baseline_mg = occ.at("baseline_mg").get<double>();
      cal.occupancy.threshold_mg = occ.at("threshold_mg").get<double>();
      cal.occupancy.debounce_s = occ.value("debounce_s", 2.0);
      cal.occupancy.smoothing_window_s = occ.value("smoothing_window_s", 1.0);
      const json& thr = j.at("peak_thresholds");
      cal.peak_thresholds.heart =
          PeakThreshold{thr.at("heart").get<double>(), PeakThreshold::Source::kCalibrated};
      cal.peak_thresholds.resp =
          PeakThreshold{thr.at("resp").get<double>(), PeakThreshold::Source::kCalibrated};
      cal.analysis_channel = channel_from_json(j.at("analysis_channel"));
      store.upsert(std::move(cal));
    } catch (const json::exception& e) {
      throw Error("calibration file " + path.string() + " line " + std::to_string(lineno) +
                  ": " + e.what());
    }
  }
  return store;
}

void CalibrationStore::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write calibration file " + path.string());
  for (const auto& [id, cal] : by_id_) {
    json j{
        {"sensor_id", cal.sensor_id},
        {"occupancy",
         {{"sensor", to_string(cal.occupancy.axis.sensor)},
          {"axis", to_string(cal.occupancy.axis.axis)},
          {"baseline_mg", cal.occupancy.baseline_mg},
          {"threshold_mg", cal.occupancy.threshold_mg},
          {"debounce_s", cal.occupancy.debounce_s},
          {"smoothing_window_s", cal.occupancy.smoothing_window_s}}},
        {"peak_thresholds",
         {{"heart", cal.peak_thresholds.heart.value}, {"resp", cal.peak_thresholds.resp.value}}},
        {"analysis_channel", channel_to_json(cal.analysis_channel)},
    };
    out << j.dump() << '\n';
  }
}

void CalibrationStore::upsert(SensorCalibration calibration) {
  by_id_[calibration.sensor_id] = std::move(calibration);
}

std::optional<SensorCalibration> CalibrationStore::find(const std::string& sensor_id) const {
  auto it = by_id_.find(sensor_id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::optional<SensorCalibration> CalibrationStore::sole_entry() const {
  if (by_id_.size() != 1) return std::nullopt;
  return by_id_.begin()->second;
}

}  // namespace bcg
