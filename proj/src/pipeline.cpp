#include "bcg/pipeline.hpp"

#include <json.hpp>

namespace bcg {

using nlohmann::json;

std::string SecondRecord::to_json() const {
  json j;
  j["t_ms"] = t_ms;
  j["seq"] = seq;
  j["occupied"] = occupied;
  j["heart_bpm"] = heart_bpm ? json(*heart_bpm) : json(nullptr);
  j["resp_bpm"] = resp_bpm ? json(*resp_bpm) : json(nullptr);
  j["provisional"] = provisional;
  if (uncalibrated) j["uncalibrated"] = true;
  if (seq_gap > 0) j["seq_gap"] = seq_gap;
  if (sca10h_heart_bpm) j["sca10h_heart_bpm"] = *sca10h_heart_bpm;
  if (sca10h_resp_bpm) j["sca10h_resp_bpm"] = *sca10h_resp_bpm;
  if (sca10h_occupied) j["sca10h_occupied"] = *sca10h_occupied;
  return j.dump();
}

std::string SecondRecord::csv_header() {
  return "t_ms,seq,occupied,heart_bpm,resp_bpm,provisional,sca10h_heart_bpm,"
         "sca10h_resp_bpm,sca10h_occupied";
}

std::string SecondRecord::to_csv() const {
  auto opt_num = [](const std::optional<double>& v) {
    return v ? json(*v).dump() : std::string();
  };
  std::string row = std::to_string(t_ms) + ',' + std::to_string(seq) + ',' +
                    (occupied ? "1" : "0") + ',' + opt_num(heart_bpm) + ',' +
                    opt_num(resp_bpm) + ',' + (provisional ? "1" : "0") + ',';
  row += sca10h_heart_bpm ? std::to_string(*sca10h_heart_bpm) : std::string();
  row += ',';
  row += sca10h_resp_bpm ? std::to_string(*sca10h_resp_bpm) : std::string();
  row += ',';
  row += sca10h_occupied ? (*sca10h_occupied ? "1" : "0") : std::string();
  return row;
}

SessionPipeline::SessionPipeline(const AnalysisConfig& config,
                                 std::optional<SensorCalibration> calibration)
    : config_(config), calibration_(std::move(calibration)) {
  if (calibration_) {
    occupancy_.emplace(calibration_->occupancy);
    vitals_.emplace(config_, calibration_->peak_thresholds);
  }
}

SecondRecord SessionPipeline::make_record(int64_t t_ms, uint32_t seq,
                                          std::span<const double> analysis_mg,
                                          std::span<const double> occupancy_mg,
                                          const SamplePacket* packet) {
  SecondRecord record;
  record.t_ms = t_ms;
  record.seq = seq;
  record.uncalibrated = !calibration_.has_value();

  if (have_last_seq_ && seq > last_seq_ + 1) {
    seq_gap_total_ += seq - last_seq_ - 1;
  }
  have_last_seq_ = true;
  last_seq_ = seq;
  record.seq_gap = seq_gap_total_;

  if (packet != nullptr) {
    record.sca10h_heart_bpm = packet->sca10h.heart_rate_bpm;
    record.sca10h_resp_bpm = packet->sca10h.respiration_rate_bpm;
    record.sca10h_occupied = packet->sca10h.occupancy == 1;
  }

  if (calibration_) {
    const int64_t step_ms = static_cast<int64_t>(std::llround(1000.0 / kSampleRateHz));
    OccupancyState state = occupancy_->state();
    for (size_t i = 0; i < occupancy_mg.size(); ++i) {
      state = occupancy_->update(occupancy_mg[i], t_ms + static_cast<int64_t>(i) * step_ms);
    }
    record.occupied = state.occupied;
    const VitalsEstimate estimate = vitals_->push_second(analysis_mg);
    record.heart_bpm = estimate.heart_bpm;
    record.resp_bpm = estimate.resp_bpm;
    record.provisional = estimate.provisional;
  } else if (packet != nullptr) {
    record.occupied = packet->sca10h.occupancy == 1;
  }
  return record;
}

SecondRecord SessionPipeline::on_packet(const SamplePacket& packet) {
  std::vector<double> analysis_mg(kSamplesPerPacket, 0.0), occupancy_mg(kSamplesPerPacket, 0.0);
  if (calibration_) {
    const SensorChannel ach = calibration_->analysis_channel;
    const SensorChannel och = calibration_->occupancy.axis;
    const SamplePacket* packets = &packet;
    AccelSeries a = series_from_packets(std::span(packets, 1), ach);
    AccelSeries o = series_from_packets(std::span(packets, 1), och);
    analysis_mg = std::move(a.values_mg);
    occupancy_mg = std::move(o.values_mg);
  }
  return make_record(static_cast<int64_t>(packet.sca10h.timestamp_ms), packet.sca10h.seq,
                     analysis_mg, occupancy_mg, &packet);
}

SecondRecord SessionPipeline::on_second(int64_t t_ms, uint32_t seq,
                                        std::span<const double> analysis_mg,
                                        std::span<const double> occupancy_mg) {
  return make_record(t_ms, seq, analysis_mg, occupancy_mg, nullptr);
}

}  // namespace bcg
