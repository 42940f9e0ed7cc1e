// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with its runtime. Run via `ctest -R acceptance` or directly.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>

#include "bcg/cwt.hpp"
#include "bcg/ingest.hpp"
#include "bcg/occupancy.hpp"
#include "bcg/packet.hpp"
#include "bcg/pipeline.hpp"
#include "bcg/signal_file.hpp"
#include "bcg/synth.hpp"
#include "bcg/vitals.hpp"
#include "support/direct_cwt.hpp"

using namespace bcg;

namespace {

class Criterion {
 public:
  Criterion(int number, std::string description)
      : number_(number), description_(std::move(description)),
        start_(std::chrono::steady_clock::now()) {}

  double elapsed_s() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  void report(bool pass) const {
    std::cout << "[acceptance] criterion " << number_ << (pass ? ": PASS" : ": FAIL") << " ("
              << description_ << ") [" << elapsed_s() << " s]" << std::endl;
  }

 private:
  int number_;
  std::string description_;
  std::chrono::steady_clock::time_point start_;
};

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

SamplePacket random_packet(std::mt19937_64& gen) {
  std::uniform_int_distribution<int32_t> i16(-32768, 32767);
  std::uniform_int_distribution<uint32_t> u32;
  SamplePacket p;
  p.sca10h.seq = u32(gen);
  p.sca10h.timestamp_ms = (uint64_t{u32(gen)} << 32) | u32(gen);
  p.sca10h.heart_rate_bpm = static_cast<uint16_t>(u32(gen));
  p.sca10h.respiration_rate_bpm = static_cast<uint16_t>(u32(gen));
  p.sca10h.occupancy = static_cast<uint8_t>(u32(gen) % 2);
  p.sca10h.status = static_cast<uint8_t>(u32(gen));
  p.sca10h.signal_strength = u32(gen);
  for (auto& b : p.sca10h.b2b_time_ms) b = static_cast<uint16_t>(u32(gen));
  p.sca10h.hrv_ms = static_cast<uint16_t>(u32(gen));
  p.sca10h.stroke_volume = static_cast<uint16_t>(u32(gen));
  for (auto& s : p.sca61t) {
    s[0] = static_cast<int16_t>(i16(gen));
    s[1] = static_cast<int16_t>(i16(gen));
  }
  for (auto& s : p.lis3dhh) {
    for (auto& v : s) v = static_cast<int16_t>(i16(gen));
  }
  return p;
}

const SensorChannel kAnalysisChannel = SensorChannel::make(SensorKind::kLis3dhh, Axis::kX);

VitalsThresholds calibrated_thresholds(double hr, double rr, uint64_t seed,
                                       const AnalysisConfig& config) {
  SynthParams cal;
  cal.heart_rate_bpm = hr;
  cal.resp_rate_bpm = rr;
  cal.seed = seed;
  cal.occupied_s = {{30.0, 150.0}};  // empty lead-in, then occupied
  const auto rec = generate_bcg(cal, 150.0);
  const AccelSeries& sig = rec.channel(kAnalysisChannel);
  return VitalsThresholds{
      calibrate_threshold(cwt_row(sig, config.heart_freq_hz), config.peak_percentile),
      calibrate_threshold(cwt_row(sig, config.resp_freq_hz), config.peak_percentile)};
}

SensorCalibration server_calibration(const std::string& id) {
  SensorCalibration cal;
  cal.sensor_id = id;
  cal.occupancy.axis = kAnalysisChannel;
  cal.occupancy.baseline_mg = 0.0;
  cal.occupancy.threshold_mg = 25.0;
  cal.peak_thresholds.heart = {0.03, PeakThreshold::Source::kCalibrated};
  cal.peak_thresholds.resp = {0.03, PeakThreshold::Source::kCalibrated};
  cal.analysis_channel = kAnalysisChannel;
  return cal;
}

nlohmann::json strip_to_estimates(const nlohmann::json& j) {
  nlohmann::json out;
  for (const char* key : {"t_ms", "seq", "occupied", "heart_bpm", "resp_bpm", "provisional",
                          "sca10h_heart_bpm", "sca10h_resp_bpm", "sca10h_occupied"}) {
    if (j.contains(key)) out[key] = j.at(key);
  }
  return out;
}

}  // namespace

TEST_CASE("criterion 1: packet round-trip contract") {
  Criterion c(1, "1000 random packets round-trip exactly, 1046 bytes each, < 1 s");
  std::mt19937_64 gen(20200825);
  bool pass = true;
  for (int i = 0; i < 1000 && pass; ++i) {
    const SamplePacket p = random_packet(gen);
    const auto bytes = encode(p);
    pass = bytes.size() == 1046 && decode(bytes) == p;
  }
  const bool in_time = c.elapsed_s() < 1.0;
  c.report(pass && in_time);
  CHECK(pass);
  CHECK(in_time);
}

TEST_CASE("criterion 2: bandwidth accounting") {
  Criterion c(2, "min_bitrate_bps(1046, 1) == 8368 bps ~= 8.37 kbps");
  const double bps = min_bitrate_bps(1046, 1.0);
  const bool pass = bps == 8368.0 && std::abs(bps / 1000.0 - 8.37) < 0.005;
  c.report(pass);
  CHECK(pass);
}

TEST_CASE("criterion 3: CWT oracle equivalence") {
  Criterion c(3, "FFT CWT matches direct convolution within 1e-6 on 50 random signals, < 10 s");
  std::mt19937_64 gen(33);
  std::normal_distribution<double> noise(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(1024);
    for (auto& v : x) v = noise(gen);
    AccelSeries series;
    series.channel = kAnalysisChannel;
    series.values_mg = x;
    for (double f : {0.8, 3.5, 10.0}) {
      const auto fast = cwt_row(series, f);
      const auto direct = bcg_test::direct_cwt_row(x, kSampleRateHz, f);
      double max_abs = 0.0, max_err = 0.0;
      for (size_t i = 0; i < fast.size(); ++i) {
        max_abs = std::max(max_abs, std::abs(direct[i]));
        max_err = std::max(max_err, std::abs(fast[i] - direct[i]));
      }
      worst = std::max(worst, max_err / max_abs);
    }
  }
  const bool in_time = c.elapsed_s() < 10.0;
  const bool pass = worst < 1e-6 && in_time;
  c.report(pass);
  CHECK(worst < 1e-6);
  CHECK(in_time);
}

TEST_CASE("criterion 4: vitals recovery envelope") {
  Criterion c(4, "HR in {55,70,90} x RR in {10,15,20}, 10 min each: heart 95% within 5 bpm, "
                 "MAE <= 2; resp 90% within 2; < 60 s");
  const AnalysisConfig config;
  bool pass = true;
  int combo = 0;
  for (double hr : {55.0, 70.0, 90.0}) {
    for (double rr : {10.0, 15.0, 20.0}) {
      ++combo;
      const auto thresholds =
          calibrated_thresholds(hr, rr, 1000 + static_cast<uint64_t>(combo), config);
      SynthParams params;
      params.heart_rate_bpm = hr;
      params.resp_rate_bpm = rr;
      params.seed = 42 + static_cast<uint64_t>(combo);
      const auto rec = generate_bcg(params, 600.0);
      const auto estimates = estimate_vitals(rec.channel(kAnalysisChannel), config, thresholds);

      size_t seconds = 0, heart_in5 = 0, resp_in2 = 0, heart_present = 0;
      double heart_abs_err = 0.0;
      for (const auto& est : estimates) {
        if (est.t_s <= config.rate_window_s) continue;
        ++seconds;
        if (est.heart_bpm) {
          ++heart_present;
          const double err = std::abs(*est.heart_bpm - hr);
          heart_abs_err += err;
          if (err <= 5.0) ++heart_in5;
        }
        if (est.resp_bpm && std::abs(*est.resp_bpm - rr) <= 2.0) ++resp_in2;
      }
      const double heart_frac = static_cast<double>(heart_in5) / static_cast<double>(seconds);
      const double resp_frac = static_cast<double>(resp_in2) / static_cast<double>(seconds);
      const double mae = heart_present ? heart_abs_err / static_cast<double>(heart_present) : 1e9;
      std::cout << "  [criterion 4] HR " << hr << " RR " << rr << ": heart within 5 bpm "
                << 100.0 * heart_frac << "%, MAE " << mae << ", resp within 2 "
                << 100.0 * resp_frac << "%" << std::endl;
      const bool combo_pass = heart_frac >= 0.95 && mae <= 2.0 && resp_frac >= 0.90;
      CHECK_MESSAGE(combo_pass, "HR ", hr, " RR ", rr, " failed its envelope");
      pass = pass && combo_pass;
    }
  }
  const bool in_time = c.elapsed_s() < 60.0;
  c.report(pass && in_time);
  CHECK(in_time);
}

TEST_CASE("criterion 5: noise-free exactness") {
  Criterion c(5, "zero noise, zero jitter: HR recovered within 0.5 bpm");
  const AnalysisConfig config;
  bool pass = true;
  for (double hr : {55.0, 70.0, 90.0}) {
    SynthParams params;
    params.heart_rate_bpm = hr;
    params.resp_rate_bpm = 15.0;
    params.noise_scale = 0.0;
    params.hr_jitter_pct = 0.0;
    params.seed = 7;
    const auto rec = generate_bcg(params, 180.0);
    const AccelSeries& sig = rec.channel(kAnalysisChannel);

    const auto trace = cwt_row(sig, config.heart_freq_hz);
    double max_amp = 0.0;
    for (double v : trace) max_amp = std::max(max_amp, v);
    const VitalsThresholds thresholds{{0.5 * max_amp, PeakThreshold::Source::kManual},
                                      {1e9, PeakThreshold::Source::kManual}};
    for (const auto& est : estimate_vitals(sig, config, thresholds)) {
      if (est.t_s <= config.rate_window_s) continue;
      const bool ok = est.heart_bpm && std::abs(*est.heart_bpm - hr) <= 0.5;
      if (!ok) pass = false;
    }
  }
  c.report(pass);
  CHECK(pass);
}

TEST_CASE("criterion 6: occupancy step and dropout robustness") {
  Criterion c(6, "step detected 2-3 s after the true step; 0.5 s dropouts never flip state "
                 "across 100 seeds");
  OccupancyConfig cfg;
  cfg.axis = kAnalysisChannel;
  cfg.baseline_mg = 0.0;
  cfg.threshold_mg = 25.0;
  cfg.debounce_s = 2.0;

  bool pass = true;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> noise(0.0, 2.0);
    OccupancyDetector det(cfg);
    double flipped_at = -1.0;
    size_t flips = 0;
    const double step_s = 10.0;
    for (size_t i = 0; i < 40 * 100; ++i) {
      const double t = static_cast<double>(i) / kSampleRateHz;
      double level = t < step_s ? 0.0 : 50.0;
      if (t >= 25.0 && t < 25.5) level = 0.0;  // injected dropout while occupied
      const size_t before = det.transition_count();
      const auto state = det.update(level + noise(gen), static_cast<int64_t>(i * 10));
      if (det.transition_count() != before) {
        ++flips;
        if (flips == 1) flipped_at = t;
      }
    }
    const bool ok = flips == 1 && flipped_at - step_s >= 2.0 && flipped_at - step_s <= 3.0;
    if (!ok) {
      pass = false;
      std::cout << "  [criterion 6] seed " << seed << ": flips " << flips << " at " << flipped_at
                << std::endl;
    }
  }
  c.report(pass);
  CHECK(pass);
}

TEST_CASE("criterion 7: online/offline equivalence") {
  Criterion c(7, "server records equal offline analyze on the same packet dump");
  const auto dir = fresh_dir("bcg_accept7");

  SynthParams params;
  params.heart_rate_bpm = 70;
  params.resp_rate_bpm = 15;
  params.seed = 777;
  const auto stream = generate_packets(params, 120.0);
  const auto dump = dir / "stream.bcg";
  write_packet_dump(stream.packets, dump);

  const AnalysisConfig config;
  const SensorCalibration cal = server_calibration("eq-1");

  // offline: the analyze path over the dump
  std::vector<nlohmann::json> offline;
  {
    const auto packets = read_packet_dump(dump);
    SessionPipeline pipeline(config, cal);
    for (const auto& packet : packets) {
      offline.push_back(strip_to_estimates(nlohmann::json::parse(
          pipeline.on_packet(packet).to_json())));
    }
  }

  // online: emulate --fast into a live server
  Server::Options options;
  options.storage_dir = dir / "store";
  options.analysis = config;
  options.calibrations.upsert(cal);
  Server server(std::move(options));
  server.start();
  EmulateOptions emu{"127.0.0.1", server.port(), "eq-1", true};
  emulate_stream(emu, read_packet_dump(dump));
  server.stop();

  std::vector<nlohmann::json> online;
  for (const auto& entry : std::filesystem::directory_iterator(dir / "store")) {
    std::ifstream in(entry.path());
    std::string line;
    while (std::getline(in, line)) {
      online.push_back(strip_to_estimates(nlohmann::json::parse(line)));
    }
  }

  bool pass = online.size() == offline.size();
  for (size_t i = 0; pass && i < online.size(); ++i) pass = online[i] == offline[i];
  c.report(pass);
  CHECK(online.size() == offline.size());
  CHECK(pass);
}

TEST_CASE("criterion 8: service robustness under 100 concurrent sessions") {
  Criterion c(8, "100 concurrent 60 s sessions complete with zero dropped records; "
                 "a malformed hello stays isolated");
  const auto dir = fresh_dir("bcg_accept8");
  Server::Options options;
  options.storage_dir = dir;
  for (int i = 0; i < 100; ++i) {
    options.calibrations.upsert(server_calibration("emu-" + std::to_string(i)));
  }
  Server server(std::move(options));
  server.start();

  std::atomic<int> sent_ok{0};
  std::vector<std::thread> emulators;
  emulators.reserve(101);
  for (int i = 0; i < 100; ++i) {
    emulators.emplace_back([&, i] {
      SynthParams params;
      params.heart_rate_bpm = 55.0 + (i % 3) * 15.0;
      params.seed = 9000 + static_cast<uint64_t>(i);
      const auto stream = generate_packets(params, 60.0);
      EmulateOptions emu{"127.0.0.1", server.port(), "emu-" + std::to_string(i), true};
      if (emulate_stream(emu, stream.packets) == 60) ++sent_ok;
    });
  }
  emulators.emplace_back([&] {  // the intruder
    try {
      EmulateOptions emu{"127.0.0.1", server.port(), "", true};
      emulate_stream(emu, {});
    } catch (const Error&) {
    }
  });
  for (auto& t : emulators) t.join();
  server.stop();

  size_t complete_files = 0;
  bool clean = true;
  for (int i = 0; i < 100; ++i) {
    const std::string prefix = "emu-" + std::to_string(i) + "-";
    size_t lines = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.path().filename().string().rfind(prefix, 0) != 0) continue;
      std::ifstream in(entry.path());
      std::string line;
      while (std::getline(in, line)) ++lines;
    }
    if (lines == 60) {
      ++complete_files;
    } else {
      clean = false;
      std::cout << "  [criterion 8] emu-" << i << " has " << lines << " records" << std::endl;
    }
  }
  const auto stats = server.stats();
  const bool pass = complete_files == 100 && clean && sent_ok == 100 &&
                    stats.sessions_failed == 1 && stats.records_written == 6000;
  std::cout << "  [criterion 8] sessions " << stats.sessions_opened << ", failed "
            << stats.sessions_failed << ", records " << stats.records_written << " ["
            << c.elapsed_s() << " s]" << std::endl;
  c.report(pass);
  CHECK(complete_files == 100);
  CHECK(stats.sessions_failed == 1);
  CHECK(stats.records_written == 6000);
}
