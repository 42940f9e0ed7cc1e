// bcgkit: offline analysis, calibration, ingestion service, and emulation
// for the 1046-byte BCG sensor packet stream.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

#include "bcg/calibration.hpp"
#include "bcg/cwt.hpp"
#include "bcg/ingest.hpp"
#include "bcg/occupancy.hpp"
#include "bcg/packet.hpp"
#include "bcg/pipeline.hpp"
#include "bcg/signal_file.hpp"
#include "bcg/synth.hpp"
#include "bcg/vitals.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitCalibration = 3;
constexpr int kExitNetwork = 4;

struct CommonAnalysis {
  std::string config_path;
  bcg::AnalysisConfig config;

  void add_flags(CLI::App* app) {
    app->add_option("--config", config_path, "JSON file with analysis overrides");
    app->add_option("--heart-freq", config.heart_freq_hz, "heart analysis frequency [Hz]");
    app->add_option("--resp-freq", config.resp_freq_hz, "respiration analysis frequency [Hz]");
    app->add_option("--percentile", config.peak_percentile, "calibration peak percentile");
    app->add_option("--rate-window", config.rate_window_s, "trailing rate window [s]");
    app->add_option("--omega0", config.morlet_omega0, "Morlet center frequency");
    app->add_flag("--rolling-recalibration", config.rolling_recalibration,
                  "recalibrate thresholds from the trailing buffer");
  }

  /// flags > config file > defaults
  void resolve(CLI::App* app) {
    if (config_path.empty()) return;
    std::ifstream in(config_path);
    if (!in) throw bcg::Error("cannot open config " + config_path);
    nlohmann::json j = nlohmann::json::parse(in);
    auto set = [&](const char* key, const char* flag, double* field) {
      if (j.contains(key) && app->count(flag) == 0) *field = j.at(key).get<double>();
    };
    set("heart_freq_hz", "--heart-freq", &config.heart_freq_hz);
    set("resp_freq_hz", "--resp-freq", &config.resp_freq_hz);
    set("peak_percentile", "--percentile", &config.peak_percentile);
    set("rate_window_s", "--rate-window", &config.rate_window_s);
    set("morlet_omega0", "--omega0", &config.morlet_omega0);
    if (j.contains("rolling_recalibration") && app->count("--rolling-recalibration") == 0) {
      config.rolling_recalibration = j.at("rolling_recalibration").get<bool>();
    }
  }
};

std::pair<std::string, uint16_t> split_host_port(const std::string& s) {
  auto pos = s.rfind(':');
  if (pos == std::string::npos) throw bcg::Error("expected host:port, got " + s);
  int port = std::stoi(s.substr(pos + 1));
  if (port < 0 || port > 65535) throw bcg::Error("bad port in " + s);
  return {s.substr(0, pos), static_cast<uint16_t>(port)};
}

bcg::SensorChannel parse_channel(const std::string& s) {
  auto pos = s.find('.');
  if (pos == std::string::npos) throw bcg::Error("expected sensor.axis, got " + s);
  return bcg::SensorChannel::parse(s.substr(0, pos), s.substr(pos + 1));
}

std::vector<std::pair<double, double>> parse_intervals(const std::string& s) {
  std::vector<std::pair<double, double>> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto pos = item.find(':');
    if (pos == std::string::npos) throw bcg::Error("expected start:end, got " + item);
    out.emplace_back(std::stod(item.substr(0, pos)), std::stod(item.substr(pos + 1)));
  }
  return out;
}

struct SynthFlags {
  bcg::SynthParams params;
  double duration_s = 300.0;
  double empty_lead_s = 0.0;
  std::string occupied;

  void add_flags(CLI::App* app) {
    app->add_option("--hr", params.heart_rate_bpm, "ground-truth heart rate [bpm]");
    app->add_option("--rr", params.resp_rate_bpm, "ground-truth respiration rate [/min]");
    app->add_option("--seed", params.seed, "RNG seed");
    app->add_option("--duration", duration_s, "duration [s]");
    app->add_option("--heart-amp", params.heart_amp_mg, "heartbeat amplitude [mg]");
    app->add_option("--resp-amp", params.resp_amp_mg, "breathing amplitude [mg]");
    app->add_option("--tilt-step", params.tilt_step_mg, "occupancy tilt step [mg]");
    app->add_option("--noise-scale", params.noise_scale, "noise density scale factor");
    app->add_option("--jitter-pct", params.hr_jitter_pct, "beat interval jitter [%]");
    app->add_option("--empty-lead", empty_lead_s, "empty span before occupancy [s]");
    app->add_option("--occupied", occupied, "occupied intervals, e.g. 30:150,200:260");
  }

  void resolve() {
    if (!occupied.empty()) {
      params.occupied_s = parse_intervals(occupied);
    } else if (empty_lead_s > 0.0) {
      params.occupied_s = {{empty_lead_s, duration_s}};
    }
  }
};

std::atomic<bool> g_shutdown{false};
void handle_signal(int) { g_shutdown = true; }

int cmd_synth(const SynthFlags& flags, const std::string& out_path) {
  bcg::SynthParams params = flags.params;
  if (std::filesystem::path(out_path).extension() == ".bcg") {
    auto stream = bcg::generate_packets(params, flags.duration_s);
    bcg::write_packet_dump(stream.packets, out_path);
    std::cerr << "wrote " << stream.packets.size() << " packets to " << out_path << '\n';
  } else {
    auto rec = bcg::generate_bcg(params, flags.duration_s);
    bcg::write_signal_csv(rec.channels, std::filesystem::path(out_path));
    std::cerr << "wrote " << rec.channels.size() << " channels to " << out_path << '\n';
  }
  return kExitOk;
}

int cmd_analyze(const std::string& input, const std::string& calib_path,
                const std::string& sensor_id, const std::string& format,
                const std::string& out_path, const bcg::AnalysisConfig& config) {
  bcg::SignalFile file = bcg::read_signal_file(input);

  bcg::CalibrationStore store = bcg::CalibrationStore::load(calib_path);
  std::optional<bcg::SensorCalibration> cal =
      sensor_id.empty() ? store.sole_entry() : store.find(sensor_id);
  if (!cal) {
    std::cerr << "error: no calibration entry"
              << (sensor_id.empty() ? " (file must hold exactly one, or pass --sensor-id)"
                                    : " for sensor " + sensor_id)
              << '\n';
    return kExitCalibration;
  }

  std::ofstream file_out;
  std::ostream* out = &std::cout;
  if (!out_path.empty() && out_path != "-") {
    file_out.open(out_path);
    if (!file_out) throw bcg::Error("cannot open " + out_path);
    out = &file_out;
  }

  bcg::SessionPipeline pipeline(config, cal);
  const bool csv = format == "csv";
  if (csv) *out << bcg::SecondRecord::csv_header() << '\n';

  auto emit = [&](const bcg::SecondRecord& record) {
    if (!record.occupied) return;  // vitals rows only for occupied seconds
    *out << (csv ? record.to_csv() : record.to_json()) << '\n';
  };

  if (file.has_packets()) {
    for (const bcg::SamplePacket& packet : file.packets) emit(pipeline.on_packet(packet));
  } else {
    const bcg::AccelSeries* analysis = file.find_channel(cal->analysis_channel);
    const bcg::AccelSeries* occupancy = file.find_channel(cal->occupancy.axis);
    if (analysis == nullptr || occupancy == nullptr) {
      throw bcg::Error("input lacks calibrated channels " + cal->analysis_channel.str() +
                       "/" + cal->occupancy.axis.str());
    }
    const size_t per_second = static_cast<size_t>(bcg::kSampleRateHz);
    const size_t seconds = std::min(analysis->size(), occupancy->size()) / per_second;
    for (size_t k = 0; k < seconds; ++k) {
      emit(pipeline.on_second(
          analysis->t0_ms + static_cast<int64_t>(k) * 1000, static_cast<uint32_t>(k),
          std::span(analysis->values_mg).subspan(k * per_second, per_second),
          std::span(occupancy->values_mg).subspan(k * per_second, per_second)));
    }
  }
  return kExitOk;
}

int cmd_scalogram(const std::string& input, const std::string& channel_str,
                  const std::string& freqs_str, double fmin, double fmax, int nfreq,
                  const std::string& out_path, const bcg::AnalysisConfig& config) {
  bcg::SignalFile file = bcg::read_signal_file(input);
  const bcg::SensorChannel channel = parse_channel(channel_str);
  const bcg::AccelSeries* series = file.find_channel(channel);
  if (series == nullptr) throw bcg::Error("input lacks channel " + channel_str);

  std::vector<double> freqs;
  if (!freqs_str.empty()) {
    std::stringstream ss(freqs_str);
    std::string item;
    while (std::getline(ss, item, ',')) freqs.push_back(std::stod(item));
  } else {
    const double ratio = std::pow(fmax / fmin, 1.0 / (nfreq - 1));
    double f = fmin;
    for (int i = 0; i < nfreq; ++i, f *= ratio) freqs.push_back(f);
  }

  const auto s = bcg::scalogram(*series, freqs, bcg::MorletParams{config.morlet_omega0});
  if (out_path.empty() || out_path == "-") {
    bcg::write_scalogram_csv(s, std::cout);
  } else {
    bcg::write_scalogram_csv(s, std::filesystem::path(out_path));
  }
  return kExitOk;
}

int cmd_calibrate(const std::string& empty_path, const std::string& occupied_path,
                  const std::string& calib_path, const std::string& sensor_id,
                  const std::string& sensor_str, const std::string& out_path,
                  const bcg::AnalysisConfig& config) {
  const bcg::SignalFile empty_file = bcg::read_signal_file(empty_path);
  const bcg::SignalFile occupied_file = bcg::read_signal_file(occupied_path);
  const bcg::SignalFile calib_file = bcg::read_signal_file(calib_path);
  const bcg::SensorKind sensor = bcg::sensor_from_string(sensor_str);

  // Occupancy axis: the ground-parallel candidate (x, y) with the larger
  // empty-vs-occupied gap.
  const bcg::Axis candidates[] = {bcg::Axis::kX, bcg::Axis::kY};
  double best_gap = -1.0;
  bcg::SensorChannel best_axis = bcg::SensorChannel::make(sensor, bcg::Axis::kX);
  for (bcg::Axis axis : candidates) {
    const auto ch = bcg::SensorChannel::make(sensor, axis);
    const auto* e = empty_file.find_channel(ch);
    const auto* o = occupied_file.find_channel(ch);
    if (e == nullptr || o == nullptr) continue;
    auto mean = [](const bcg::AccelSeries& s) {
      double acc = 0;
      for (double v : s.values_mg) acc += v;
      return acc / static_cast<double>(s.size());
    };
    const double gap = std::abs(mean(*o) - mean(*e));
    if (gap > best_gap) {
      best_gap = gap;
      best_axis = ch;
    }
  }
  if (best_gap < 0) throw bcg::Error("empty/occupied files lack ground-parallel channels");

  bcg::SensorCalibration cal;
  cal.sensor_id = sensor_id;
  cal.occupancy = bcg::calibrate_occupancy(*empty_file.find_channel(best_axis),
                                           *occupied_file.find_channel(best_axis));
  cal.occupancy.debounce_s = config.occupancy_debounce_s;

  // Analysis channel: the sensor's highest-variance axis over the
  // calibration measurement.
  double best_var = -1.0;
  for (const bcg::AccelSeries& s : calib_file.channels) {
    if (s.channel.sensor != sensor) continue;
    double mean = 0;
    for (double v : s.values_mg) mean += v;
    mean /= static_cast<double>(s.size());
    double var = 0;
    for (double v : s.values_mg) var += (v - mean) * (v - mean);
    var /= static_cast<double>(s.size());
    if (var > best_var) {
      best_var = var;
      cal.analysis_channel = s.channel;
    }
  }
  if (best_var < 0) throw bcg::Error("calibration signal lacks " + sensor_str + " channels");

  const bcg::AccelSeries& calib_series = *calib_file.find_channel(cal.analysis_channel);
  const bcg::MorletParams morlet{config.morlet_omega0};
  cal.peak_thresholds.heart = bcg::calibrate_threshold(
      bcg::cwt_row(calib_series, config.heart_freq_hz, morlet), config.peak_percentile);
  cal.peak_thresholds.resp = bcg::calibrate_threshold(
      bcg::cwt_row(calib_series, config.resp_freq_hz, morlet), config.peak_percentile);

  bcg::CalibrationStore store;
  if (std::filesystem::exists(out_path)) store = bcg::CalibrationStore::load(out_path);
  store.upsert(cal);
  store.save(out_path);
  std::cerr << "calibrated " << sensor_id << ": occupancy axis " << cal.occupancy.axis.str()
            << " threshold " << cal.occupancy.threshold_mg << " mg, analysis channel "
            << cal.analysis_channel.str() << ", peak thresholds heart "
            << cal.peak_thresholds.heart.value << " resp " << cal.peak_thresholds.resp.value
            << '\n';
  return kExitOk;
}

int cmd_serve(const std::string& bind, const std::string& storage,
              const std::string& calib_path, const bcg::AnalysisConfig& config) {
  bcg::Server::Options options;
  auto [host, port] = split_host_port(bind);
  options.bind_host = host;
  options.port = port;
  options.storage_dir = storage;
  options.analysis = config;
  if (!calib_path.empty()) options.calibrations = bcg::CalibrationStore::load(calib_path);

  bcg::Server server(std::move(options));
  server.start();
  std::cerr << "listening on " << host << ":" << server.port() << ", storage " << storage
            << '\n';
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  while (!g_shutdown) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  std::cerr << "shutting down\n";
  server.stop();
  const auto stats = server.stats();
  std::cerr << "sessions " << stats.sessions_opened << " (" << stats.sessions_failed
            << " failed), records " << stats.records_written << '\n';
  return kExitOk;
}

int cmd_emulate(const std::string& target, const std::string& sensor_id, bool fast,
                const SynthFlags& flags) {
  auto stream = bcg::generate_packets(flags.params, flags.duration_s);
  auto [host, port] = split_host_port(target);
  bcg::EmulateOptions options;
  options.host = host;
  options.port = port;
  options.sensor_id = sensor_id;
  options.fast = fast;
  const size_t sent = bcg::emulate_stream(options, stream.packets);
  std::cerr << "sent " << sent << " packets as " << sensor_id << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BCG sensor toolkit: packet codec, CWT vitals analysis, occupancy "
               "detection, ingestion service, and a synthetic signal generator"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic recording");
  SynthFlags synth_flags;
  std::string synth_out;
  synth_flags.add_flags(synth);
  synth->add_option("--out", synth_out, ".bcg packet dump or .csv signal file")->required();

  // analyze
  auto* analyze = app.add_subcommand("analyze", "offline occupancy-gated vitals analysis");
  std::string an_input, an_calib, an_sensor, an_format = "jsonl", an_out = "-";
  CommonAnalysis an_cfg;
  analyze->add_option("--input", an_input, "signal file (.bcg or .csv)")->required();
  analyze->add_option("--calibration", an_calib, "calibration file")->required();
  analyze->add_option("--sensor-id", an_sensor, "calibration entry to use");
  analyze->add_option("--format", an_format, "jsonl or csv")
      ->check(CLI::IsMember({"jsonl", "csv"}));
  analyze->add_option("--out", an_out, "output path or - for stdout");
  an_cfg.add_flags(analyze);

  // scalogram
  auto* scal = app.add_subcommand("scalogram", "export a |CWT| grid as CSV");
  std::string sc_input, sc_channel = "lis3dhh.x", sc_freqs, sc_out = "-";
  double sc_fmin = 0.5, sc_fmax = 10.0;
  int sc_nfreq = 40;
  CommonAnalysis sc_cfg;
  scal->add_option("--input", sc_input, "signal file (.bcg or .csv)")->required();
  scal->add_option("--channel", sc_channel, "channel, e.g. lis3dhh.x");
  scal->add_option("--freqs", sc_freqs, "comma-separated frequencies [Hz]");
  scal->add_option("--fmin", sc_fmin, "log sweep start [Hz]");
  scal->add_option("--fmax", sc_fmax, "log sweep end [Hz]");
  scal->add_option("--nfreq", sc_nfreq, "log sweep point count")->check(CLI::Range(2, 4096));
  scal->add_option("--out", sc_out, "output CSV path or -");
  sc_cfg.add_flags(scal);

  // calibrate
  auto* calib = app.add_subcommand("calibrate", "produce a per-sensor calibration file");
  std::string cb_empty, cb_occupied, cb_signal, cb_sensor_id, cb_sensor = "lis3dhh", cb_out;
  CommonAnalysis cb_cfg;
  calib->add_option("--empty", cb_empty, "empty-furniture recording")->required();
  calib->add_option("--occupied", cb_occupied, "occupied recording")->required();
  calib->add_option("--calib-signal", cb_signal, "threshold calibration recording")->required();
  calib->add_option("--sensor-id", cb_sensor_id, "sensor id to write")->required();
  calib->add_option("--sensor", cb_sensor, "analysis sensor (lis3dhh or sca61t)");
  calib->add_option("--out", cb_out, "calibration file to write/update")->required();
  cb_cfg.add_flags(calib);

  // serve
  auto* serve = app.add_subcommand("serve", "run the packet ingestion service");
  std::string sv_bind = "127.0.0.1:7071", sv_storage, sv_calib;
  CommonAnalysis sv_cfg;
  serve->add_option("--bind", sv_bind, "host:port (port 0 = ephemeral)");
  serve->add_option("--storage", sv_storage, "session JSONL directory")->required();
  serve->add_option("--calibration", sv_calib, "calibration file");
  sv_cfg.add_flags(serve);

  // emulate
  auto* emul = app.add_subcommand("emulate", "stream synthetic packets to a server");
  std::string em_target, em_sensor = "emu-0";
  bool em_fast = false;
  SynthFlags em_flags;
  em_flags.duration_s = 60.0;
  emul->add_option("--target", em_target, "host:port")->required();
  emul->add_option("--sensor-id", em_sensor, "sensor id for the hello line");
  emul->add_flag("--fast", em_fast, "send as fast as possible");
  em_flags.add_flags(emul);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*synth) {
      synth_flags.resolve();
      return cmd_synth(synth_flags, synth_out);
    }
    if (*analyze) {
      an_cfg.resolve(analyze);
      return cmd_analyze(an_input, an_calib, an_sensor, an_format, an_out, an_cfg.config);
    }
    if (*scal) {
      sc_cfg.resolve(scal);
      return cmd_scalogram(sc_input, sc_channel, sc_freqs, sc_fmin, sc_fmax, sc_nfreq, sc_out,
                           sc_cfg.config);
    }
    if (*calib) {
      cb_cfg.resolve(calib);
      return cmd_calibrate(cb_empty, cb_occupied, cb_signal, cb_sensor_id, cb_sensor, cb_out,
                           cb_cfg.config);
    }
    if (*serve) {
      sv_cfg.resolve(serve);
      return cmd_serve(sv_bind, sv_storage, sv_calib, sv_cfg.config);
    }
    if (*emul) {
      em_flags.resolve();
      return cmd_emulate(em_target, em_sensor, em_fast, em_flags);
    }
  } catch (const bcg::NetworkError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNetwork;
  } catch (const bcg::InsufficientPeaks& e) {
    std::cerr << "calibration error: " << e.what()
              << " — use a longer calibration measurement\n";
    return kExitCalibration;
  } catch (const bcg::InsufficientSeparation& e) {
    std::cerr << "calibration error: " << e.what()
              << " — reposition the sensor or increase the load difference\n";
    return kExitCalibration;
  } catch (const bcg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitOk;
}
