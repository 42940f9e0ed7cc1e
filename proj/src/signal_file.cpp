#include "bcg/signal_file.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace bcg {

const AccelSeries* SignalFile::find_channel(SensorChannel ch) const {
  for (const AccelSeries& s : channels) {
    if (s.channel == ch) return &s;
  }
  return nullptr;
}

std::vector<SamplePacket> read_packet_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (bytes.size() % kPacketSize != 0) {
    throw Error("packet dump " + path.string() + " has partial length " +
                std::to_string(bytes.size()) + " (not a multiple of " +
                std::to_string(kPacketSize) + ")");
  }
  std::vector<SamplePacket> packets;
  packets.reserve(bytes.size() / kPacketSize);
  for (size_t off = 0; off < bytes.size(); off += kPacketSize) {
    packets.push_back(decode(std::span(bytes).subspan(off, kPacketSize)));
  }
  return packets;
}

void write_packet_dump(std::span<const SamplePacket> packets, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string());
  for (const SamplePacket& p : packets) {
    auto bytes = encode(p);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<long>(bytes.size()));
  }
}

namespace {

// shortest representation that round-trips exactly
std::string_view format_double(double v, char (&buf)[32]) {
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, static_cast<size_t>(res.ptr - buf)};
}

}  // namespace

void write_signal_csv(std::span<const AccelSeries> channels, std::ostream& out) {
  out << "t_ms,sensor,axis,mg\n";
  char buf[32];
  for (const AccelSeries& s : channels) {
    const double step_ms = 1000.0 / s.sample_rate_hz;
    for (size_t i = 0; i < s.size(); ++i) {
      const int64_t t = s.t0_ms + static_cast<int64_t>(std::llround(static_cast<double>(i) * step_ms));
      out << t << ',' << to_string(s.channel.sensor) << ',' << to_string(s.channel.axis) << ','
          << format_double(s.values_mg[i], buf) << '\n';
    }
  }
}

void write_signal_csv(std::span<const AccelSeries> channels, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string());
  write_signal_csv(channels, out);
}

SignalFile read_signal_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("empty signal CSV");
  if (line != "t_ms,sensor,axis,mg" && line != "t_ms,sensor,axis,mg\r") {
    throw Error("signal CSV must start with header t_ms,sensor,axis,mg");
  }

  struct Raw {
    std::vector<int64_t> t;
    std::vector<double> mg;
  };
  std::map<std::pair<std::string, std::string>, Raw> by_channel;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::stringstream row(line);
    std::string t_str, sensor, axis, mg_str;
    if (!std::getline(row, t_str, ',') || !std::getline(row, sensor, ',') ||
        !std::getline(row, axis, ',') || !std::getline(row, mg_str)) {
      throw Error("signal CSV: bad row at line " + std::to_string(lineno));
    }
    try {
      Raw& raw = by_channel[{sensor, axis}];
      raw.t.push_back(std::stoll(t_str));
      raw.mg.push_back(std::stod(mg_str));
    } catch (const std::exception&) {
      throw Error("signal CSV: bad value at line " + std::to_string(lineno));
    }
  }

  SignalFile file;
  for (auto& [key, raw] : by_channel) {
    AccelSeries series;
    series.channel = SensorChannel::parse(key.first, key.second);
    series.sample_rate_hz = kSampleRateHz;
    series.t0_ms = raw.t.front();
    const int64_t step = static_cast<int64_t>(std::llround(1000.0 / series.sample_rate_hz));
    for (size_t i = 0; i < raw.t.size(); ++i) {
      if (raw.t[i] != series.t0_ms + static_cast<int64_t>(i) * step) {
        throw Error("signal CSV: channel " + series.channel.str() +
                    " is not gap-free/time-sorted at t_ms=" + std::to_string(raw.t[i]));
      }
    }
    series.values_mg = std::move(raw.mg);
    file.channels.push_back(std::move(series));
  }
  if (file.channels.empty()) throw Error("signal CSV has no samples");
  return file;
}

SignalFile read_signal_file(const std::filesystem::path& path) {
  if (path.extension() == ".bcg") {
    SignalFile file;
    file.packets = read_packet_dump(path);
    if (file.packets.empty()) throw Error("packet dump " + path.string() + " is empty");
    const SensorChannel all[] = {
        SensorChannel::make(SensorKind::kSca61t, Axis::kX),
        SensorChannel::make(SensorKind::kSca61t, Axis::kY),
        SensorChannel::make(SensorKind::kLis3dhh, Axis::kX),
        SensorChannel::make(SensorKind::kLis3dhh, Axis::kY),
        SensorChannel::make(SensorKind::kLis3dhh, Axis::kZ),
    };
    for (const SensorChannel& ch : all) {
      file.channels.push_back(series_from_packets(file.packets, ch));
    }
    return file;
  }
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_signal_csv(in);
}

}  // namespace bcg
