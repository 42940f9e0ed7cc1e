#include "bcg/packet.hpp"

#include <cstring>

namespace bcg {
namespace {

void put_u16(uint8_t* p, uint16_t v) {
  p[0] = static_cast<uint8_t>(v);
  p[1] = static_cast<uint8_t>(v >> 8);
}
void put_u32(uint8_t* p, uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<uint8_t>(v >> (8 * i));
}
void put_u64(uint8_t* p, uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<uint8_t>(v >> (8 * i));
}
void put_i16(uint8_t* p, int16_t v) { put_u16(p, static_cast<uint16_t>(v)); }

uint16_t get_u16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (uint16_t{p[1]} << 8));
}
uint32_t get_u32(const uint8_t* p) {
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}
uint64_t get_u64(const uint8_t* p) {
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}
int16_t get_i16(const uint8_t* p) { return static_cast<int16_t>(get_u16(p)); }

}  // namespace

WrongLength::WrongLength(size_t actual_)
    : Error("packet length " + std::to_string(actual_) + ", expected " +
            std::to_string(kPacketSize)),
      actual(actual_) {}

MalformedFrame::MalformedFrame(const std::string& what) : Error("malformed frame: " + what) {}

std::array<uint8_t, kPacketSize> encode(const SamplePacket& packet) {
  std::array<uint8_t, kPacketSize> out{};
  uint8_t* p = out.data();
  const Sca10hFrame& f = packet.sca10h;
  put_u32(p + 0, f.seq);
  put_u64(p + 4, f.timestamp_ms);
  put_u16(p + 12, f.heart_rate_bpm);
  put_u16(p + 14, f.respiration_rate_bpm);
  p[16] = f.occupancy;
  p[17] = f.status;
  put_u32(p + 18, f.signal_strength);
  for (int i = 0; i < 3; ++i) put_u16(p + 22 + 2 * i, f.b2b_time_ms[i]);
  put_u16(p + 28, f.hrv_ms);
  put_u16(p + 30, f.stroke_volume);
  // bytes 32..45 reserved, already zero

  size_t off = kSca10hFrameSize;
  for (size_t i = 0; i < kSamplesPerPacket; ++i) {
    for (int a = 0; a < 2; ++a, off += 2) put_i16(p + off, packet.sca61t[i][a]);
  }
  for (size_t i = 0; i < kSamplesPerPacket; ++i) {
    for (int a = 0; a < 3; ++a, off += 2) put_i16(p + off, packet.lis3dhh[i][a]);
  }
  return out;
}

SamplePacket decode(std::span<const uint8_t> bytes) {
  if (bytes.size() != kPacketSize) throw WrongLength(bytes.size());
  const uint8_t* p = bytes.data();
  SamplePacket packet;
  Sca10hFrame& f = packet.sca10h;
  f.seq = get_u32(p + 0);
  f.timestamp_ms = get_u64(p + 4);
  f.heart_rate_bpm = get_u16(p + 12);
  f.respiration_rate_bpm = get_u16(p + 14);
  f.occupancy = p[16];
  if (f.occupancy > 1) {
    throw MalformedFrame("occupancy byte " + std::to_string(int{f.occupancy}));
  }
  f.status = p[17];
  f.signal_strength = get_u32(p + 18);
  for (int i = 0; i < 3; ++i) f.b2b_time_ms[i] = get_u16(p + 22 + 2 * i);
  f.hrv_ms = get_u16(p + 28);
  f.stroke_volume = get_u16(p + 30);

  size_t off = kSca10hFrameSize;
  for (size_t i = 0; i < kSamplesPerPacket; ++i) {
    for (int a = 0; a < 2; ++a, off += 2) packet.sca61t[i][a] = get_i16(p + off);
  }
  for (size_t i = 0; i < kSamplesPerPacket; ++i) {
    for (int a = 0; a < 3; ++a, off += 2) packet.lis3dhh[i][a] = get_i16(p + off);
  }
  return packet;
}

double min_bitrate_bps(size_t packet_size_bytes, double period_s) {
  if (period_s <= 0.0) throw Error("period must be positive");
  return static_cast<double>(packet_size_bytes) * 8.0 / period_s;
}

AccelSeries series_from_packets(std::span<const SamplePacket> packets, SensorChannel channel) {
  AccelSeries series;
  series.channel = channel;
  series.sample_rate_hz = kSampleRateHz;
  if (packets.empty()) return series;
  series.t0_ms = static_cast<int64_t>(packets.front().sca10h.timestamp_ms);
  series.values_mg.reserve(packets.size() * kSamplesPerPacket);
  const SensorSpec& spec = spec_for(channel.sensor);
  const int a = channel.axis == Axis::kX ? 0 : channel.axis == Axis::kY ? 1 : 2;
  for (const SamplePacket& packet : packets) {
    for (size_t i = 0; i < kSamplesPerPacket; ++i) {
      int16_t raw = channel.sensor == SensorKind::kSca61t ? packet.sca61t[i][a]
                                                          : packet.lis3dhh[i][a];
      series.values_mg.push_back(raw_to_mg(raw, spec));
    }
  }
  return series;
}

}  // namespace bcg
