#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "bcg/types.hpp"

namespace bcg {

inline constexpr size_t kSca10hFrameSize = 46;
inline constexpr size_t kSamplesPerPacket = 100;
inline constexpr size_t kPacketSize = 1046;  // 46 + 100*2*2 + 100*3*2

/// The 46-byte vitals summary frame at the head of every packet, carrying the
/// reference module's own per-second estimates. Little-endian on the wire;
/// byte-exact layout in docs/wire-format.md. The trailing 14 reserved bytes
/// are written as zero and ignored on decode.
struct Sca10hFrame {
  uint32_t seq = 0;
  uint64_t timestamp_ms = 0;
  uint16_t heart_rate_bpm = 0;
  uint16_t respiration_rate_bpm = 0;
  uint8_t occupancy = 0;  // 0 empty, 1 occupied
  uint8_t status = 0;
  uint32_t signal_strength = 0;
  std::array<uint16_t, 3> b2b_time_ms{};
  uint16_t hrv_ms = 0;
  uint16_t stroke_volume = 0;

  bool operator==(const Sca10hFrame&) const = default;
};

/// One second of sensor data: the SCA10H frame plus 100 samples per axis of
/// both accelerometers, as raw LSB values. Always serializes to 1046 bytes.
struct SamplePacket {
  Sca10hFrame sca10h;
  std::array<std::array<int16_t, 2>, kSamplesPerPacket> sca61t{};   // x, y
  std::array<std::array<int16_t, 3>, kSamplesPerPacket> lis3dhh{};  // x, y, z

  bool operator==(const SamplePacket&) const = default;
};

class WrongLength : public Error {
 public:
  explicit WrongLength(size_t actual);
  size_t actual;
};

class MalformedFrame : public Error {
 public:
  explicit MalformedFrame(const std::string& what);
};

std::array<uint8_t, kPacketSize> encode(const SamplePacket& packet);

/// Total over arbitrary byte sequences: returns a packet or throws
/// WrongLength / MalformedFrame.
SamplePacket decode(std::span<const uint8_t> bytes);

/// Minimum sustained transmission rate for `packet_size_bytes` every
/// `period_s` seconds, in bits per second. period_s must be positive.
double min_bitrate_bps(size_t packet_size_bytes, double period_s);

/// Extracts one channel from a packet stream as a physical-unit series.
/// Packets must be seq/timestamp contiguous.
AccelSeries series_from_packets(std::span<const SamplePacket> packets, SensorChannel channel);

}  // namespace bcg
