#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "bcg/packet.hpp"
#include "bcg/types.hpp"

namespace bcg {

/// An offline recording: either a CSV of per-channel samples
/// (header `t_ms,sensor,axis,mg`) or a packet dump (`.bcg`, concatenated
/// 1046-byte packets). Packet dumps also retain the decoded packets so the
/// embedded SCA10H frames stay available downstream.
struct SignalFile {
  std::vector<AccelSeries> channels;
  std::vector<SamplePacket> packets;  // empty for CSV inputs

  bool has_packets() const { return !packets.empty(); }
  const AccelSeries* find_channel(SensorChannel ch) const;
};

/// Dispatches on the `.bcg` extension; anything else is read as CSV.
SignalFile read_signal_file(const std::filesystem::path& path);

std::vector<SamplePacket> read_packet_dump(const std::filesystem::path& path);
void write_packet_dump(std::span<const SamplePacket> packets, const std::filesystem::path& path);

void write_signal_csv(std::span<const AccelSeries> channels, std::ostream& out);
void write_signal_csv(std::span<const AccelSeries> channels, const std::filesystem::path& path);
SignalFile read_signal_csv(std::istream& in);

}  // namespace bcg
