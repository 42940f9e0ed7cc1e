#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "bcg/calibration.hpp"
#include "bcg/packet.hpp"
#include "bcg/pipeline.hpp"

namespace bcg {

class NetworkError : public Error {
 public:
  explicit NetworkError(const std::string& what) : Error(what) {}
};

/// TCP ingestion service. Each connection opens with an ASCII hello line
/// `BCG1 <sensor_id>\n` and then streams back-to-back 1046-byte packets.
/// Every session runs its own pipeline and appends one JSONL record per
/// packet to `<storage_dir>/<sensor_id>-<start_ms>.jsonl`. Protocol faults
/// are session-fatal only; other sessions are unaffected.
class Server {
 public:
  struct Options {
    std::string bind_host = "127.0.0.1";
    uint16_t port = 0;  // 0 = ephemeral
    std::filesystem::path storage_dir;
    AnalysisConfig analysis;
    CalibrationStore calibrations;
  };

  struct Stats {
    uint64_t sessions_opened = 0;
    uint64_t sessions_active = 0;
    uint64_t sessions_failed = 0;  // closed on protocol/storage error
    uint64_t records_written = 0;
  };

  explicit Server(Options options);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts the accept loop. Throws NetworkError on bind failure
  /// and Error if the storage directory is unusable.
  void start();

  /// Stops accepting, waits for in-flight sessions to drain.
  void stop();

  uint16_t port() const { return port_; }
  Stats stats() const;

 private:
  void accept_loop();
  void run_session(int fd, const std::string& peer);

  Options options_;
  int listen_fd_ = -1;
  uint16_t port_ = 0;
  std::thread accept_thread_;
  std::atomic<bool> stopping_{false};
  mutable std::mutex mutex_;
  std::vector<std::thread> sessions_;
  Stats stats_;
};

/// Emulator-side client: sends the hello line and then the packets, pacing
/// one packet per second unless `fast`. Returns the number of packets sent;
/// throws NetworkError if the connection fails.
struct EmulateOptions {
  std::string host = "127.0.0.1";
  uint16_t port = 0;
  std::string sensor_id;
  bool fast = false;
};

size_t emulate_stream(const EmulateOptions& options, std::span<const SamplePacket> packets);

}  // namespace bcg
