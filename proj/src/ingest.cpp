#include "bcg/ingest.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cctype>
#include <chrono>
#include <cstring>
#include <fstream>
#include <iostream>

namespace bcg {
namespace {

int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

bool read_exact(int fd, uint8_t* buf, size_t len) {
  size_t got = 0;
  while (got < len) {
    ssize_t r = ::recv(fd, buf + got, len - got, 0);
    if (r == 0) return false;  // peer closed
    if (r < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    got += static_cast<size_t>(r);
  }
  return true;
}

bool write_all(int fd, const uint8_t* buf, size_t len) {
  size_t sent = 0;
  while (sent < len) {
    ssize_t r = ::send(fd, buf + sent, len - sent, MSG_NOSIGNAL);
    if (r < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    sent += static_cast<size_t>(r);
  }
  return true;
}

constexpr size_t kMaxHello = 96;
constexpr size_t kMaxSensorId = 64;

bool valid_sensor_id(const std::string& id) {
  if (id.empty() || id.size() > kMaxSensorId) return false;
  for (char c : id) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) {
      return false;
    }
  }
  return true;
}

/// Reads up to '\n'; empty return means a protocol violation or EOF.
std::string read_hello_line(int fd) {
  std::string line;
  char c = 0;
  while (line.size() < kMaxHello) {
    ssize_t r = ::recv(fd, &c, 1, 0);
    if (r <= 0) {
      if (r < 0 && errno == EINTR) continue;
      return {};
    }
    if (c == '\n') return line;
    line.push_back(c);
  }
  return {};  // hello line too long
}

}  // namespace

Server::Server(Options options) : options_(std::move(options)) {}

Server::~Server() { stop(); }

void Server::start() {
  std::error_code ec;
  std::filesystem::create_directories(options_.storage_dir, ec);
  if (ec || !std::filesystem::is_directory(options_.storage_dir)) {
    throw Error("storage dir unusable: " + options_.storage_dir.string());
  }

  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw NetworkError("socket: " + std::string(strerror(errno)));
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(options_.port);
  if (::inet_pton(AF_INET, options_.bind_host.c_str(), &addr.sin_addr) != 1) {
    throw NetworkError("bad bind address: " + options_.bind_host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    const std::string err = strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw NetworkError("bind " + options_.bind_host + ":" + std::to_string(options_.port) +
                       ": " + err);
  }
  if (::listen(listen_fd_, 128) != 0) {
    throw NetworkError("listen: " + std::string(strerror(errno)));
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);

  accept_thread_ = std::thread([this] { accept_loop(); });
}

void Server::stop() {
  bool expected = false;
  if (!stopping_.compare_exchange_strong(expected, true)) {
    return;
  }
  if (listen_fd_ >= 0) {
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
  if (accept_thread_.joinable()) accept_thread_.join();
  std::vector<std::thread> sessions;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    sessions.swap(sessions_);
  }
  for (std::thread& t : sessions) {
    if (t.joinable()) t.join();
  }
}

Server::Stats Server::stats() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return stats_;
}

void Server::accept_loop() {
  while (!stopping_) {
    sockaddr_in peer{};
    socklen_t len = sizeof(peer);
    int fd = ::accept(listen_fd_, reinterpret_cast<sockaddr*>(&peer), &len);
    if (fd < 0) {
      if (stopping_) break;
      if (errno == EINTR) continue;
      break;
    }
    char buf[INET_ADDRSTRLEN] = {};
    ::inet_ntop(AF_INET, &peer.sin_addr, buf, sizeof(buf));
    std::string peer_str = std::string(buf) + ":" + std::to_string(ntohs(peer.sin_port));
    std::lock_guard<std::mutex> lock(mutex_);
    ++stats_.sessions_opened;
    sessions_.emplace_back([this, fd, peer_str] { run_session(fd, peer_str); });
  }
}

void Server::run_session(int fd, const std::string& peer) {
  auto fail = [&](const std::string& reason) {
    std::cerr << "[ingest] session " << peer << " closed: " << reason << '\n';
    std::lock_guard<std::mutex> lock(mutex_);
    ++stats_.sessions_failed;
  };

  const std::string hello = read_hello_line(fd);
  std::string sensor_id;
  if (hello.rfind("BCG1 ", 0) == 0) sensor_id = hello.substr(5);
  if (!sensor_id.empty() && sensor_id.back() == '\r') sensor_id.pop_back();
  if (hello.rfind("BCG1 ", 0) != 0 || !valid_sensor_id(sensor_id)) {
    fail("malformed hello");
    ::close(fd);
    return;
  }

  const int64_t started = now_ms();
  const auto path =
      options_.storage_dir / (sensor_id + "-" + std::to_string(started) + ".jsonl");
  std::ofstream out(path, std::ios::app);
  if (!out) {
    fail("cannot open session file " + path.string());
    ::close(fd);
    return;
  }

  SessionPipeline pipeline(options_.analysis, options_.calibrations.find(sensor_id));
  std::array<uint8_t, kPacketSize> buf;
  uint64_t written = 0;
  while (read_exact(fd, buf.data(), buf.size())) {
    SecondRecord record;
    try {
      record = pipeline.on_packet(decode(buf));
    } catch (const Error& e) {
      fail(std::string("undecodable packet: ") + e.what());
      ::close(fd);
      std::lock_guard<std::mutex> lock(mutex_);
      stats_.records_written += written;
      return;
    }
    out << "{\"sensor_id\":\"" << sensor_id << "\",\"arrival_ms\":" << now_ms() << ","
        << record.to_json().substr(1) << '\n';
    out.flush();
    if (!out) {
      fail("write failure on " + path.string());
      ::close(fd);
      std::lock_guard<std::mutex> lock(mutex_);
      stats_.records_written += written;
      return;
    }
    ++written;
  }
  ::close(fd);
  std::lock_guard<std::mutex> lock(mutex_);
  stats_.records_written += written;
}

size_t emulate_stream(const EmulateOptions& options, std::span<const SamplePacket> packets) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw NetworkError("socket: " + std::string(strerror(errno)));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(options.port);
  if (::inet_pton(AF_INET, options.host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    throw NetworkError("bad host: " + options.host);
  }
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    const std::string err = strerror(errno);
    ::close(fd);
    throw NetworkError("connect " + options.host + ":" + std::to_string(options.port) + ": " +
                       err);
  }
  const std::string hello = "BCG1 " + options.sensor_id + "\n";
  if (!write_all(fd, reinterpret_cast<const uint8_t*>(hello.data()), hello.size())) {
    ::close(fd);
    throw NetworkError("hello write failed");
  }
  size_t sent = 0;
  for (const SamplePacket& packet : packets) {
    const auto bytes = encode(packet);
    if (!write_all(fd, bytes.data(), bytes.size())) {
      ::close(fd);
      throw NetworkError("packet write failed after " + std::to_string(sent));
    }
    ++sent;
    if (!options.fast && sent < packets.size()) {
      std::this_thread::sleep_for(std::chrono::seconds(1));
    }
  }
  ::close(fd);
  return sent;
}

}  // namespace bcg
