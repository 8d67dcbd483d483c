#pragma once

#include <arpa/inet.h>
#include <netdb.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <cstring>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <chor/error.hpp>
#include <chor/transport.hpp>

namespace chor {

/// TCP transport for one party. Wire protocol: every logical message is
/// one frame, a 4-byte big-endian length prefix followed by the UTF-8
/// payload. The first frame on each connection is a handshake carrying
/// the sender's location name. Connections are opened lazily, one
/// persistent connection per ordered (sender, receiver) pair.
class TcpBackend : public Backend {
 public:
  TcpBackend(NetworkConfig config, LocationId self,
             std::chrono::milliseconds connect_retry_window = std::chrono::seconds(10))
      : config_(std::move(config)),
        self_(std::move(self)),
        connect_retry_window_(connect_retry_window) {
    const auto& ep = config_.endpoint_of(self_);
    listen_fd_ = open_listener(ep);
    accept_thread_ = std::thread([this] { accept_loop(); });
  }

  TcpBackend(const TcpBackend&) = delete;
  TcpBackend& operator=(const TcpBackend&) = delete;

  ~TcpBackend() override {
    running_ = false;
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    {
      std::lock_guard<std::mutex> lock(conn_mu_);
      for (auto& [_, fd] : outgoing_) ::close(fd);
      outgoing_.clear();
    }
    {
      std::lock_guard<std::mutex> lock(reader_mu_);
      for (int fd : incoming_fds_) ::shutdown(fd, SHUT_RDWR);
    }
    if (accept_thread_.joinable()) accept_thread_.join();
    for (auto& t : reader_threads_)
      if (t.joinable()) t.join();
    {
      std::lock_guard<std::mutex> lock(reader_mu_);
      for (int fd : incoming_fds_) ::close(fd);
    }
  }

  void send(const LocationId& from, const LocationId& to, std::string payload) override {
    if (from != self_)
      throw transport_error("tcp backend for " + self_ + " cannot send as " + from);
    int fd = connection_to(to);
    std::lock_guard<std::mutex> lock(send_mu_);
    write_frame(fd, payload);
  }

  std::string recv(const LocationId& self, const LocationId& from) override {
    if (self != self_)
      throw transport_error("tcp backend for " + self_ + " cannot receive as " + self);
    config_.endpoint_of(from);  // unknown peers fail early
    std::unique_lock<std::mutex> lock(queue_mu_);
    auto& q = queues_[from];
    if (!queue_cv_.wait_for(lock, config_.timeout(), [&] { return !q.empty(); }))
      throw timeout_error(self_ + ": timed out waiting for a message from " + from);
    std::string payload = std::move(q.front());
    q.pop_front();
    return payload;
  }

 private:
  static int open_listener(const NetworkConfig::Endpoint& ep) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE;
    addrinfo* res = nullptr;
    std::string port = std::to_string(ep.port);
    if (::getaddrinfo(ep.host.c_str(), port.c_str(), &hints, &res) != 0)
      throw transport_error("cannot resolve " + ep.host + ":" + port);
    int fd = -1;
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
      fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
      if (fd < 0) continue;
      int one = 1;
      ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
      if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 64) == 0) break;
      ::close(fd);
      fd = -1;
    }
    ::freeaddrinfo(res);
    if (fd < 0)
      throw transport_error("cannot bind/listen on " + ep.host + ":" + port);
    return fd;
  }

  static int connect_once(const NetworkConfig::Endpoint& ep) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    std::string port = std::to_string(ep.port);
    if (::getaddrinfo(ep.host.c_str(), port.c_str(), &hints, &res) != 0) return -1;
    int fd = -1;
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
      fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
      ::close(fd);
      fd = -1;
    }
    ::freeaddrinfo(res);
    return fd;
  }

  int connection_to(const LocationId& to) {
    std::lock_guard<std::mutex> lock(conn_mu_);
    auto it = outgoing_.find(to);
    if (it != outgoing_.end()) return it->second;
    const auto& ep = config_.endpoint_of(to);
    auto deadline = std::chrono::steady_clock::now() + connect_retry_window_;
    int fd = -1;
    for (;;) {
      fd = connect_once(ep);
      if (fd >= 0) break;
      if (std::chrono::steady_clock::now() >= deadline)
        throw transport_error(self_ + ": cannot connect to " + to + " at " + ep.host +
                              ":" + std::to_string(ep.port));
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    write_frame(fd, self_);  // handshake
    outgoing_[to] = fd;
    return fd;
  }

  static void write_all(int fd, const char* data, std::size_t len) {
    while (len > 0) {
      ssize_t n = ::send(fd, data, len, MSG_NOSIGNAL);
      if (n <= 0) throw transport_error("tcp send failed");
      data += n;
      len -= static_cast<std::size_t>(n);
    }
  }

  static bool read_all(int fd, char* data, std::size_t len) {
    while (len > 0) {
      ssize_t n = ::recv(fd, data, len, 0);
      if (n <= 0) return false;
      data += n;
      len -= static_cast<std::size_t>(n);
    }
    return true;
  }

  static void write_frame(int fd, const std::string& payload) {
    std::uint32_t len = htonl(static_cast<std::uint32_t>(payload.size()));
    char header[4];
    std::memcpy(header, &len, 4);
    write_all(fd, header, 4);
    write_all(fd, payload.data(), payload.size());
  }

  static bool read_frame(int fd, std::string& out) {
    char header[4];
    if (!read_all(fd, header, 4)) return false;
    std::uint32_t len;
    std::memcpy(&len, header, 4);
    len = ntohl(len);
    out.assign(len, '\0');
    return len == 0 || read_all(fd, out.data(), len);
  }

  void accept_loop() {
    while (running_) {
      int fd = ::accept(listen_fd_, nullptr, nullptr);
      if (fd < 0) break;
      std::lock_guard<std::mutex> lock(reader_mu_);
      incoming_fds_.push_back(fd);
      reader_threads_.emplace_back([this, fd] { reader_loop(fd); });
    }
  }

  void reader_loop(int fd) {
    std::string sender;
    if (!read_frame(fd, sender)) return;
    std::string payload;
    while (read_frame(fd, payload)) {
      {
        std::lock_guard<std::mutex> lock(queue_mu_);
        queues_[sender].push_back(std::move(payload));
      }
      queue_cv_.notify_all();
      payload.clear();
    }
  }

  NetworkConfig config_;
  LocationId self_;
  std::chrono::milliseconds connect_retry_window_;
  int listen_fd_ = -1;
  std::atomic<bool> running_{true};

  std::mutex conn_mu_;
  std::map<LocationId, int> outgoing_;
  std::mutex send_mu_;

  std::mutex queue_mu_;
  std::condition_variable queue_cv_;
  std::map<LocationId, std::deque<std::string>> queues_;

  std::mutex reader_mu_;
  std::vector<int> incoming_fds_;
  std::vector<std::thread> reader_threads_;

  std::thread accept_thread_;
};

}  // namespace chor
