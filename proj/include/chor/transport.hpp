#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <utility>

#include <chor/error.hpp>
#include <chor/locations.hpp>

namespace chor {

/// A phonebook plus send/receive capabilities. Implementations must
/// deliver per ordered (sender, receiver) pair in FIFO order with no
/// loss or duplication within a run, and must be safe for concurrent
/// use by all in-process parties.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual void send(const LocationId& from, const LocationId& to, std::string payload) = 0;
  /// Blocks for the next undelivered message from `from` to `self`.
  virtual std::string recv(const LocationId& self, const LocationId& from) = 0;
};

/// All parties in one process; queues are per ordered pair.
class InMemoryBackend : public Backend {
 public:
  explicit InMemoryBackend(LocationList census,
                           std::chrono::milliseconds timeout = std::chrono::seconds(30))
      : census_(std::move(census)), timeout_(timeout) {}

  void send(const LocationId& from, const LocationId& to, std::string payload) override {
    check_party(from);
    check_party(to);
    {
      std::lock_guard<std::mutex> lock(mu_);
      queues_[{from, to}].push_back(std::move(payload));
    }
    cv_.notify_all();
  }

  std::string recv(const LocationId& self, const LocationId& from) override {
    check_party(self);
    check_party(from);
    std::unique_lock<std::mutex> lock(mu_);
    auto& q = queues_[{from, self}];
    if (!cv_.wait_for(lock, timeout_, [&] { return !q.empty(); }))
      throw timeout_error(self + ": timed out waiting for a message from " + from);
    std::string payload = std::move(q.front());
    q.pop_front();
    return payload;
  }

 private:
  void check_party(const LocationId& p) const {
    if (!census_.contains(p)) throw transport_error("unknown party: " + p);
  }

  LocationList census_;
  std::chrono::milliseconds timeout_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::pair<LocationId, LocationId>, std::deque<std::string>> queues_;
};

/// Deployment configuration: one "name = host:port" line per party,
/// plus an optional "timeout = N" (seconds). '#' starts a comment.
struct NetworkConfig {
  struct Endpoint {
    std::string host;
    std::uint16_t port = 0;
  };

  std::map<LocationId, Endpoint> endpoints;
  double timeout_seconds = 30.0;

  const Endpoint& endpoint_of(const LocationId& party) const {
    auto it = endpoints.find(party);
    if (it == endpoints.end())
      throw transport_error("network config is missing peer: " + party);
    return it->second;
  }

  std::chrono::milliseconds timeout() const {
    return std::chrono::milliseconds(static_cast<std::int64_t>(timeout_seconds * 1000));
  }

  static NetworkConfig parse(std::istream& in) {
    NetworkConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos)
        throw transport_error("config line " + std::to_string(lineno) + ": expected '='");
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (key.empty() || value.empty())
        throw transport_error("config line " + std::to_string(lineno) + ": empty key or value");
      if (key == "timeout") {
        cfg.timeout_seconds = std::stod(value);
        continue;
      }
      auto colon = value.rfind(':');
      if (colon == std::string::npos)
        throw transport_error("config line " + std::to_string(lineno) +
                              ": expected host:port for " + key);
      Endpoint ep;
      ep.host = value.substr(0, colon);
      int port = std::stoi(value.substr(colon + 1));
      if (port <= 0 || port > 65535)
        throw transport_error("config line " + std::to_string(lineno) + ": bad port");
      ep.port = static_cast<std::uint16_t>(port);
      cfg.endpoints[key] = ep;
    }
    return cfg;
  }

  static NetworkConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  static NetworkConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw transport_error("cannot open network config: " + path);
    return parse(in);
  }

 private:
  static std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
  }
};

}  // namespace chor
