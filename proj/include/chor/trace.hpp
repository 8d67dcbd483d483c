#pragma once

#include <cstddef>
#include <mutex>
#include <string>
#include <vector>

#include <chor/locations.hpp>

namespace chor {

/// A network event observed at one party while running a projected
/// program. Sequence numbers are global across the run.
struct NetEvent {
  enum class Kind { Send, Recv };
  std::size_t seq;
  LocationId party;
  Kind kind;
  LocationId peer;
  std::string payload;
};

/// Thread-safe collector of network events for one run.
class TraceSink {
 public:
  void record(const LocationId& party, NetEvent::Kind kind, const LocationId& peer,
              const std::string& payload) {
    std::lock_guard<std::mutex> lock(mu_);
    events_.push_back({events_.size(), party, kind, peer, payload});
  }

  std::vector<NetEvent> snapshot() const {
    std::lock_guard<std::mutex> lock(mu_);
    return events_;
  }

  std::vector<NetEvent> for_party(const LocationId& party) const {
    std::vector<NetEvent> out;
    for (const auto& e : snapshot())
      if (e.party == party) out.push_back(e);
    return out;
  }

  std::size_t count(NetEvent::Kind kind) const {
    std::size_t n = 0;
    for (const auto& e : snapshot())
      if (e.kind == kind) ++n;
    return n;
  }

  std::size_t send_count() const { return count(NetEvent::Kind::Send); }
  std::size_t recv_count() const { return count(NetEvent::Kind::Recv); }

  void clear() {
    std::lock_guard<std::mutex> lock(mu_);
    events_.clear();
  }

 private:
  mutable std::mutex mu_;
  std::vector<NetEvent> events_;
};

}  // namespace chor
