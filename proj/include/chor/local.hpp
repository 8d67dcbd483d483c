#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <chor/codec.hpp>
#include <chor/error.hpp>
#include <chor/locations.hpp>

namespace chor {

/// The local-effect language available to each party: line-oriented
/// console I/O plus a per-party source of randomness.
class LocalEnv {
 public:
  virtual ~LocalEnv() = default;
  virtual std::string get_input(const std::string& prompt) = 0;
  virtual void put_output(const std::string& label, const std::string& value) = 0;
  virtual void put_note(const std::string& text) = 0;
  virtual std::uint64_t random_bits() = 0;
};

/// A party-local effectful computation.
template <class A>
using LocalProgram = std::function<A(LocalEnv&)>;

template <class T>
T get_input_as(LocalEnv& env, const std::string& prompt) {
  for (;;) {
    std::string line = env.get_input(prompt);
    try {
      return decode<T>(line);
    } catch (const codec_error&) {
      env.put_note("malformed input, try again");
    }
  }
}

template <class T>
void put_output_as(LocalEnv& env, const std::string& label, const T& value) {
  env.put_output(label, encode(value));
}

inline bool random_bool(LocalEnv& env) { return (env.random_bits() & 1u) != 0; }

/// Uniform draw in [lo, hi], inclusive.
inline std::uint64_t random_range(LocalEnv& env, std::uint64_t lo, std::uint64_t hi) {
  std::uint64_t span = hi - lo + 1;
  std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % span);
  for (;;) {
    std::uint64_t bits = env.random_bits();
    if (bits < limit || limit == 0) return lo + bits % span;
  }
}

/// Stable per-party seed derivation (FNV-1a over the name, mixed with
/// the global seed) so that centralized and projected runs draw
/// identical per-party sequences.
inline std::uint64_t party_seed(std::uint64_t global_seed, const LocationId& party) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : party) {
    h ^= c;
    h *= 1099511628211ull;
  }
  h ^= global_seed + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

/// One observable local effect; traces of these are compared between
/// centralized and projected executions.
struct LocalEvent {
  enum class Kind { Input, Output, Note, Random };
  Kind kind;
  std::string a;  // prompt / label / note text / bits as decimal
  std::string b;  // consumed line / output value

  friend bool operator==(const LocalEvent& x, const LocalEvent& y) {
    return x.kind == y.kind && x.a == y.a && x.b == y.b;
  }
};

/// Headless environment: inputs come from a script, outputs and every
/// other local effect are recorded. Randomness is seeded.
class ScriptedLocalEnv : public LocalEnv {
 public:
  ScriptedLocalEnv(LocationId party, std::uint64_t seed,
                   std::vector<std::string> script = {})
      : party_(std::move(party)),
        script_(script.begin(), script.end()),
        rng_(seed) {}

  std::string get_input(const std::string& prompt) override {
    if (script_.empty())
      throw script_error(party_ + ": script exhausted at prompt \"" + prompt + "\"");
    std::string line = script_.front();
    script_.pop_front();
    events_.push_back({LocalEvent::Kind::Input, prompt, line});
    return line;
  }

  void put_output(const std::string& label, const std::string& value) override {
    events_.push_back({LocalEvent::Kind::Output, label, value});
  }

  void put_note(const std::string& text) override {
    events_.push_back({LocalEvent::Kind::Note, text, ""});
  }

  std::uint64_t random_bits() override {
    std::uint64_t bits = rng_();
    events_.push_back({LocalEvent::Kind::Random, std::to_string(bits), ""});
    return bits;
  }

  const LocationId& party() const { return party_; }
  const std::vector<LocalEvent>& events() const { return events_; }

  /// Output and note events only, in order; the party's visible transcript.
  std::vector<LocalEvent> outputs() const {
    std::vector<LocalEvent> out;
    for (const auto& e : events_)
      if (e.kind == LocalEvent::Kind::Output || e.kind == LocalEvent::Kind::Note)
        out.push_back(e);
    return out;
  }

 private:
  LocationId party_;
  std::deque<std::string> script_;
  std::vector<LocalEvent> events_;
  std::mt19937_64 rng_;
};

/// Interactive environment for running one role in a terminal.
class ConsoleLocalEnv : public LocalEnv {
 public:
  ConsoleLocalEnv(LocationId party, std::uint64_t seed)
      : party_(std::move(party)), rng_(seed) {}

  std::string get_input(const std::string& prompt) override {
    std::cout << "[" << party_ << "] " << prompt << " " << std::flush;
    std::string line;
    if (!std::getline(std::cin, line))
      throw script_error(party_ + ": end of input at prompt \"" + prompt + "\"");
    return line;
  }

  void put_output(const std::string& label, const std::string& value) override {
    std::cout << "[" << party_ << "] " << label << " " << value << std::endl;
  }

  void put_note(const std::string& text) override {
    std::cout << "[" << party_ << "] " << text << std::endl;
  }

  std::uint64_t random_bits() override { return rng_(); }

 private:
  LocationId party_;
  std::mt19937_64 rng_;
};

/// Resolver from party to its local environment. Must be populated
/// before any concurrent executors start; lookups are read-only.
class LocalEnvProvider {
 public:
  virtual ~LocalEnvProvider() = default;
  virtual LocalEnv& at(const LocationId& party) = 0;
};

/// A full set of scripted environments for one run, one per census
/// member, each seeded from the global seed and its party name.
class ScriptedWorld : public LocalEnvProvider {
 public:
  ScriptedWorld(const LocationList& census, std::uint64_t seed,
                std::map<LocationId, std::vector<std::string>> scripts = {}) {
    for (const auto& p : census) {
      auto it = scripts.find(p);
      std::vector<std::string> script =
          it == scripts.end() ? std::vector<std::string>{} : it->second;
      envs_.emplace(p, std::make_unique<ScriptedLocalEnv>(p, party_seed(seed, p),
                                                          std::move(script)));
    }
  }

  LocalEnv& at(const LocationId& party) override { return scripted(party); }

  ScriptedLocalEnv& scripted(const LocationId& party) {
    auto it = envs_.find(party);
    if (it == envs_.end()) throw error("no local environment for party " + party);
    return *it->second;
  }

 private:
  std::map<LocationId, std::unique_ptr<ScriptedLocalEnv>> envs_;
};

}  // namespace chor
