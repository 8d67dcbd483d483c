#pragma once

#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <thread>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <chor/choreo.hpp>
#include <chor/network.hpp>

namespace chor {

/// Centralized reference semantics: executes all parties' effects in
/// one process, in program order.
template <class T>
T run_choreo(const LocationList& census, const Choreo<T>& c, LocalEnvProvider& locals,
             std::uint64_t* logical_sends = nullptr) {
  CentralRunCtx ctx{locals};
  CentralEnv env{census, ctx};
  T result = detail::run_central_loop(env, c);
  if (logical_sends) *logical_sends = ctx.logical_sends;
  return result;
}

namespace detail {

/// The value a non-participant's projection returns. Only shapes that
/// can be empty at an outsider are projectable from outside the census.
template <class T>
struct OutsiderResult {
  static T value() {
    if constexpr (std::is_default_constructible_v<T>) {
      return T{};
    } else {
      throw census_error("cannot project this result type for a non-census party");
    }
  }
};

template <class A>
struct OutsiderResult<Located<A>> {
  static Located<A> value() { return Located<A>::absent(LocationList{}); }
};

template <class A>
struct OutsiderResult<Faceted<A>> {
  static Faceted<A> value() { return Faceted<A>(LocationList{}); }
};

/// A network program that advances a projected choreography one
/// census-level effect at a time.
template <class T>
struct ProjectionNode final : NetworkNode<T> {
  LocationList census;
  Choreo<T> program;

  ProjectionNode(LocationList ps, Choreo<T> c)
      : census(std::move(ps)), program(std::move(c)) {}

  std::variant<T, Network<T>> step(NetEnv& env) const override {
    ProjEnv proj{census, env.self, env};
    auto r = program.node().step_proj(proj);
    if (std::holds_alternative<T>(r)) return std::move(std::get<T>(r));
    return Network<T>(
        std::make_shared<ProjectionNode>(census, std::move(std::get<Choreo<T>>(r))));
  }
};

}  // namespace detail

/// Endpoint projection: extract one party's network program from a
/// choreography. Total for constructible choreographies; a party
/// outside the census projects to the pure no-op program.
template <class T>
Network<T> epp(const LocationList& census, const Choreo<T>& c, const LocationId& target) {
  if (!census.contains(target)) return net::pure(detail::OutsiderResult<T>::value());
  return Network<T>(std::make_shared<detail::ProjectionNode<T>>(census, c));
}

/// The outcome of one party's projected execution.
template <class T>
struct PartyOutcome {
  std::optional<T> result;
  std::exception_ptr error;

  bool ok() const { return !error; }

  const T& value() const {
    if (error) std::rethrow_exception(error);
    return *result;
  }
};

/// Projects the choreography for every census member and runs all of
/// them concurrently, one executor per party. Per-party failures are
/// captured, not propagated.
template <class T>
std::map<LocationId, PartyOutcome<T>> run_projected_all(
    const LocationList& census, const Choreo<T>& c,
    const std::function<Backend&(const LocationId&)>& backend_for, LocalEnvProvider& locals,
    TraceSink* trace = nullptr) {
  std::map<LocationId, PartyOutcome<T>> outcomes;
  for (const auto& p : census) outcomes.emplace(p, PartyOutcome<T>{});
  std::vector<std::thread> threads;
  threads.reserve(census.size());
  for (const auto& p : census) {
    threads.emplace_back([&, p] {
      auto& outcome = outcomes.at(p);
      try {
        outcome.result = run_network(backend_for(p), p, epp(census, c, p), locals.at(p), trace);
      } catch (...) {
        outcome.error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  return outcomes;
}

/// Convenience overload over a shared backend (e.g. in-memory).
template <class T>
std::map<LocationId, PartyOutcome<T>> run_projected_all(const LocationList& census,
                                                        const Choreo<T>& c, Backend& backend,
                                                        LocalEnvProvider& locals,
                                                        TraceSink* trace = nullptr) {
  return run_projected_all<T>(
      census, c, [&backend](const LocationId&) -> Backend& { return backend; }, locals, trace);
}

}  // namespace chor
