#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <chor/choreo.hpp>

namespace chor {

struct Request {
  enum class Kind { Put, Get, Stop };
  Kind kind = Kind::Stop;
  std::string key;
  std::string value;

  static Request put(std::string k, std::string v) {
    return {Kind::Put, std::move(k), std::move(v)};
  }
  static Request get(std::string k) { return {Kind::Get, std::move(k), ""}; }
  static Request stop() { return {}; }

  friend bool operator==(const Request& a, const Request& b) {
    return a.kind == b.kind && a.key == b.key && a.value == b.value;
  }
};

inline void to_json(nlohmann::json& j, const Request& r) {
  switch (r.kind) {
    case Request::Kind::Put: j = {{"t", "put"}, {"k", r.key}, {"v", r.value}}; break;
    case Request::Kind::Get: j = {{"t", "get"}, {"k", r.key}}; break;
    case Request::Kind::Stop: j = {{"t", "stop"}}; break;
  }
}

inline void from_json(const nlohmann::json& j, Request& r) {
  auto t = j.at("t").get<std::string>();
  if (t == "put") r = Request::put(j.at("k").get<std::string>(), j.at("v").get<std::string>());
  else if (t == "get") r = Request::get(j.at("k").get<std::string>());
  else if (t == "stop") r = Request::stop();
  else throw codec_error("unknown request tag: " + t);
}

struct Response {
  enum class Kind { Found, NotFound, Stopped, Desynchronization };
  Kind kind = Kind::NotFound;
  std::string value;                // for Found
  std::vector<Response> conflicts;  // for Desynchronization

  static Response found(std::string v) { return {Kind::Found, std::move(v), {}}; }
  static Response not_found() { return {}; }
  static Response stopped() { return {Kind::Stopped, "", {}}; }
  static Response desynchronization(std::vector<Response> rs) {
    return {Kind::Desynchronization, "", std::move(rs)};
  }

  friend bool operator==(const Response& a, const Response& b) {
    return a.kind == b.kind && a.value == b.value && a.conflicts == b.conflicts;
  }
};

inline void to_json(nlohmann::json& j, const Response& r) {
  switch (r.kind) {
    case Response::Kind::Found: j = {{"t", "found"}, {"v", r.value}}; break;
    case Response::Kind::NotFound: j = {{"t", "notfound"}}; break;
    case Response::Kind::Stopped: j = {{"t", "stopped"}}; break;
    case Response::Kind::Desynchronization:
      j = {{"t", "desync"}, {"rs", r.conflicts}};
      break;
  }
}

inline void from_json(const nlohmann::json& j, Response& r) {
  auto t = j.at("t").get<std::string>();
  if (t == "found") r = Response::found(j.at("v").get<std::string>());
  else if (t == "notfound") r = Response::not_found();
  else if (t == "stopped") r = Response::stopped();
  else if (t == "desync")
    r = Response::desynchronization(j.at("rs").get<std::vector<Response>>());
  else throw codec_error("unknown response tag: " + t);
}

using StoreState = std::map<std::string, std::string>;
using StoreRef = std::shared_ptr<StoreState>;

inline Response mlookup(const std::string& key, const StoreState& state) {
  auto it = state.find(key);
  if (it == state.end()) return Response::not_found();
  return Response::found(it->second);
}

/// PUT returns the old stored value; GET returns whatever was stored.
inline Response handle_request(StoreState& state, const Request& req) {
  switch (req.kind) {
    case Request::Kind::Put: {
      Response old = mlookup(req.key, state);
      state[req.key] = req.value;
      return old;
    }
    case Request::Kind::Get:
      return mlookup(req.key, state);
    case Request::Kind::Stop:
      return Response::stopped();
  }
  return Response::not_found();  // unreachable
}

/// How a key-value store distributes its state: a primary that receives
/// requests, a setup choreography producing the rigging, and a handler
/// that services one request census-wide. The handler's Response is
/// broadcast so everyone can decide whether to keep looping.
template <class Rigging>
struct ReplicationStrategy {
  MemberWitness primary;  // in the census
  std::function<Choreo<Rigging>()> setup;
  std::function<Choreo<Response>(const Rigging&, const MemberWitness& primary_in_owners,
                                 const Located<Request>&)>
      handle;
};

/// First-occurrence-order duplicate elimination.
inline std::vector<Response> nub(const std::vector<Response>& rs) {
  std::vector<Response> out;
  for (const auto& r : rs)
    if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
  return out;
}

/// Replication across the primary plus any number of backups: the
/// request goes to every server, each applies it to its own store, and
/// the primary collates the responses — agreement yields that response,
/// anything else reports desynchronization.
inline ReplicationStrategy<Faceted<StoreRef>> nary_replication_strategy(
    const MemberWitness& primary, const SubsetWitness& backups) {
  const LocationList& census = primary.context();
  auto servers = cons(primary, backups);
  return ReplicationStrategy<Faceted<StoreRef>>{
      primary,
      [servers]() {
        return parallel0(servers, LocalProgram<StoreRef>([](LocalEnv&) {
                           return std::make_shared<StoreState>();
                         }));
      },
      [census, primary, servers](const Faceted<StoreRef>& state_ref,
                                 const MemberWitness& p_has, const Located<Request>& request) {
        return bind(
            send_to(primary, p_has, request, servers),
            [census, primary, servers, state_ref](Located<Request> request2) {
              auto local_response =
                  parallel(servers, [state_ref, request2](const MemberWitness& server,
                                                          const UnwrapToken& un, LocalEnv&) {
                    return handle_request(*un(server, state_ref), un(server, request2));
                  });
              return bind(std::move(local_response), [census, primary,
                                                      servers](Faceted<Response> local) {
                auto gathered =
                    fan_in(servers, cons(primary, nobody(census)),
                           [census, primary, servers, local](const MemberWitness& server) {
                             return send_to(server, servers, local,
                                            cons(primary, nobody(census)));
                           });
                return bind(std::move(gathered), [census,
                                                  primary](Located<std::vector<Response>> rs) {
                  LocationList just_primary{primary.subject()};
                  auto collapsed = congruently(
                      cons(primary, nobody(census)), [just_primary, rs](const UnwrapsToken& un) {
                        auto unique = nub(un(refl(just_primary), rs));
                        if (unique.size() == 1) return unique.front();
                        return Response::desynchronization(std::move(unique));
                      });
                  return bind(std::move(collapsed), [census, primary](Located<Response> r) {
                    return broadcast(census, primary, std::move(r));
                  });
                });
              });
            });
      }};
}

/// Prompt for one request; the script/console line is the JSON encoding.
inline Request read_request(LocalEnv& env) { return get_input_as<Request>(env, "Request:"); }

/// The store service loop: the client keeps sending requests to the
/// strategy's primary and printing the responses until one comes back
/// Stopped.
template <class Rigging>
Choreo<Unit> kvs(const ReplicationStrategy<Rigging>& strategy, const MemberWitness& client) {
  const LocationList& census = client.context();
  return bind(strategy.setup(), [strategy, client, census](Rigging rigging) {
    auto go = std::make_shared<std::function<Choreo<Unit>()>>();
    *go = [strategy, client, census, rigging, go]() {
      auto ask = pure_local_then_send(client, LocalProgram<Request>(read_request),
                                      cons(strategy.primary, nobody(census)));
      return bind(std::move(ask), [strategy, client, rigging, go](Located<Request> request) {
        auto handled =
            strategy.handle(rigging, singleton(strategy.primary.subject()), request);
        return bind(std::move(handled), [client, go](Response response) -> Choreo<Unit> {
          if (response.kind == Response::Kind::Stopped) return pure(Unit{});
          auto report = locally0_(client, LocalProgram<Unit>([response](LocalEnv& env) {
                                    put_output_as(env, "Recieved:", response);
                                    return Unit{};
                                  }));
          return bind(std::move(report), [go](Unit) { return (*go)(); });
        });
      });
    };
    return (*go)();
  });
}

}  // namespace chor
