#pragma once

#include <functional>
#include <memory>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <chor/codec.hpp>
#include <chor/error.hpp>
#include <chor/local.hpp>
#include <chor/locations.hpp>
#include <chor/trace.hpp>
#include <chor/transport.hpp>

namespace chor {

/// Execution context of one party's network program.
struct NetEnv {
  LocationId self;
  Backend& backend;
  LocalEnv& local;
  TraceSink* trace = nullptr;

  void send(const LocationId& to, const std::string& payload) {
    if (trace) trace->record(self, NetEvent::Kind::Send, to, payload);
    backend.send(self, to, payload);
  }

  std::string recv(const LocationId& from) {
    std::string payload = backend.recv(self, from);
    if (trace) trace->record(self, NetEvent::Kind::Recv, from, payload);
    return payload;
  }
};

template <class T>
class Network;

/// One node of a network program: pure result, local run, send, recv,
/// or a bind chaining two programs.
template <class T>
struct NetworkNode {
  virtual ~NetworkNode() = default;
  /// Performs at most one effect; either finishes with a T or yields
  /// the rest of the program.
  virtual std::variant<T, Network<T>> step(NetEnv& env) const = 0;
};

/// A per-party effect-tree program over local runs, sends, and
/// receives. Produced by endpoint projection or built by hand.
template <class T>
class Network {
 public:
  using value_type = T;
  explicit Network(std::shared_ptr<const NetworkNode<T>> node) : node_(std::move(node)) {}
  const NetworkNode<T>& node() const { return *node_; }

 private:
  std::shared_ptr<const NetworkNode<T>> node_;
};

namespace detail {

template <class T>
struct NetPureNode final : NetworkNode<T> {
  T value;
  explicit NetPureNode(T v) : value(std::move(v)) {}
  std::variant<T, Network<T>> step(NetEnv&) const override { return value; }
};

template <class A>
struct NetRunNode final : NetworkNode<A> {
  LocalProgram<A> program;
  explicit NetRunNode(LocalProgram<A> p) : program(std::move(p)) {}
  std::variant<A, Network<A>> step(NetEnv& env) const override {
    return program(env.local);
  }
};

struct NetSendNode final : NetworkNode<Unit> {
  std::string payload;
  std::vector<LocationId> recipients;
  NetSendNode(std::string p, std::vector<LocationId> rs)
      : payload(std::move(p)), recipients(std::move(rs)) {}
  std::variant<Unit, Network<Unit>> step(NetEnv& env) const override {
    for (const auto& r : recipients) env.send(r, payload);
    return Unit{};
  }
};

template <class A>
struct NetRecvNode final : NetworkNode<A> {
  LocationId sender;
  explicit NetRecvNode(LocationId s) : sender(std::move(s)) {}
  std::variant<A, Network<A>> step(NetEnv& env) const override {
    return decode<A>(env.recv(sender));
  }
};

template <class A, class T>
struct NetBindNode final : NetworkNode<T> {
  Network<A> first;
  std::function<Network<T>(A)> cont;
  NetBindNode(Network<A> m, std::function<Network<T>(A)> k)
      : first(std::move(m)), cont(std::move(k)) {}
  std::variant<T, Network<T>> step(NetEnv& env) const override {
    auto r = first.node().step(env);
    if (std::holds_alternative<A>(r)) return cont(std::move(std::get<A>(r)));
    return Network<T>(std::make_shared<NetBindNode>(std::move(std::get<Network<A>>(r)), cont));
  }
};

}  // namespace detail

namespace net {

template <class T>
Network<std::decay_t<T>> pure(T&& value) {
  using V = std::decay_t<T>;
  return Network<V>(std::make_shared<detail::NetPureNode<V>>(std::forward<T>(value)));
}

template <class A>
Network<A> run(LocalProgram<A> program) {
  return Network<A>(std::make_shared<detail::NetRunNode<A>>(std::move(program)));
}

/// Multicast one encoded value; n recipients means n unicast frames in
/// recipient-list order.
template <class A>
Network<Unit> send(const A& value, std::vector<LocationId> recipients) {
  return Network<Unit>(
      std::make_shared<detail::NetSendNode>(encode(value), std::move(recipients)));
}

inline Network<Unit> send_raw(std::string payload, std::vector<LocationId> recipients) {
  return Network<Unit>(
      std::make_shared<detail::NetSendNode>(std::move(payload), std::move(recipients)));
}

template <class A>
Network<A> recv(LocationId sender) {
  return Network<A>(std::make_shared<detail::NetRecvNode<A>>(std::move(sender)));
}

template <class A, class F, class NT = std::invoke_result_t<F, A>>
NT bind(Network<A> m, F k) {
  using T = typename NT::value_type;
  return NT(std::make_shared<detail::NetBindNode<A, T>>(
      std::move(m), std::function<NT(A)>(std::move(k))));
}

}  // namespace net

/// Executes one party's network program to completion.
template <class T>
T run_network(Backend& backend, const LocationId& self, Network<T> program,
              LocalEnv& local, TraceSink* trace = nullptr) {
  NetEnv env{self, backend, local, trace};
  Network<T> current = std::move(program);
  for (;;) {
    auto r = current.node().step(env);
    if (std::holds_alternative<T>(r)) return std::move(std::get<T>(r));
    current = std::move(std::get<Network<T>>(r));
  }
}

}  // namespace chor
