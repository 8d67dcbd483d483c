#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <chor/codec.hpp>
#include <chor/error.hpp>
#include <chor/local.hpp>
#include <chor/located.hpp>
#include <chor/locations.hpp>
#include <chor/network.hpp>

namespace chor {

template <class T>
class Choreo;

/// State shared by a whole centralized run, across enclaves.
struct CentralRunCtx {
  LocalEnvProvider& locals;
  /// Count of network messages a projected run of the same choreography
  /// would emit: per comm, |recipients| minus the sender if present.
  std::uint64_t logical_sends = 0;
};

/// Centralized interpretation context; the census narrows inside enclaves.
struct CentralEnv {
  LocationList census;
  CentralRunCtx& ctx;
};

/// Projected interpretation context for one party.
struct ProjEnv {
  LocationList census;
  LocationId self;
  NetEnv& net;

  bool participating() const { return census.contains(self); }
};

template <class T>
struct ChoreoNode {
  virtual ~ChoreoNode() = default;
  virtual std::variant<T, Choreo<T>> step_central(CentralEnv& env) const = 0;
  virtual std::variant<T, Choreo<T>> step_proj(ProjEnv& env) const = 0;
};

/// An inspectable effect-tree program over a census: either a pure
/// result or one of seven effect nodes, chained by binds. Immutable and
/// shareable; interpreters never mutate the tree.
template <class T>
class Choreo {
 public:
  using value_type = T;
  explicit Choreo(std::shared_ptr<const ChoreoNode<T>> node) : node_(std::move(node)) {}
  const ChoreoNode<T>& node() const { return *node_; }

 private:
  std::shared_ptr<const ChoreoNode<T>> node_;
};

namespace detail {

template <class T>
T run_central_loop(CentralEnv& env, Choreo<T> c) {
  for (;;) {
    auto r = c.node().step_central(env);
    if (std::holds_alternative<T>(r)) return std::move(std::get<T>(r));
    c = std::move(std::get<Choreo<T>>(r));
  }
}

template <class T>
T run_proj_loop(ProjEnv& env, Choreo<T> c) {
  for (;;) {
    auto r = c.node().step_proj(env);
    if (std::holds_alternative<T>(r)) return std::move(std::get<T>(r));
    c = std::move(std::get<Choreo<T>>(r));
  }
}

inline void check_census(const LocationList& node_census, const LocationList& env_census,
                         const char* what) {
  if (node_census != env_census)
    throw census_error(std::string(what) + ": witness context is not the current census");
}

template <class T>
struct PureNode final : ChoreoNode<T> {
  T value;
  explicit PureNode(T v) : value(std::move(v)) {}
  std::variant<T, Choreo<T>> step_central(CentralEnv&) const override { return value; }
  std::variant<T, Choreo<T>> step_proj(ProjEnv&) const override { return value; }
};

template <class A, class T>
struct BindNode final : ChoreoNode<T> {
  Choreo<A> first;
  std::function<Choreo<T>(A)> cont;
  BindNode(Choreo<A> m, std::function<Choreo<T>(A)> k)
      : first(std::move(m)), cont(std::move(k)) {}

  std::variant<T, Choreo<T>> step_central(CentralEnv& env) const override {
    auto r = first.node().step_central(env);
    if (std::holds_alternative<A>(r)) return cont(std::move(std::get<A>(r)));
    return Choreo<T>(std::make_shared<BindNode>(std::move(std::get<Choreo<A>>(r)), cont));
  }

  std::variant<T, Choreo<T>> step_proj(ProjEnv& env) const override {
    auto r = first.node().step_proj(env);
    if (std::holds_alternative<A>(r)) return cont(std::move(std::get<A>(r)));
    return Choreo<T>(std::make_shared<BindNode>(std::move(std::get<Choreo<A>>(r)), cont));
  }
};

template <class A>
struct ParallelNode final : ChoreoNode<Faceted<A>> {
  SubsetWitness parties;
  std::function<A(const MemberWitness&, const UnwrapToken&, LocalEnv&)> body;

  ParallelNode(SubsetWitness ls,
               std::function<A(const MemberWitness&, const UnwrapToken&, LocalEnv&)> b)
      : parties(std::move(ls)), body(std::move(b)) {}

  std::variant<Faceted<A>, Choreo<Faceted<A>>> step_central(CentralEnv& env) const override {
    check_census(parties.context(), env.census, "parallel");
    Faceted<A> result(parties.subject());
    for (std::size_t i = 0; i < parties.subject().size(); ++i) {
      MemberWitness self(parties.subject(), i);
      UnwrapToken token(self.subject());
      result.set_facet(self.subject(), body(self, token, env.ctx.locals.at(self.subject())));
    }
    return result;
  }

  std::variant<Faceted<A>, Choreo<Faceted<A>>> step_proj(ProjEnv& env) const override {
    check_census(parties.context(), env.census, "parallel");
    Faceted<A> result(parties.subject());
    if (auto idx = parties.subject().index_of(env.self)) {
      MemberWitness self(parties.subject(), *idx);
      UnwrapToken token(env.self);
      result.set_facet(env.self, body(self, token, env.net.local));
    }
    return result;
  }
};

template <class A>
struct CongruentlyNode final : ChoreoNode<Located<A>> {
  SubsetWitness parties;
  std::function<A(const UnwrapsToken&)> body;

  CongruentlyNode(SubsetWitness ls, std::function<A(const UnwrapsToken&)> b)
      : parties(std::move(ls)), body(std::move(b)) {}

  std::variant<Located<A>, Choreo<Located<A>>> step_central(CentralEnv& env) const override {
    check_census(parties.context(), env.census, "congruently");
    UnwrapsToken token(parties.subject());
    return Located<A>::all(parties.subject(), body(token));
  }

  std::variant<Located<A>, Choreo<Located<A>>> step_proj(ProjEnv& env) const override {
    check_census(parties.context(), env.census, "congruently");
    if (!parties.subject().contains(env.self))
      return Located<A>::absent(parties.subject());
    UnwrapsToken token(parties.subject());
    return Located<A>::all(parties.subject(), body(token));
  }
};

template <class A>
struct CommNode final : ChoreoNode<Located<A>> {
  MemberWitness sender;            // in the census
  MemberWitness sender_in_owners;  // in the value's owner list
  std::variant<Located<A>, Faceted<A>> value;
  SubsetWitness recipients;

  CommNode(MemberWitness s, MemberWitness so, std::variant<Located<A>, Faceted<A>> v,
           SubsetWitness rs)
      : sender(std::move(s)),
        sender_in_owners(std::move(so)),
        value(std::move(v)),
        recipients(std::move(rs)) {
    if (sender.subject() != sender_in_owners.subject())
      throw witness_error("comm: ownership witness names a different party than the sender");
    const LocationList& owners = std::holds_alternative<Located<A>>(value)
                                     ? std::get<Located<A>>(value).owners()
                                     : std::get<Faceted<A>>(value).owners();
    if (sender_in_owners.context() != owners)
      throw witness_error("comm: ownership witness context is not the value's owner list");
  }

  const A& sender_payload() const {
    if (std::holds_alternative<Located<A>>(value))
      return std::get<Located<A>>(value).payload();
    return std::get<Faceted<A>>(value).facet(sender.subject());
  }

  std::variant<Located<A>, Choreo<Located<A>>> step_central(CentralEnv& env) const override {
    check_census(sender.context(), env.census, "comm sender");
    check_census(recipients.context(), env.census, "comm recipients");
    for (const auto& r : recipients.subject())
      if (r != sender.subject()) ++env.ctx.logical_sends;
    return Located<A>::all(recipients.subject(), sender_payload());
  }

  std::variant<Located<A>, Choreo<Located<A>>> step_proj(ProjEnv& env) const override {
    check_census(sender.context(), env.census, "comm sender");
    check_census(recipients.context(), env.census, "comm recipients");
    const bool is_sender = env.self == sender.subject();
    const bool is_recipient = recipients.subject().contains(env.self);
    if (is_sender) {
      const A& payload = sender_payload();
      std::string wire = encode(payload);
      // A self-send is delivered locally; only the others get frames.
      for (const auto& r : recipients.subject())
        if (r != env.self) env.net.send(r, wire);
      if (is_recipient) return Located<A>::all(recipients.subject(), payload);
      return Located<A>::absent(recipients.subject());
    }
    if (is_recipient)
      return Located<A>::all(recipients.subject(), decode<A>(env.net.recv(sender.subject())));
    return Located<A>::absent(recipients.subject());
  }
};

template <class A>
struct EnclaveNode final : ChoreoNode<Located<A>> {
  SubsetWitness sub;
  Choreo<A> inner;

  EnclaveNode(SubsetWitness s, Choreo<A> c) : sub(std::move(s)), inner(std::move(c)) {}

  std::variant<Located<A>, Choreo<Located<A>>> step_central(CentralEnv& env) const override {
    check_census(sub.context(), env.census, "enclave");
    CentralEnv inner_env{sub.subject(), env.ctx};
    return Located<A>::all(sub.subject(), run_central_loop(inner_env, inner));
  }

  std::variant<Located<A>, Choreo<Located<A>>> step_proj(ProjEnv& env) const override {
    check_census(sub.context(), env.census, "enclave");
    if (!sub.subject().contains(env.self)) return Located<A>::absent(sub.subject());
    ProjEnv inner_env{sub.subject(), env.self, env.net};
    return Located<A>::all(sub.subject(), run_proj_loop(inner_env, inner));
  }
};

template <class A>
struct NakedNode final : ChoreoNode<A> {
  SubsetWitness census_in_owners;
  Located<A> value;

  NakedNode(SubsetWitness proof, Located<A> v)
      : census_in_owners(std::move(proof)), value(std::move(v)) {
    if (census_in_owners.context() != value.owners())
      throw witness_error("naked: witness context is not the value's owner list");
  }

  std::variant<A, Choreo<A>> step_central(CentralEnv& env) const override {
    check_census(census_in_owners.subject(), env.census, "naked");
    return value.payload();
  }

  std::variant<A, Choreo<A>> step_proj(ProjEnv& env) const override {
    check_census(census_in_owners.subject(), env.census, "naked");
    return value.payload();
  }
};

template <class A>
struct FanOutNode final : ChoreoNode<Faceted<A>> {
  SubsetWitness subjects;
  std::function<Choreo<Located<A>>(const MemberWitness&)> body;

  FanOutNode(SubsetWitness qs, std::function<Choreo<Located<A>>(const MemberWitness&)> b)
      : subjects(std::move(qs)), body(std::move(b)) {}

  static void check_owner(const Located<A>& r, const LocationId& q) {
    if (r.owners() != LocationList{q})
      throw census_error("fanOut: iteration result is not owned exactly by " + q);
  }

  std::variant<Faceted<A>, Choreo<Faceted<A>>> step_central(CentralEnv& env) const override {
    check_census(subjects.context(), env.census, "fanOut");
    Faceted<A> result(subjects.subject());
    for (std::size_t i = 0; i < subjects.subject().size(); ++i) {
      MemberWitness q(subjects.subject(), i);
      Located<A> r = run_central_loop(env, body(q));
      check_owner(r, q.subject());
      result.set_facet(q.subject(), r.payload());
    }
    return result;
  }

  std::variant<Faceted<A>, Choreo<Faceted<A>>> step_proj(ProjEnv& env) const override {
    check_census(subjects.context(), env.census, "fanOut");
    Faceted<A> result(subjects.subject());
    for (std::size_t i = 0; i < subjects.subject().size(); ++i) {
      MemberWitness q(subjects.subject(), i);
      Located<A> r = run_proj_loop(env, body(q));
      check_owner(r, q.subject());
      if (env.self == q.subject()) result.set_facet(env.self, r.payload());
    }
    return result;
  }
};

template <class A>
struct FanInNode final : ChoreoNode<Located<std::vector<A>>> {
  SubsetWitness subjects;
  SubsetWitness recipients;
  std::function<Choreo<Located<A>>(const MemberWitness&)> body;

  FanInNode(SubsetWitness qs, SubsetWitness rs,
            std::function<Choreo<Located<A>>(const MemberWitness&)> b)
      : subjects(std::move(qs)), recipients(std::move(rs)), body(std::move(b)) {}

  void check_owners(const Located<A>& r) const {
    if (r.owners() != recipients.subject())
      throw census_error("fanIn: iteration result is not owned by the recipients");
  }

  std::variant<Located<std::vector<A>>, Choreo<Located<std::vector<A>>>> step_central(
      CentralEnv& env) const override {
    check_census(subjects.context(), env.census, "fanIn");
    check_census(recipients.context(), env.census, "fanIn recipients");
    std::vector<A> collected;
    collected.reserve(subjects.subject().size());
    for (std::size_t i = 0; i < subjects.subject().size(); ++i) {
      MemberWitness q(subjects.subject(), i);
      Located<A> r = run_central_loop(env, body(q));
      check_owners(r);
      collected.push_back(r.payload());
    }
    return Located<std::vector<A>>::all(recipients.subject(), std::move(collected));
  }

  std::variant<Located<std::vector<A>>, Choreo<Located<std::vector<A>>>> step_proj(
      ProjEnv& env) const override {
    check_census(subjects.context(), env.census, "fanIn");
    check_census(recipients.context(), env.census, "fanIn recipients");
    const bool collecting = recipients.subject().contains(env.self);
    std::vector<A> collected;
    for (std::size_t i = 0; i < subjects.subject().size(); ++i) {
      MemberWitness q(subjects.subject(), i);
      Located<A> r = run_proj_loop(env, body(q));
      if (collecting) {
        check_owners(r);
        collected.push_back(r.payload());
      }
    }
    if (!collecting) return Located<std::vector<A>>::absent(recipients.subject());
    return Located<std::vector<A>>::all(recipients.subject(), std::move(collected));
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Construction: pure, bind, and the seven primitives.
// ---------------------------------------------------------------------------

template <class T>
Choreo<std::decay_t<T>> pure(T&& value) {
  using V = std::decay_t<T>;
  return Choreo<V>(std::make_shared<detail::PureNode<V>>(std::forward<T>(value)));
}

template <class A, class F, class CT = std::invoke_result_t<F, A>>
CT bind(Choreo<A> m, F k) {
  using T = typename CT::value_type;
  return CT(std::make_shared<detail::BindNode<A, T>>(
      std::move(m), std::function<CT(A)>(std::move(k))));
}

template <class A, class F, class B = std::decay_t<std::invoke_result_t<F, A>>>
Choreo<B> fmap(Choreo<A> m, F f) {
  return bind(std::move(m), [f = std::move(f)](A a) { return pure(f(std::move(a))); });
}

/// Sequencing that discards the first result. The second program is
/// built eagerly; use bind for anything recursive.
template <class A, class B>
Choreo<B> seq(Choreo<A> m, Choreo<B> k) {
  return bind(std::move(m), [k = std::move(k)](A) { return k; });
}

/// Each party in ls runs the local body with its own identity and
/// unwrap capability; results are collected per-party in ls order.
template <class F,
          class A = std::invoke_result_t<F, const MemberWitness&, const UnwrapToken&, LocalEnv&>>
Choreo<Faceted<A>> parallel(SubsetWitness ls, F body) {
  return Choreo<Faceted<A>>(std::make_shared<detail::ParallelNode<A>>(
      std::move(ls),
      std::function<A(const MemberWitness&, const UnwrapToken&, LocalEnv&)>(std::move(body))));
}

/// A pure, deterministic computation performed redundantly by every
/// party in ls; the computation cannot depend on who's performing it
/// and cannot unwrap Faceted values.
template <class F, class A = std::invoke_result_t<F, const UnwrapsToken&>>
Choreo<Located<A>> congruently(SubsetWitness ls, F body) {
  return Choreo<Located<A>>(std::make_shared<detail::CongruentlyNode<A>>(
      std::move(ls), std::function<A(const UnwrapsToken&)>(std::move(body))));
}

/// Multicast from one sender to a list of recipients. A sender among
/// the recipients keeps its copy locally with no network message.
template <class A>
Choreo<Located<A>> comm(MemberWitness sender, MemberWitness sender_in_owners, Located<A> value,
                        SubsetWitness recipients) {
  return Choreo<Located<A>>(std::make_shared<detail::CommNode<A>>(
      std::move(sender), std::move(sender_in_owners),
      std::variant<Located<A>, Faceted<A>>(std::move(value)), std::move(recipients)));
}

/// Faceted variant: the sender's facet is what recipients receive.
template <class A>
Choreo<Located<A>> comm(MemberWitness sender, MemberWitness sender_in_owners, Faceted<A> value,
                        SubsetWitness recipients) {
  return Choreo<Located<A>>(std::make_shared<detail::CommNode<A>>(
      std::move(sender), std::move(sender_in_owners),
      std::variant<Located<A>, Faceted<A>>(std::move(value)), std::move(recipients)));
}

/// Embed a choreography with a smaller census; outsiders skip it
/// entirely and the result is Located at the inner census.
template <class A>
Choreo<Located<A>> enclave(SubsetWitness sub, Choreo<A> inner) {
  return Choreo<Located<A>>(
      std::make_shared<detail::EnclaveNode<A>>(std::move(sub), std::move(inner)));
}

/// Un-locate a value known to the entire census.
template <class A>
Choreo<A> naked(SubsetWitness census_in_owners, Located<A> value) {
  return Choreo<A>(
      std::make_shared<detail::NakedNode<A>>(std::move(census_in_owners), std::move(value)));
}

/// Run a choreographic action once per party in qs, sequentially in qs
/// order; iteration q's result must be owned exactly by [q].
template <class F, class CL = std::invoke_result_t<F, const MemberWitness&>,
          class A = typename CL::value_type::value_type>
Choreo<Faceted<A>> fan_out(SubsetWitness qs, F body) {
  return Choreo<Faceted<A>>(std::make_shared<detail::FanOutNode<A>>(
      std::move(qs),
      std::function<Choreo<Located<A>>(const MemberWitness&)>(std::move(body))));
}

/// Run a choreographic action once per party in qs, sequentially;
/// results are gathered as a list (in qs order) Located at rs.
template <class F, class CL = std::invoke_result_t<F, const MemberWitness&>,
          class A = typename CL::value_type::value_type>
Choreo<Located<std::vector<A>>> fan_in(SubsetWitness qs, SubsetWitness rs, F body) {
  return Choreo<Located<std::vector<A>>>(std::make_shared<detail::FanInNode<A>>(
      std::move(qs), std::move(rs),
      std::function<Choreo<Located<A>>(const MemberWitness&)>(std::move(body))));
}

// ---------------------------------------------------------------------------
// Derived helpers; each expands into the primitives above.
// ---------------------------------------------------------------------------

namespace detail {
template <class W>
const LocationList& owners_of(const W& w) {
  return w.owners();
}
}  // namespace detail

/// (~>) form 1: the sender is named in the census and listed among the
/// value's owners.
template <class W, class A = typename W::value_type>
Choreo<Located<A>> send_to(const MemberWitness& sender, const W& value,
                           SubsetWitness recipients) {
  return comm(sender, explicit_member(sender.subject(), detail::owners_of(value)), value,
              std::move(recipients));
}

/// (~>) form 2: the sender is identified within the owners, and all
/// owners are present in the census.
template <class W, class A = typename W::value_type>
Choreo<Located<A>> send_to(const MemberWitness& sender_in_owners,
                           const SubsetWitness& owners_in_census, const W& value,
                           SubsetWitness recipients) {
  return comm(in_super(owners_in_census, sender_in_owners), sender_in_owners, value,
              std::move(recipients));
}

/// (~>) form 3: explicit presence and ownership proofs.
template <class W, class A = typename W::value_type>
Choreo<Located<A>> send_to(const MemberWitness& sender, const MemberWitness& sender_in_owners,
                           const W& value, SubsetWitness recipients) {
  return comm(sender, sender_in_owners, value, std::move(recipients));
}

/// parallel on a one-party subset; the result is Located, not Faceted.
template <class F, class A = std::invoke_result_t<F, const UnwrapToken&, LocalEnv&>>
Choreo<Located<A>> locally(const MemberWitness& at, F body) {
  LocationId subject = at.subject();
  SubsetWitness just = cons(at, nobody(at.context()));
  return fmap(
      parallel(std::move(just),
               [body = std::move(body)](const MemberWitness&, const UnwrapToken& un,
                                        LocalEnv& env) { return body(un, env); }),
      [subject](Faceted<A> f) { return localize(singleton(subject), f); });
}

/// locally, ignoring the unwrap capability.
template <class A>
Choreo<Located<A>> locally0(const MemberWitness& at, LocalProgram<A> program) {
  return locally(at, [program = std::move(program)](const UnwrapToken&, LocalEnv& env) {
    return program(env);
  });
}

template <class F>
Choreo<Unit> locally_(const MemberWitness& at, F body) {
  return fmap(locally(at, std::move(body)), [](auto) { return Unit{}; });
}

template <class A>
Choreo<Unit> locally0_(const MemberWitness& at, LocalProgram<A> program) {
  return fmap(locally0(at, std::move(program)), [](auto) { return Unit{}; });
}

/// parallel, ignoring identity and unwrap capability.
template <class A>
Choreo<Faceted<A>> parallel0(SubsetWitness ls, LocalProgram<A> program) {
  return parallel(std::move(ls),
                  [program = std::move(program)](const MemberWitness&, const UnwrapToken&,
                                                 LocalEnv& env) { return program(env); });
}

template <class F>
Choreo<Unit> parallel_(SubsetWitness ls, F body) {
  return fmap(parallel(std::move(ls), std::move(body)), [](auto) { return Unit{}; });
}

/// (~~>): run a local computation at one party and send the result
/// directly to the recipients.
template <class F, class A = std::invoke_result_t<F, const UnwrapToken&, LocalEnv&>>
Choreo<Located<A>> local_then_send(const MemberWitness& at, F body, SubsetWitness recipients) {
  MemberWitness sender = at;
  return bind(locally(at, std::move(body)),
              [sender, recipients = std::move(recipients)](Located<A> v) {
                return comm(sender, singleton(sender.subject()), std::move(v), recipients);
              });
}

/// (-~>): like (~~>) but the local computation needs no unwrapping.
template <class A>
Choreo<Located<A>> pure_local_then_send(const MemberWitness& at, LocalProgram<A> program,
                                        SubsetWitness recipients) {
  return local_then_send(
      at,
      [program = std::move(program)](const UnwrapToken&, LocalEnv& env) { return program(env); },
      std::move(recipients));
}

/// Multicast to the entire census, then unwrap. Overloads mirror the
/// (~>) argument forms.
template <class W, class A = typename W::value_type>
Choreo<A> broadcast(const LocationList& census, const MemberWitness& sender, const W& value) {
  return bind(send_to(sender, value, allof(census)),
              [census](Located<A> v) { return naked(refl(census), std::move(v)); });
}

template <class W, class A = typename W::value_type>
Choreo<A> broadcast(const LocationList& census, const MemberWitness& sender_in_owners,
                    const SubsetWitness& owners_in_census, const W& value) {
  return bind(send_to(sender_in_owners, owners_in_census, value, allof(census)),
              [census](Located<A> v) { return naked(refl(census), std::move(v)); });
}

template <class W, class A = typename W::value_type>
Choreo<A> broadcast(const LocationList& census, const MemberWitness& sender,
                    const MemberWitness& sender_in_owners, const W& value) {
  return bind(send_to(sender, sender_in_owners, value, allof(census)),
              [census](Located<A> v) { return naked(refl(census), std::move(v)); });
}

/// KoC-safe branching: the guard must already be Located at the whole
/// inner census; the branch body runs as an enclave of that census.
template <class A, class F, class CB = std::invoke_result_t<F, A>,
          class B = typename CB::value_type>
Choreo<Located<B>> cond(const SubsetWitness& ls_in_census, const SubsetWitness& ls_in_owners,
                        Located<A> guard, F branch) {
  return enclave(ls_in_census,
                 bind(naked(ls_in_owners, std::move(guard)), std::move(branch)));
}

/// enclave followed by flatten, so the result isn't doubly Located.
template <class A>
Choreo<Located<A>> enclave_to(const SubsetWitness& ls_in_census,
                              const SubsetWitness& rs_in_ls, Choreo<Located<A>> inner) {
  SubsetWitness rs_refl = refl(rs_in_ls.subject());
  return fmap(enclave(ls_in_census, std::move(inner)),
              [rs_in_ls, rs_refl](Located<Located<A>> nested) {
                return flatten(rs_in_ls, rs_refl, nested);
              });
}

template <class A>
Choreo<Located<A>> enclave_to_all(const SubsetWitness& ls_in_census,
                                  Choreo<Located<A>> inner) {
  return enclave_to(ls_in_census, refl(ls_in_census.subject()), std::move(inner));
}

}  // namespace chor
