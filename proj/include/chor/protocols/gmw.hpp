#pragma once

#include <memory>
#include <utility>
#include <vector>

#include <chor/choreo.hpp>
#include <chor/protocols/ot.hpp>
#include <chor/protocols/secret_sharing.hpp>

namespace chor {

/// A boolean circuit over a fixed census: input wires name the party
/// supplying the secret, literal wires are public constants.
struct Circuit {
  enum class Kind { Input, Lit, And, Xor };

  Kind kind;
  std::optional<MemberWitness> party;  // Input
  bool lit = false;                    // Lit
  std::shared_ptr<const Circuit> left, right;
};

using CircuitPtr = std::shared_ptr<const Circuit>;

inline CircuitPtr input_wire(MemberWitness p) {
  return std::make_shared<Circuit>(
      Circuit{Circuit::Kind::Input, std::move(p), false, nullptr, nullptr});
}
inline CircuitPtr lit_wire(bool b) {
  return std::make_shared<Circuit>(Circuit{Circuit::Kind::Lit, std::nullopt, b, nullptr, nullptr});
}
inline CircuitPtr and_gate(CircuitPtr l, CircuitPtr r) {
  return std::make_shared<Circuit>(
      Circuit{Circuit::Kind::And, std::nullopt, false, std::move(l), std::move(r)});
}
inline CircuitPtr xor_gate(CircuitPtr l, CircuitPtr r) {
  return std::make_shared<Circuit>(
      Circuit{Circuit::Kind::Xor, std::nullopt, false, std::move(l), std::move(r)});
}

/// AND over secret-shared bits via pairwise oblivious transfer: each
/// party i samples a mask a_ij per peer; peer j obtains, by OT against
/// select bit v_j, either u_i xor a_ij or a_ij, and folds the received
/// bits into b_j. Party i's output share is
/// (u_i and v_i) xor b_i xor (xor of a_ij for j /= i).
inline Choreo<Faceted<bool>> f_and(const Faceted<bool>& u_shares,
                                   const Faceted<bool>& v_shares) {
  const LocationList parties = u_shares.owners();
  if (v_shares.owners() != parties)
    throw witness_error("f_and: share owner lists differ");

  if (parties.size() == 1) {
    // Degenerate single-party case: plain local AND, no transfers.
    return parallel(allof(parties), [u_shares, v_shares](const MemberWitness& p,
                                                         const UnwrapToken& un, LocalEnv&) {
      return un(p, u_shares) && un(p, v_shares);
    });
  }

  auto masks = parallel0(
      allof(parties),
      LocalProgram<std::vector<std::pair<LocationId, bool>>>([parties](LocalEnv& env) {
        std::vector<std::pair<LocationId, bool>> out;
        out.reserve(parties.size());
        for (const auto& name : parties) out.emplace_back(name, random_bool(env));
        return out;
      }));

  return bind(std::move(masks), [parties, u_shares, v_shares](
                                    Faceted<std::vector<std::pair<LocationId, bool>>> a_j_s) {
    auto bs = fan_out(allof(parties), [parties, u_shares, v_shares,
                                       a_j_s](const MemberWitness& p_j) {
      LocationId p_j_name = to_loc_tm(p_j);
      auto b_i_s = fan_in(
          allof(parties), cons(p_j, nobody(parties)),
          [parties, u_shares, v_shares, a_j_s, p_j,
           p_j_name](const MemberWitness& p_i) -> Choreo<Located<bool>> {
            if (to_loc_tm(p_i) == p_j_name)
              return locally0(p_j, LocalProgram<bool>([](LocalEnv&) { return false; }));
            auto bb = locally(p_i, [p_i, p_j_name, a_j_s,
                                    u_shares](const UnwrapToken& un, LocalEnv&) {
              bool a_ij = detail::lookup_or_throw(un(p_i, a_j_s), p_j_name);
              bool u_i = un(p_i, u_shares);
              return std::pair<bool, bool>{u_i != a_ij, a_ij};
            });
            return bind(std::move(bb), [parties, v_shares, p_i,
                                        p_j](Located<std::pair<bool, bool>> sender_bits) {
              LocationList pair_census{to_loc_tm(p_i), to_loc_tm(p_j)};
              return enclave_to(explicit_subset(pair_census, parties),
                                cons(listed_second(pair_census), nobody(pair_census)),
                                ot2(sender_bits, localize(p_j, v_shares)));
            });
          });
      return bind(std::move(b_i_s), [p_j](Located<std::vector<bool>> received) {
        return locally(p_j, [received](const UnwrapToken& un, LocalEnv&) {
          bool acc = false;
          for (bool b : un(singleton(un.self()), received)) acc = acc != b;
          return acc;
        });
      });
    });
    return bind(std::move(bs), [parties, u_shares, v_shares, a_j_s](Faceted<bool> b_shares) {
      return parallel(allof(parties), [u_shares, v_shares, a_j_s,
                                       b_shares](const MemberWitness& p_i,
                                                 const UnwrapToken& un, LocalEnv&) {
        const LocationId& name = to_loc_tm(p_i);
        bool share = (un(p_i, u_shares) && un(p_i, v_shares)) != un(p_i, b_shares);
        for (const auto& [p_j, a_j] : un(p_i, a_j_s))
          if (p_j != name) share = share != a_j;
        return share;
      });
    });
  });
}

/// The GMW protocol: evaluate a boolean circuit gate by gate over
/// secret-shared values. Input wires are read locally and shared;
/// literal wires give the full value to the first party and false
/// shares to everyone else; xor is local on shares; and goes through
/// f_and.
inline Choreo<Faceted<bool>> gmw(const LocationList& parties, const CircuitPtr& circuit) {
  switch (circuit->kind) {
    case Circuit::Kind::Input: {
      const MemberWitness& p = *circuit->party;
      if (p.context() != parties)
        throw witness_error("gmw: input wire witness context is not the census");
      return bind(
          locally0(p, LocalProgram<bool>([](LocalEnv& env) {
                     return get_input_as<bool>(env, "Enter a secret input value:");
                   })),
          [p](Located<bool> value) { return secret_share(p, value); });
    }
    case Circuit::Kind::Lit: {
      bool b = circuit->lit;
      return fan_out(allof(parties), [parties, b](const MemberWitness& p) {
        bool share = p.index() == 0 ? b : false;
        return locally0(p, LocalProgram<bool>([share](LocalEnv&) { return share; }));
      });
    }
    case Circuit::Kind::And:
      return bind(gmw(parties, circuit->left), [parties, circuit](Faceted<bool> l) {
        return bind(gmw(parties, circuit->right),
                    [l](Faceted<bool> r) { return f_and(l, r); });
      });
    case Circuit::Kind::Xor:
      return bind(gmw(parties, circuit->left), [parties, circuit](Faceted<bool> l) {
        return bind(gmw(parties, circuit->right), [parties, l](Faceted<bool> r) {
          return parallel(allof(parties),
                          [l, r](const MemberWitness& p, const UnwrapToken& un, LocalEnv&) {
                            return un(p, l) != un(p, r);
                          });
        });
      });
  }
  throw error("gmw: malformed circuit");  // unreachable
}

}  // namespace chor
