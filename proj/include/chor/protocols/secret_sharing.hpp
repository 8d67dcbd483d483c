#pragma once

#include <string>
#include <utility>
#include <vector>

#include <chor/choreo.hpp>

namespace chor {

/// Split x into one boolean share per name: n-1 uniformly random free
/// shares plus a first share chosen so everything xors back to x.
inline std::vector<std::pair<LocationId, bool>> gen_shares(
    const std::vector<LocationId>& names, bool x, LocalEnv& env) {
  std::vector<bool> free_shares;
  for (std::size_t i = 0; i + 1 < names.size(); ++i) free_shares.push_back(random_bool(env));
  bool first = x;
  for (bool s : free_shares) first = first != s;
  std::vector<std::pair<LocationId, bool>> out;
  out.reserve(names.size());
  for (std::size_t i = 0; i < names.size(); ++i)
    out.emplace_back(names[i], i == 0 ? first : free_shares[i - 1]);
  return out;
}

namespace detail {
template <class K, class V>
const V& lookup_or_throw(const std::vector<std::pair<K, V>>& kvs, const K& key) {
  for (const auto& [k, v] : kvs)
    if (k == key) return v;
  throw error("share lookup failed for " + key);
}
}  // namespace detail

/// p constructs secret shares of its bit locally, then sends one share
/// to each party, including themselves.
inline Choreo<Faceted<bool>> secret_share(const MemberWitness& p, const Located<bool>& value) {
  const LocationList& parties = p.context();
  auto shares = locally(p, [parties, p, value](const UnwrapToken& un, LocalEnv& env) {
    return gen_shares(parties.entries(), un(singleton(p.subject()), value), env);
  });
  return bind(std::move(shares),
              [parties, p](Located<std::vector<std::pair<LocationId, bool>>> shares_at_p) {
                return fan_out(allof(parties), [parties, p,
                                                shares_at_p](const MemberWitness& q) {
                  LocationId q_name = to_loc_tm(q);
                  return local_then_send(
                      p,
                      [p, q_name, shares_at_p](const UnwrapToken& un, LocalEnv&) {
                        return detail::lookup_or_throw(un(singleton(p.subject()), shares_at_p),
                                                       q_name);
                      },
                      cons(q, nobody(parties)));
                });
              });
}

/// Everyone multicasts their share to everyone; the xor of the gathered
/// list reconstructs the plaintext for the whole census.
inline Choreo<bool> reveal(const Faceted<bool>& shares) {
  const LocationList& ps = shares.owners();
  auto gathered = fan_in(allof(ps), allof(ps), [ps, shares](const MemberWitness& p) {
    return send_to(p, p, shares, allof(ps));
  });
  return bind(std::move(gathered), [ps](Located<std::vector<bool>> all) {
    return fmap(naked(refl(ps), std::move(all)), [](std::vector<bool> bits) {
      bool acc = false;
      for (bool b : bits) acc = acc != b;
      return acc;
    });
  });
}

}  // namespace chor
