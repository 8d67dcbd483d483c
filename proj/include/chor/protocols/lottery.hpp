#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <chor/choreo.hpp>
#include <chor/protocols/secret_sharing.hpp>
#include <chor/sha256.hpp>

namespace chor {

/// The prime field of size 999983; client secrets and their shares live
/// here.
struct Fp {
  static constexpr std::uint32_t P = 999983;

  std::uint32_t v = 0;

  Fp() = default;
  explicit Fp(std::uint64_t x) : v(static_cast<std::uint32_t>(x % P)) {}

  friend Fp operator+(Fp a, Fp b) { return Fp(std::uint64_t(a.v) + b.v); }
  friend Fp operator-(Fp a, Fp b) { return Fp(std::uint64_t(a.v) + P - b.v); }
  friend Fp operator*(Fp a, Fp b) { return Fp(std::uint64_t(a.v) * b.v); }
  friend bool operator==(Fp a, Fp b) { return a.v == b.v; }
};

inline void to_json(nlohmann::json& j, const Fp& x) { j = x.v; }
inline void from_json(const nlohmann::json& j, Fp& x) { x = Fp(j.get<std::uint64_t>()); }

inline Fp random_fp(LocalEnv& env) { return Fp(random_range(env, 0, Fp::P - 1)); }

/// Split x into one field share per name: n-1 uniformly random free
/// shares plus a first share chosen so everything sums back to x.
inline std::vector<std::pair<LocationId, Fp>> gen_fp_shares(
    const std::vector<LocationId>& names, Fp x, LocalEnv& env) {
  std::vector<Fp> free_shares;
  for (std::size_t i = 0; i + 1 < names.size(); ++i) free_shares.push_back(random_fp(env));
  Fp first = x;
  for (Fp s : free_shares) first = first - s;
  std::vector<std::pair<LocationId, Fp>> out;
  out.reserve(names.size());
  for (std::size_t i = 0; i < names.size(); ++i)
    out.emplace_back(names[i], i == 0 ? first : free_shares[i - 1]);
  return out;
}

/// Commitment to a server's random draw: a 256-bit hash over the
/// canonical encodings of rho, then the salt.
inline std::string lottery_commitment(std::uint64_t rho, std::uint64_t psi) {
  return sha256_hex(encode(rho) + encode(psi));
}

struct LotteryConfig {
  /// tau = tau_multiple * number of clients; rho is drawn from [1, tau].
  std::uint64_t tau_multiple = 4;
  /// Test hook: applied to each server's rho as it is opened (not as it
  /// is committed), so a dishonest opening can be injected.
  std::function<std::uint64_t(const LocationId&, std::uint64_t)> tamper_rho;
};

/// A federated lottery: clients secret-share field secrets across the
/// servers; servers jointly pick a random client index via a
/// commit-then-open exchange of random draws; the chosen client's
/// shares are forwarded to the analyst, who reconstructs and prints
/// that one secret. As long as one server draws honestly the choice is
/// random, and only the analyst learns anything.
inline Choreo<Unit> lottery(const SubsetWitness& clients, const SubsetWitness& servers,
                            const MemberWitness& analyst, LotteryConfig config = {}) {
  const LocationList census = clients.context();
  if (servers.context() != census || analyst.context() != census)
    throw witness_error("lottery: witnesses disagree on the census");
  if (clients.subject().size() < 2) throw witness_error("lottery needs at least two clients");
  if (servers.subject().size() < 2) throw witness_error("lottery needs at least two servers");

  const LocationList client_list = clients.subject();
  const LocationList server_list = servers.subject();
  const std::vector<LocationId>& server_names = server_list.entries();
  const std::uint64_t n_clients = client_list.size();
  const std::uint64_t tau = config.tau_multiple * n_clients;
  std::function<std::uint64_t(const LocationId&, std::uint64_t)> tamper = config.tamper_rho;
  if (!tamper) tamper = [](const LocationId&, std::uint64_t rho) { return rho; };

  auto secrets = parallel0(clients, LocalProgram<Fp>([](LocalEnv& env) {
                             return get_input_as<Fp>(env, "secret:");
                           }));
  return bind(std::move(secrets), [=](Faceted<Fp> secret) {
    auto split = parallel(clients, [server_names, secret](const MemberWitness& client,
                                                          const UnwrapToken& un, LocalEnv& env) {
      return gen_fp_shares(server_names, un(client, secret), env);
    });
    return bind(std::move(split), [=](Faceted<std::vector<std::pair<LocationId, Fp>>>
                                          client_shares) {
      auto distribute = fan_out(servers, [=](const MemberWitness& server) {
        return fan_in(clients, cons(in_super(servers, server), nobody(census)),
                      [=](const MemberWitness& client) {
                        LocationId server_name = to_loc_tm(server);
                        return local_then_send(
                            in_super(clients, client),
                            [client, server_name, client_shares](const UnwrapToken& un,
                                                                 LocalEnv&) {
                              return detail::lookup_or_throw(un(client, client_shares),
                                                             server_name);
                            },
                            cons(in_super(servers, server), nobody(census)));
                      });
      });
      return bind(std::move(distribute), [=](Faceted<std::vector<Fp>> server_shares) {
        // 1) Each server selects a random number from 1 to tau.
        auto draw_rho = parallel0(servers, LocalProgram<std::uint64_t>([tau](LocalEnv& env) {
                                    return random_range(env, 1, tau);
                                  }));
        return bind(std::move(draw_rho), [=](Faceted<std::uint64_t> rho) {
          auto draw_psi =
              parallel0(servers, LocalProgram<std::uint64_t>([](LocalEnv& env) {
                          return random_range(env, 1ull << 18, 1ull << 20);
                        }));
          return bind(std::move(draw_psi), [=](Faceted<std::uint64_t> psi) {
            // 2) Each server publishes the hash of (rho, psi) as a commitment.
            auto commit = parallel(servers, [rho, psi](const MemberWitness& server,
                                                       const UnwrapToken& un, LocalEnv&) {
              return lottery_commitment(un(server, rho), un(server, psi));
            });
            return bind(std::move(commit), [=](Faceted<std::string> alpha) {
              auto gather_alpha =
                  fan_in(servers, servers, [servers, alpha](const MemberWitness& server) {
                    return send_to(server, servers, alpha, servers);
                  });
              return bind(std::move(gather_alpha), [=](Located<std::vector<std::string>>
                                                           alpha_all) {
                // 3) Only after every commitment is gathered do the
                // servers open psi and rho.
                auto open_psi =
                    fan_in(servers, servers, [servers, psi](const MemberWitness& server) {
                      return send_to(server, servers, psi, servers);
                    });
                return bind(std::move(open_psi), [=](Located<std::vector<std::uint64_t>>
                                                         psi_all) {
                  auto open_rho = fan_in(
                      servers, servers, [=](const MemberWitness& server) {
                        return local_then_send(
                            in_super(servers, server),
                            [server, rho, tamper](const UnwrapToken& un, LocalEnv&) {
                              return tamper(to_loc_tm(server), un(server, rho));
                            },
                            servers);
                      });
                  return bind(std::move(open_rho), [=](Located<std::vector<std::uint64_t>>
                                                           rho_all) {
                    // 4) All servers verify all commitments.
                    auto verify = parallel_(
                        servers, [alpha_all, psi_all, rho_all](const MemberWitness& server,
                                                               const UnwrapToken& un,
                                                               LocalEnv&) {
                          const auto& alphas = un(server, alpha_all);
                          const auto& psis = un(server, psi_all);
                          const auto& rhos = un(server, rho_all);
                          for (std::size_t i = 0; i < alphas.size(); ++i) {
                            if (alphas[i] != lottery_commitment(rhos[i], psis[i]))
                              throw commitment_check_failed(
                                  "lottery: opened values do not match commitment");
                          }
                          return Unit{};
                        });
                    return bind(std::move(verify), [=](Unit) {
                      // 5) Sum the opened draws to pick the client index.
                      auto pick = congruently(
                          servers, [server_list, rho_all, n_clients](const UnwrapsToken& un) {
                            std::uint64_t total = 0;
                            for (std::uint64_t r : un(refl(server_list), rho_all)) total += r;
                            return total % n_clients;
                          });
                      return bind(std::move(pick), [=](Located<std::uint64_t> omega) {
                        auto choose = parallel(
                            servers, [server_shares, omega](const MemberWitness& server,
                                                            const UnwrapToken& un, LocalEnv&) {
                              return un(server, server_shares).at(un(server, omega));
                            });
                        return bind(std::move(choose), [=](Faceted<Fp> chosen_shares) {
                          auto forward = fan_in(
                              servers, cons(analyst, nobody(census)),
                              [=](const MemberWitness& server) {
                                return send_to(server, servers, chosen_shares,
                                               cons(analyst, nobody(census)));
                              });
                          return bind(std::move(forward), [analyst](Located<std::vector<Fp>>
                                                                        all_shares) {
                            return locally_(analyst, [all_shares](const UnwrapToken& un,
                                                                  LocalEnv& env) {
                              Fp total;
                              for (Fp s : un(singleton(un.self()), all_shares))
                                total = total + s;
                              put_output_as(env, "The answer is:", total);
                              return Unit{};
                            });
                          });
                        });
                      });
                    });
                  });
                });
              });
            });
          });
        });
      });
    });
  });
}

}  // namespace chor
