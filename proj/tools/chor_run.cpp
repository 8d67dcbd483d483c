// Launcher for the example choreographies: pick an example, instantiate
// its census from flags, and run it either all-in-process over the
// in-memory backend, centrally, or as a single role over TCP.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <chor/interp.hpp>
#include <chor/protocols/card_game.hpp>
#include <chor/protocols/example_chor.hpp>
#include <chor/protocols/gmw.hpp>
#include <chor/protocols/kvs.hpp>
#include <chor/protocols/lottery.hpp>
#include <chor/protocols/ot.hpp>
#include <chor/protocols/secret_sharing.hpp>
#include <chor/tcp.hpp>
#include <chor/transport.hpp>

using namespace chor;

namespace {

std::vector<LocationId> split_csv(const std::string& text) {
  std::vector<LocationId> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

/// Census members in first-mention order, without duplicates.
LocationList merge_census(const std::vector<std::vector<LocationId>>& groups) {
  std::vector<LocationId> out;
  for (const auto& group : groups)
    for (const auto& name : group)
      if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  return LocationList(out);
}

/// Script file: one "party: input line" per line; '#' starts a comment.
std::map<LocationId, std::vector<std::string>> load_script(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error("cannot open script file: " + path);
  std::map<LocationId, std::vector<std::string>> script;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) throw error("script line has no 'party:' prefix: " + line);
    std::string party = line.substr(0, colon);
    std::string value = line.substr(colon + 1);
    if (!value.empty() && value[0] == ' ') value.erase(0, 1);
    script[party].push_back(value);
  }
  return script;
}

struct Launch {
  LocationList census;
  Choreo<Unit> program;
};

struct Options {
  std::string example;
  std::string role;
  std::string backend = "memory";
  bool all = false;
  bool central = false;
  std::uint64_t seed = 0;
  std::string config;
  std::string script;

  std::string players;            // card-game
  std::string clique = "alice,bob";  // example
  int value = 3;                  // example
  std::string client;             // kvs
  std::string primary;            // kvs
  std::string backups;            // kvs
  std::string owner;              // secret-share
  std::string sender;             // ot2
  std::string receiver;           // ot2
  std::string parties;            // secret-share, fand, gmw
  std::string clients;            // lottery
  std::string servers;            // lottery
  std::string analyst;            // lottery
};

Choreo<Unit> discard(Choreo<Located<int>> c, const MemberWitness& at, std::string label) {
  return bind(std::move(c), [at, label](Located<int> v) {
    return locally_(at, [v, label](const UnwrapToken& un, LocalEnv& env) {
      put_output_as(env, label, un(singleton(un.self()), v));
      return Unit{};
    });
  });
}

Launch build_card_game(const Options& opt) {
  auto players = split_csv(opt.players);
  if (players.empty()) throw error("card-game needs --players");
  std::vector<LocationId> census{"dealer"};
  census.insert(census.end(), players.begin(), players.end());
  LocationList ps(census);
  return {ps, card_game(ps)};
}

Launch build_example(const Options& opt) {
  LocationList census{"alice", "bob", "carroll"};
  LocationList clique(split_csv(opt.clique));
  auto program = example_chor(census, clique, "alice", "bob", "carroll", opt.value);
  return {census, discard(std::move(program), explicit_member("carroll", census),
                          "Example result:")};
}

Launch build_kvs(const Options& opt) {
  if (opt.client.empty() || opt.primary.empty()) throw error("kvs needs --client and --primary");
  auto backups = split_csv(opt.backups);
  LocationList census = merge_census({{opt.client}, {opt.primary}, backups});
  auto strategy = nary_replication_strategy(explicit_member(opt.primary, census),
                                            explicit_subset(LocationList(backups), census));
  return {census, kvs(strategy, explicit_member(opt.client, census))};
}

Launch build_secret_share(const Options& opt) {
  LocationList census(split_csv(opt.parties));
  if (census.empty()) throw error("secret-share needs --parties");
  LocationId owner = opt.owner.empty() ? census[0] : opt.owner;
  auto p = explicit_member(owner, census);
  auto program = bind(
      locally0(p, LocalProgram<bool>([](LocalEnv& env) {
                 return get_input_as<bool>(env, "Enter a secret input value:");
               })),
      [p, census](Located<bool> value) {
        return bind(secret_share(p, value), [census](Faceted<bool> shares) {
          return bind(reveal(shares), [census](bool result) {
            return parallel_(allof(census), [result](const MemberWitness&, const UnwrapToken&,
                                                     LocalEnv& env) {
              put_output_as(env, "Revealed:", result);
              return Unit{};
            });
          });
        });
      });
  return {census, std::move(program)};
}

Launch build_ot2(const Options& opt) {
  if (opt.sender.empty() || opt.receiver.empty())
    throw error("ot2 needs --sender and --receiver");
  LocationList census{opt.sender, opt.receiver};
  auto sender = listed_first(census);
  auto receiver = listed_second(census);
  auto program = bind(
      locally0(sender, LocalProgram<std::pair<bool, bool>>([](LocalEnv& env) {
                 bool b1 = get_input_as<bool>(env, "First bit:");
                 bool b2 = get_input_as<bool>(env, "Second bit:");
                 return std::pair<bool, bool>{b1, b2};
               })),
      [receiver](Located<std::pair<bool, bool>> bb) {
        return bind(locally0(receiver, LocalProgram<bool>([](LocalEnv& env) {
                               return get_input_as<bool>(env, "Select bit:");
                             })),
                    [receiver, bb](Located<bool> s) {
                      return bind(ot2(bb, s), [receiver](Located<bool> result) {
                        return locally_(receiver, [result](const UnwrapToken& un,
                                                           LocalEnv& env) {
                          put_output_as(env, "OT result:", un(singleton(un.self()), result));
                          return Unit{};
                        });
                      });
                    });
      });
  return {census, std::move(program)};
}

Launch build_fand(const Options& opt) {
  LocationList census(split_csv(opt.parties));
  if (census.size() < 2) throw error("fand needs --parties with at least two names");
  auto read_shares = [](const std::string& prompt) {
    return LocalProgram<bool>([prompt](LocalEnv& env) {
      return get_input_as<bool>(env, prompt);
    });
  };
  auto program = bind(
      parallel0(allof(census), read_shares("Share of u:")),
      [census, read_shares](Faceted<bool> u) {
        return bind(parallel0(allof(census), read_shares("Share of v:")),
                    [census, u](Faceted<bool> v) {
                      return bind(f_and(u, v), [census](Faceted<bool> shares) {
                        return bind(reveal(shares), [census](bool result) {
                          return parallel_(allof(census),
                                           [result](const MemberWitness&, const UnwrapToken&,
                                                    LocalEnv& env) {
                                             put_output_as(env, "fAnd result:", result);
                                             return Unit{};
                                           });
                        });
                      });
                    });
      });
  return {census, std::move(program)};
}

Launch build_gmw(const Options& opt) {
  LocationList census(split_csv(opt.parties));
  if (census.empty()) throw error("gmw needs --parties");
  // Demo circuit: AND-fold of one secret input per party.
  CircuitPtr circuit = input_wire(listed_first(census));
  for (std::size_t i = 1; i < census.size(); ++i)
    circuit = and_gate(circuit, input_wire(listed_nth(census, i)));
  auto program = bind(gmw(census, circuit), [census](Faceted<bool> shares) {
    return bind(reveal(shares), [census](bool result) {
      return parallel_(allof(census), [result](const MemberWitness&, const UnwrapToken&,
                                               LocalEnv& env) {
        put_output_as(env, "Circuit result:", result);
        return Unit{};
      });
    });
  });
  return {census, std::move(program)};
}

Launch build_lottery(const Options& opt) {
  auto clients = split_csv(opt.clients);
  auto servers = split_csv(opt.servers);
  if (clients.size() < 2 || servers.size() < 2 || opt.analyst.empty())
    throw error("lottery needs --clients (>=2), --servers (>=2), and --analyst");
  LocationList census = merge_census({clients, servers, {opt.analyst}});
  auto program = lottery(explicit_subset(LocationList(clients), census),
                         explicit_subset(LocationList(servers), census),
                         explicit_member(opt.analyst, census));
  return {census, std::move(program)};
}

const std::map<std::string, Launch (*)(const Options&)> kExamples = {
    {"card-game", build_card_game}, {"example", build_example},
    {"kvs", build_kvs},             {"secret-share", build_secret_share},
    {"ot2", build_ot2},             {"fand", build_fand},
    {"gmw", build_gmw},             {"lottery", build_lottery},
};

void print_transcript(ScriptedWorld& world, const LocationList& census) {
  for (const auto& party : census) {
    for (const auto& event : world.scripted(party).outputs()) {
      if (event.kind == LocalEvent::Kind::Output)
        std::cout << "[" << party << "] " << event.a << " " << event.b << "\n";
      else
        std::cout << "[" << party << "] " << event.a << "\n";
    }
  }
}

int run(const Options& opt) {
  auto it = kExamples.find(opt.example);
  if (it == kExamples.end()) {
    std::cerr << "unknown example: " << opt.example << "\navailable:";
    for (const auto& [name, _] : kExamples) std::cerr << " " << name;
    std::cerr << "\n";
    return 2;
  }
  Launch launch = it->second(opt);

  std::map<LocationId, std::vector<std::string>> script;
  if (!opt.script.empty()) script = load_script(opt.script);

  if (opt.backend == "memory") {
    ScriptedWorld world(launch.census, opt.seed, script);
    if (opt.central) {
      run_choreo(launch.census, launch.program, world);
      print_transcript(world, launch.census);
      return 0;
    }
    // The memory backend only makes sense with every role in-process.
    if (!opt.all && opt.role.empty())
      throw error("memory backend requires --all (or --central), or pick --backend tcp");
    InMemoryBackend backend(launch.census);
    auto outcomes = run_projected_all(launch.census, launch.program, backend, world);
    for (const auto& [party, outcome] : outcomes)
      if (!outcome.ok()) outcome.value();  // rethrows with the party's error
    print_transcript(world, launch.census);
    return 0;
  }

  if (opt.backend == "tcp") {
    if (opt.role.empty()) throw error("tcp backend requires --role");
    if (!launch.census.contains(opt.role))
      throw error("role " + opt.role + " is not in the census");
    if (opt.config.empty()) throw error("tcp backend requires --config");
    NetworkConfig config = NetworkConfig::load(opt.config);
    TcpBackend backend(config, opt.role);
    auto projected = epp(launch.census, launch.program, opt.role);
    if (!opt.script.empty()) {
      ScriptedLocalEnv env(opt.role, party_seed(opt.seed, opt.role),
                           script.count(opt.role) ? script.at(opt.role)
                                                  : std::vector<std::string>{});
      run_network(backend, opt.role, projected, env);
      for (const auto& event : env.outputs()) {
        if (event.kind == LocalEvent::Kind::Output)
          std::cout << "[" << opt.role << "] " << event.a << " " << event.b << "\n";
        else
          std::cout << "[" << opt.role << "] " << event.a << "\n";
      }
    } else {
      ConsoleLocalEnv env(opt.role, party_seed(opt.seed, opt.role));
      run_network(backend, opt.role, projected, env);
    }
    return 0;
  }

  throw error("unknown backend: " + opt.backend + " (expected memory or tcp)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Run an example choreography"};
  Options opt;
  app.add_option("--example", opt.example, "Example name")->required();
  app.add_option("--role", opt.role, "Party to run (tcp backend)");
  app.add_option("--backend", opt.backend, "memory or tcp");
  app.add_flag("--all", opt.all, "Run every role in-process (memory backend)");
  app.add_flag("--central", opt.central, "Run the centralized interpreter");
  app.add_option("--seed", opt.seed, "Seed for all party RNGs");
  app.add_option("--config", opt.config, "Network config file (tcp backend)");
  app.add_option("--script", opt.script, "Input script file: 'party: line' per input");
  app.add_option("--players", opt.players, "card-game: comma-separated players");
  app.add_option("--clique", opt.clique, "example: comma-separated enclave parties");
  app.add_option("--value", opt.value, "example: bob's starting value");
  app.add_option("--client", opt.client, "kvs: client party");
  app.add_option("--primary", opt.primary, "kvs: primary server");
  app.add_option("--backups", opt.backups, "kvs: comma-separated backup servers");
  app.add_option("--parties", opt.parties, "secret-share/fand/gmw: comma-separated census");
  app.add_option("--owner", opt.owner, "secret-share: secret owner");
  app.add_option("--sender", opt.sender, "ot2: sender party");
  app.add_option("--receiver", opt.receiver, "ot2: receiver party");
  app.add_option("--clients", opt.clients, "lottery: comma-separated clients");
  app.add_option("--servers", opt.servers, "lottery: comma-separated servers");
  app.add_option("--analyst", opt.analyst, "lottery: analyst party");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return run(opt);
  } catch (const std::exception& e) {
    std::cerr << "aborted";
    if (!opt.role.empty()) std::cerr << " at " << opt.role;
    std::cerr << ": " << e.what() << "\n";
    return 1;
  }
}
