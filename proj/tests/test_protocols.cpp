#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chor/interp.hpp>
#include <chor/protocols/card_game.hpp>
#include <chor/protocols/gmw.hpp>
#include <chor/protocols/kvs.hpp>
#include <chor/protocols/lottery.hpp>
#include <chor/protocols/ot.hpp>
#include <chor/protocols/secret_sharing.hpp>

using namespace chor;

namespace {

/// Last recorded output event with the given label, or fail.
std::string output_of(ScriptedLocalEnv& env, const std::string& label) {
  std::string found;
  bool any = false;
  for (const auto& e : env.events())
    if (e.kind == LocalEvent::Kind::Output && e.a == label) {
      found = e.b;
      any = true;
    }
  REQUIRE(any);
  return found;
}

bool xor_facets(const Faceted<bool>& f) {
  bool acc = false;
  for (const auto& p : f.owners()) acc = acc != f.facet(p);
  return acc;
}

}  // namespace

TEST_CASE("card arithmetic wraps modulo 21") {
  CHECK(Card(20) + Card(5) == Card(4));
  CHECK(Card(-1) == Card(20));
  CHECK(sum_hand({Card(10), Card(10), Card(10)}) == Card(9));
  CHECK(Card(20) > Card(19));
  CHECK_FALSE(Card(19) > Card(19));
}

TEST_CASE("card game: two players, one hits and wins, one stands and loses") {
  LocationList census{"dealer", "p", "q"};
  // dealer deals p=10 and q=5; p hits and draws 10; table card is 0
  ScriptedWorld world(census, 0,
                      {{"dealer", {"10", "5", "10", "0"}},
                       {"p", {"true"}},
                       {"q", {"false"}}});
  run_choreo(census, card_game(census), world);
  CHECK(output_of(world.scripted("p"), "My win result:") == "true");
  CHECK(output_of(world.scripted("q"), "My win result:") == "false");

  auto notes = world.scripted("p").outputs();
  REQUIRE(notes.size() >= 3);
  CHECK(notes[0].a == "My first card is: 10");
  CHECK(notes[1].a == "Cards on the table: [10,5]");
  CHECK(notes[2].a == "My hand: [0,10,10]");
}

TEST_CASE("card game: a hand summing to exactly 19 does not win") {
  LocationList census{"dealer", "p"};
  ScriptedWorld at19(census, 0, {{"dealer", {"19", "0"}}, {"p", {"false"}}});
  run_choreo(census, card_game(census), at19);
  CHECK(output_of(at19.scripted("p"), "My win result:") == "false");

  ScriptedWorld at20(census, 0, {{"dealer", {"20", "0"}}, {"p", {"false"}}});
  run_choreo(census, card_game(census), at20);
  CHECK(output_of(at20.scripted("p"), "My win result:") == "true");
}

TEST_CASE("store semantics: put returns the previous binding") {
  StoreState s;
  CHECK(handle_request(s, Request::put("k", "1")) == Response::not_found());
  CHECK(handle_request(s, Request::put("k", "2")) == Response::found("1"));
  CHECK(handle_request(s, Request::get("k")) == Response::found("2"));
  CHECK(handle_request(s, Request::get("missing")) == Response::not_found());
  CHECK(handle_request(s, Request::stop()) == Response::stopped());
  CHECK(mlookup("k", s) == Response::found("2"));
}

TEST_CASE("nub keeps first occurrences in order") {
  auto a = Response::found("a");
  auto b = Response::not_found();
  CHECK(nub({a, b, a, b, a}) == std::vector<Response>{a, b});
  CHECK(nub({}) == std::vector<Response>{});
}

TEST_CASE("replicated kvs services put/get and stops on request") {
  LocationList census{"client", "primary", "backup"};
  auto primary = explicit_member("primary", census);
  auto backups = explicit_subset(LocationList{"backup"}, census);
  auto strategy = nary_replication_strategy(primary, backups);
  ScriptedWorld world(census, 0,
                      {{"client",
                        {encode(Request::put("k", "v")), encode(Request::get("k")),
                         encode(Request::stop())}}});
  run_choreo(census, kvs(strategy, explicit_member("client", census)), world);
  auto outs = world.scripted("client").outputs();
  REQUIRE(outs.size() == 2);
  CHECK(outs[0].a == "Recieved:");
  CHECK(outs[0].b == encode(Response::not_found()));
  CHECK(outs[1].b == encode(Response::found("v")));
}

TEST_CASE("the client may itself be a server") {
  LocationList census{"solo"};
  auto primary = explicit_member("solo", census);
  auto strategy = nary_replication_strategy(primary, nobody(census));
  ScriptedWorld world(census, 0,
                      {{"solo", {encode(Request::put("x", "1")), encode(Request::stop())}}});
  std::uint64_t sends = 0;
  run_choreo(census, kvs(strategy, primary), world, &sends);
  CHECK(sends == 0);  // everything is a self-send
  CHECK(output_of(world.scripted("solo"), "Recieved:") == encode(Response::not_found()));
}

TEST_CASE("a corrupted replica is reported as desynchronization") {
  LocationList census{"primary", "backup"};
  auto primary = explicit_member("primary", census);
  auto backups = explicit_subset(LocationList{"backup"}, census);
  auto strategy = nary_replication_strategy(primary, backups);
  auto servers = cons(primary, backups);
  auto owners = LocationList{"primary"};

  auto prog = bind(strategy.setup(), [=](Faceted<StoreRef> rig) {
    auto put = strategy.handle(rig, singleton(LocationId("primary")),
                               Located<Request>::all(owners, Request::put("k", "v")));
    return bind(std::move(put), [=](Response) {
      auto corrupt = parallel_(servers, [rig](const MemberWitness& s, const UnwrapToken& un,
                                              LocalEnv&) {
        if (to_loc_tm(s) == "backup") (*un(s, rig))["k"] = "corrupt";
        return Unit{};
      });
      return bind(std::move(corrupt), [=](Unit) {
        return strategy.handle(rig, singleton(LocationId("primary")),
                               Located<Request>::all(owners, Request::get("k")));
      });
    });
  });

  ScriptedWorld world(census, 0);
  auto r = run_choreo(census, prog, world);
  CHECK(r.kind == Response::Kind::Desynchronization);
  CHECK(r.conflicts ==
        std::vector<Response>{Response::found("v"), Response::found("corrupt")});
}

TEST_CASE("boolean shares xor back to the secret") {
  ScriptedLocalEnv env("p", 7);
  auto single = gen_shares({"only"}, true, env);
  REQUIRE(single.size() == 1);
  CHECK(single[0].second == true);

  for (bool x : {false, true}) {
    for (int trial = 0; trial < 100; ++trial) {
      auto shares = gen_shares({"a", "b", "c"}, x, env);
      REQUIRE(shares.size() == 3);
      bool acc = false;
      for (const auto& [name, s] : shares) acc = acc != s;
      CHECK(acc == x);
    }
  }
}

TEST_CASE("reveal after secretShare reconstructs the bit for everyone") {
  LocationList census{"a", "b", "c"};
  for (bool x : {false, true}) {
    ScriptedWorld world(census, 3);
    auto owner = explicit_member("a", census);
    auto prog = bind(secret_share(owner, Located<bool>::all(LocationList{"a"}, x)),
                     [](Faceted<bool> shares) { return reveal(shares); });
    CHECK(run_choreo(census, prog, world) == x);
  }
}

TEST_CASE("oblivious transfer: full truth table, two messages per run") {
  LocationList sr{"s", "r"};
  for (bool b1 : {false, true})
    for (bool b2 : {false, true})
      for (bool sel : {false, true}) {
        ScriptedWorld world(sr, 5);
        std::uint64_t sends = 0;
        auto bb = Located<std::pair<bool, bool>>::all(LocationList{"s"}, {b1, b2});
        auto s = Located<bool>::all(LocationList{"r"}, sel);
        auto got = run_choreo(sr, ot2(bb, s), world, &sends);
        CHECK(got.owners() == LocationList{"r"});
        CHECK(got.payload() == (sel ? b1 : b2));
        CHECK(sends == 2);
      }
}

TEST_CASE("rsa encrypt/decrypt round-trips a bit under fresh keys") {
  ScriptedLocalEnv env("p", 21);
  for (int i = 0; i < 20; ++i) {
    auto [pk, sk] = rsa::gen_key_pair(env);
    for (bool b : {false, true})
      CHECK(rsa::decrypt_bit(sk, rsa::encrypt_bit(pk, b, env)) == b);
  }
}

TEST_CASE("shared AND: reconstructed result equals plain AND of plaintexts") {
  // two parties: every share assignment of (u, v)
  LocationList ab{"a", "b"};
  for (int m = 0; m < 16; ++m) {
    bool u1 = m & 1, u2 = m & 2, v1 = m & 4, v2 = m & 8;
    Faceted<bool> u(ab, {{"a", u1}, {"b", u2}});
    Faceted<bool> v(ab, {{"a", v1}, {"b", v2}});
    ScriptedWorld world(ab, m);
    auto r = run_choreo(ab, f_and(u, v), world);
    CHECK(xor_facets(r) == ((u1 != u2) && (v1 != v2)));
  }

  // three parties: every share assignment
  LocationList abc{"a", "b", "c"};
  for (int m = 0; m < 64; ++m) {
    bool u1 = m & 1, u2 = m & 2, u3 = m & 4, v1 = m & 8, v2 = m & 16, v3 = m & 32;
    Faceted<bool> u(abc, {{"a", u1}, {"b", u2}, {"c", u3}});
    Faceted<bool> v(abc, {{"a", v1}, {"b", v2}, {"c", v3}});
    ScriptedWorld world(abc, m);
    auto r = run_choreo(abc, f_and(u, v), world);
    CHECK(xor_facets(r) == ((u1 != u2 != u3) && (v1 != v2 != v3)));
  }

  // degenerate single party: a plain local AND
  LocationList solo{"a"};
  ScriptedWorld world(solo, 0);
  auto r = run_choreo(solo, f_and(Faceted<bool>(solo, {{"a", true}}),
                                  Faceted<bool>(solo, {{"a", true}})),
                      world);
  CHECK(r.facet("a") == true);
}

TEST_CASE("shared AND costs two messages per ordered pair") {
  LocationList ab{"a", "b"};
  Faceted<bool> u(ab, {{"a", true}, {"b", false}});
  Faceted<bool> v(ab, {{"a", false}, {"b", true}});
  ScriptedWorld world(ab, 1);
  InMemoryBackend backend(ab);
  TraceSink trace;
  auto outcomes = run_projected_all(ab, f_and(u, v), backend, world, &trace);
  for (const auto& p : ab) REQUIRE(outcomes.at(p).ok());
  // one transfer per ordered pair (a,b) and (b,a), two messages each
  CHECK(trace.send_count() == 4);
}

TEST_CASE("gmw literal wires give the value to the first party only") {
  LocationList abc{"a", "b", "c"};
  ScriptedWorld world(abc, 0);
  auto shares = run_choreo(abc, gmw(abc, lit_wire(true)), world);
  CHECK(shares.facet("a") == true);
  CHECK(shares.facet("b") == false);
  CHECK(shares.facet("c") == false);
  CHECK(xor_facets(shares) == true);
}

TEST_CASE("gmw evaluates gates over shares") {
  LocationList ab{"a", "b"};
  ScriptedWorld world(ab, 0);
  auto x = run_choreo(ab, gmw(ab, xor_gate(lit_wire(true), lit_wire(false))), world);
  CHECK(xor_facets(x) == true);

  // AND of two secret inputs, all four plaintext combinations
  for (bool va : {false, true})
    for (bool vb : {false, true}) {
      ScriptedWorld w(ab, 17, {{"a", {encode(va)}}, {"b", {encode(vb)}}});
      auto circuit = and_gate(input_wire(explicit_member("a", ab)),
                              input_wire(explicit_member("b", ab)));
      auto r = run_choreo(ab, gmw(ab, circuit), w);
      CHECK(xor_facets(r) == (va && vb));
    }

  // (a and b) xor c across three parties
  LocationList abc{"a", "b", "c"};
  ScriptedWorld w3(abc, 9, {{"a", {"true"}}, {"b", {"true"}}, {"c", {"true"}}});
  auto circuit = xor_gate(and_gate(input_wire(explicit_member("a", abc)),
                                   input_wire(explicit_member("b", abc))),
                          input_wire(explicit_member("c", abc)));
  CHECK(xor_facets(run_choreo(abc, gmw(abc, circuit), w3)) == false);
}

TEST_CASE("field arithmetic and share sums") {
  CHECK(Fp(Fp::P) == Fp(0));
  CHECK(Fp(Fp::P - 1) + Fp(1) == Fp(0));
  CHECK(Fp(3) - Fp(5) == Fp(Fp::P - 2));
  CHECK(Fp(1000) * Fp(1000) == Fp(1000000 % Fp::P));

  ScriptedLocalEnv env("p", 13);
  for (int trial = 0; trial < 100; ++trial) {
    Fp x = random_fp(env);
    auto shares = gen_fp_shares({"s1", "s2", "s3", "s4"}, x, env);
    Fp total;
    for (const auto& [name, s] : shares) total = total + s;
    CHECK(total == x);
  }
}

TEST_CASE("commitments are deterministic and bind both openings") {
  CHECK(lottery_commitment(1, 2) == lottery_commitment(1, 2));
  CHECK(lottery_commitment(1, 2) != lottery_commitment(2, 1));
  CHECK(lottery_commitment(1, 2) != lottery_commitment(1, 3));
  CHECK(lottery_commitment(0, 0).size() == 64);  // hex sha-256
}

TEST_CASE("lottery pays out one client's secret to the analyst") {
  LocationList census{"c1", "c2", "s1", "s2", "analyst"};
  auto clients = explicit_subset(LocationList{"c1", "c2"}, census);
  auto servers = explicit_subset(LocationList{"s1", "s2"}, census);
  ScriptedWorld world(census, 42, {{"c1", {"111"}}, {"c2", {"222"}}});
  run_choreo(census, lottery(clients, servers, explicit_member("analyst", census)), world);
  auto answer = output_of(world.scripted("analyst"), "The answer is:");
  CHECK((answer == "111" || answer == "222"));
}

TEST_CASE("a tampered opening fails the commitment check") {
  LocationList census{"c1", "c2", "s1", "s2", "analyst"};
  auto clients = explicit_subset(LocationList{"c1", "c2"}, census);
  auto servers = explicit_subset(LocationList{"s1", "s2"}, census);
  LotteryConfig config;
  config.tamper_rho = [](const LocationId& server, std::uint64_t rho) {
    return server == "s1" ? rho + 1 : rho;
  };
  ScriptedWorld world(census, 42, {{"c1", {"111"}}, {"c2", {"222"}}});
  CHECK_THROWS_AS(
      run_choreo(census, lottery(clients, servers, explicit_member("analyst", census), config),
                 world),
      commitment_check_failed);
}

TEST_CASE("lottery rejects degenerate censuses") {
  LocationList census{"c1", "s1", "s2", "analyst"};
  auto one_client = explicit_subset(LocationList{"c1"}, census);
  auto servers = explicit_subset(LocationList{"s1", "s2"}, census);
  CHECK_THROWS_AS(lottery(one_client, servers, explicit_member("analyst", census)),
                  witness_error);
}
