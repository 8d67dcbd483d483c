#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <thread>

#include <chor/interp.hpp>
#include <chor/protocols/example_chor.hpp>

using namespace chor;

namespace {

const LocationList census{"alice", "bob", "carroll"};
const LocationList clique{"alice", "bob"};

Choreo<Located<int>> fig_example(int bob_foo) {
  return example_chor(census, clique, "alice", "bob", "carroll", bob_foo);
}

}  // namespace

TEST_CASE("runChoreo of a pure program is the value") {
  ScriptedWorld world(census, 0);
  CHECK(run_choreo(census, pure(41), world) == 41);
}

TEST_CASE("the round-trip example ends with carroll owning bob's value") {
  ScriptedWorld world(census, 0);
  auto v = run_choreo(census, fig_example(3), world);
  CHECK(v.owners() == LocationList{"carroll"});
  CHECK(v.payload() == 3);
}

TEST_CASE("projection for an outsider is the pure no-op program") {
  ScriptedWorld world(census, 0);
  InMemoryBackend backend(census);
  TraceSink trace;
  auto prog = epp(census, fig_example(3), "zoe");
  auto r = run_network(backend, "zoe", prog, world.at("alice"), &trace);
  CHECK_FALSE(r.has_payload());
  CHECK(trace.snapshot().empty());
}

TEST_CASE("carroll's projection of the example is one receive and no sends") {
  ScriptedWorld world(census, 0);
  InMemoryBackend backend(census);
  TraceSink trace;
  auto outcomes = run_projected_all(census, fig_example(5), backend, world, &trace);
  for (const auto& p : census) CHECK(outcomes.at(p).ok());
  CHECK(outcomes.at("carroll").value().payload() == 5);

  auto carroll = trace.for_party("carroll");
  REQUIRE(carroll.size() == 1);
  CHECK(carroll[0].kind == NetEvent::Kind::Recv);
  CHECK(carroll[0].peer == "bob");

  // the enclave's broadcast stays inside the clique: 1 (bob to alice)
  // + 1 (alice's broadcast back to bob) + 1 (bob to carroll)
  CHECK(trace.send_count() == 3);
  CHECK(trace.recv_count() == 3);
}

TEST_CASE("self-send projects to no network effects") {
  LocationList just_a{"a"};
  ScriptedWorld world(just_a, 0);
  InMemoryBackend backend(just_a);
  TraceSink trace;
  auto c = send_to(explicit_member("a", just_a), Located<int>::all(just_a, 1),
                   allof(just_a));
  auto outcomes = run_projected_all(just_a, c, backend, world, &trace);
  CHECK(outcomes.at("a").value().payload() == 1);
  CHECK(trace.snapshot().empty());
}

TEST_CASE("hand-built network programs: two-party echo") {
  LocationList ab{"a", "b"};
  InMemoryBackend backend(ab);
  ScriptedWorld world(ab, 0);

  auto a_prog = net::bind(net::send(1, {"b"}), [](Unit) { return net::recv<int>("b"); });
  auto b_prog = net::bind(net::recv<int>("a"), [](int x) {
    return net::bind(net::send(x + 1, {"a"}), [x](Unit) { return net::pure(x); });
  });

  int got_a = 0, got_b = 0;
  std::thread ta([&] { got_a = run_network(backend, "a", a_prog, world.at("a")); });
  std::thread tb([&] { got_b = run_network(backend, "b", b_prog, world.at("b")); });
  ta.join();
  tb.join();
  CHECK(got_a == 2);
  CHECK(got_b == 1);
}

TEST_CASE("a receive with no matching send times out instead of hanging") {
  LocationList ab{"a", "b"};
  InMemoryBackend backend(ab, std::chrono::milliseconds(200));
  ScriptedWorld world(ab, 0);
  CHECK_THROWS_AS(run_network(backend, "a", net::recv<int>("b"), world.at("a")),
                  timeout_error);
}

TEST_CASE("projected runs match the centralized run, trace for trace") {
  // a composite program touching every primitive
  LocationList ps{"p", "q", "r"};
  auto program = [&] {
    auto step1 = parallel(allof(ps), [](const MemberWitness& self, const UnwrapToken&,
                                        LocalEnv& env) {
      return random_range(env, 0, 100) + self.index();
    });
    return bind(step1, [ps = ps](Faceted<std::uint64_t> draws) {
      auto gathered = fan_in(allof(ps), allof(ps), [ps, draws](const MemberWitness& m) {
        return send_to(m, m, draws, allof(ps));
      });
      return bind(gathered, [ps](Located<std::vector<std::uint64_t>> all) {
        return bind(naked(refl(ps), all), [ps](std::vector<std::uint64_t> values) {
          std::uint64_t total = 0;
          for (auto v : values) total += v;
          return parallel_(allof(ps),
                           [total](const MemberWitness&, const UnwrapToken&, LocalEnv& env) {
                             put_output_as(env, "Total:", total);
                             return Unit{};
                           });
        });
      });
    });
  };

  ScriptedWorld central(ps, 11);
  std::uint64_t logical_sends = 0;
  run_choreo(ps, program(), central, &logical_sends);

  ScriptedWorld projected(ps, 11);
  InMemoryBackend backend(ps);
  TraceSink trace;
  auto outcomes = run_projected_all(ps, program(), backend, projected, &trace);
  for (const auto& p : ps) {
    REQUIRE(outcomes.at(p).ok());
    CHECK(central.scripted(p).events() == projected.scripted(p).events());
  }
  CHECK(trace.send_count() == logical_sends);
  CHECK(trace.send_count() == trace.recv_count());
}

TEST_CASE("per-pair delivery order matches send order") {
  LocationList ab{"a", "b"};
  InMemoryBackend backend(ab);
  ScriptedWorld world(ab, 0);
  auto a_prog = [&] {
    Network<Unit> prog = net::send_raw("m0", {"b"});
    for (int i = 1; i < 50; ++i)
      prog = net::bind(prog, [i](Unit) {
        return net::send_raw("m" + std::to_string(i), {"b"});
      });
    return prog;
  }();
  std::thread ta([&] { run_network(backend, "a", a_prog, world.at("a")); });
  std::vector<std::string> got;
  for (int i = 0; i < 50; ++i) got.push_back(backend.recv("b", "a"));
  ta.join();
  for (int i = 0; i < 50; ++i) CHECK(got[i] == "m" + std::to_string(i));
}
