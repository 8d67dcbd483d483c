#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chor/interp.hpp>

using namespace chor;

namespace {
LocationList abc{"a", "b", "c"};
}

TEST_CASE("parallel runs the body once per member, in order") {
  LocationList census{"a", "bb"};
  ScriptedWorld world(census, 0);
  auto c = parallel(allof(census), [](const MemberWitness& self, const UnwrapToken&,
                                      LocalEnv&) { return self.subject().size(); });
  auto f = run_choreo(census, c, world);
  CHECK(f.facet("a") == 1);
  CHECK(f.facet("bb") == 2);
}

TEST_CASE("parallel over the empty subset never invokes the body") {
  ScriptedWorld world(abc, 0);
  bool invoked = false;
  auto c = parallel(nobody(abc), [&invoked](const MemberWitness&, const UnwrapToken&,
                                            LocalEnv&) {
    invoked = true;
    return 0;
  });
  auto f = run_choreo(abc, c, world);
  CHECK(f.owners().empty());
  CHECK(f.facets().empty());
  CHECK_FALSE(invoked);
}

TEST_CASE("congruently produces one shared Located value") {
  LocationList a{"a"};
  ScriptedWorld world(a, 0);
  auto c = congruently(refl(a), [](const UnwrapsToken&) { return 5; });
  auto v = run_choreo(a, c, world);
  CHECK(v.owners() == a);
  CHECK(v.payload() == 5);
}

TEST_CASE("comm copies the payload to the recipients") {
  ScriptedWorld world(abc, 0);
  auto v = Located<int>::all(LocationList{"a"}, 42);
  auto recipients = cons(explicit_member("b", abc), cons(explicit_member("c", abc), nobody(abc)));
  std::uint64_t sends = 0;
  auto got = run_choreo(abc, send_to(explicit_member("a", abc), v, recipients), world, &sends);
  CHECK(got.owners() == LocationList{"b", "c"});
  CHECK(got.payload() == 42);
  CHECK(sends == 2);
}

TEST_CASE("a self-send costs one message less") {
  ScriptedWorld world(abc, 0);
  auto v = Located<int>::all(LocationList{"a"}, 7);
  std::uint64_t sends = 0;
  run_choreo(abc, send_to(explicit_member("a", abc), v, allof(abc)), world, &sends);
  CHECK(sends == 2);  // three recipients, sender among them

  std::uint64_t self_only = 0;
  run_choreo(abc,
             send_to(explicit_member("a", abc), v,
                     cons(explicit_member("a", abc), nobody(abc))),
             world, &self_only);
  CHECK(self_only == 0);
}

TEST_CASE("sending a Faceted transmits the sender's facet") {
  ScriptedWorld world(abc, 0);
  Faceted<int> f(abc, {{"a", 1}, {"b", 2}, {"c", 3}});
  auto direct = run_choreo(
      abc, send_to(explicit_member("b", abc), f, cons(explicit_member("c", abc), nobody(abc))),
      world);
  // oracle: localize at the sender, then comm the Located
  auto via_localize = run_choreo(
      abc,
      send_to(explicit_member("b", abc), localize(explicit_member("b", abc), f),
              cons(explicit_member("c", abc), nobody(abc))),
      world);
  CHECK(direct.payload() == via_localize.payload());
  CHECK(direct.payload() == 2);
}

TEST_CASE("enclave narrows the census; a full-census enclave just wraps") {
  ScriptedWorld world(abc, 0);
  auto inner = congruently(refl(abc), [](const UnwrapsToken&) { return 9; });
  auto wrapped = run_choreo(abc, enclave(refl(abc), fmap(inner, [](Located<int> v) {
                              return v.payload();
                            })),
                            world);
  CHECK(wrapped.owners() == abc);
  CHECK(wrapped.payload() == 9);

  // a witness built for the outer census fails inside the enclave
  LocationList ab{"a", "b"};
  auto bad = enclave(explicit_subset(ab, abc),
                     congruently(refl(abc), [](const UnwrapsToken&) { return 0; }));
  CHECK_THROWS_AS(run_choreo(abc, bad, world), census_error);
}

TEST_CASE("naked requires the census to be covered by the owners") {
  LocationList ab{"a", "b"};
  ScriptedWorld world(ab, 0);
  auto v = Located<bool>::all(abc, true);
  CHECK(run_choreo(ab, naked(explicit_subset(ab, abc), v), world) == true);

  // owners [a] cannot cover census [a,b]
  auto narrow = Located<bool>::all(LocationList{"a"}, true);
  CHECK_THROWS_AS(naked(explicit_subset(ab, abc), narrow), witness_error);
}

TEST_CASE("fanOut collects per-party results in subject order") {
  ScriptedWorld world(abc, 0);
  auto c = fan_out(allof(abc), [](const MemberWitness& q) {
    return locally0(q, LocalProgram<std::size_t>(
                           [i = q.index()](LocalEnv&) { return i * 10; }));
  });
  auto f = run_choreo(abc, c, world);
  CHECK(f.facet("a") == 0);
  CHECK(f.facet("b") == 10);
  CHECK(f.facet("c") == 20);

  bool invoked = false;
  auto empty = fan_out(nobody(abc), [&invoked](const MemberWitness& q) {
    invoked = true;
    return locally0(in_super(nobody(abc), q), LocalProgram<int>([](LocalEnv&) { return 0; }));
  });
  CHECK(run_choreo(abc, empty, world).facets().empty());
  CHECK_FALSE(invoked);
}

TEST_CASE("fanOut rejects a body whose result isn't owned by the iteration party") {
  ScriptedWorld world(abc, 0);
  auto c = fan_out(allof(abc), [](const MemberWitness&) {
    return locally0(explicit_member("a", abc), LocalProgram<int>([](LocalEnv&) { return 1; }));
  });
  CHECK_THROWS_AS(run_choreo(abc, c, world), census_error);
}

TEST_CASE("fanIn gathers a list at the recipients, in subject order") {
  ScriptedWorld world(abc, 0);
  auto rs = cons(explicit_member("c", abc), nobody(abc));
  auto c = fan_in(allof(abc), rs, [rs](const MemberWitness& q) {
    return local_then_send(
        in_super(allof(abc), q),
        [i = q.index()](const UnwrapToken&, LocalEnv&) { return static_cast<int>(i); }, rs);
  });
  auto v = run_choreo(abc, c, world);
  CHECK(v.owners() == LocationList{"c"});
  CHECK(v.payload() == std::vector<int>{0, 1, 2});

  auto empty = fan_in(nobody(abc), rs, [rs](const MemberWitness& q) {
    return local_then_send(
        in_super(nobody(abc), q), [](const UnwrapToken&, LocalEnv&) { return 0; }, rs);
  });
  CHECK(run_choreo(abc, empty, world).payload().empty());
}

TEST_CASE("broadcast equals its sendTo-then-naked expansion") {
  ScriptedWorld world(abc, 0);
  auto v = Located<int>::all(LocationList{"b"}, 13);
  std::uint64_t sends1 = 0, sends2 = 0;
  auto direct =
      run_choreo(abc, broadcast(abc, explicit_member("b", abc), v), world, &sends1);
  auto expanded = run_choreo(
      abc,
      bind(send_to(explicit_member("b", abc), v, allof(abc)),
           [](Located<int> shared) { return naked(refl(abc), std::move(shared)); }),
      world, &sends2);
  CHECK(direct == expanded);
  CHECK(direct == 13);
  CHECK(sends1 == sends2);
  CHECK(sends1 == 2);  // everyone but the sender
}

TEST_CASE("cond gives knowledge-of-choice-safe branching") {
  ScriptedWorld world(abc, 0);
  LocationList ab{"a", "b"};
  auto guard = Located<bool>::all(ab, true);
  auto c = cond(explicit_subset(ab, abc), refl(ab), guard, [ab](bool g) {
    return congruently(refl(ab), [g](const UnwrapsToken&) { return g ? 1 : 2; });
  });
  auto v = run_choreo(abc, c, world);
  CHECK(v.owners() == ab);
  CHECK(v.payload().payload() == 1);
}

TEST_CASE("enclaveTo flattens so the result isn't doubly Located") {
  ScriptedWorld world(abc, 0);
  LocationList ab{"a", "b"};
  LocationList just_b{"b"};
  auto inner = congruently(cons(listed_second(ab), nobody(ab)),
                           [](const UnwrapsToken&) { return 4; });
  auto v = run_choreo(
      abc, enclave_to(explicit_subset(ab, abc), explicit_subset(just_b, ab), inner), world);
  CHECK(v.owners() == just_b);
  CHECK(v.payload() == 4);
}

TEST_CASE("pureLocalThenSend runs the local program then ships the result") {
  ScriptedWorld world(abc, 0, {{"a", {"\"ping\""}}});
  std::uint64_t sends = 0;
  auto c = pure_local_then_send(explicit_member("a", abc),
                                LocalProgram<std::string>([](LocalEnv& env) {
                                  return get_input_as<std::string>(env, "say:");
                                }),
                                cons(explicit_member("c", abc), nobody(abc)));
  auto v = run_choreo(abc, c, world, &sends);
  CHECK(v.payload() == "ping");
  CHECK(sends == 1);
}

TEST_CASE("seeded centralized execution is deterministic") {
  auto run_once = [] {
    ScriptedWorld world(abc, 99);
    auto c = parallel0(allof(abc), LocalProgram<std::uint64_t>([](LocalEnv& env) {
                         return random_range(env, 0, 1u << 20);
                       }));
    auto f = run_choreo(abc, c, world);
    std::vector<std::uint64_t> out;
    for (const auto& p : abc) out.push_back(f.facet(p));
    return out;
  };
  CHECK(run_once() == run_once());
}

TEST_CASE("census discipline: witnesses over the wrong census are rejected at the node") {
  ScriptedWorld world(abc, 0);
  LocationList other{"x", "y"};
  auto c = parallel0(allof(other), LocalProgram<int>([](LocalEnv&) { return 0; }));
  CHECK_THROWS_AS(run_choreo(abc, c, world), census_error);
}
