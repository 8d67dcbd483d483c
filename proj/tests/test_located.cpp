#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chor/located.hpp>

using namespace chor;

TEST_CASE("unwrap tokens gate reads by identity and owner list") {
  LocationList ab{"a", "b"};
  auto v = Located<int>::all(ab, 7);
  UnwrapToken at_a("a");
  CHECK(at_a(explicit_member("a", ab), v) == 7);
  // wrong party for the witness
  CHECK_THROWS_AS(at_a(explicit_member("b", ab), v), witness_error);
  // witness context must be the owner list
  CHECK_THROWS_AS(at_a(singleton("a"), v), witness_error);

  Faceted<int> f(ab, {{"a", 1}, {"b", 2}});
  CHECK(at_a(explicit_member("a", ab), f) == 1);
  UnwrapToken at_b("b");
  CHECK(at_b(explicit_member("b", ab), f) == 2);
}

TEST_CASE("reading an empty payload is a hard fault") {
  LocationList ab{"a", "b"};
  auto v = Located<int>::absent(ab);
  UnwrapToken at_a("a");
  CHECK_THROWS_AS(at_a(explicit_member("a", ab), v), empty_read_error);

  Faceted<int> f(ab, {{"b", 2}});
  CHECK_THROWS_AS(at_a(explicit_member("a", ab), f), empty_read_error);
}

TEST_CASE("unwraps works on Located only, via subset witnesses") {
  LocationList abc{"a", "b", "c"};
  LocationList ab{"a", "b"};
  auto v = Located<int>::all(abc, 9);
  UnwrapsToken tok(ab);
  CHECK(tok(explicit_subset(ab, abc), v) == 9);
  CHECK_THROWS_AS(tok(explicit_subset(LocationList{"a"}, abc), v), witness_error);
}

TEST_CASE("flatten un-nests to the parties listed in both layers") {
  LocationList a{"a"};
  LocationList ab{"a", "b"};
  auto nested = Located<Located<int>>::all(a, Located<int>::all(ab, 7));
  auto flat = flatten(refl(a), explicit_subset(a, ab), nested);
  CHECK(flat.owners() == a);
  CHECK(flat.payload() == 7);

  // empty owner list: no readable payload anywhere
  auto none = flatten(nobody(a), nobody(ab), nested);
  CHECK(none.owners().empty());
  UnwrapToken at_a("a");
  CHECK_THROWS_AS(at_a(explicit_member("a", LocationList{}), none), witness_error);
}

TEST_CASE("localize looks up one facet") {
  LocationList ab{"a", "b"};
  Faceted<int> f(ab, {{"a", 1}, {"b", 2}});
  auto at_b = localize(explicit_member("b", ab), f);
  CHECK(at_b.owners() == LocationList{"b"});
  CHECK(at_b.payload() == 2);

  LocationList x{"x"};
  Faceted<int> fx(x, {{"x", 5}});
  CHECK(localize(singleton("x"), fx).payload() == 5);
}

TEST_CASE("fracture copies the shared payload to every owner") {
  LocationList ab{"a", "b"};
  auto v = Located<int>::all(ab, 9);
  auto f = fracture(v);
  CHECK(f.facet("a") == 9);
  CHECK(f.facet("b") == 9);

  // round trip through localize
  for (const auto& p : ab)
    CHECK(localize(explicit_member(p, ab), fracture(v)).payload() == v.payload());

  auto empty = fracture(Located<int>::absent(LocationList{}));
  CHECK(empty.facets().empty());
}
