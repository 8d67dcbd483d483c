#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chor/codec.hpp>
#include <chor/local.hpp>
#include <chor/protocols/card_game.hpp>
#include <chor/protocols/kvs.hpp>
#include <chor/protocols/lottery.hpp>
#include <chor/protocols/ot.hpp>

using namespace chor;

TEST_CASE("primitive round trips") {
  CHECK(decode<bool>(encode(true)) == true);
  CHECK(decode<int>(encode(-17)) == -17);
  CHECK(decode<std::uint64_t>(encode(std::uint64_t(1) << 60)) == std::uint64_t(1) << 60);
  CHECK(decode<std::string>(encode(std::string("hi there"))) == "hi there");
  CHECK(decode<Unit>(encode(Unit{})) == Unit{});
  auto p = std::pair<bool, bool>{true, false};
  CHECK(decode<std::pair<bool, bool>>(encode(p)) == p);
  std::vector<bool> bits{true, false, true};
  CHECK(decode<std::vector<bool>>(encode(bits)) == bits);
}

TEST_CASE("protocol type round trips") {
  CHECK(decode<Card>(encode(Card(20))) == Card(20));
  CHECK(decode<Card>("25") == Card(4));  // wraps on decode

  auto req = Request::put("key", "value with spaces");
  CHECK(decode<Request>(encode(req)) == req);
  auto resp = Response::desynchronization({Response::found("a"), Response::not_found()});
  CHECK(decode<Response>(encode(resp)) == resp);
  CHECK(decode<Response>(encode(Response::stopped())) == Response::stopped());

  CHECK(decode<Fp>(encode(Fp(999982))) == Fp(999982));
  CHECK(decode<Fp>(encode(Fp(0))) == Fp(0));

  CipherPair c{123456789, 42};
  auto c2 = decode<CipherPair>(encode(c));
  CHECK(c2.c1 == c.c1);
  CHECK(c2.c2 == c.c2);

  PkPair pks{{3233, 17}, {999, 65537}};
  auto pks2 = decode<PkPair>(encode(pks));
  CHECK(pks2.first.n == pks.first.n);
  CHECK(pks2.second.e == pks.second.e);
}

TEST_CASE("garbage decodes raise codec errors, not crashes") {
  CHECK_THROWS_AS(decode<bool>("garbage"), codec_error);
  CHECK_THROWS_AS(decode<bool>(""), codec_error);
  CHECK_THROWS_AS(decode<int>("\"string\""), codec_error);
  CHECK_THROWS_AS(decode<Request>("{\"t\":\"nonsense\"}"), codec_error);
  CHECK_THROWS_AS(decode<Request>("{}"), codec_error);
  CHECK_THROWS_AS(decode<Unit>("3"), codec_error);
}

TEST_CASE("malformed scripted input re-prompts instead of failing") {
  ScriptedLocalEnv env("p", 0, {"garbage", "true"});
  CHECK(get_input_as<bool>(env, "q?") == true);
  auto events = env.events();
  REQUIRE(events.size() == 3);
  CHECK(events[0].kind == LocalEvent::Kind::Input);
  CHECK(events[1].kind == LocalEvent::Kind::Note);
  CHECK(events[1].a == "malformed input, try again");
  CHECK(events[2].b == "true");
}

TEST_CASE("wire form is the compact dump") {
  CHECK(encode(Request::put("k", "v")) == "{\"k\":\"k\",\"t\":\"put\",\"v\":\"v\"}");
  CHECK(encode(true) == "true");
  CHECK(encode(Unit{}) == "null");
}
