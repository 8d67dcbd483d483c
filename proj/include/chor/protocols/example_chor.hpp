#pragma once

#include <chor/choreo.hpp>

namespace chor {

/// A small value-passing choreography: an int originating at bob makes a
/// round trip through an enclave of `clique` (bob sends to alice, alice
/// broadcasts within the clique) and ends up owned only by carroll.
/// The broadcast reaches the clique only, not the whole census.
inline Choreo<Located<int>> example_chor(const LocationList& census,
                                         const LocationList& clique, const LocationId& alice,
                                         const LocationId& bob, const LocationId& carroll,
                                         int bob_foo) {
  auto bob_in_clique = explicit_member(bob, clique);
  auto alice_in_clique = explicit_member(alice, clique);
  auto foo = bind(
      send_to(bob_in_clique, Located<int>::all(LocationList{bob}, bob_foo),
              cons(alice_in_clique, nobody(clique))),
      [clique, alice_in_clique](Located<int> alice_foo) {
        return broadcast(clique, alice_in_clique, std::move(alice_foo));
      });
  return bind(enclave(explicit_subset(clique, census), std::move(foo)),
              [census, bob, carroll](Located<int> their_foo) {
                return send_to(explicit_member(bob, census), std::move(their_foo),
                               cons(explicit_member(carroll, census), nobody(census)));
              });
}

}  // namespace chor
