#pragma once

#include <string>
#include <vector>

#include <chor/choreo.hpp>

namespace chor {

/// A card value with arithmetic wrapping modulo 21, so any hand sums to
/// a value in [0, 21).
struct Card {
  int value = 0;

  Card() = default;
  explicit Card(int v) : value(((v % 21) + 21) % 21) {}

  friend Card operator+(Card a, Card b) { return Card(a.value + b.value); }
  friend bool operator>(Card a, Card b) { return a.value > b.value; }
  friend bool operator==(Card a, Card b) { return a.value == b.value; }
};

inline void to_json(nlohmann::json& j, const Card& c) { j = c.value; }
inline void from_json(const nlohmann::json& j, Card& c) { c = Card(j.get<int>()); }

inline Card sum_hand(const std::vector<Card>& hand) {
  Card total;
  for (Card c : hand) total = total + c;
  return total;
}

/// A simple black-jack-style game. The dealer gives everyone a card,
/// face up. Each player may request a second card. Then the dealer
/// reveals one more card that applies to everyone. Each player
/// individually wins if the sum of their cards (modulo 21) is greater
/// than 19. Census is "dealer" followed by the players.
inline Choreo<Unit> card_game(const LocationList& census) {
  if (census.size() < 2 || census[0] != "dealer")
    throw witness_error("card game census must be \"dealer\" followed by players");
  auto players = cons_set("dealer", LocationList(
      std::vector<LocationId>(census.begin() + 1, census.end())));
  auto dealer = listed_first(census);

  auto deal1 = fan_out(players, [census, players, dealer](const MemberWitness& player) {
    return local_then_send(
        dealer,
        [player](const UnwrapToken&, LocalEnv& env) {
          return get_input_as<Card>(env, "Enter random card for " + to_loc_tm(player) + ":");
        },
        cons(in_super(players, player), nobody(census)));
  });

  return bind(std::move(deal1), [census, players, dealer](Faceted<Card> hand1) {
    auto table = fan_in(players, players, [players, hand1](const MemberWitness& player) {
      return send_to(player, players, hand1, players);
    });
    return bind(std::move(table), [census, players, dealer,
                                   hand1](Located<std::vector<Card>> on_the_table) {
      auto ask = parallel(players, [hand1, on_the_table](const MemberWitness& player,
                                                         const UnwrapToken& un, LocalEnv& env) {
        env.put_note("My first card is: " + encode(un(player, hand1)));
        env.put_note("Cards on the table: " + encode(un(player, on_the_table)));
        return get_input_as<bool>(env, "I'll ask for another? [True/False]");
      });
      return bind(std::move(ask), [census, players, dealer,
                                   hand1](Faceted<bool> wants_next_card) {
        auto deal2 = fan_out(players, [census, players, hand1,
                                       wants_next_card](const MemberWitness& player) {
          LocationList pair{"dealer", to_loc_tm(player)};
          auto dealer2 = listed_first(pair);
          auto player2 = listed_second(pair);
          auto inner = bind(
              broadcast(pair, player2, player, wants_next_card),
              [pair, dealer2, player2, player, hand1](bool choice) {
                if (choice) {
                  auto draw = local_then_send(
                      dealer2,
                      [player](const UnwrapToken&, LocalEnv& env) {
                        return get_input_as<Card>(env, to_loc_tm(player) + "'s second card:");
                      },
                      cons(player2, nobody(pair)));
                  return bind(std::move(draw),
                              [player2, player, hand1](Located<Card> card2) {
                                return locally(player2, [player, hand1,
                                                         card2](const UnwrapToken& un,
                                                                LocalEnv&) {
                                  return std::vector<Card>{
                                      un(player, hand1),
                                      un(singleton(un.self()), card2)};
                                });
                              });
                }
                return locally(player2,
                               [player, hand1](const UnwrapToken& un, LocalEnv&) {
                                 return std::vector<Card>{un(player, hand1)};
                               });
              });
          return enclave_to(explicit_subset(pair, census),
                            cons(player2, nobody(pair)), std::move(inner));
        });
        return bind(std::move(deal2), [census, players, dealer](Faceted<std::vector<Card>> hand2) {
          auto table_draw = local_then_send(
              dealer,
              [](const UnwrapToken&, LocalEnv& env) {
                return get_input_as<Card>(env, "Enter a single card for everyone:");
              },
              players);
          return bind(std::move(table_draw),
                      [players, hand2](Located<Card> table_card) {
                        return parallel_(players, [hand2, table_card](
                                                      const MemberWitness& player,
                                                      const UnwrapToken& un, LocalEnv& env) {
                          std::vector<Card> hand{un(player, table_card)};
                          const auto& rest = un(player, hand2);
                          hand.insert(hand.end(), rest.begin(), rest.end());
                          env.put_note("My hand: " + encode(hand));
                          put_output_as(env, "My win result:", sum_hand(hand) > Card(19));
                          return Unit{};
                        });
                      });
        });
      });
    });
  });
}

}  // namespace chor
