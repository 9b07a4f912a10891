#include "doctest.h"

#include <set>

#include "mg/strategy.hpp"

using namespace mg;

TEST_CASE("history encoding packs oldest action into the top bit") {
  const History h = History::from_actions(
      {Action::kMinus, Action::kPlus, Action::kPlus});  // oldest first
  CHECK(h.m == 3);
  CHECK(h.bits == 0b011u);
  const auto back = h.actions();
  CHECK(back[0] == Action::kMinus);
  CHECK(back[2] == Action::kPlus);
}

TEST_CASE("history shift appends on the right and drops the oldest") {
  History h;
  h.m = 2;
  h.bits = 0b01u;  // (-1, +1)
  const History next = h.shifted(Action::kPlus);
  CHECK(next.bits == 0b11u);
  const History wrap = next.shifted(Action::kMinus);
  CHECK(wrap.bits == 0b10u);
}

TEST_CASE("m=1 strategy ids follow the canonical table order") {
  // id k is the k-th column of the four m=1 strategies:
  // (-1,-1), (-1,+1), (+1,-1), (+1,+1) over histories (-1, +1).
  const auto all = enumerate_full_strategy_space(1);
  REQUIRE(all.size() == 4);
  CHECK(all[0].action_on(0u) == Action::kMinus);
  CHECK(all[0].action_on(1u) == Action::kMinus);
  CHECK(all[1].action_on(0u) == Action::kMinus);
  CHECK(all[1].action_on(1u) == Action::kPlus);
  CHECK(all[2].action_on(0u) == Action::kPlus);
  CHECK(all[2].action_on(1u) == Action::kMinus);
  CHECK(all[3].action_on(0u) == Action::kPlus);
  CHECK(all[3].action_on(1u) == Action::kPlus);
}

TEST_CASE("full strategy space enumeration") {
  const auto m2 = enumerate_full_strategy_space(2);
  CHECK(m2.size() == 16);
  std::set<std::uint64_t> ids;
  for (const auto& s : m2) ids.insert(s.id);
  CHECK(ids.size() == 16);
  for (const auto& a : m2)
    for (const auto& b : m2)
      if (a.id != b.id) CHECK(hamming_distance(a, b) >= 1);

  // every history column balances between the two actions
  const auto m3 = enumerate_full_strategy_space(3);
  CHECK(m3.size() == 256);
  for (std::uint32_t h = 0; h < 8; ++h) {
    int plus = 0;
    for (const auto& s : m3)
      if (s.action_on(h) == Action::kPlus) ++plus;
    CHECK(plus == 128);
  }

  CHECK_THROWS(enumerate_full_strategy_space(6));
  CHECK_THROWS(enumerate_full_strategy_space(0));
}

TEST_CASE("hamming distance identities") {
  const Strategy s{0b0110, 2};
  CHECK(hamming_distance(s, s) == 0);
  CHECK(hamming_distance(s, s.complement()) == 4);
  // the two mixed m=1 strategies differ on both histories
  CHECK(hamming_distance(Strategy{0, 1}, Strategy{3, 1}) == 2);
  CHECK_THROWS(hamming_distance(Strategy{0, 1}, Strategy{0, 2}));
}
