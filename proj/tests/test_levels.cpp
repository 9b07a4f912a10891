#include "doctest.h"

#include <algorithm>
#include <map>
#include <vector>

#include "mg/debruijn.hpp"
#include "mg/game.hpp"
#include "mg/levels.hpp"
#include "mg/payoff.hpp"

using namespace mg;

namespace {

// Independent census oracle: pick a reference prediction table, walk
// every strategy through one forced win/loss pass over all histories
// (each history exactly once), and bucket the resulting utilities.
// The walk itself uses the payoff accumulation, not the closed forms.
std::map<std::int64_t, std::int64_t> utility_census(int m) {
  const int P = 1 << m;
  // find a reference table whose induced history walk visits every
  // history exactly once before repeating
  std::uint64_t ref = 0;
  bool found = false;
  for (std::uint64_t cand = 0; cand < strategy_space_size(m) && !found; ++cand) {
    std::uint32_t h = 0;
    std::vector<char> seen(P, 0);
    bool ok = true;
    for (int t = 0; t < P; ++t) {
      if (seen[h]) {
        ok = false;
        break;
      }
      seen[h] = 1;
      const Strategy s{cand, m};
      h = shift_history(h, m, action_bit(s.action_on(h)));
    }
    if (ok) {
      ref = cand;
      found = true;
    }
  }
  REQUIRE(found);

  std::map<std::int64_t, std::int64_t> census;
  for (std::uint64_t id = 0; id < strategy_space_size(m); ++id) {
    const Strategy s{id, m};
    const Strategy winner{ref, m};
    std::uint32_t h = 0;
    double u = 0.0;
    for (int t = 0; t < P; ++t) {
      // the minority action is the reference table's prediction, so
      // the realized demand sign is its opposite
      const Action minority = winner.action_on(h);
      const std::int64_t demand = minority == Action::kPlus ? -3 : 3;
      u += payoff(s.action_on(h), demand, PayoffKind::kStep, 3);
      h = shift_history(h, m, action_bit(minority));
    }
    ++census[static_cast<std::int64_t>(u)];
  }
  return census;
}

}  // namespace

TEST_CASE("level counts match a brute-force census") {
  for (int m = 1; m <= 3; ++m) {
    const auto census = utility_census(m);
    const int u_max = 1 << m;
    CHECK(static_cast<int>(census.size()) == u_max + 1);
    for (int l = 1; l <= u_max + 1; ++l) {
      const std::int64_t value = u_max - 2 * (l - 1);
      const auto it = census.find(value);
      REQUIRE(it != census.end());
      CHECK(Int(static_cast<long>(it->second)) == level_count(m, l));
    }
  }
}

TEST_CASE("level counts and tails") {
  CHECK(level_count(1, 1) == 1);
  CHECK(level_count(1, 2) == 2);
  CHECK(level_count(1, 3) == 1);
  CHECK(level_count(2, 3) == 6);
  CHECK_THROWS(level_count(1, 4));
  CHECK_THROWS(level_count(1, 0));

  CHECK(tail_count(1, 1) == 1);
  CHECK(tail_count(1, 2) == 3);
  CHECK(tail_count(2, 5) == 16);
  for (int m = 1; m <= 5; ++m) {
    Int total(0);
    for (int l = 1; l <= (1 << m) + 1; ++l) total += level_count(m, l);
    CHECK(total == pow2(1u << m));
    CHECK(tail_count(m, (1 << m) + 1) == pow2(1u << m));
    for (int l = 2; l <= (1 << m) + 1; ++l)
      CHECK(tail_count(m, l) > tail_count(m, l - 1));
  }
}

TEST_CASE("step ladder probabilities") {
  CHECK(prob_active_at_level_step(1, 2, 1) == Rat(7, 16));
  // single strategy: uniform over the space
  for (int l = 1; l <= 3; ++l) {
    Rat expect(level_count(1, l), pow2(2u));
    expect.canonicalize();
    CHECK(prob_active_at_level_step(1, 1, l) == expect);
  }
  for (int m = 1; m <= 3; ++m)
    for (int S = 1; S <= 4; ++S) {
      Rat sum(0);
      for (int l = 1; l <= (1 << m) + 1; ++l)
        sum += prob_active_at_level_step(m, S, l);
      CHECK(sum == 1);
    }
}

TEST_CASE("best action statistics") {
  const auto st = best_action_stats(1, 2);
  CHECK(st.p_max == Rat(7, 16));
  CHECK(st.p_min == Rat(1, 16));
  CHECK(st.p_best_action == Rat(11, 16));
  // expected demand at the extremal state: N (2 p_best - 1) = 3N/8
  const Rat coeff = 2 * st.p_best_action - 1;
  CHECK(coeff == Rat(3, 8));
  for (int m = 1; m <= 4; ++m)
    for (int S = 2; S <= 4; ++S) {
      const auto s = best_action_stats(m, S);
      CHECK(s.p_max > s.p_min);
      CHECK(s.p_best_action > Rat(1, 2));
      CHECK(s.p_best_action <= 1);
    }
}

TEST_CASE("distinct-utility ladder for the proportional payoff") {
  CHECK(prob_active_at_level_proportional(1, 2, 1) == Rat(7, 16));
  for (std::int64_t l = 1; l <= 4; ++l) {
    Rat expect(1, 4);
    CHECK(prob_active_at_level_proportional(1, 1, l) == expect);
  }
  for (int m = 1; m <= 3; ++m)
    for (int S = 1; S <= 4; ++S) {
      Rat sum(0);
      const std::int64_t space = std::int64_t{1} << (1 << m);
      for (std::int64_t l = 1; l <= space; ++l)
        sum += prob_active_at_level_proportional(m, S, l);
      CHECK(sum == 1);
      // mass of the top half telescopes to 1 - 1/2^S
      Rat top(0);
      for (std::int64_t l = 1; l <= space / 2; ++l)
        top += prob_active_at_level_proportional(m, S, l);
      const Rat expect = Rat(1) - Rat(Int(1), pow2(static_cast<unsigned>(S)));
      CHECK(top == expect);
      CHECK(prob_active_in_top_proportional(m, S, space / 2) == expect);
    }
}

TEST_CASE("expected peak height") {
  CHECK(expected_peak_height(1601, 2) == Rat(1601, 2));
  CHECK(expected_peak_height(401, 2) == Rat(401, 2));
  CHECK(rat_double(expected_peak_height(1601, 2)) == doctest::Approx(800.5));
  // grows towards N as S increases
  Rat prev(0);
  for (int S = 2; S <= 10; ++S) {
    const Rat h = expected_peak_height(1000, S);
    CHECK(h > prev);
    CHECK(h < 1000);
    prev = h;
  }
  CHECK_THROWS(expected_peak_height(100, 1));
}

TEST_CASE("generic level structure probability") {
  // the extremal m=1 state: alpha3 at +2 acting +1, two middles split,
  // alpha2 at -2 acting -1 => P[+1] = 11/16 for S=2
  std::vector<ActionLevel> levels = {{1, 1}, {2, 1}, {1, 0}};
  CHECK(prob_action_plus(levels, 2) == Rat(11, 16));
  // all four tied: coin
  CHECK(prob_action_plus({{4, 2}}, 2) == Rat(1, 2));
  // top pair acting together
  CHECK(prob_action_plus({{2, 2}, {2, 0}}, 2) == Rat(3, 4));
}
