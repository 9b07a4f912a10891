#pragma once

#include <cstdint>
#include <vector>

#include "mg/rational.hpp"

namespace mg {

// Closed forms for the step-payoff utility ladder reached when some
// strategy first attains an extremal utility +-2^m: utility levels
// u_l = 2^m - 2(l-1) for l = 1..2^m+1, strategies per level given by
// binomial coefficients, and the induced greedy-choice probabilities.
//
// All probabilities assume each agent's S strategies are independent
// uniform draws from the 2^P pairwise different strategies.

// Descending utility levels with their strategy counts.
struct LevelList {
  std::vector<std::int64_t> levels;  // u_1 > u_2 > ... > u_{2^m+1}
  std::vector<Int> counts;
};

struct BestActionStats {
  Rat p_max;          // active strategy sits at the top level
  Rat p_min;          // active strategy sits at the bottom level
  Rat p_best_action;  // agent's action equals the best strategy's action
};

// Number of strategies whose utility equals u_l (1-based level index).
Int level_count(int m, int l);

// Number of strategies with utility >= u_l, i.e. at levels 1..l.
Int tail_count(int m, int l);

LevelList level_list(int m);

// P[active strategy has utility u_l] for the step payoff ladder.
Rat prob_active_at_level_step(int m, int S, int l);

BestActionStats best_action_stats(int m, int S);

// P[active strategy ranks l-th] when all 2^P utilities are distinct
// (proportional payoff); l runs over 1..2^P.
Rat prob_active_at_level_proportional(int m, int S, std::int64_t l);

// Closed form for sum_{l=1..L} of the distinct-utilities probability:
// 1 - (1 - L/2^P)^S. At L = 2^(P-1) this is 1 - 1/2^S.
Rat prob_active_in_top_proportional(int m, int S, std::int64_t L);

// Expected peak magnitude of the demand, N(1 - 1/2^(S-1)).
Rat expected_peak_height(std::int64_t agents, int S);

// Expected peak rate per step, 1/2^m (two peaks per Euler period).
Rat expected_peak_frequency(int m);

// One utility level of an arbitrary state: `count` strategies share the
// value, `plus_count` of them recommend +1 on the current history.
struct ActionLevel {
  std::int64_t count = 0;
  std::int64_t plus_count = 0;
};

// P[agent's action is +1] for utility levels sorted by decreasing
// value, under independent uniform draws and uniform tie-breaks.
Rat prob_action_plus(const std::vector<ActionLevel>& levels_desc, int S);

}  // namespace mg
