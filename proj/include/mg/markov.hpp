#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mg/game.hpp"
#include "mg/rational.hpp"

namespace mg {

// Reduced game state: current history plus the utility vector over the
// full set of pairwise different strategies (exact scaled integers).
struct ChainState {
  std::uint32_t history = 0;
  std::vector<std::int64_t> utilities;

  auto operator<=>(const ChainState&) const = default;
};

struct TransitionMatrix {
  int memory = 1;
  int strategies_per_agent = 2;
  std::vector<ChainState> states;
  // out[i] lists (j, p) with sum_j p == 1 for every reachable row.
  std::vector<std::vector<std::pair<int, Rat>>> out;
  // Expected demand per state as a fraction of N (exact).
  std::vector<Rat> demand_coeff;
  // Empirical extraction bookkeeping (zero for enumerated chains).
  std::vector<std::int64_t> visits;
  bool empirical = false;
  bool low_confidence = false;  // some observed state seen < 10 times

  int size() const { return static_cast<int>(states.size()); }
};

struct StationaryDistribution {
  std::vector<Rat> pi;           // zero on transient states
  std::vector<int> recurrent;    // indices of the recurrent class
  bool exact = true;
};

// P[agent plays +1] for a state, from its utility level structure
// under independent uniform strategy draws.
Rat state_prob_plus(const ChainState& s, int memory, int S);

// Expected demand at a state: N * (2 p_plus - 1).
Rat expected_demand(const ChainState& s, int memory, std::int64_t agents, int S);

// Breadth-first closure of the step-payoff game from the all-zero
// utility states, one per initial history. Transitions follow the sign
// of the expected demand; when that sign is undetermined both branches
// are emitted with probability 1/2.
TransitionMatrix enumerate_chain(int m, int S, int max_exact_m = 2,
                                 std::int64_t max_states = 2000000);

// Strongly connected components with no outgoing edges.
std::vector<std::vector<int>> recurrent_classes(const TransitionMatrix& chain);

// Exact stationary distribution on the unique recurrent class; throws
// when the chain has several recurrent classes.
StationaryDistribution stationary(const TransitionMatrix& chain);

// P[A(t) = A(t+tau)] with demand matched by the per-state expected
// value, computed exactly from tau-step transition probabilities.
Rat period_match_probability(const TransitionMatrix& chain,
                             const StationaryDistribution& dist, int tau);

// Empirical state graph of a recorded trace (full-space utilities
// required); transition probabilities are observed frequencies.
TransitionMatrix extract_state_graph(const Trace& trace);

std::vector<int> out_degrees(const TransitionMatrix& chain);

std::string chain_to_json(const TransitionMatrix& chain,
                          const StationaryDistribution* dist = nullptr);
std::string chain_to_dot(const TransitionMatrix& chain);

}  // namespace mg
