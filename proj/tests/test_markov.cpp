#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>

#include "mg/game.hpp"
#include "mg/markov.hpp"

using namespace mg;

namespace {

int find_state(const TransitionMatrix& chain, std::uint32_t history,
               std::vector<std::int64_t> utilities) {
  for (int v = 0; v < chain.size(); ++v)
    if (chain.states[v].history == history &&
        chain.states[v].utilities == utilities)
      return v;
  return -1;
}

bool has_edge(const TransitionMatrix& chain, int from, int to) {
  for (const auto& [j, p] : chain.out[from])
    if (j == to) return true;
  return false;
}

}  // namespace

TEST_CASE("m=1 chain reproduces the twelve canonical states") {
  const auto chain = enumerate_chain(1, 2);
  REQUIRE(chain.size() == 12);

  // zero-utility initial states, one per history
  const int x1 = find_state(chain, 0, {0, 0, 0, 0});
  const int x2 = find_state(chain, 1, {0, 0, 0, 0});
  const int x3 = find_state(chain, 1, {-1, -1, 1, 1});
  const int x4 = find_state(chain, 0, {1, -1, 1, -1});
  const int x5 = find_state(chain, 0, {0, -2, 2, 0});
  const int x7 = find_state(chain, 1, {-2, 0, 0, 2});
  const int x9 = find_state(chain, 0, {-1, -1, 1, 1});
  const int x11 = find_state(chain, 0, {1, 1, -1, -1});
  const int x12 = find_state(chain, 1, {-1, 1, -1, 1});
  for (int v : {x1, x2, x3, x4, x5, x7, x9, x11, x12}) REQUIRE(v >= 0);

  // branching structure of the transition graph
  CHECK(chain.out[x1].size() == 2);
  CHECK(has_edge(chain, x1, x3));
  CHECK(has_edge(chain, x1, x11));
  CHECK(chain.out[x2].size() == 2);
  CHECK(has_edge(chain, x2, x4));
  CHECK(has_edge(chain, x2, x12));
  CHECK(chain.out[x3].size() == 2);
  CHECK(has_edge(chain, x3, x5));
  CHECK(has_edge(chain, x3, x7));
  // deterministic corridor states
  CHECK(chain.out[x5].size() == 1);
  CHECK(has_edge(chain, x5, x4));
  CHECK(has_edge(chain, x7, x9));
  CHECK(has_edge(chain, x9, x1));
  CHECK(has_edge(chain, x11, x2));

  // every branch state carries probability 1/2 per edge
  for (int v = 0; v < chain.size(); ++v) {
    Rat sum(0);
    for (const auto& [j, p] : chain.out[v]) {
      sum += p;
      if (chain.out[v].size() == 2) CHECK(p == Rat(1, 2));
    }
    CHECK(sum == 1);
  }
  // four undetermined states, eight with a sole successor
  int branchers = 0, corridors = 0;
  for (int v = 0; v < chain.size(); ++v) {
    if (chain.out[v].size() == 2) ++branchers;
    if (chain.out[v].size() == 1) ++corridors;
  }
  CHECK(branchers == 4);
  CHECK(corridors == 8);

  // expected demand levels
  CHECK(chain.demand_coeff[x1] == 0);
  CHECK(chain.demand_coeff[x5] == Rat(3, 8));
  CHECK(chain.demand_coeff[x9] == Rat(1, 2));
  CHECK(chain.demand_coeff[x11] == Rat(-1, 2));
}

TEST_CASE("m=1 stationary distribution is exact") {
  const auto chain = enumerate_chain(1, 2);
  const auto dist = stationary(chain);
  REQUIRE(dist.recurrent.size() == 12);
  Rat sum(0);
  std::map<Rat, int> histogram;
  for (const auto& p : dist.pi) {
    sum += p;
    ++histogram[p];
  }
  CHECK(sum == 1);
  CHECK(histogram[Rat(1, 8)] == 4);
  CHECK(histogram[Rat(1, 16)] == 8);
  // the zero-demand states carry 1/8 each
  for (int v = 0; v < chain.size(); ++v)
    CHECK(dist.pi[v] == (chain.demand_coeff[v] == 0 ? Rat(1, 8) : Rat(1, 16)));
}

TEST_CASE("stationary handles degenerate chains") {
  // absorbing single state
  TransitionMatrix chain;
  chain.states.resize(2);
  chain.states[0].history = 0;
  chain.states[1].history = 1;
  chain.out.resize(2);
  chain.demand_coeff.assign(2, Rat(0));
  chain.out[0].emplace_back(1, Rat(1));
  chain.out[1].emplace_back(1, Rat(1));
  const auto dist = stationary(chain);
  CHECK(dist.pi[0] == 0);
  CHECK(dist.pi[1] == 1);

  // two-state symmetric chain
  TransitionMatrix sym;
  sym.states.resize(2);
  sym.out.resize(2);
  sym.demand_coeff.assign(2, Rat(0));
  sym.out[0].emplace_back(0, Rat(1, 2));
  sym.out[0].emplace_back(1, Rat(1, 2));
  sym.out[1].emplace_back(0, Rat(1, 2));
  sym.out[1].emplace_back(1, Rat(1, 2));
  const auto d2 = stationary(sym);
  CHECK(d2.pi[0] == Rat(1, 2));
  CHECK(d2.pi[1] == Rat(1, 2));

  // two disjoint cycles: no unique distribution
  TransitionMatrix red;
  red.states.resize(2);
  red.out.resize(2);
  red.demand_coeff.assign(2, Rat(0));
  red.out[0].emplace_back(0, Rat(1));
  red.out[1].emplace_back(1, Rat(1));
  CHECK(recurrent_classes(red).size() == 2);
  CHECK_THROWS(stationary(red));
}

TEST_CASE("expected demand from the level structure") {
  ChainState s;
  s.history = 0;
  s.utilities = {0, -2, 2, 0};
  CHECK(expected_demand(s, 1, 401, 2) == Rat(3 * 401, 8));
  s.utilities = {0, 0, 0, 0};
  CHECK(expected_demand(s, 1, 401, 2) == 0);
  s.utilities = {-1, -1, 1, 1};
  CHECK(expected_demand(s, 1, 401, 2) == Rat(401, 2));
}

TEST_CASE("period match probability diagnostics") {
  const auto chain = enumerate_chain(1, 2);
  const auto dist = stationary(chain);
  CHECK(period_match_probability(chain, dist, 0) == 1);
  // the class process is strongly periodic: multiples of 2*2^m carry
  // the maximal match probability
  const Rat at4 = period_match_probability(chain, dist, 4);
  Rat best(-1);
  int best_tau = 0;
  for (int tau = 1; tau <= 16; ++tau) {
    const Rat p = period_match_probability(chain, dist, tau);
    if (p > best) {
      best = p;
      best_tau = tau;
    }
  }
  CHECK(best_tau == 4);
  CHECK(best == at4);
}

TEST_CASE("m=2 chain closes finitely with bounded utilities") {
  const auto chain = enumerate_chain(2, 2);
  CHECK(chain.size() == 144);
  for (const auto& st : chain.states)
    for (std::int64_t u : st.utilities) CHECK(std::abs(u) <= 4);
  // closure: every edge points inside the enumerated set
  for (int v = 0; v < chain.size(); ++v) {
    Rat sum(0);
    for (const auto& [j, p] : chain.out[v]) {
      CHECK(j >= 0);
      CHECK(j < chain.size());
      sum += p;
    }
    CHECK(sum == 1);
  }

  // the chain splits into two ergodic components that are mirror
  // images under the global sign flip; no unique stationary law
  const auto classes = recurrent_classes(chain);
  REQUIRE(classes.size() == 2);
  CHECK(classes[0].size() == 72);
  CHECK(classes[1].size() == 72);
  CHECK_THROWS(stationary(chain));

  const auto flip_state = [](const ChainState& s) {
    const int P = 4;
    ChainState f;
    f.history = (~s.history) & 3u;
    f.utilities.resize(16);
    for (int id = 0; id < 16; ++id) {
      int image = 0;
      for (int h = 0; h < P; ++h) {
        const unsigned bit = strategy_action_bit(id, P, (~h) & 3u);
        image |= (bit ? 0 : 1) << (P - 1 - h);
      }
      f.utilities[image] = s.utilities[id];
    }
    return f;
  };
  std::set<ChainState> second;
  for (int v : classes[1]) second.insert(chain.states[v]);
  for (int v : classes[0]) CHECK(second.count(flip_state(chain.states[v])) == 1);
}

TEST_CASE("enumeration guard rejects large memories") {
  CHECK_THROWS(enumerate_chain(3, 2));
  CHECK_THROWS(enumerate_chain(1, 1));
}

TEST_CASE("extracted state graph of a m=1 run matches the enumeration") {
  GameConfig cfg;
  cfg.agents = 401;
  cfg.memory = 1;
  cfg.steps = 20000;
  cfg.seed = 12;
  const Trace trace = run_game(cfg);
  const auto graph = extract_state_graph(trace);
  const auto chain = enumerate_chain(1, 2);

  std::set<ChainState> enumerated(chain.states.begin(), chain.states.end());
  for (const auto& st : graph.states) CHECK(enumerated.count(st) == 1);
  CHECK(graph.size() <= 12);
  CHECK(graph.size() >= 10);  // generic seeds visit (almost) everything

  // empirical edges exist in the exact chain
  std::map<std::pair<std::uint32_t, std::vector<std::int64_t>>, int> index;
  for (int v = 0; v < chain.size(); ++v)
    index[{chain.states[v].history, chain.states[v].utilities}] = v;
  for (int v = 0; v < graph.size(); ++v)
    for (const auto& [w, p] : graph.out[v]) {
      const int cv = index.at({graph.states[v].history, graph.states[v].utilities});
      const int cw = index.at({graph.states[w].history, graph.states[w].utilities});
      CHECK(has_edge(chain, cv, cw));
    }
}

TEST_CASE("perturbed initial utilities make the dynamics deterministic") {
  for (int m = 1; m <= 2; ++m) {
    GameConfig cfg;
    cfg.agents = 401;
    cfg.memory = m;
    cfg.steps = 4000;
    cfg.seed = 77;
    cfg.initial_utilities = InitialUtilities::kPerturbed;
    const Trace trace = run_game(cfg);
    const auto graph = extract_state_graph(trace);
    for (int v = 0; v < graph.size(); ++v)
      CHECK(graph.out[v].size() <= 1);
  }
}

TEST_CASE("both branches from the zero state occur equally often over seeds") {
  // from all-zero utilities with history fixed, the first minority
  // action is a fair coin across assignments
  int plus = 0;
  const int runs = 4000;
  for (int seed = 0; seed < runs; ++seed) {
    GameConfig cfg;
    cfg.agents = 401;
    cfg.memory = 1;
    cfg.steps = 1;
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.initial_history = 0u;
    cfg.record_utilities = false;
    const Trace tr = run_game(cfg);
    if (tr.minority[0] > 0) ++plus;
  }
  const double sigma = std::sqrt(runs * 0.25);
  CHECK(std::abs(plus - runs / 2.0) < 3 * sigma);
}

TEST_CASE("empirical transition frequencies are rational counts") {
  GameConfig cfg;
  cfg.agents = 401;
  cfg.memory = 1;
  cfg.steps = 5000;
  cfg.seed = 4;
  const auto graph = extract_state_graph(run_game(cfg));
  for (int v = 0; v < graph.size(); ++v) {
    Rat sum(0);
    for (const auto& [w, p] : graph.out[v]) sum += p;
    if (!graph.out[v].empty()) CHECK(sum == 1);
  }
  CHECK(graph.empirical);
}
