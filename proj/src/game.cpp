#include "mg/game.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mg {

namespace {

// Full-space tracking is the default while a utility column per
// strategy stays cheap; beyond that only held strategies are tracked.
constexpr std::uint64_t kFullTrackLimit = 4096;

std::int64_t lcm64(std::int64_t a, std::int64_t b) {
  return a / std::gcd(a, b) * b;
}

}  // namespace

std::vector<Agent> assign_strategies(const GameConfig& cfg, RngStream& rng) {
  cfg.validate();
  const std::uint64_t space = strategy_space_size(cfg.memory);
  const int S = cfg.strategies_per_agent;
  std::vector<Agent> agents(static_cast<std::size_t>(cfg.agents));
  for (auto& agent : agents) {
    agent.slots.resize(S);
    for (int s = 0; s < S; ++s) {
      std::uint64_t id = rng.next_below(space);
      if (cfg.assignment == AssignmentMode::kDistinct) {
        bool fresh = false;
        while (!fresh) {
          fresh = true;
          for (int j = 0; j < s; ++j)
            if (agent.slots[j] == id) {
              fresh = false;
              id = rng.next_below(space);
              break;
            }
        }
      }
      agent.slots[s] = static_cast<std::uint32_t>(id);
    }
  }
  return agents;
}

std::int64_t aggregated_demand(const std::vector<Action>& actions) {
  std::int64_t a = 0;
  for (Action x : actions) a += action_value(x);
  return a;
}

Action minority_action(std::int64_t demand, RngStream& rng) {
  if (demand > 0) return Action::kMinus;
  if (demand < 0) return Action::kPlus;
  return rng.next_coin() ? Action::kPlus : Action::kMinus;
}

std::uint32_t active_strategy(const Agent& agent,
                              const std::vector<std::int64_t>& utilities,
                              std::uint64_t raw_draw) {
  std::int64_t best = utilities[agent.slots[0]];
  for (std::uint32_t idx : agent.slots)
    best = std::max(best, utilities[idx]);
  std::uint64_t tied = 0;
  for (std::uint32_t idx : agent.slots)
    if (utilities[idx] == best) ++tied;
  std::uint64_t want = RngStream::pick(raw_draw, tied);
  for (std::uint32_t idx : agent.slots) {
    if (utilities[idx] == best) {
      if (want == 0) return idx;
      --want;
    }
  }
  return agent.slots[0];  // unreachable
}

GameEngine::GameEngine(GameConfig config, ExecMode mode)
    : cfg_(std::move(config)), mode_(mode), rng_(cfg_.seed) {
  cfg_.validate();
  P_ = 1 << cfg_.memory;
  const std::uint64_t space = strategy_space_size(cfg_.memory);

  switch (cfg_.tracking) {
    case UtilityTracking::kFull: full_space_ = true; break;
    case UtilityTracking::kHeld: full_space_ = false; break;
    case UtilityTracking::kAuto: full_space_ = space <= kFullTrackLimit; break;
  }
  if (full_space_ && space > (std::uint64_t{1} << 26))
    throw std::invalid_argument("full utility tracking infeasible for this memory");

  // Draw order: initial history first, then the strategy assignment.
  if (cfg_.initial_history)
    history_ = *cfg_.initial_history;
  else
    history_ = static_cast<std::uint32_t>(rng_.next_below(1u << cfg_.memory));

  const auto agents = assign_strategies(cfg_, rng_);

  if (full_space_) {
    tracked_ids_.resize(space);
    std::iota(tracked_ids_.begin(), tracked_ids_.end(), std::uint64_t{0});
  } else {
    for (const auto& a : agents)
      for (std::uint32_t id : a.slots) tracked_ids_.push_back(id);
    std::sort(tracked_ids_.begin(), tracked_ids_.end());
    tracked_ids_.erase(std::unique(tracked_ids_.begin(), tracked_ids_.end()),
                       tracked_ids_.end());
  }

  agent_slots_.reserve(static_cast<std::size_t>(cfg_.agents) *
                       cfg_.strategies_per_agent);
  for (const auto& a : agents)
    for (std::uint32_t id : a.slots) {
      std::uint32_t idx;
      if (full_space_) {
        idx = id;
      } else {
        idx = static_cast<std::uint32_t>(
            std::lower_bound(tracked_ids_.begin(), tracked_ids_.end(), id) -
            tracked_ids_.begin());
      }
      agent_slots_.push_back(idx);
    }

  // Utility scale: the common denominator of the initial utilities,
  // times N for the x/N payoff, so all arithmetic stays integral.
  scale_ = 1;
  if (cfg_.initial_utilities == InitialUtilities::kPerturbed) {
    scale_ = static_cast<std::int64_t>(space);
  } else if (cfg_.initial_utilities == InitialUtilities::kExplicit) {
    for (const auto& [num, den] : cfg_.explicit_utilities) {
      (void)num;
      scale_ = lcm64(scale_, den);
    }
  }
  if (cfg_.payoff == PayoffKind::kScaledProportional)
    scale_ = lcm64(scale_, cfg_.agents);

  utilities_.assign(tracked_ids_.size(), 0);
  if (cfg_.initial_utilities == InitialUtilities::kPerturbed) {
    for (std::size_t j = 0; j < tracked_ids_.size(); ++j)
      utilities_[j] = static_cast<std::int64_t>(tracked_ids_[j]);
  } else if (cfg_.initial_utilities == InitialUtilities::kExplicit) {
    for (std::size_t j = 0; j < tracked_ids_.size(); ++j) {
      const auto& [num, den] = cfg_.explicit_utilities[tracked_ids_[j]];
      utilities_[j] = num * (scale_ / den);
    }
  }
  for (std::int64_t u : utilities_)
    max_abs_utility_ = std::max(max_abs_utility_, std::abs(u));

  tie_key_ = rng_.next();
}

namespace {

// Shared agent decision: strict greedy with a buffered tie-break draw.
// Both engine modes call exactly this, so traces agree bit for bit.
// The S==2 branch is the unrolled equivalent of the generic scan:
// pick(draw, 2) is the top bit of the draw.
inline std::int64_t agent_action_sign(const std::uint32_t* mine, int S,
                                      const std::int64_t* util,
                                      const std::uint64_t* ids, int P,
                                      std::uint32_t mu, std::uint64_t draw) {
  std::uint32_t chosen;
  if (S == 2) {
    const std::int64_t u0 = util[mine[0]];
    const std::int64_t u1 = util[mine[1]];
    // branchless select; the tie case consumes the draw's top bit
    const unsigned sel = static_cast<unsigned>(u1 > u0) |
                         (static_cast<unsigned>(u1 == u0) &
                          static_cast<unsigned>(draw >> 63));
    chosen = mine[sel];
  } else {
    std::int64_t best = util[mine[0]];
    for (int s = 1; s < S; ++s) best = std::max(best, util[mine[s]]);
    std::uint32_t tied = 0;
    for (int s = 0; s < S; ++s) tied += (util[mine[s]] == best);
    std::uint64_t want = RngStream::pick(draw, tied);
    chosen = mine[0];
    for (int s = 0; s < S; ++s) {
      if (util[mine[s]] == best) {
        if (want == 0) {
          chosen = mine[s];
          break;
        }
        --want;
      }
    }
  }
  return 2 * static_cast<std::int64_t>(strategy_action_bit(ids[chosen], P, mu)) - 1;
}

}  // namespace

std::int64_t GameEngine::aggregate_demand() {
  const std::int64_t N = cfg_.agents;
  const int S = cfg_.strategies_per_agent;
  const std::uint32_t mu = history_;
  const int P = P_;
  const auto* slots = agent_slots_.data();
  const auto* util = utilities_.data();
  const auto* ids = tracked_ids_.data();
  const std::uint64_t key = tie_key_;
  const std::int64_t t = t_;

  std::int64_t demand = 0;
#ifdef _OPENMP
  if (mode_ == ExecMode::kParallel && N >= 65536) {
#pragma omp parallel for reduction(+ : demand) schedule(static)
    for (std::int64_t n = 0; n < N; ++n)
      demand += agent_action_sign(slots + n * S, S, util, ids, P, mu,
                                  tie_break_draw(key, t, n));
    return demand;
  }
#endif
  for (std::int64_t n = 0; n < N; ++n)
    demand += agent_action_sign(slots + n * S, S, util, ids, P, mu,
                                tie_break_draw(key, t, n));
  return demand;
}

void GameEngine::update_utilities(std::int64_t g_scaled, std::uint32_t mu) {
  const auto count = static_cast<std::int64_t>(tracked_ids_.size());
  const int P = P_;
  auto* util = utilities_.data();
  const auto* ids = tracked_ids_.data();
  std::int64_t max_abs = 0;
#ifdef _OPENMP
  if (mode_ == ExecMode::kParallel && count >= 65536) {
#pragma omp parallel for reduction(max : max_abs) schedule(static)
    for (std::int64_t j = 0; j < count; ++j) {
      const unsigned bit = strategy_action_bit(ids[j], P, mu);
      util[j] += bit ? -g_scaled : g_scaled;  // R = -a * g(A)
      max_abs = std::max(max_abs, std::abs(util[j]));
    }
    max_abs_utility_ = std::max(max_abs_utility_, max_abs);
    return;
  }
#endif
  for (std::int64_t j = 0; j < count; ++j) {
    const unsigned bit = strategy_action_bit(ids[j], P, mu);
    util[j] += bit ? -g_scaled : g_scaled;  // R = -a * g(A)
    max_abs = std::max(max_abs, std::abs(util[j]));
  }
  max_abs_utility_ = std::max(max_abs_utility_, max_abs);
}

StepOutcome GameEngine::step() {
  const std::uint32_t mu = history_;
  const std::int64_t demand = aggregate_demand();
  const Action minority = minority_action(demand, rng_);
  const std::int64_t g_scaled =
      payoff_g_scaled(cfg_.payoff, demand, cfg_.agents, scale_);

  update_utilities(g_scaled, mu);
  history_ = shift_history(mu, cfg_.memory, action_bit(minority));

  StepOutcome out;
  out.t = t_++;
  out.demand = demand;
  out.minority = minority;
  out.history_before = mu;
  return out;
}

Trace GameEngine::run() {
  Trace tr;
  tr.config = cfg_;
  tr.config_hash = cfg_.hash();
  tr.utility_scale = scale_;
  tr.full_space = full_space_;
  tr.tracked_ids = tracked_ids_;
  tr.agent_slots = agent_slots_;
  tr.has_utilities = cfg_.record_utilities;

  const std::int64_t T = cfg_.steps;
  tr.demand.reserve(T);
  tr.minority.reserve(T);
  tr.history.reserve(T);
  if (tr.has_utilities)
    tr.utilities.reserve(static_cast<std::size_t>(T) * tracked_ids_.size());

  for (std::int64_t t = 0; t < T; ++t) {
    const StepOutcome out = step();
    tr.demand.push_back(out.demand);
    tr.minority.push_back(static_cast<std::int8_t>(action_value(out.minority)));
    tr.history.push_back(out.history_before);
    if (tr.has_utilities)
      tr.utilities.insert(tr.utilities.end(), utilities_.begin(), utilities_.end());
  }
  tr.max_abs_utility = max_abs_utility_;
  return tr;
}

Trace run_game(const GameConfig& cfg, ExecMode mode) {
  GameEngine engine(cfg, mode);
  return engine.run();
}

}  // namespace mg
