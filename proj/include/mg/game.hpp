#pragma once

#include <cstdint>
#include <vector>

#include "mg/config.hpp"
#include "mg/rng.hpp"
#include "mg/strategy.hpp"

namespace mg {

// One agent: S slots referring to tracked strategy indices.
struct Agent {
  std::vector<std::uint32_t> slots;
};

// Snapshot of one completed step. Demand and history refer to the
// moment the agents acted; utilities are the values after the update.
struct StepOutcome {
  std::int64_t t = 0;
  std::int64_t demand = 0;
  Action minority = Action::kMinus;
  std::uint32_t history_before = 0;
};

// Full record of a run. Utility values are exact integers scaled by
// utility_scale; column j holds the utility of tracked_ids[j].
struct Trace {
  GameConfig config;
  std::uint64_t config_hash = 0;
  std::int64_t utility_scale = 1;
  bool full_space = false;
  std::vector<std::uint64_t> tracked_ids;

  std::vector<std::int64_t> demand;
  std::vector<std::int8_t> minority;
  std::vector<std::uint32_t> history;   // history the agents saw at t
  bool has_utilities = false;
  std::vector<std::int64_t> utilities;  // steps x tracked, row-major

  std::vector<std::uint32_t> agent_slots;  // N*S tracked indices
  std::int64_t max_abs_utility = 0;        // scaled, over the whole run

  std::int64_t steps() const { return static_cast<std::int64_t>(demand.size()); }
  std::size_t columns() const { return tracked_ids.size(); }
  const std::int64_t* utility_row(std::int64_t t) const {
    return utilities.data() + static_cast<std::size_t>(t) * columns();
  }
};

enum class ExecMode {
  kSerialReference,  // plain loops, the behavioural baseline
  kParallel,         // OpenMP kernels, bit-identical results
};

// Sequential minority game engine. A single run is deterministic in
// (config, seed); the parallel mode only changes how the per-step
// loops execute, never the arithmetic or the draw order.
class GameEngine {
 public:
  explicit GameEngine(GameConfig config, ExecMode mode = ExecMode::kParallel);

  StepOutcome step();
  Trace run();  // config.steps steps from the initial state

  const GameConfig& config() const { return cfg_; }
  std::uint32_t history_bits() const { return history_; }
  std::int64_t utility_scale() const { return scale_; }
  bool full_space() const { return full_space_; }
  const std::vector<std::uint64_t>& tracked_ids() const { return tracked_ids_; }
  const std::vector<std::int64_t>& utilities() const { return utilities_; }
  const std::vector<std::uint32_t>& agent_slots() const { return agent_slots_; }
  std::int64_t max_abs_utility() const { return max_abs_utility_; }
  std::int64_t current_step() const { return t_; }

 private:
  std::int64_t aggregate_demand();
  void update_utilities(std::int64_t g_scaled, std::uint32_t mu);

  GameConfig cfg_;
  ExecMode mode_;
  RngStream rng_;
  int P_ = 2;
  bool full_space_ = true;
  std::int64_t scale_ = 1;
  std::uint32_t history_ = 0;
  std::int64_t t_ = 0;
  std::uint64_t tie_key_ = 0;
  std::vector<std::uint64_t> tracked_ids_;
  std::vector<std::int64_t> utilities_;
  std::vector<std::uint32_t> agent_slots_;   // N*S
  std::int64_t max_abs_utility_ = 0;
};

// Convenience entry points ---------------------------------------------------

std::vector<Agent> assign_strategies(const GameConfig& cfg, RngStream& rng);

std::int64_t aggregated_demand(const std::vector<Action>& actions);

// -sgn(A); a fair coin from the run's stream when A == 0.
Action minority_action(std::int64_t demand, RngStream& rng);

// Index of a maximal-utility strategy among the agent's slots, ties
// broken uniformly with the supplied raw draw.
std::uint32_t active_strategy(const Agent& agent,
                              const std::vector<std::int64_t>& utilities,
                              std::uint64_t raw_draw);

Trace run_game(const GameConfig& cfg, ExecMode mode = ExecMode::kParallel);

}  // namespace mg
