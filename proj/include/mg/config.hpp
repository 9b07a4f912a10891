#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mg/payoff.hpp"

namespace mg {

// How each agent's S strategies are drawn from the full space.
enum class AssignmentMode {
  kIndependent,  // S independent uniform draws; duplicates possible
  kDistinct,     // uniform without replacement within the agent
};

// Initial utility vector over the full strategy space.
enum class InitialUtilities {
  kAllZero,
  kPerturbed,  // strict total order: id i starts at i / 2^P
  kExplicit,   // user-supplied rationals
};

enum class UtilityTracking {
  kAuto,  // full space when 2^P is small, held strategies otherwise
  kFull,
  kHeld,
};

struct GameConfig {
  std::int64_t agents = 401;         // N
  int memory = 1;                    // m
  int strategies_per_agent = 2;      // S
  PayoffKind payoff = PayoffKind::kStep;
  std::int64_t steps = 10000;
  std::uint64_t seed = 1;

  AssignmentMode assignment = AssignmentMode::kIndependent;
  InitialUtilities initial_utilities = InitialUtilities::kAllZero;
  // Explicit initial utilities as num/den pairs over ids 0..2^P-1.
  std::vector<std::pair<std::int64_t, std::int64_t>> explicit_utilities;
  std::optional<std::uint32_t> initial_history;  // random when absent

  UtilityTracking tracking = UtilityTracking::kAuto;
  bool record_utilities = true;  // keep per-step utility rows in the trace

  int max_memory = 5;  // resource guard

  void validate() const;
  std::string canonical_text() const;   // key=value dump, one per line
  std::uint64_t hash() const;           // FNV-1a of canonical_text()
};

// key=value config file support; unknown keys are rejected.
GameConfig parse_config_text(const std::string& text, GameConfig base = {});
GameConfig load_config_file(const std::string& path, GameConfig base = {});

std::string assignment_name(AssignmentMode m);
std::string initial_utilities_name(const GameConfig& c);
std::string tracking_name(UtilityTracking t);

}  // namespace mg
