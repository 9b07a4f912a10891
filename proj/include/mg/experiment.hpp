#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mg/config.hpp"

namespace mg {

struct CheckRow {
  std::string claim;
  std::string predicted;
  std::string measured;
  std::string tolerance;
  bool pass = true;
};

struct CrossCheckReport {
  std::vector<CheckRow> rows;

  bool all_pass() const {
    for (const auto& r : rows)
      if (!r.pass) return false;
    return true;
  }
  std::string to_json() const;
  std::string to_text() const;  // one line per row
};

// Batch driver: one simulation per seed, every requested analysis run
// against it, artifacts under output_dir/seed_<k>/.
struct ExperimentSpec {
  GameConfig game;
  std::vector<std::string> analyses;
  std::vector<std::uint64_t> seeds;
  std::string output_dir;

  void validate() const;
};

extern const std::vector<std::string> kKnownAnalyses;

CrossCheckReport run_experiment(const ExperimentSpec& spec);

}  // namespace mg
