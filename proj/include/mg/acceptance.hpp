#pragma once

#include <iosfwd>
#include <string>

#include "mg/experiment.hpp"

namespace mg {

struct AcceptanceOptions {
  bool quick = false;       // reduced sweep sizes for smoke runs
  std::string out_dir;      // optional artifact directory
  int only = 0;             // run a single criterion (1-12), 0 = all
};

// Runs the acceptance battery and prints one [PASS]/[FAIL] line per
// criterion to `log`.
CrossCheckReport run_acceptance(const AcceptanceOptions& opts, std::ostream& log);

}  // namespace mg
