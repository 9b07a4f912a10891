// Acceptance battery entry point: runs every criterion at its stated
// tolerance and prints one [PASS]/[FAIL] line per criterion.

#include <cstring>
#include <iostream>

#include "mg/acceptance.hpp"

int main(int argc, char** argv) {
  mg::AcceptanceOptions opts;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) opts.quick = true;
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc)
      opts.only = std::atoi(argv[++i]);
    if (std::strcmp(argv[i], "--out") == 0 && i + 1 < argc)
      opts.out_dir = argv[++i];
  }
  const auto report = mg::run_acceptance(opts, std::cout);
  int failed = 0;
  for (const auto& row : report.rows)
    if (!row.pass) ++failed;
  std::cout << report.rows.size() - failed << "/" << report.rows.size()
            << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
