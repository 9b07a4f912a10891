// Throughput comparison of the serial reference engine against the
// OpenMP kernels, across population sizes. Traces must agree exactly;
// the benchmark aborts if they diverge.

#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mg/game.hpp"

namespace {

double now() {
#ifdef _OPENMP
  return omp_get_wtime();
#else
  return static_cast<double>(clock()) / CLOCKS_PER_SEC;
#endif
}

struct Case {
  std::int64_t agents;
  int memory;
  std::int64_t steps;
};

double run_once(const mg::GameConfig& cfg, mg::ExecMode mode, std::int64_t* checksum) {
  const double t0 = now();
  mg::Trace tr = mg::run_game(cfg, mode);
  const double dt = now() - t0;
  std::int64_t sum = 0;
  for (std::int64_t a : tr.demand) sum += a * a;
  *checksum = sum;
  return dt;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<Case> cases = {
      {401, 1, 200000},
      {1601, 2, 100000},
      {100001, 3, 10000},
      {1000001, 3, 1000},
      {4000001, 3, 250},
  };
  if (argc > 1 && std::string(argv[1]) == "--smoke")
    cases = {{401, 1, 2000}, {100001, 2, 100}};

#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; parallel mode == serial\n");
#endif
  std::printf("%10s %4s %9s %12s %12s %8s\n", "agents", "m", "steps",
              "serial s", "parallel s", "speedup");

  for (const Case& c : cases) {
    mg::GameConfig cfg;
    cfg.agents = c.agents;
    cfg.memory = c.memory;
    cfg.strategies_per_agent = 2;
    cfg.steps = c.steps;
    cfg.seed = 12345;
    cfg.record_utilities = false;

    std::int64_t sum_serial = 0, sum_parallel = 0;
    const double ts = run_once(cfg, mg::ExecMode::kSerialReference, &sum_serial);
    const double tp = run_once(cfg, mg::ExecMode::kParallel, &sum_parallel);
    if (sum_serial != sum_parallel) {
      std::printf("ENGINE MISMATCH at N=%lld m=%d\n",
                  static_cast<long long>(c.agents), c.memory);
      return 1;
    }
    std::printf("%10lld %4d %9lld %12.3f %12.3f %8.2fx\n",
                static_cast<long long>(c.agents), c.memory,
                static_cast<long long>(c.steps), ts, tp, ts / tp);
  }
  return 0;
}
