#include "doctest.h"

#include <cmath>
#include <random>

#include "mg/stats.hpp"

using namespace mg;

TEST_CASE("autocorrelation basics") {
  std::vector<double> periodic;
  for (int t = 0; t < 400; ++t) periodic.push_back((t % 4 == 0) ? 3.0 : -1.0);
  const auto ac = autocorrelation(periodic, 10);
  CHECK(ac.r[0] == 1.0);
  CHECK(!ac.degenerate);
  CHECK(ac.argmax_positive_lag() == 4);
  for (double r : ac.r) CHECK(std::abs(r) <= 1.0 + 1e-12);

  const std::vector<double> constant(100, 2.5);
  CHECK(autocorrelation(constant, 5).degenerate);

  CHECK_THROWS(autocorrelation(std::vector<double>{1.0, 2.0}, 5));
}

TEST_CASE("estimator is symmetric under series reversal") {
  std::mt19937_64 gen(3);
  std::vector<double> xs(500);
  for (auto& x : xs) x = static_cast<double>(gen() % 17) - 8.0;
  auto fw = autocorrelation(xs, 12);
  std::reverse(xs.begin(), xs.end());
  auto bw = autocorrelation(xs, 12);
  for (int tau = 0; tau <= 12; ++tau)
    CHECK(fw.r[tau] == doctest::Approx(bw.r[tau]).epsilon(1e-12));
}

TEST_CASE("lagged pairs") {
  const auto pairs = lagged_pairs({1, 2, 3, 4}, 2);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0] == std::pair<double, double>{1.0, 3.0});
  CHECK(pairs[1] == std::pair<double, double>{2.0, 4.0});
  CHECK_THROWS(lagged_pairs({1.0, 2.0}, 5));
}

TEST_CASE("level clustering finds separated modes") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> noise(0.0, 8.0);
  std::vector<double> xs;
  const double centers[] = {0.0, 150.0, -150.0, 200.0, -200.0};
  const int weights[] = {40000, 20000, 20000, 10000, 10000};
  for (int c = 0; c < 5; ++c)
    for (int i = 0; i < weights[c]; ++i) xs.push_back(centers[c] + noise(gen));
  const auto cc = level_clustering(xs, 5, 4.0);
  REQUIRE(cc.centers.size() == 5);
  for (double target : centers) {
    double best = 1e9;
    for (double c : cc.centers) best = std::min(best, std::abs(c - target));
    CHECK(best < 10.0);
  }
  // occupancy ordering: the heaviest cluster comes first
  CHECK(std::abs(cc.centers[0]) < 10.0);

  const auto single = level_clustering(std::vector<double>(1000, 7.0), 5, 1.0);
  CHECK(single.centers.size() == 1);
  CHECK(single.centers[0] == doctest::Approx(7.0));
}

TEST_CASE("mean reversion statistic") {
  // strictly alternating increments: perfect reversion
  std::vector<double> alternating;
  for (int t = 0; t < 300; ++t) alternating.push_back(t % 2 == 0 ? 0.0 : 1.0);
  CHECK(mean_reversion_stat(alternating) == doctest::Approx(-1.0).epsilon(0.05));

  // random walk: increments are independent
  std::mt19937_64 gen(7);
  std::vector<double> walk = {0.0};
  for (int t = 0; t < 20000; ++t)
    walk.push_back(walk.back() + ((gen() & 1) ? 1.0 : -1.0));
  CHECK(std::abs(mean_reversion_stat(walk)) < 0.05);

  CHECK_THROWS(mean_reversion_stat(std::vector<double>(10, 1.0)));
}
