#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mg/game.hpp"

namespace mg {

struct AutocorrelationResult {
  std::vector<double> r;     // r[tau], tau = 0..tau_max; r[0] == 1
  bool degenerate = false;   // constant series: r undefined for tau > 0
  // Smallest tau >= 1 maximising r. A strictly periodic series ties
  // all harmonics of its period; tie_margin treats values within that
  // distance of the maximum as tied (pass ~2/sqrt(T) to absorb
  // estimator noise), and the smallest tied lag wins.
  int argmax_positive_lag(double tie_margin = 0.0) const;
};

// Biased mean-centred estimator r(tau) = sum (x_t - xbar)(x_{t+tau} -
// xbar) / sum (x_t - xbar)^2.
AutocorrelationResult autocorrelation(const std::vector<double>& series, int tau_max);
AutocorrelationResult autocorrelation(const std::vector<std::int64_t>& series,
                                      int tau_max);

std::vector<std::pair<double, double>> lagged_pairs(const std::vector<double>& series,
                                                    std::int64_t lag);

struct ClusterCenters {
  std::vector<double> centers;        // sorted by occupancy, descending
  std::vector<std::int64_t> occupancy;
};

// Histogram-mode clustering of a 1-D sample: repeatedly take the
// heaviest bin, report the occupancy-weighted centre of its
// neighbourhood and suppress everything within min_separation.
ClusterCenters level_clustering(const std::vector<double>& values, int k_max,
                                double bin_width, double min_separation = -1.0);
ClusterCenters level_clustering(const std::vector<std::int64_t>& values, int k_max,
                                double bin_width, double min_separation = -1.0);

struct UtilityBoundReport {
  double max_abs_utility = 0.0;
  double bound = 0.0;       // 2^m
  bool bound_applies = false;  // step payoff with all-zero start
  bool pass = true;            // max <= bound when it applies
  bool attained = false;       // max == bound exactly
};

UtilityBoundReport utility_bound_audit(const Trace& trace);

// Lag-1 autocorrelation of the increments of a utility trajectory;
// negative values indicate mean reversion.
double mean_reversion_stat(const std::vector<double>& series);

}  // namespace mg
