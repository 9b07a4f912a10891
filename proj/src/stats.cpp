#include "mg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace mg {

int AutocorrelationResult::argmax_positive_lag(double tie_margin) const {
  int best = 1;
  for (int tau = 2; tau < static_cast<int>(r.size()); ++tau)
    if (r[tau] > r[best]) best = tau;
  if (tie_margin > 0.0) {
    for (int tau = 1; tau < static_cast<int>(r.size()); ++tau)
      if (r[tau] >= r[best] - tie_margin) return tau;
  }
  return best;
}

AutocorrelationResult autocorrelation(const std::vector<double>& series, int tau_max) {
  const std::int64_t n = static_cast<std::int64_t>(series.size());
  if (tau_max < 0) throw std::invalid_argument("tau_max must be >= 0");
  if (n < 2 || n <= tau_max)
    throw std::invalid_argument("series too short for requested lags");

  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(n);

  double denom = 0.0;
  for (double x : series) denom += (x - mean) * (x - mean);

  AutocorrelationResult out;
  out.r.assign(tau_max + 1, 0.0);
  out.r[0] = 1.0;
  if (denom == 0.0) {
    out.degenerate = true;
    return out;
  }
  for (int tau = 1; tau <= tau_max; ++tau) {
    double s = 0.0;
    for (std::int64_t t = 0; t + tau < n; ++t)
      s += (series[t] - mean) * (series[t + tau] - mean);
    out.r[tau] = s / denom;
  }
  return out;
}

AutocorrelationResult autocorrelation(const std::vector<std::int64_t>& series,
                                      int tau_max) {
  std::vector<double> tmp(series.begin(), series.end());
  return autocorrelation(tmp, tau_max);
}

std::vector<std::pair<double, double>> lagged_pairs(const std::vector<double>& series,
                                                    std::int64_t lag) {
  if (lag < 0 || lag >= static_cast<std::int64_t>(series.size()))
    throw std::invalid_argument("lag out of range");
  std::vector<std::pair<double, double>> out;
  out.reserve(series.size() - lag);
  for (std::size_t t = 0; t + lag < series.size(); ++t)
    out.emplace_back(series[t], series[t + lag]);
  return out;
}

ClusterCenters level_clustering(const std::vector<double>& values, int k_max,
                                double bin_width, double min_separation) {
  ClusterCenters out;
  if (values.empty() || k_max < 1) return out;
  if (bin_width <= 0) throw std::invalid_argument("bin width must be positive");
  if (min_separation < 0) min_separation = 8.0 * bin_width;

  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const std::int64_t bins =
      static_cast<std::int64_t>(std::floor((*hi_it - lo) / bin_width)) + 1;
  std::vector<std::int64_t> count(bins, 0);
  std::vector<double> sum(bins, 0.0);
  for (double v : values) {
    const auto b = static_cast<std::int64_t>(std::floor((v - lo) / bin_width));
    ++count[b];
    sum[b] += v;
  }

  const auto radius = static_cast<std::int64_t>(std::ceil(min_separation / bin_width));
  std::vector<char> suppressed(bins, 0);
  for (int k = 0; k < k_max; ++k) {
    std::int64_t best = -1;
    for (std::int64_t b = 0; b < bins; ++b)
      if (!suppressed[b] && count[b] > 0 && (best < 0 || count[b] > count[best]))
        best = b;
    if (best < 0) break;
    // centre: occupancy-weighted mean over the local neighbourhood
    std::int64_t occ = 0;
    double wsum = 0.0;
    // keep the centre estimate local so a neighbouring cluster's tail
    // cannot drag it sideways
    const std::int64_t local = 2;
    for (std::int64_t b = std::max<std::int64_t>(0, best - local);
         b <= std::min(bins - 1, best + local); ++b) {
      occ += count[b];
      wsum += sum[b];
    }
    out.centers.push_back(wsum / static_cast<double>(occ));
    out.occupancy.push_back(occ);
    for (std::int64_t b = std::max<std::int64_t>(0, best - radius);
         b <= std::min(bins - 1, best + radius); ++b)
      suppressed[b] = 1;
  }
  return out;
}

ClusterCenters level_clustering(const std::vector<std::int64_t>& values, int k_max,
                                double bin_width, double min_separation) {
  std::vector<double> tmp(values.begin(), values.end());
  return level_clustering(tmp, k_max, bin_width, min_separation);
}

UtilityBoundReport utility_bound_audit(const Trace& trace) {
  UtilityBoundReport rep;
  rep.bound = static_cast<double>(std::int64_t{1} << trace.config.memory);
  rep.bound_applies =
      trace.config.payoff == PayoffKind::kStep &&
      trace.config.initial_utilities == InitialUtilities::kAllZero;
  rep.max_abs_utility = static_cast<double>(trace.max_abs_utility) /
                        static_cast<double>(trace.utility_scale);
  if (rep.bound_applies) {
    rep.pass = rep.max_abs_utility <= rep.bound;
    rep.attained = rep.max_abs_utility == rep.bound;
  }
  return rep;
}

double mean_reversion_stat(const std::vector<double>& series) {
  if (series.size() < 100)
    throw std::invalid_argument("series too short for mean reversion statistic");
  std::vector<double> inc(series.size() - 1);
  for (std::size_t t = 0; t + 1 < series.size(); ++t)
    inc[t] = series[t + 1] - series[t];
  const auto acf = autocorrelation(inc, 1);
  if (acf.degenerate) return 0.0;
  return acf.r[1];
}

}  // namespace mg
