#include "mg/debruijn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>

#include "mg/levels.hpp"

namespace mg {

DeBruijnGraph build_graph(int m, int max_m) {
  if (m < 1) throw std::invalid_argument("memory must be >= 1");
  if (m > max_m) throw std::invalid_argument("de Bruijn order guard exceeded");
  return DeBruijnGraph{m};
}

std::pair<std::uint32_t, std::uint32_t> homogeneous_nodes(const DeBruijnGraph& g) {
  return {0u, static_cast<std::uint32_t>(g.num_nodes() - 1)};
}

bool is_euler_circuit(const DeBruijnGraph& g, const EulerTrail& trail) {
  const int E = g.num_edges();
  if (static_cast<int>(trail.edges.size()) != E) return false;
  std::vector<int> used(E, 0);
  for (int e : trail.edges) {
    if (e < 0 || e >= E || used[e]) return false;
    used[e] = 1;
  }
  for (std::size_t i = 0; i + 1 < trail.edges.size(); ++i)
    if (g.edge_target(trail.edges[i]) != g.edge_source(trail.edges[i + 1]))
      return false;
  return g.edge_target(trail.edges.back()) == g.edge_source(trail.edges.front());
}

namespace {

void trail_dfs(const DeBruijnGraph& g, std::uint32_t node, std::vector<int>& used,
               std::vector<int>& path, std::vector<EulerTrail>& out) {
  if (static_cast<int>(path.size()) == g.num_edges()) {
    if (node == g.edge_source(path.front())) out.push_back(EulerTrail{path});
    return;
  }
  for (int bit = 0; bit < 2; ++bit) {
    const int e = static_cast<int>(node) * 2 + bit;
    if (used[e]) continue;
    used[e] = 1;
    path.push_back(e);
    trail_dfs(g, g.edge_target(e), used, path, out);
    path.pop_back();
    used[e] = 0;
  }
}

}  // namespace

std::vector<EulerTrail> euler_trails(const DeBruijnGraph& g, int max_enumeration_m) {
  if (g.order > max_enumeration_m)
    throw std::invalid_argument("trail enumeration guarded to small orders; "
                                "use count_euler_trails instead");
  // Every circuit uses edge 0 (the self-loop at the all-minus node), so
  // anchoring the walk there picks one representative per rotation class.
  std::vector<int> used(g.num_edges(), 0);
  std::vector<int> path;
  std::vector<EulerTrail> out;
  used[0] = 1;
  path.push_back(0);
  trail_dfs(g, g.edge_target(0), used, path, out);
  return out;
}

std::int64_t count_euler_trails(const DeBruijnGraph& g) {
  // Arborescence count of the out-degree Laplacian with one node
  // removed; with all degrees equal to 2 the degree factorials are 1,
  // so this already is the circuit count up to rotation.
  const int n = g.num_nodes();
  if (n == 1) return 1;
  std::vector<std::vector<Int>> a(n - 1, std::vector<Int>(n - 1, 0));
  for (int v = 0; v < n; ++v) {
    for (int bit = 0; bit < 2; ++bit) {
      const int w = static_cast<int>(
          shift_history(static_cast<std::uint32_t>(v), g.order,
                        static_cast<unsigned>(bit)));
      if (v >= 1 && w >= 1 && v != w) a[v - 1][w - 1] -= 1;
    }
    if (v >= 1) {
      a[v - 1][v - 1] += 2;  // out-degree
      const int self = static_cast<int>(
          shift_history(static_cast<std::uint32_t>(v), g.order, 0u));
      const int self2 = static_cast<int>(
          shift_history(static_cast<std::uint32_t>(v), g.order, 1u));
      if (self == v) a[v - 1][v - 1] -= 1;
      if (self2 == v) a[v - 1][v - 1] -= 1;
    }
  }
  // Fraction-free Gaussian elimination (Bareiss).
  Int prev(1);
  int sign = 1;
  const int dim = n - 1;
  for (int k = 0; k < dim; ++k) {
    if (a[k][k] == 0) {
      int swap_row = -1;
      for (int r = k + 1; r < dim; ++r)
        if (a[r][k] != 0) {
          swap_row = r;
          break;
        }
      if (swap_row < 0) return 0;
      std::swap(a[k], a[swap_row]);
      sign = -sign;
    }
    for (int i = k + 1; i < dim; ++i) {
      for (int j = k + 1; j < dim; ++j) {
        Int num = a[i][j] * a[k][k] - a[i][k] * a[k][j];
        a[i][j] = num / prev;
      }
      a[i][k] = 0;
    }
    prev = a[k][k];
  }
  Int det = a[dim - 1][dim - 1] * sign;
  return static_cast<std::int64_t>(det.get_si());
}

std::vector<std::uint32_t> trail_history_sequence(const DeBruijnGraph& g,
                                                  const EulerTrail& trail) {
  std::vector<std::uint32_t> out;
  out.reserve(trail.edges.size());
  for (int e : trail.edges) out.push_back(g.edge_source(e));
  return out;
}

double verify_eulerian_following(const std::vector<std::uint32_t>& histories, int m) {
  const int W = 2 << m;  // edges per window
  const std::int64_t transitions = static_cast<std::int64_t>(histories.size()) - 1;
  if (transitions < W)
    throw std::invalid_argument("trace shorter than one Euler period");

  std::vector<int> count(static_cast<std::size_t>(W), 0);
  const auto edge_at = [&](std::int64_t t) {
    return static_cast<int>(histories[t] * 2 + (histories[t + 1] & 1u));
  };

  std::int64_t dups = 0, good = 0;
  for (std::int64_t t = 0; t < transitions; ++t) {
    const int e = edge_at(t);
    if (++count[e] == 2) ++dups;
    if (t >= W) {
      const int old = edge_at(t - W);
      if (--count[old] == 1) --dups;
    }
    if (t >= W - 1 && dups == 0) ++good;
  }
  return static_cast<double>(good) / static_cast<double>(transitions - W + 1);
}

double verify_eulerian_following(const Trace& trace) {
  return verify_eulerian_following(trace.history, trace.config.memory);
}

std::int64_t default_burn_in(int m) { return 4 * (std::int64_t{2} << m); }

double default_peak_threshold(std::int64_t agents, int S) {
  return 0.8 * rat_double(expected_peak_height(agents, S));
}

PeakReport analyze_peaks(const Trace& trace, double threshold, std::int64_t burn_in) {
  const int m = trace.config.memory;
  if (threshold < 0)
    threshold = default_peak_threshold(trace.config.agents,
                                       trace.config.strategies_per_agent);
  if (burn_in < 0) burn_in = default_burn_in(m);

  PeakReport rep;
  rep.threshold = threshold;
  const std::int64_t T = trace.steps();
  rep.analysed_steps = std::max<std::int64_t>(0, T - burn_in);
  for (std::int64_t t = burn_in; t < T; ++t) {
    if (std::llabs(trace.demand[t]) >= threshold) {
      rep.peak_times.push_back(t);
      rep.heights.push_back(trace.demand[t]);
      rep.signs.push_back(trace.demand[t] > 0 ? 1 : -1);
    }
  }
  if (rep.peak_times.empty()) return rep;

  std::map<std::uint32_t, std::int64_t> hist_count;
  for (std::int64_t t : rep.peak_times) ++hist_count[trace.history[t]];
  auto modal = hist_count.begin();
  for (auto it = hist_count.begin(); it != hist_count.end(); ++it)
    if (it->second > modal->second) modal = it;
  rep.critical_history = modal->first;
  rep.unique_history = hist_count.size() == 1;
  rep.modal_history_fraction = static_cast<double>(modal->second) /
                               static_cast<double>(rep.peak_times.size());

  rep.frequency = static_cast<double>(rep.peak_times.size()) /
                  static_cast<double>(rep.analysed_steps);

  double sum_abs = 0.0;
  for (std::int64_t h : rep.heights) sum_abs += static_cast<double>(std::llabs(h));
  rep.mean_abs_height = sum_abs / static_cast<double>(rep.heights.size());

  // Sign alternation over consecutive peaks at the critical history
  // that fall within one Euler period of each other (the back-to-back
  // pair the peak mechanism produces before the walk leaves the node).
  const std::int64_t period = std::int64_t{2} << m;
  std::int64_t pairs = 0, alternating = 0;
  std::int64_t prev_time = -period;
  int prev_sign = 0;
  for (std::size_t i = 0; i < rep.peak_times.size(); ++i) {
    if (trace.history[rep.peak_times[i]] != *rep.critical_history) continue;
    if (prev_sign != 0 && rep.peak_times[i] - prev_time < period) {
      ++pairs;
      if (rep.signs[i] != prev_sign) ++alternating;
    }
    prev_time = rep.peak_times[i];
    prev_sign = rep.signs[i];
  }
  rep.sign_alternation_fraction =
      pairs > 0 ? static_cast<double>(alternating) / static_cast<double>(pairs) : 1.0;

  const auto [h1, h2] = homogeneous_nodes(build_graph(m));
  rep.critical_history_homogeneous =
      *rep.critical_history == h1 || *rep.critical_history == h2;
  std::int64_t checked = 0, homogeneous = 0;
  for (std::int64_t t : rep.peak_times) {
    if (t == 0 || trace.history[t] != *rep.critical_history) continue;
    ++checked;
    const std::uint32_t before = trace.history[t - 1];
    if (before == h1 || before == h2) ++homogeneous;
  }
  rep.homogeneous_predecessor_fraction =
      checked > 0 ? static_cast<double>(homogeneous) / static_cast<double>(checked)
                  : 0.0;
  return rep;
}

SplitReport utility_split_check(const Trace& trace, const PeakReport& peaks) {
  if (!trace.has_utilities)
    throw std::invalid_argument("utility split check needs recorded utilities");
  SplitReport rep;
  const std::size_t cols = trace.columns();
  const int S = trace.config.strategies_per_agent;
  const std::int64_t N = trace.config.agents;

  double sum_gap = 0.0, sum_spread = 0.0, sum_sep = 0.0, sum_sd = 0.0;
  std::int64_t raw_gap_wins = 0;
  std::int64_t all_good = 0, mixed = 0, all_bad = 0, classified_agents = 0;
  std::int64_t symmetric = 0, symmetry_checked = 0;

  std::vector<std::int64_t> sorted(cols);
  for (std::int64_t peak : peaks.peak_times) {
    const std::int64_t t = peak + 1;  // classify after the peak settles
    if (t >= trace.steps()) continue;
    const std::int64_t* row = trace.utility_row(t);
    std::copy(row, row + cols, sorted.begin());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t half = cols / 2;
    const std::int64_t gap = sorted[half] - sorted[half - 1];
    const std::int64_t spread_low = sorted[half - 1] - sorted.front();
    const std::int64_t spread_high = sorted.back() - sorted[half];
    const std::int64_t spread = std::max(spread_low, spread_high);
    sum_gap += static_cast<double>(gap);
    sum_spread += static_cast<double>(spread);
    if (gap > spread) ++raw_gap_wins;

    double mean_low = 0.0, mean_high = 0.0;
    for (std::size_t j = 0; j < half; ++j) mean_low += sorted[j];
    for (std::size_t j = half; j < cols; ++j) mean_high += sorted[j];
    mean_low /= static_cast<double>(half);
    mean_high /= static_cast<double>(cols - half);
    double var_low = 0.0, var_high = 0.0;
    for (std::size_t j = 0; j < half; ++j)
      var_low += (sorted[j] - mean_low) * (sorted[j] - mean_low);
    for (std::size_t j = half; j < cols; ++j)
      var_high += (sorted[j] - mean_high) * (sorted[j] - mean_high);
    var_low /= static_cast<double>(half);
    var_high /= static_cast<double>(cols - half);
    sum_sep += mean_high - mean_low;
    sum_sd += std::sqrt(std::max(var_low, var_high));
    ++rep.classifications;

    // threshold sits in the middle of the gap
    const double cut = 0.5 * static_cast<double>(sorted[half] + sorted[half - 1]);
    for (std::int64_t n = 0; n < N; ++n) {
      int good = 0;
      for (int s = 0; s < S; ++s) {
        const std::uint32_t idx = trace.agent_slots[n * S + s];
        if (static_cast<double>(row[idx]) > cut) ++good;
      }
      if (good == S)
        ++all_good;
      else if (good == 0)
        ++all_bad;
      else
        ++mixed;
      ++classified_agents;
    }

    // at the peak itself the high group pays what the low group earns
    if (peak > 0) {
      const std::int64_t* before = trace.utility_row(peak - 1);
      const std::int64_t* after = trace.utility_row(peak);
      std::int64_t pay = 0, earn = 0;
      bool consistent = true;
      for (std::size_t j = 0; j < cols; ++j) {
        const std::int64_t d = after[j] - before[j];
        if (d < 0) {
          if (pay == 0)
            pay = -d;
          else if (pay != -d)
            consistent = false;
        } else if (d > 0) {
          if (earn == 0)
            earn = d;
          else if (earn != d)
            consistent = false;
        }
      }
      ++symmetry_checked;
      if (consistent && pay == earn && pay != 0) ++symmetric;
    }
  }

  if (rep.classifications > 0) {
    const auto n = static_cast<double>(rep.classifications);
    rep.mean_gap = sum_gap / n;
    rep.mean_intra_spread = sum_spread / n;
    rep.raw_gap_fraction = static_cast<double>(raw_gap_wins) / n;
    rep.mean_center_separation = sum_sep / n;
    rep.mean_group_sd = sum_sd / n;
  }
  if (classified_agents > 0) {
    rep.frac_all_good = static_cast<double>(all_good) / classified_agents;
    rep.frac_mixed = static_cast<double>(mixed) / classified_agents;
    rep.frac_all_bad = static_cast<double>(all_bad) / classified_agents;
  }
  if (symmetry_checked > 0)
    rep.reward_symmetry_fraction =
        static_cast<double>(symmetric) / static_cast<double>(symmetry_checked);
  return rep;
}

}  // namespace mg
