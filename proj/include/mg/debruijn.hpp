#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mg/game.hpp"
#include "mg/rational.hpp"

namespace mg {

// Binary de Bruijn graph of order m over the 2^m histories. Edge
// e = 2*node + bit appends `bit` to `node`; every node has in-degree
// and out-degree 2, and the homogeneous nodes carry the self-loops.
struct DeBruijnGraph {
  int order = 1;

  int num_nodes() const { return 1 << order; }
  int num_edges() const { return 2 << order; }
  std::uint32_t edge_source(int e) const { return static_cast<std::uint32_t>(e >> 1); }
  std::uint32_t edge_target(int e) const {
    return shift_history(edge_source(e), order, static_cast<unsigned>(e & 1));
  }
};

DeBruijnGraph build_graph(int m, int max_m = 16);

// The all-minus and all-plus histories (the only self-loop nodes).
std::pair<std::uint32_t, std::uint32_t> homogeneous_nodes(const DeBruijnGraph& g);

// A closed trail using every edge exactly once, stored as edge ids.
struct EulerTrail {
  std::vector<int> edges;
};

bool is_euler_circuit(const DeBruijnGraph& g, const EulerTrail& trail);

// All Euler circuits up to rotation (each class anchored at edge 0,
// which every circuit contains). Enumeration is exhaustive and only
// sensible for small orders.
std::vector<EulerTrail> euler_trails(const DeBruijnGraph& g, int max_enumeration_m = 3);

// Circuit count up to rotation via the arborescence determinant; the
// edge-rooted count is this times the number of edges.
std::int64_t count_euler_trails(const DeBruijnGraph& g);

// History sequence of a trail (node before each edge).
std::vector<std::uint32_t> trail_history_sequence(const DeBruijnGraph& g,
                                                  const EulerTrail& trail);

// Fraction of sliding windows of 2^(m+1) consecutive transitions that
// cover every edge exactly once.
double verify_eulerian_following(const std::vector<std::uint32_t>& histories, int m);
double verify_eulerian_following(const Trace& trace);

struct PeakReport {
  std::vector<std::int64_t> peak_times;
  std::vector<std::int64_t> heights;           // signed demand at the peak
  std::vector<int> signs;
  std::optional<std::uint32_t> critical_history;  // modal peak history
  bool unique_history = false;                    // all peaks share it
  double modal_history_fraction = 0.0;            // share at the modal one
  double frequency = 0.0;                         // peaks per analysed step
  double sign_alternation_fraction = 0.0;  // consecutive same-history pairs
  // the critical history is one of the two homogeneous nodes
  bool critical_history_homogeneous = false;
  // share of critical-history peaks entered via the self-loop: the
  // second peak of each back-to-back pair, so ~1/2 in the locked state
  double homogeneous_predecessor_fraction = 0.0;
  double mean_abs_height = 0.0;
  std::int64_t analysed_steps = 0;
  double threshold = 0.0;
};

// Burn-in default: a few Euler periods to let the split lock in.
std::int64_t default_burn_in(int m);

double default_peak_threshold(std::int64_t agents, int S);

PeakReport analyze_peaks(const Trace& trace, double threshold = -1.0,
                         std::int64_t burn_in = -1);

// Post-peak structure of the utility vector and the agent population.
// Two gap diagnostics are reported: the raw order gap between the two
// half-groups, and the separation of the group centres against the
// within-group standard deviation.
struct SplitReport {
  std::int64_t classifications = 0;
  double mean_gap = 0.0;            // min of top half - max of bottom half
  double mean_intra_spread = 0.0;   // widest half-group range
  double raw_gap_fraction = 0.0;    // order gap exceeded the group ranges
  double mean_center_separation = 0.0;  // mean(top) - mean(bottom)
  double mean_group_sd = 0.0;           // largest within-group std dev
  double frac_all_good = 0.0;       // every strategy in the high group
  double frac_mixed = 0.0;
  double frac_all_bad = 0.0;
  double reward_symmetry_fraction = 0.0;  // |penalty| == |reward| at peaks
};

SplitReport utility_split_check(const Trace& trace, const PeakReport& peaks);

}  // namespace mg
