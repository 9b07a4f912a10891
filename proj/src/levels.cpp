#include "mg/levels.hpp"

#include <stdexcept>

namespace mg {

namespace {

void check_level(int m, std::int64_t l, std::int64_t max_l) {
  if (m < 1) throw std::invalid_argument("memory must be >= 1");
  if (l < 1 || l > max_l)
    throw std::invalid_argument("level index out of range: " + std::to_string(l));
}

}  // namespace

Int level_count(int m, int l) {
  const int u_max = 1 << m;
  check_level(m, l, u_max + 1);
  return binomial(static_cast<unsigned>(u_max), static_cast<unsigned>(l - 1));
}

Int tail_count(int m, int l) {
  const int u_max = 1 << m;
  check_level(m, l, u_max + 1);
  Int sum(0);
  for (int j = 1; j <= l; ++j)
    sum += binomial(static_cast<unsigned>(u_max), static_cast<unsigned>(j - 1));
  return sum;
}

LevelList level_list(int m) {
  const int u_max = 1 << m;
  LevelList out;
  for (int l = 1; l <= u_max + 1; ++l) {
    out.levels.push_back(u_max - 2 * (l - 1));
    out.counts.push_back(level_count(m, l));
  }
  return out;
}

Rat prob_active_at_level_step(int m, int S, int l) {
  const int u_max = 1 << m;
  check_level(m, l, u_max + 1);
  if (S < 1) throw std::invalid_argument("S must be >= 1");
  const Int space = pow2(1u << m);
  // P[all S draws below u_l] = (1 - tail_count(l)/2^P)^S
  const auto below = [&](int level) -> Rat {
    Rat frac(space - tail_count(m, level), space);
    frac.canonicalize();
    return rat_pow(frac, static_cast<unsigned>(S));
  };
  if (l == 1) return Rat(1) - below(1);
  return below(l - 1) - below(l);
}

BestActionStats best_action_stats(int m, int S) {
  BestActionStats st;
  st.p_max = prob_active_at_level_step(m, S, 1);
  st.p_min = prob_active_at_level_step(m, S, (1 << m) + 1);
  st.p_best_action = (Rat(1) + st.p_max - st.p_min) / 2;
  return st;
}

Rat prob_active_at_level_proportional(int m, int S, std::int64_t l) {
  const Int space = pow2(1u << m);
  if (l < 1 || Int(static_cast<long>(l)) > space)
    throw std::invalid_argument("rank out of range");
  if (S < 1) throw std::invalid_argument("S must be >= 1");
  const auto survivor = [&](std::int64_t rank) -> Rat {
    Rat frac(space - Int(static_cast<long>(rank)), space);
    frac.canonicalize();
    return rat_pow(frac, static_cast<unsigned>(S));
  };
  return survivor(l - 1) - survivor(l);
}

Rat prob_active_in_top_proportional(int m, int S, std::int64_t L) {
  const Int space = pow2(1u << m);
  if (L < 0 || Int(static_cast<long>(L)) > space)
    throw std::invalid_argument("rank out of range");
  Rat frac(space - Int(static_cast<long>(L)), space);
  frac.canonicalize();
  return Rat(1) - rat_pow(frac, static_cast<unsigned>(S));
}

Rat expected_peak_height(std::int64_t agents, int S) {
  if (S < 2) throw std::invalid_argument("S must be >= 2");
  const Rat share = Rat(1) - Rat(Int(1), pow2(static_cast<unsigned>(S - 1)));
  return Rat(Int(static_cast<long>(agents))) * share;
}

Rat expected_peak_frequency(int m) {
  if (m < 1) throw std::invalid_argument("memory must be >= 1");
  Rat f(Int(1), pow2(static_cast<unsigned>(m)));
  f.canonicalize();
  return f;
}

Rat prob_action_plus(const std::vector<ActionLevel>& levels_desc, int S) {
  if (S < 1) throw std::invalid_argument("S must be >= 1");
  std::int64_t total = 0;
  for (const auto& lv : levels_desc) total += lv.count;
  if (total <= 0) throw std::invalid_argument("empty level structure");

  const Rat one(1);
  Rat p_plus(0);
  std::int64_t above = 0;  // strategies strictly better than this level
  for (const auto& lv : levels_desc) {
    // top draw lands in this level: all S at or below, not all below
    Rat at_or_below(static_cast<long>(total - above), static_cast<long>(total));
    Rat below(static_cast<long>(total - above - lv.count), static_cast<long>(total));
    at_or_below.canonicalize();
    below.canonicalize();
    const Rat p_top = rat_pow(at_or_below, static_cast<unsigned>(S)) -
                      rat_pow(below, static_cast<unsigned>(S));
    // the drawn top-level strategy is uniform within the level
    Rat share(static_cast<long>(lv.plus_count), static_cast<long>(lv.count));
    share.canonicalize();
    p_plus += p_top * share;
    above += lv.count;
  }
  return p_plus;
}

}  // namespace mg
