#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mg {

// An action is one of the two market sides, never zero.
enum class Action : std::int8_t { kMinus = -1, kPlus = +1 };

inline int action_value(Action a) { return static_cast<int>(a); }
inline Action action_from_bit(unsigned bit) {
  return bit ? Action::kPlus : Action::kMinus;
}
inline unsigned action_bit(Action a) { return a == Action::kPlus ? 1u : 0u; }
inline Action opposite(Action a) {
  return a == Action::kPlus ? Action::kMinus : Action::kPlus;
}

// History of the last m minority actions, encoded as an integer in
// [0, 2^m): -1 -> bit 0, +1 -> bit 1, oldest action in the most
// significant bit.
struct History {
  std::uint32_t bits = 0;
  int m = 1;

  static History from_actions(const std::vector<Action>& as) {
    History h;
    h.m = static_cast<int>(as.size());
    for (Action a : as) h.bits = (h.bits << 1) | action_bit(a);
    return h;
  }

  std::vector<Action> actions() const {
    std::vector<Action> out(m);
    for (int i = 0; i < m; ++i)
      out[i] = action_from_bit((bits >> (m - 1 - i)) & 1u);
    return out;
  }

  // Appends the newest minority action on the right, drops the oldest.
  History shifted(Action newest) const {
    History h;
    h.m = m;
    h.bits = ((bits << 1) | action_bit(newest)) & ((1u << m) - 1u);
    return h;
  }

  bool operator==(const History&) const = default;
};

inline std::uint32_t shift_history(std::uint32_t bits, int m, unsigned newest_bit) {
  return ((bits << 1) | newest_bit) & ((1u << m) - 1u);
}

// A strategy is a total lookup table from the 2^m histories to actions.
// The id concatenates the table rows in ascending history order, first
// row in the most significant bit, so id lives in [0, 2^(2^m)).
struct Strategy {
  std::uint64_t id = 0;
  int m = 1;

  int table_size() const { return 1 << m; }

  Action action_on(std::uint32_t history_bits) const {
    const int P = table_size();
    return action_from_bit((id >> (P - 1 - static_cast<int>(history_bits))) & 1u);
  }
  Action action_on(const History& h) const { return action_on(h.bits); }

  // Strategy recommending the opposite action on every history.
  Strategy complement() const {
    const std::uint64_t mask =
        table_size() == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << table_size()) - 1);
    return Strategy{id ^ mask, m};
  }

  bool operator==(const Strategy&) const = default;
};

inline std::uint64_t strategy_space_size(int m) {
  return std::uint64_t{1} << (std::uint64_t{1} << m);
}

inline unsigned strategy_action_bit(std::uint64_t id, int P, std::uint32_t history_bits) {
  return static_cast<unsigned>((id >> (P - 1 - static_cast<int>(history_bits))) & 1u);
}

// Number of histories two strategies map to different actions.
inline int hamming_distance(const Strategy& a, const Strategy& b) {
  if (a.m != b.m)
    throw std::invalid_argument("hamming_distance: memory lengths differ");
  return __builtin_popcountll(a.id ^ b.id);
}

// All 2^(2^m) strategies in ascending id order. Guarded: the space is
// doubly exponential, so anything beyond max_m is rejected.
inline std::vector<Strategy> enumerate_full_strategy_space(int m, int max_m = 5) {
  if (m < 1) throw std::invalid_argument("memory must be >= 1");
  if (m > max_m)
    throw std::invalid_argument("strategy space too large to enumerate for m=" +
                                std::to_string(m));
  const std::uint64_t count = strategy_space_size(m);
  std::vector<Strategy> out;
  out.reserve(count);
  for (std::uint64_t id = 0; id < count; ++id) out.push_back(Strategy{id, m});
  return out;
}

}  // namespace mg
