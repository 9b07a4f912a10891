#pragma once

#include <cstdint>
#include <random>

namespace mg {

// Stochastic choices of a run come from two documented sources, both
// derived from the one seed:
//   1. the mt19937_64 stream: initial history (one draw, if not given
//      explicitly), then the strategy assignment with agents in index
//      order (one draw per slot; rejection redraws when distinct mode
//      hits an already held id), then one draw for the tie-break key,
//      then one draw per step only when the aggregated demand is
//      exactly zero (the minority coin);
//   2. tie-break draws: tie_break_draw(key, t, agent), a pure counter
//      hash, one value per agent per step whether or not the agent is
//      tied.
// The counter form keeps the per-agent decision loop order-free, so
// the OpenMP kernel reproduces the serial trace bit for bit.

// SplitMix64 finaliser.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// One tie-break value per (step, agent); the counter is unique for
// agent counts below 2^32.
inline std::uint64_t tie_break_draw(std::uint64_t key, std::int64_t t,
                                    std::int64_t agent) {
  return mix64(key + (static_cast<std::uint64_t>(t) << 32) +
               static_cast<std::uint64_t>(agent));
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform integer in [0, bound) via the high bits (bound >= 1).
  std::uint64_t next_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  bool next_coin() { return (next() >> 63) != 0; }

  // Maps a raw draw to an index in [0, k); used on buffered draws.
  static std::uint64_t pick(std::uint64_t raw, std::uint64_t k) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(raw) * k) >> 64);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace mg
