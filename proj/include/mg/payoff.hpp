#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "mg/strategy.hpp"

namespace mg {

// Odd payoff functions g applied to the aggregated demand.
enum class PayoffKind {
  kStep,                // g(x) = sgn(x)
  kProportional,        // g(x) = x
  kScaledProportional,  // g(x) = x / N
};

inline std::string payoff_name(PayoffKind k) {
  switch (k) {
    case PayoffKind::kStep: return "sgn";
    case PayoffKind::kProportional: return "x";
    case PayoffKind::kScaledProportional: return "x-over-n";
  }
  return "?";
}

inline PayoffKind payoff_from_name(const std::string& s) {
  if (s == "sgn" || s == "step") return PayoffKind::kStep;
  if (s == "x" || s == "proportional") return PayoffKind::kProportional;
  if (s == "x-over-n" || s == "x/n") return PayoffKind::kScaledProportional;
  throw std::invalid_argument("unknown payoff function: " + s);
}

// g(A) as an exact integer scaled by `scale`; scale must be divisible
// by N for the scaled proportional payoff.
inline std::int64_t payoff_g_scaled(PayoffKind k, std::int64_t demand,
                                    std::int64_t agents, std::int64_t scale) {
  switch (k) {
    case PayoffKind::kStep:
      return demand > 0 ? scale : (demand < 0 ? -scale : 0);
    case PayoffKind::kProportional:
      return demand * scale;
    case PayoffKind::kScaledProportional:
      return demand * (scale / agents);
  }
  return 0;
}

// Strategy payoff R = -a * g(A), unscaled convenience form.
inline double payoff(Action strategy_action, std::int64_t demand, PayoffKind k,
                     std::int64_t agents) {
  double g = 0.0;
  switch (k) {
    case PayoffKind::kStep: g = demand > 0 ? 1.0 : (demand < 0 ? -1.0 : 0.0); break;
    case PayoffKind::kProportional: g = static_cast<double>(demand); break;
    case PayoffKind::kScaledProportional:
      g = static_cast<double>(demand) / static_cast<double>(agents);
      break;
  }
  return -action_value(strategy_action) * g;
}

}  // namespace mg
