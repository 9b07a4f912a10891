#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace mg {

using Rat = mpq_class;
using Int = mpz_class;

inline Rat rat(std::int64_t num, std::int64_t den = 1) {
  Rat q(static_cast<long>(num), static_cast<long>(den));
  q.canonicalize();
  return q;
}

inline Rat rat_pow(const Rat& base, unsigned exp) {
  Rat out(1);
  Rat b = base;
  while (exp) {
    if (exp & 1u) out *= b;
    b *= b;
    exp >>= 1;
  }
  return out;
}

inline Int binomial(unsigned n, unsigned k) {
  Int out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

inline Int pow2(unsigned e) {
  Int out(1);
  out <<= e;
  return out;
}

inline std::string rat_str(const Rat& q) { return q.get_str(); }

inline double rat_double(const Rat& q) { return q.get_d(); }

}  // namespace mg
