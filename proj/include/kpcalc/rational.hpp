#pragma once

#include <gmpxx.h>

#include <string>

namespace kpcalc {

/// Exact coefficient field. Everything in the library is computed over Q.
using Rational = mpq_class;

inline std::string to_string(const Rational& q) { return q.get_str(); }

/// Falling-factorial binomial C(k, j), valid for negative k.
inline Rational binomial(long k, long j) {
  if (j < 0) return 0;
  Rational r = 1;
  for (long i = 0; i < j; ++i) {
    r *= Rational(k - i);
    r /= Rational(i + 1);
  }
  return r;
}

}  // namespace kpcalc
