#pragma once

#include <gmpxx.h>

#include <string>

namespace dstbam {

/// Exact arbitrary-precision rational.
using Rational = mpq_class;

/// 1 / base^exponent, exactly.
Rational inverse_power(unsigned base, int exponent);

inline std::string to_string(const Rational& q) { return q.get_str(); }

}  // namespace dstbam
