#pragma once

#include <cstdint>
#include <map>

#include "dstbam/rational.hpp"

namespace dstbam {

/// Exact probability mass function on the integers.
using Pmf = std::map<std::int64_t, Rational>;

Rational total_mass(const Pmf& pmf);
/// P(X <= x).
Rational cdf_at(const Pmf& pmf, std::int64_t x);

}  // namespace dstbam
