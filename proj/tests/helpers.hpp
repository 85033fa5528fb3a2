#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "dstbam/stats.hpp"

namespace testing {

// |sample mean - mu| within k standard errors.
inline bool mean_within(std::span<const double> xs, double mu, double k = 3.0) {
  const auto s = dstbam::summarize(xs);
  return std::fabs(s.mean - mu) <= k * s.std_error;
}

// Bernoulli frequency within k sigma of p.
inline bool frequency_within(std::size_t hits, std::size_t n, double p, double k = 3.0) {
  const double sd = std::sqrt(p * (1 - p) / static_cast<double>(n));
  return std::fabs(static_cast<double>(hits) / static_cast<double>(n) - p) <= k * sd;
}

inline std::vector<double> exp1_draws(std::size_t n, std::uint64_t seed) {
  dstbam::RandomStream rng(seed, 0xe1);
  std::vector<double> out(n);
  for (auto& x : out) x = rng.next_exponential(1.0);
  return out;
}

}  // namespace testing
