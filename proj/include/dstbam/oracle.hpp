#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dstbam/pmf.hpp"
#include "dstbam/rational.hpp"

namespace dstbam {

/// Counts of external nodes by depth, for depths 0..K-1, of a tree that has
/// not yet reached external height K. Growth only depends on this profile:
/// the next expanded node is at depth d with probability counts[d] * b^{-d}.
struct DepthProfile {
  std::vector<std::uint32_t> counts;
  friend auto operator<=>(const DepthProfile&, const DepthProfile&) = default;
};

/// Exact P(h_e(D_n) >= K) for n = 0..n_max by dynamic programming over depth
/// profiles. Budget: K <= 6, n_max <= 64; throws CapacityError beyond.
std::vector<Rational> exact_height_cdf(int height, int n_max, unsigned branching);

/// Exact pmf of xi_K by enumerating the Markov chain of absorption sets,
/// states reduced to unordered subtree shapes. Budget: T_K with at most 15
/// internal nodes (b = 2: K <= 4, b = 3: K <= 3).
Pmf exact_xi_pmf(int height, unsigned branching);

struct TcCheckRow {
  int n = 0;
  Rational xi_cdf;         // P(xi_K <= n)
  Rational height_tail;    // P(h_e(D_n) >= K)
};

struct TcCheck {
  int height = 0;
  unsigned branching = 2;
  bool equal = false;
  std::vector<TcCheckRow> rows;
  std::string report() const;
};

/// Verifies P(xi_K <= n) == P(h_e(D_n) >= K) exactly for n = 0..max(support xi_K).
TcCheck check_tc_exact(int height, unsigned branching);

}  // namespace dstbam
