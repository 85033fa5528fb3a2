#pragma once

#include <cstdint>
#include <vector>

#include "dstbam/ctdst.hpp"
#include "dstbam/node_path.hpp"
#include "dstbam/random_stream.hpp"

namespace dstbam {

/// Border aggregation on the complete b-ary tree T_K.
///
/// The sticky set starts as the depth-K nodes. Each released particle walks
/// down from the root and freezes at the first node having a sticky child;
/// that node becomes sticky. The nodes a walker can freeze at form the
/// absorption set A: internal nodes with a sticky child and no such ancestor.
class BorderAggregation {
 public:
  BorderAggregation(int height, unsigned branching);

  int height() const { return height_; }
  unsigned branching() const { return branching_; }
  std::int64_t particles() const { return particles_; }
  bool root_sticky() const { return (state_[1] & kSticky) != 0; }

  /// Restores S_0 without reallocating.
  void reset();
  /// Releases one particle; returns the node that became sticky.
  NodePath release(RandomStream& rng);

  bool is_sticky(const NodePath& v) const;
  /// Current absorption set, sorted by heap index.
  std::vector<NodePath> absorption_set() const;

 private:
  static constexpr std::uint8_t kStickyChild = 1;
  static constexpr std::uint8_t kSticky = 2;

  int height_;
  unsigned branching_;
  std::int64_t particles_ = 0;
  // Heap-indexed flags for the internal nodes of T_K; slot 0 unused.
  std::vector<std::uint8_t> state_;
};

struct AggregationOutcome {
  std::int64_t particles = 0;  // xi_K
  double time = 0.0;           // Xi_K, continuous runs only
  std::vector<NodePath> trajectory;
};

/// Releases particles until the root is sticky; `particles` is xi_K
/// (the root's own particle included).
AggregationOutcome run_discrete(int height, unsigned branching, RandomStream& rng, bool record_trajectory = false);
/// Same, reusing `scratch` (reset first) to avoid reallocating T_K.
std::int64_t run_discrete(BorderAggregation& scratch, RandomStream& rng);

/// Discrete run plus rate-1 Poisson arrival times drawn from an independent
/// stream: time = sum of xi_K Exp(1) gaps.
AggregationOutcome run_continuous(int height, unsigned branching, RandomStream& rng);

struct CoupledOutcome {
  double aggregation_time = 0.0;  // Xi_{K+1} from the absorption-set clocks
  double passage_time = 0.0;      // minimal passage time to depth K, same field
  std::int64_t events = 0;        // absorption-set moves, root ring included
};

/// Continuous aggregation on T_{K+1} driven by the clocks of `field`: A starts
/// as the depth-K nodes with activation time 0, node v in A rings at
/// activation + X_v, and a ringing node's parent enters A (activation = ring
/// time) while every other descendant of that parent leaves. Stops when the
/// root rings. Both returned times are equal bit for bit.
CoupledOutcome run_coupled(int depth, const EdgeWeightField& field);

/// Xi_K through Xi_{K+1} = b * min(b independent copies of Xi_K) + Exp(1),
/// Xi_1 ~ Exp(1).
double recursion_sample_xi(int height, unsigned branching, RandomStream& rng);

}  // namespace dstbam
