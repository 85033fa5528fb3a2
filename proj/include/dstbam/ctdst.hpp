#pragma once

#include <cstdint>
#include <queue>
#include <vector>

#include "dstbam/random_stream.hpp"
#include "dstbam/shape_tree.hpp"

namespace dstbam {

/// Independent passage times X_v ~ Exp(b^{-d(v)}) for all nodes with
/// d(v) <= depth_cap.
///
/// The weight of node v is -ln(U) * b^{d(v)} where U is draw number
/// `heap_index(v)` of the field's stream, so eager (precomputed array) and
/// lazy (computed on access) storage return bit-identical values.
class EdgeWeightField {
 public:
  enum class Storage { eager, lazy };

  /// Largest node count stored eagerly (b = 2: depth cap 24).
  static constexpr std::uint64_t kEagerLimit = std::uint64_t{1} << 25;

  /// Eager when the node count fits kEagerLimit, lazy otherwise.
  static EdgeWeightField sample(int depth_cap, unsigned branching, const RandomStream& rng);
  /// Throws CapacityError when eager storage is requested beyond kEagerLimit.
  static EdgeWeightField sample(int depth_cap, unsigned branching, const RandomStream& rng, Storage storage);
  /// Explicit weights in heap order: values[i - 1] is the weight of heap index i.
  static EdgeWeightField from_values(unsigned branching, int depth_cap, std::vector<double> values);

  unsigned branching() const { return branching_; }
  int depth_cap() const { return depth_cap_; }
  Storage storage() const { return storage_; }
  std::uint64_t node_count() const { return node_count_; }

  double weight(const NodePath& v) const { return weight(v.index(), v.depth()); }
  /// Weight of the node at `heap_index`, which must lie at `depth`.
  double weight(std::uint64_t heap_index, int depth) const {
    if (depth > depth_cap_) throw_cap(depth);
    if (storage_ == Storage::eager) return values_[heap_index - 1];
    return lazy_weight(heap_index, depth);
  }

 private:
  EdgeWeightField(unsigned branching, int depth_cap, Storage storage, RandomStream rng);
  double lazy_weight(std::uint64_t heap_index, int depth) const;
  [[noreturn]] void throw_cap(int depth) const;

  unsigned branching_;
  int depth_cap_;
  Storage storage_;
  RandomStream rng_;
  std::uint64_t node_count_;
  std::vector<double> values_;
};

EdgeWeightField sample_weights(int depth_cap, unsigned branching, const RandomStream& rng);

/// Minimal root-path sums: min_by_depth[k] = min over d(v) = k of
/// Y_v = sum of X_w for w on the root path of v.
struct PassageTimes {
  std::vector<double> min_by_depth;

  int depth_cap() const { return static_cast<int>(min_by_depth.size()) - 1; }
  /// max{k : min_by_depth[k] <= t} + 1, i.e. h_e(C(t)) on the same field.
  /// Throws DepthCapExceeded when t >= min_by_depth[cap].
  int height_at(double t) const;
};

/// One depth-first pass computing Y_v = Y_parent + X_v and the per-depth minima.
PassageTimes min_path_times(const EdgeWeightField& field);
/// Same minima by best-first search over Y, stopping at the first depth whose
/// minimum exceeds `horizon` (or at the depth cap). Visits only nodes with
/// Y_v below that minimum, so deep lazy fields are fine.
PassageTimes min_path_times_until(const EdgeWeightField& field, double horizon);

/// Minimal passage time to depth `depth` accumulated bottom-up: each node
/// contributes (min over children) + X_v. This is the summation order of the
/// aggregation coupling, so it matches `run_coupled` bit for bit.
double deepest_passage_time(const EdgeWeightField& field, int depth);

/// Tree with internal nodes {v : Y_v <= t}.
/// Throws DepthCapExceeded when a node at the depth cap would be internal.
ShapeTree fpp_tree_at(double t, const EdgeWeightField& field);

/// Continuous-time DST driven by exponential clocks: each external node v
/// rings at rate b^{-d(v)}; a ringing node becomes internal.
class ClockProcess {
 public:
  ClockProcess(unsigned branching, RandomStream rng);

  const ShapeTree& tree() const { return tree_; }
  double time() const { return time_; }
  double next_ring_time() const { return pending_.top().time; }

  /// Processes the earliest pending ring; returns the node that became internal.
  NodePath ring();

 private:
  struct Ring {
    double time;
    std::uint64_t index;
    int depth;
    friend bool operator>(const Ring& a, const Ring& b) {
      return a.time > b.time || (a.time == b.time && a.index > b.index);
    }
  };
  void schedule(const NodePath& v);

  ShapeTree tree_;
  RandomStream rng_;
  double time_ = 0.0;
  std::priority_queue<Ring, std::vector<Ring>, std::greater<>> pending_;
};

struct ClockRun {
  ShapeTree tree;
  double time = 0.0;
};

/// Runs the clock process until the external height first reaches `height`.
ClockRun clock_run_until_height(int height, unsigned branching, RandomStream& rng);
/// State of the clock process at time t.
ShapeTree clock_tree_at(double t, unsigned branching, RandomStream& rng);

/// Samples the minimal passage time to depth `depth` through the recursion
/// Y_k = b * min(b independent copies of Y_{k-1}) + Exp(1), Y_0 ~ Exp(1).
double recursion_sample(int depth, unsigned branching, RandomStream& rng);

}  // namespace dstbam
