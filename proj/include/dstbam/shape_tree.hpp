#pragma once

#include <cstdint>
#include <span>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dstbam/node_path.hpp"
#include "dstbam/random_stream.hpp"
#include "dstbam/rational.hpp"

namespace dstbam {

/// Finite extended b-ary tree, stored as its ancestor-closed set of internal
/// nodes. The external nodes (non-internal children of internal nodes, or the
/// root alone for the empty tree) form a boundary of the infinite tree.
///
/// Values are safe to share read-only; growth goes through `expand` on an
/// owned copy or `with_expanded`.
class ShapeTree {
 public:
  explicit ShapeTree(unsigned branching = 2);

  /// Throws ConfigError unless the set is ancestor-closed and uses one branching.
  static ShapeTree from_internal(unsigned branching, std::span<const NodePath> internal);
  /// Complete tree T_K: every node of depth < height is internal.
  static ShapeTree complete(unsigned branching, int height);

  unsigned branching() const { return branching_; }
  /// Number of internal nodes |T|.
  std::size_t size() const { return internal_.size(); }
  bool empty() const { return internal_.empty(); }
  std::size_t external_count() const { return external_.size(); }

  bool is_internal(const NodePath& v) const { return internal_.contains(v.index()); }
  bool is_internal(std::uint64_t heap_index) const { return internal_.contains(heap_index); }
  bool is_external(const NodePath& v) const { return external_.contains(v.index()); }

  /// Sorted by heap index.
  std::vector<NodePath> internal_nodes() const;
  std::vector<NodePath> external_nodes() const;

  /// Maximum external depth; 0 for the empty tree.
  int external_height() const { return max_internal_depth_ + 1; }

  /// Turns the external node `v` internal and adds its b children.
  void expand(const NodePath& v);
  ShapeTree with_expanded(const NodePath& v) const;

  friend bool operator==(const ShapeTree& a, const ShapeTree& b) {
    return a.branching_ == b.branching_ && a.internal_ == b.internal_;
  }

 private:
  unsigned branching_;
  std::unordered_set<std::uint64_t> internal_;
  std::unordered_set<std::uint64_t> external_;
  int max_internal_depth_ = -1;
};

std::vector<NodePath> external_nodes(const ShapeTree& tree);
int external_height(const ShapeTree& tree);

/// Harmonic measure p_v = b^{-d(v)} on the external nodes of a tree.
class HarmonicMeasure {
 public:
  explicit HarmonicMeasure(std::vector<NodePath> support) : support_(std::move(support)) {}

  const std::vector<NodePath>& support() const { return support_; }
  double probability(const NodePath& v) const;
  Rational exact_probability(const NodePath& v) const;
  /// Sum of the exact masses; equals 1 for every finite tree.
  Rational exact_total() const;

 private:
  std::vector<NodePath> support_;
};

HarmonicMeasure harmonic_measure(const ShapeTree& tree);

/// Directed walk from the root, choosing each child with probability 1/b,
/// until an external node is reached. The exit law is the harmonic measure.
NodePath directed_random_walk(const ShapeTree& tree, RandomStream& rng);

}  // namespace dstbam
