#include "dstbam/shape_tree.hpp"

#include <algorithm>
#include <cmath>

#include "dstbam/errors.hpp"

namespace dstbam {

namespace {

std::vector<NodePath> sorted_nodes(unsigned b, const std::unordered_set<std::uint64_t>& indices) {
  std::vector<std::uint64_t> sorted(indices.begin(), indices.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<NodePath> out;
  out.reserve(sorted.size());
  for (auto i : sorted) out.push_back(NodePath::from_index(b, i));
  return out;
}

}  // namespace

ShapeTree::ShapeTree(unsigned branching) : branching_(branching) {
  if (branching < 2) throw ConfigError("branching factor must be at least 2");
  external_.insert(1);
}

ShapeTree ShapeTree::from_internal(unsigned b, std::span<const NodePath> internal) {
  std::vector<NodePath> order(internal.begin(), internal.end());
  for (const auto& v : order) {
    if (v.branching() != b) throw ConfigError("node branching does not match tree branching");
  }
  // Heap order puts every parent before its children.
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());
  ShapeTree tree(b);
  for (const auto& v : order) {
    if (!tree.is_external(v)) throw ConfigError("internal node set is not ancestor-closed");
    tree.expand(v);
  }
  return tree;
}

ShapeTree ShapeTree::complete(unsigned b, int height) {
  if (height < 0) throw ConfigError("height must be non-negative");
  ShapeTree tree(b);
  const std::uint64_t n = NodePath::count_up_to(b, height - 1);
  tree.internal_.reserve(n);
  for (std::uint64_t i = 1; i <= n; ++i) tree.expand(NodePath::from_index(b, i));
  return tree;
}

std::vector<NodePath> ShapeTree::internal_nodes() const { return sorted_nodes(branching_, internal_); }

std::vector<NodePath> ShapeTree::external_nodes() const { return sorted_nodes(branching_, external_); }

void ShapeTree::expand(const NodePath& v) {
  if (v.branching() != branching_) throw ConfigError("node branching does not match tree branching");
  if (external_.erase(v.index()) == 0) throw ConfigError("only external nodes can be expanded");
  internal_.insert(v.index());
  for (unsigned j = 0; j < branching_; ++j) external_.insert(v.child(j).index());
  max_internal_depth_ = std::max(max_internal_depth_, v.depth());
}

ShapeTree ShapeTree::with_expanded(const NodePath& v) const {
  ShapeTree copy = *this;
  copy.expand(v);
  return copy;
}

std::vector<NodePath> external_nodes(const ShapeTree& tree) { return tree.external_nodes(); }

int external_height(const ShapeTree& tree) { return tree.external_height(); }

double HarmonicMeasure::probability(const NodePath& v) const {
  return std::pow(static_cast<double>(v.branching()), -v.depth());
}

Rational HarmonicMeasure::exact_probability(const NodePath& v) const {
  return inverse_power(v.branching(), v.depth());
}

Rational HarmonicMeasure::exact_total() const {
  Rational total = 0;
  for (const auto& v : support_) total += exact_probability(v);
  return total;
}

HarmonicMeasure harmonic_measure(const ShapeTree& tree) { return HarmonicMeasure(tree.external_nodes()); }

NodePath directed_random_walk(const ShapeTree& tree, RandomStream& rng) {
  const unsigned b = tree.branching();
  NodePath v = NodePath::root(b);
  while (tree.is_internal(v)) v = v.child(rng.next_below(b));
  return v;
}

}  // namespace dstbam
