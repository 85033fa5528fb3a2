#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace dstbam {

/// Address of a node in the infinite b-ary tree.
///
/// Stored as a heap index: the root is 1 and the children of node i are
/// b*(i-1)+2, ..., b*(i-1)+b+1 (for b = 2 simply 2i and 2i+1). The depth is
/// carried alongside so parent/child/depth queries are O(1).
class NodePath {
 public:
  NodePath() = default;

  static NodePath root(unsigned branching) { return NodePath(branching, 0, 1); }
  static NodePath from_digits(unsigned branching, std::span<const unsigned> digits);
  /// Digits as characters, e.g. "1010"; "" or "o" is the root.
  static NodePath parse(unsigned branching, std::string_view digits);
  static NodePath from_index(unsigned branching, std::uint64_t index);

  /// Deepest depth whose heap indices still fit in 64 bits.
  static int max_depth(unsigned branching);
  /// Heap index of the first node at `depth`.
  static std::uint64_t level_begin(unsigned branching, int depth);
  /// Number of nodes at depth <= depth, i.e. (b^(depth+1) - 1) / (b - 1).
  static std::uint64_t count_up_to(unsigned branching, int depth);

  unsigned branching() const { return branching_; }
  int depth() const { return depth_; }
  std::uint64_t index() const { return index_; }
  bool is_root() const { return depth_ == 0; }

  NodePath parent() const;
  NodePath child(unsigned digit) const;
  /// Digit used to step from the parent to this node.
  unsigned last_digit() const;
  std::vector<unsigned> digits() const;
  /// v.is_prefix_of(w) iff v lies on the root path of w (inclusive).
  bool is_prefix_of(const NodePath& other) const;
  /// Ancestor at the given depth (<= depth()).
  NodePath ancestor(int depth) const;

  std::string to_string() const;

  friend bool operator==(const NodePath& a, const NodePath& b) {
    return a.index_ == b.index_ && a.branching_ == b.branching_;
  }
  friend std::strong_ordering operator<=>(const NodePath& a, const NodePath& b) {
    return a.index_ <=> b.index_;
  }

 private:
  NodePath(unsigned branching, int depth, std::uint64_t index)
      : branching_(branching), depth_(depth), index_(index) {}

  unsigned branching_ = 2;
  int depth_ = 0;
  std::uint64_t index_ = 1;
};

namespace heap {

inline std::uint64_t child(std::uint64_t index, unsigned branching, unsigned digit) {
  return branching * (index - 1) + 2 + digit;
}
inline std::uint64_t parent(std::uint64_t index, unsigned branching) {
  return (index - 2) / branching + 1;
}

}  // namespace heap

}  // namespace dstbam

template <>
struct std::hash<dstbam::NodePath> {
  std::size_t operator()(const dstbam::NodePath& v) const noexcept {
    return std::hash<std::uint64_t>{}(v.index());
  }
};
