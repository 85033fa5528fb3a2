#include "dstbam/node_path.hpp"

#include <algorithm>
#include <limits>

#include "dstbam/errors.hpp"
#include "dstbam/rational.hpp"

namespace dstbam {

Rational inverse_power(unsigned base, int exponent) {
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), base, static_cast<unsigned long>(exponent));
  return Rational(mpz_class(1), den);
}

namespace {

void check_branching(unsigned b) {
  if (b < 2 || b > 64) throw ConfigError("branching factor must be in [2, 64]");
}

}  // namespace

int NodePath::max_depth(unsigned b) {
  check_branching(b);
  // Largest d with (b^(d+1) - 1) / (b - 1) representable.
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t level = 1;  // b^d
  std::uint64_t total = 1;  // nodes at depth <= d
  int d = 0;
  while (level <= kMax / b && total <= kMax - level * b) {
    level *= b;
    total += level;
    ++d;
  }
  return d;
}

std::uint64_t NodePath::count_up_to(unsigned b, int depth) {
  if (depth < 0) return 0;
  if (depth > max_depth(b)) throw CapacityError("depth exceeds 64-bit node addressing");
  std::uint64_t level = 1, total = 1;
  for (int d = 1; d <= depth; ++d) {
    level *= b;
    total += level;
  }
  return total;
}

std::uint64_t NodePath::level_begin(unsigned b, int depth) { return count_up_to(b, depth - 1) + 1; }

NodePath NodePath::from_digits(unsigned b, std::span<const unsigned> digits) {
  NodePath v = root(b);
  for (unsigned d : digits) v = v.child(d);
  return v;
}

NodePath NodePath::parse(unsigned b, std::string_view digits) {
  NodePath v = root(b);
  if (digits == "o") return v;
  for (char c : digits) {
    if (c < '0' || c > '9') throw ConfigError("node digit out of range");
    v = v.child(static_cast<unsigned>(c - '0'));
  }
  return v;
}

NodePath NodePath::from_index(unsigned b, std::uint64_t index) {
  check_branching(b);
  if (index == 0) throw ConfigError("heap index 0 is not a node");
  int depth = 0;
  for (std::uint64_t i = index; i != 1; i = heap::parent(i, b)) ++depth;
  return NodePath(b, depth, index);
}

NodePath NodePath::parent() const {
  if (is_root()) throw ConfigError("the root has no parent");
  return NodePath(branching_, depth_ - 1, heap::parent(index_, branching_));
}

NodePath NodePath::child(unsigned digit) const {
  if (digit >= branching_) throw ConfigError("digit out of range for branching factor");
  if (depth_ + 1 > max_depth(branching_)) throw CapacityError("node depth exceeds 64-bit addressing");
  return NodePath(branching_, depth_ + 1, heap::child(index_, branching_, digit));
}

unsigned NodePath::last_digit() const {
  if (is_root()) throw ConfigError("the root has no incoming digit");
  return static_cast<unsigned>((index_ - 2) % branching_);
}

std::vector<unsigned> NodePath::digits() const {
  std::vector<unsigned> out;
  out.reserve(static_cast<std::size_t>(depth_));
  for (NodePath v = *this; !v.is_root(); v = v.parent()) out.push_back(v.last_digit());
  std::reverse(out.begin(), out.end());
  return out;
}

NodePath NodePath::ancestor(int depth) const {
  if (depth < 0 || depth > depth_) throw ConfigError("ancestor depth out of range");
  std::uint64_t i = index_;
  for (int d = depth_; d > depth; --d) i = heap::parent(i, branching_);
  return NodePath(branching_, depth, i);
}

bool NodePath::is_prefix_of(const NodePath& w) const {
  return depth_ <= w.depth_ && w.ancestor(depth_).index_ == index_;
}

std::string NodePath::to_string() const {
  if (is_root()) return "o";
  std::string s;
  for (unsigned d : digits()) s.push_back(static_cast<char>('0' + d));
  return s;
}

}  // namespace dstbam
