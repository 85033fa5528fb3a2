#include "dstbam/dst.hpp"

#include <cmath>

#include "dstbam/errors.hpp"

namespace dstbam {

Item Item::from_digits(unsigned b, std::vector<unsigned> digits) {
  for (unsigned d : digits) {
    if (d >= b) throw ConfigError("item digit out of range");
  }
  return Item(b, std::move(digits), std::nullopt);
}

Item Item::parse(unsigned b, std::string_view text) {
  std::vector<unsigned> digits;
  for (char c : text) {
    if (c < '0' || c > '9') throw ConfigError("item digits must be decimal characters");
    digits.push_back(static_cast<unsigned>(c - '0'));
  }
  return from_digits(b, std::move(digits));
}

Item Item::random(unsigned b, RandomStream source) { return Item(b, {}, std::move(source)); }

unsigned Item::digit(std::size_t position) const {
  if (position == 0) throw ConfigError("item digit positions start at 1");
  if (!source_) {
    if (position > digits_.size()) throw RoutingError("item prefix exhausted before reaching an external node");
    return digits_[position - 1];
  }
  // High bits of x * b; exact for powers of two, bias below 2^-60 otherwise.
  const auto x = static_cast<unsigned __int128>(source_->u64_at(position - 1)) * branching_;
  return static_cast<unsigned>(x >> 64);
}

NodePath route_item(const ShapeTree& tree, const Item& item) {
  if (item.branching() != tree.branching()) throw ConfigError("item and tree branching differ");
  NodePath v = NodePath::root(tree.branching());
  while (tree.is_internal(v)) v = v.child(item.digit(static_cast<std::size_t>(v.depth()) + 1));
  return v;
}

ShapeTree insert_item(const ShapeTree& tree, const Item& item) {
  return tree.with_expanded(route_item(tree, item));
}

ShapeTree build_dst(unsigned b, const std::vector<Item>& items) {
  ShapeTree tree(b);
  for (const auto& item : items) tree.expand(route_item(tree, item));
  return tree;
}

NodePath DstProcess::grow_one() {
  const NodePath v = directed_random_walk(tree_, rng_);
  tree_.expand(v);
  return v;
}

DstProcess grow_one(DstProcess proc) {
  proc.grow_one();
  return proc;
}

std::int64_t height_hitting_time(int height, unsigned b, RandomStream& rng) {
  if (height < 1) throw ConfigError("target height must be at least 1");
  DstProcess proc(b, rng);
  while (proc.tree().external_height() < height) proc.grow_one();
  rng = proc.rng();
  return static_cast<std::int64_t>(proc.insertions());
}

double ArrivalClock::next() {
  time_ += rng_.next_exponential(1.0);
  ++arrivals_;
  return time_;
}

namespace {

std::uint64_t poisson_inversion(double mean, RandomStream& rng) {
  const double u = rng.next_uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t k = 0;
  while (u > cdf && p > 0.0) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

}  // namespace

std::uint64_t sample_poisson(double mean, RandomStream& rng) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw ConfigError("Poisson mean must be finite and non-negative");
  if (mean == 0.0) return 0;
  if (mean <= 30.0) return poisson_inversion(mean, rng);
  const auto parts = static_cast<std::uint64_t>(std::ceil(mean / 30.0));
  const double piece = mean / static_cast<double>(parts);
  std::uint64_t total = 0;
  for (std::uint64_t i = 0; i < parts; ++i) total += poisson_inversion(piece, rng);
  return total;
}

ShapeTree sample_poissonized(double t, unsigned b, RandomStream& rng) {
  if (!(t >= 0.0)) throw ConfigError("time must be non-negative");
  const std::uint64_t n = sample_poisson(t, rng);
  DstProcess proc(b, rng.derive(rng.next_u64()));
  for (std::uint64_t i = 0; i < n; ++i) proc.grow_one();
  return proc.tree();
}

}  // namespace dstbam
