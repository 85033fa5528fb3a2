#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "dstbam/random_stream.hpp"
#include "dstbam/shape_tree.hpp"

namespace dstbam {

/// A key for digital search tree insertion: a stream of digits in {0..b-1}.
/// Either a finite prefix (deterministic tests) or an unbounded stream read
/// by position from a counter-based generator.
class Item {
 public:
  static Item from_digits(unsigned branching, std::vector<unsigned> digits);
  /// Digits given as text, e.g. "01011".
  static Item parse(unsigned branching, std::string_view digits);
  static Item random(unsigned branching, RandomStream source);

  unsigned branching() const { return branching_; }
  /// Digit at 1-based `position`; throws RoutingError past a finite prefix.
  unsigned digit(std::size_t position) const;

 private:
  Item(unsigned branching, std::vector<unsigned> digits, std::optional<RandomStream> source)
      : branching_(branching), digits_(std::move(digits)), source_(std::move(source)) {}

  unsigned branching_;
  std::vector<unsigned> digits_;
  std::optional<RandomStream> source_;
};

/// External node reached by routing `item` down `tree`: at an internal node of
/// depth d the (d+1)-th digit picks the child.
NodePath route_item(const ShapeTree& tree, const Item& item);
ShapeTree insert_item(const ShapeTree& tree, const Item& item);
/// Digital search tree built from items inserted in order.
ShapeTree build_dst(unsigned branching, const std::vector<Item>& items);

/// Discrete-time random DST grown by harmonic-measure sampling.
class DstProcess {
 public:
  DstProcess(unsigned branching, RandomStream rng) : tree_(branching), rng_(std::move(rng)) {}

  const ShapeTree& tree() const { return tree_; }
  std::size_t insertions() const { return tree_.size(); }
  const RandomStream& rng() const { return rng_; }

  /// Picks an external node by the directed walk and makes it internal.
  NodePath grow_one();

 private:
  ShapeTree tree_;
  RandomStream rng_;
};

DstProcess grow_one(DstProcess proc);

/// min{n : h_e(D_n) >= K}, growing one node at a time.
std::int64_t height_hitting_time(int height, unsigned branching, RandomStream& rng);

/// Rate-1 Poisson arrival times tau_1 < tau_2 < ... with Exp(1) gaps.
class ArrivalClock {
 public:
  explicit ArrivalClock(RandomStream rng) : rng_(std::move(rng)) {}

  /// Advances to the next arrival and returns its time.
  double next();
  double time() const { return time_; }
  std::uint64_t arrivals() const { return arrivals_; }

 private:
  RandomStream rng_;
  double time_ = 0.0;
  std::uint64_t arrivals_ = 0;
};

/// Poisson(mean) variate. Inversion for mean <= 30; larger means are split
/// into equal parts of at most 30 and summed.
std::uint64_t sample_poisson(double mean, RandomStream& rng);

/// C(t) = D_{N(t)} with N(t) ~ Poisson(t).
ShapeTree sample_poissonized(double t, unsigned branching, RandomStream& rng);

}  // namespace dstbam
