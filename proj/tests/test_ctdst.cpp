#include <doctest.h>

#include "dstbam/ctdst.hpp"
#include "dstbam/errors.hpp"
#include "dstbam/parallel.hpp"
#include "helpers.hpp"

using namespace dstbam;

namespace {

EdgeWeightField k1_field() { return EdgeWeightField::from_values(2, 1, {0.3, 0.5, 0.2}); }

std::vector<double> y_samples(int k, std::int64_t n, std::uint64_t seed) {
  return map_replicates<double>(n, 1, [&](std::int64_t r) {
    return min_path_times(sample_weights(k, 2, replicate_stream(seed, 1, r))).min_by_depth.back();
  });
}

}  // namespace

TEST_CASE("edge weight means") {
  std::vector<double> root(100000), deep(100000);
  for (std::size_t r = 0; r < root.size(); ++r) {
    const auto f = sample_weights(2, 2, RandomStream(1, r));
    root[r] = f.weight(NodePath::root(2));
    deep[r] = f.weight(NodePath::parse(2, "10"));
  }
  CHECK(testing::mean_within(root, 1.0));
  CHECK(testing::mean_within(deep, 4.0));
}

TEST_CASE("eager and lazy fields agree bitwise") {
  const RandomStream rng(3, 3);
  const auto eager = EdgeWeightField::sample(10, 2, rng, EdgeWeightField::Storage::eager);
  const auto lazy = EdgeWeightField::sample(10, 2, rng, EdgeWeightField::Storage::lazy);
  for (std::uint64_t i = 1; i <= NodePath::count_up_to(2, 10); ++i) {
    const auto v = NodePath::from_index(2, i);
    REQUIRE(eager.weight(v) == lazy.weight(v));
  }
  CHECK_THROWS_AS(eager.weight(NodePath::from_index(2, 1u << 11)), DepthCapExceeded);
  CHECK_THROWS_AS(EdgeWeightField::sample(30, 2, rng, EdgeWeightField::Storage::eager), CapacityError);
  CHECK(EdgeWeightField::sample(30, 2, rng).storage() == EdgeWeightField::Storage::lazy);
}

TEST_CASE("minimal passage times by hand") {
  CHECK(min_path_times(EdgeWeightField::from_values(2, 0, {0.7})).min_by_depth == std::vector<double>{0.7});
  const auto y = min_path_times(k1_field()).min_by_depth;
  CHECK(y[0] == 0.3);
  CHECK(y[1] == doctest::Approx(0.5));
  const auto zero = min_path_times(EdgeWeightField::from_values(2, 2, std::vector<double>(7, 0.0)));
  CHECK(zero.min_by_depth == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("fpp tree by hand") {
  CHECK(fpp_tree_at(0.0, k1_field()).empty());
  const auto t = fpp_tree_at(0.4, k1_field());
  CHECK(t.size() == 1);
  CHECK(t.is_internal(NodePath::root(2)));
}

TEST_CASE("fpp height equals passage-time threshold") {
  RandomStream pick(4, 4);
  int violations = 0;
  for (std::uint64_t r = 0; r < 10000; ++r) {
    const auto field = EdgeWeightField::sample(40, 2, RandomStream(5, r), EdgeWeightField::Storage::lazy);
    const double t = pick.next_uniform() * 40.0;
    const auto y = min_path_times_until(field, t);
    violations += fpp_tree_at(t, field).external_height() != y.height_at(t);
  }
  CHECK(violations == 0);
}

TEST_CASE("best-first minima match the full search") {
  for (std::uint64_t r = 0; r < 500; ++r) {
    const auto field = sample_weights(10, 2, RandomStream(12, r));
    const auto full = min_path_times(field).min_by_depth;
    const auto partial = min_path_times_until(field, 6.0).min_by_depth;
    REQUIRE(partial.size() <= full.size());
    for (std::size_t k = 0; k < partial.size(); ++k) CHECK(partial[k] == full[k]);
    if (partial.size() < full.size()) CHECK(partial.back() > 6.0);
  }
}

TEST_CASE("bottom-up passage time matches top-down") {
  for (std::uint64_t r = 0; r < 200; ++r) {
    const auto field = sample_weights(8, 2, RandomStream(6, r));
    CHECK(deepest_passage_time(field, 8) == doctest::Approx(min_path_times(field).min_by_depth.back()));
  }
}

TEST_CASE("clock process") {
  RandomStream rng(8, 8);
  CHECK(clock_tree_at(0.0, 2, rng).empty());
  ClockProcess p(2, RandomStream(9, 9));
  double prev = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double t = p.next_ring_time();
    p.ring();
    CHECK(t > prev);
    prev = t;
  }
  CHECK(p.tree().size() == 200);
}

TEST_CASE("clock and poissonized constructions agree at t=4") {
  const auto clock = map_replicates<double>(100000, 1, [](std::int64_t r) {
    RandomStream rng = replicate_stream(10, 1, r);
    return static_cast<double>(clock_tree_at(4.0, 2, rng).external_height());
  });
  const auto fpp = map_replicates<double>(100000, 1, [](std::int64_t r) {
    const auto f = EdgeWeightField::sample(40, 2, replicate_stream(10, 2, r), EdgeWeightField::Storage::lazy);
    return static_cast<double>(fpp_tree_at(4.0, f).external_height());
  });
  CHECK(ks_two_sample(clock, fpp).passed());
}

TEST_CASE("passage-time recursion") {
  RandomStream rng(11, 11);
  std::vector<double> r0(100000), r1(100000), r3(100000);
  for (auto& x : r0) x = recursion_sample(0, 2, rng);
  for (auto& x : r1) x = recursion_sample(1, 2, rng);
  for (auto& x : r3) x = recursion_sample(3, 2, rng);
  CHECK(ks_two_sample(r0, testing::exp1_draws(100000, 12)).passed());
  CHECK(testing::mean_within(r1, 2.0));
  CHECK(ks_two_sample(r3, y_samples(3, 100000, 13)).passed());
}

TEST_CASE("passage-time minima increase with depth") {
  for (std::uint64_t r = 0; r < 1000; ++r) {
    const auto y = min_path_times(sample_weights(8, 3, RandomStream(14, r))).min_by_depth;
    for (std::size_t k = 1; k < y.size(); ++k) REQUIRE(y[k] > y[k - 1]);
  }
}
