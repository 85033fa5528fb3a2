#include <doctest.h>

#include <map>

#include "dstbam/dst.hpp"
#include "dstbam/errors.hpp"
#include "dstbam/oracle.hpp"
#include "dstbam/parallel.hpp"
#include "helpers.hpp"

using namespace dstbam;

namespace {

const std::vector<std::string> kFigure2 = {"01011", "10011", "00101", "10110", "00011", "10100"};

std::vector<Item> figure2_items(std::size_t count) {
  std::vector<Item> items;
  for (std::size_t i = 0; i < count; ++i) items.push_back(Item::parse(2, kFigure2[i]));
  return items;
}

std::vector<std::string> internal_labels(const ShapeTree& t) {
  std::vector<std::string> out;
  for (const auto& v : t.internal_nodes()) out.push_back(v.to_string());
  return out;
}

}  // namespace

TEST_CASE("insertion follows the item digits") {
  CHECK(internal_labels(build_dst(2, figure2_items(1))) == std::vector<std::string>{"o"});
  CHECK(internal_labels(build_dst(2, figure2_items(2))) == std::vector<std::string>{"o", "1"});
  const auto t = build_dst(2, figure2_items(6));
  CHECK(internal_labels(t) == std::vector<std::string>{"o", "0", "1", "00", "10", "101"});
  CHECK(t.external_height() == 4);
}

TEST_CASE("routing past a finite prefix fails") {
  const auto t = build_dst(2, figure2_items(6));
  CHECK_THROWS_AS(route_item(t, Item::parse(2, "10")), RoutingError);
  CHECK(route_item(t, Item::parse(2, "11")).to_string() == "11");
}

TEST_CASE("random items route the same as the walk law") {
  // first digit picks the depth-1 child
  RandomStream src(8, 1);
  const auto item = Item::random(3, src);
  const unsigned first = item.digit(1);
  CHECK(first < 3);
  CHECK(route_item(build_dst(3, {Item::parse(3, "0")}), item).last_digit() == first);
  CHECK(item.digit(5) == Item::random(3, src).digit(5));
}

TEST_CASE("growth steps") {
  DstProcess p(2, RandomStream(1, 1));
  p.grow_one();
  CHECK(internal_labels(p.tree()) == std::vector<std::string>{"o"});
  std::size_t ones = 0;
  const std::size_t n = 100000;
  for (std::size_t r = 0; r < n; ++r) {
    DstProcess q(2, RandomStream(2, r));
    q.grow_one();
    const auto v = q.grow_one();
    ones += v.to_string() == "1";
    REQUIRE(q.tree().external_height() == 2);
  }
  CHECK(testing::frequency_within(ones, n, 0.5));
}

TEST_CASE("height hitting time small cases") {
  RandomStream rng(5, 0);
  for (int i = 0; i < 2000; ++i) {
    CHECK(height_hitting_time(1, 2, rng) == 1);
    CHECK(height_hitting_time(2, 2, rng) == 2);
  }
  CHECK_THROWS_AS(height_hitting_time(0, 2, rng), ConfigError);

  const auto xs = map_replicates<std::int64_t>(100000, 1, [](std::int64_t r) {
    RandomStream s = replicate_stream(17, 3, r);
    return height_hitting_time(3, 2, s);
  });
  const auto result = chisq_gof(count_values(xs), exact_xi_pmf(3, 2));
  CHECK(result.passed());
}

TEST_CASE("exact height law of small trees by simulation") {
  const int n = 5;
  const auto hs = map_replicates<std::int64_t>(50000, 1, [](std::int64_t r) {
    DstProcess p(2, replicate_stream(4, 4, r));
    for (int i = 0; i < n; ++i) p.grow_one();
    return static_cast<std::int64_t>(p.tree().external_height());
  });
  const auto tail3 = exact_height_cdf(3, n, 2).back().get_d();
  const auto tail4 = exact_height_cdf(4, n, 2).back().get_d();
  std::size_t ge3 = 0, ge4 = 0;
  for (auto h : hs) {
    ge3 += h >= 3;
    ge4 += h >= 4;
  }
  CHECK(testing::frequency_within(ge3, hs.size(), tail3));
  CHECK(testing::frequency_within(ge4, hs.size(), tail4));
}

TEST_CASE("poisson sampling") {
  RandomStream rng(6, 6);
  CHECK(sample_poisson(0.0, rng) == 0);
  for (double mean : {0.5, 7.0, 30.0, 95.5}) {
    std::vector<double> xs(50000);
    for (auto& x : xs) x = static_cast<double>(sample_poisson(mean, rng));
    const auto s = summarize(xs);
    CHECK(testing::mean_within(xs, mean));
    CHECK(s.variance == doctest::Approx(mean).epsilon(0.05));
  }
}

TEST_CASE("poissonized growth") {
  RandomStream rng(7, 7);
  CHECK(sample_poissonized(0.0, 2, rng).empty());
  std::vector<double> sizes(100000);
  for (auto& s : sizes) s = static_cast<double>(sample_poissonized(6.0, 2, rng).size());
  CHECK(testing::mean_within(sizes, 6.0));
}

TEST_CASE("arrival times increase") {
  ArrivalClock clock(RandomStream(9, 9));
  double prev = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double t = clock.next();
    CHECK(t > prev);
    prev = t;
  }
  CHECK(clock.arrivals() == 1000);
}

TEST_CASE("growth invariants") {
  for (unsigned b : {2u, 3u}) {
    DstProcess p(b, RandomStream(20, b));
    int last_height = 0;
    for (std::size_t n = 1; n <= 300; ++n) {
      p.grow_one();
      REQUIRE(p.tree().size() == n);
      REQUIRE(p.tree().external_count() == (b - 1) * n + 1);
      REQUIRE(p.tree().external_height() >= last_height);
      last_height = p.tree().external_height();
    }
  }
}

TEST_CASE("random items and harmonic growth give the same shape law") {
  auto shape_key = [](const ShapeTree& t) {
    std::string key;
    for (const auto& v : t.internal_nodes()) key += std::to_string(v.index()) + ",";
    return key;
  };
  const int n = 5;
  const std::size_t reps = 200000;
  std::map<std::string, double> by_items, by_walk;
  for (std::size_t r = 0; r < reps; ++r) {
    std::vector<Item> items;
    for (int i = 0; i < n; ++i) items.push_back(Item::random(2, RandomStream(21, r).derive(i)));
    by_items[shape_key(build_dst(2, items))] += 1.0 / reps;
    DstProcess p(2, RandomStream(22, r));
    for (int i = 0; i < n; ++i) p.grow_one();
    by_walk[shape_key(p.tree())] += 1.0 / reps;
  }
  double tv = 0.0;
  for (const auto& [k, p] : by_items) tv += std::fabs(p - by_walk[k]);
  for (const auto& [k, p] : by_walk) {
    if (!by_items.contains(k)) tv += p;
  }
  CHECK(tv / 2 < 3e-2);
}
