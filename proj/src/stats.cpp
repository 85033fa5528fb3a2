#include "dstbam/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "dstbam/errors.hpp"

namespace dstbam {

Rational total_mass(const Pmf& pmf) {
  Rational total = 0;
  for (const auto& [_, p] : pmf) total += p;
  return total;
}

Rational cdf_at(const Pmf& pmf, std::int64_t x) {
  Rational total = 0;
  for (auto it = pmf.begin(); it != pmf.end() && it->first <= x; ++it) total += it->second;
  return total;
}

double kolmogorov_tail(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Jacobi-theta form, fast for small lambda.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double sum = 0.0;
    for (int j = 1; j <= 20; ++j) {
      const double k = 2.0 * j - 1.0;
      sum += std::exp(-k * k * pi2 / (8.0 * lambda * lambda));
    }
    const double cdf = std::sqrt(2.0 * std::numbers::pi) / lambda * sum;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    if (term < 1e-300) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestResult ks_two_sample_sorted(std::span<const double> xs, std::span<const double> ys) {
  if (xs.empty() || ys.empty()) throw EmptySampleError("KS test needs two non-empty samples");
  const double n = static_cast<double>(xs.size());
  const double m = static_cast<double>(ys.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < xs.size() && j < ys.size()) {
    const double v = std::min(xs[i], ys[j]);
    while (i < xs.size() && xs[i] == v) ++i;
    while (j < ys.size() && ys[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  const double ne = n * m / (n + m);
  const double root = std::sqrt(ne);
  TestResult r;
  r.test = "ks2";
  r.statistic = d;
  r.p_value = kolmogorov_tail((root + 0.12 + 0.11 / root) * d);
  r.n1 = xs.size();
  r.n2 = ys.size();
  return r;
}

TestResult ks_two_sample(std::span<const double> xs, std::span<const double> ys) {
  std::vector<double> a(xs.begin(), xs.end()), b(ys.begin(), ys.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return ks_two_sample_sorted(a, b);
}

TestResult chisq_gof(const std::map<std::int64_t, std::uint64_t>& observed, const Pmf& expected) {
  std::uint64_t total = 0;
  for (const auto& [k, c] : observed) {
    if (c == 0) continue;
    auto it = expected.find(k);
    if (it == expected.end() || sgn(it->second) <= 0) {
      throw ModelMismatchError("observed value " + std::to_string(k) + " has zero expected mass");
    }
    total += c;
  }
  if (total == 0) throw EmptySampleError("chi-square test needs at least one observation");

  struct Bin {
    double expected = 0.0;
    double observed = 0.0;
  };
  std::vector<Bin> bins;
  Bin open;
  for (const auto& [k, p] : expected) {
    if (sgn(p) <= 0) continue;
    auto it = observed.find(k);
    open.expected += p.get_d() * static_cast<double>(total);
    open.observed += it == observed.end() ? 0.0 : static_cast<double>(it->second);
    if (open.expected >= 5.0) {
      bins.push_back(open);
      open = Bin{};
    }
  }
  if (open.expected > 0.0 || open.observed > 0.0) {
    if (bins.empty()) {
      bins.push_back(open);
    } else {
      bins.back().expected += open.expected;
      bins.back().observed += open.observed;
    }
  }

  double stat = 0.0;
  for (const auto& bin : bins) {
    const double diff = bin.observed - bin.expected;
    stat += diff * diff / bin.expected;
  }
  TestResult r;
  r.test = "chisq";
  r.statistic = stat;
  r.n1 = static_cast<std::size_t>(total);
  r.dof = static_cast<int>(bins.size()) - 1;
  if (r.dof <= 0) {
    r.p_value = stat > 1e-9 ? 0.0 : 1.0;
  } else {
    r.p_value = boost::math::gamma_q(0.5 * r.dof, 0.5 * stat);
  }
  return r;
}

std::map<std::int64_t, std::uint64_t> count_values(std::span<const std::int64_t> samples) {
  std::map<std::int64_t, std::uint64_t> counts;
  for (auto x : samples) ++counts[x];
  return counts;
}

double lower_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw EmptySampleError("quantile of an empty sample");
  const double n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(p * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

Summary summarize(std::span<const double> samples) {
  if (samples.empty()) throw EmptySampleError("cannot summarize an empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  Summary s;
  s.n = sorted.size();
  const double n = static_cast<double>(s.n);
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : sorted) ss += (x - s.mean) * (x - s.mean);
  s.variance = s.n > 1 ? ss / (n - 1.0) : 0.0;
  s.std_error = std::sqrt(s.variance / n);
  s.median = lower_quantile(sorted, 0.5);
  s.min = sorted.front();
  s.max = sorted.back();
  for (double p : {0.05, 0.25, 0.5, 0.75, 0.95}) s.quantiles.emplace_back(p, lower_quantile(sorted, p));
  return s;
}

std::vector<double> to_doubles(std::span<const std::int64_t> xs) {
  return {xs.begin(), xs.end()};
}

}  // namespace dstbam
