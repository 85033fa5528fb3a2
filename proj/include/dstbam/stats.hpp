#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dstbam/pmf.hpp"

namespace dstbam {

/// Significance level used by every distributional check.
inline constexpr double kAlpha = 1e-3;

struct TestResult {
  std::string test;  // "ks2" or "chisq"
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;  // second sample size (KS) or 0
  int dof = 0;         // chi-square degrees of freedom after pooling
  double alpha = kAlpha;

  bool passed() const { return p_value > alpha; }
};

/// Limiting Kolmogorov tail P(K > lambda).
double kolmogorov_tail(double lambda);

/// Two-sample Kolmogorov-Smirnov test on sorted samples. The p-value is the
/// asymptotic one with effective size n*m/(n+m) and Stephens' correction.
TestResult ks_two_sample_sorted(std::span<const double> xs, std::span<const double> ys);
/// Same, sorting copies of the inputs first.
TestResult ks_two_sample(std::span<const double> xs, std::span<const double> ys);

/// Pearson goodness-of-fit of integer-valued counts against an exact pmf.
/// Adjacent categories (in key order) are pooled until each pooled bin has
/// expected count >= 5. Throws ModelMismatchError if a count lands where the
/// pmf has no mass.
TestResult chisq_gof(const std::map<std::int64_t, std::uint64_t>& observed, const Pmf& expected);

std::map<std::int64_t, std::uint64_t> count_values(std::span<const std::int64_t> samples);

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double median = 0.0;
  double variance = 0.0;  // unbiased (n - 1); 0 for n == 1
  double std_error = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<std::pair<double, double>> quantiles;  // (p, q_p)
};

/// Order-statistic quantile x_(ceil(p n)) of sorted data, so the median of an
/// even-sized sample is the lower middle value.
double lower_quantile(std::span<const double> sorted, double p);

Summary summarize(std::span<const double> samples);

std::vector<double> to_doubles(std::span<const std::int64_t> xs);

}  // namespace dstbam
