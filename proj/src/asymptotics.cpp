#include "dstbam/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "dstbam/errors.hpp"
#include "dstbam/stats.hpp"

namespace dstbam {

AsymptoticPrediction mk_value(int height) {
  if (height < 1) throw ConfigError("K must be at least 1");
  const long double k = height;
  const long double root = std::sqrt(2.0L * k);
  const long double lg = std::log2(k);
  AsymptoticPrediction p;
  p.height = height;
  p.sqrt_term = -root;
  p.half_log_term = 0.5L * lg;
  p.inv_ln2_term = -1.0L / std::numbers::ln2_v<long double>;
  p.correction_term = lg / (4.0L * root);
  p.log2_mk = k + p.sqrt_term + p.half_log_term + p.inv_ln2_term + p.correction_term;
  p.mk = std::exp2(p.log2_mk);
  return p;
}

double deviation_statistic(std::span<const double> xi_samples, int height) {
  if (xi_samples.empty()) throw EmptySampleError("deviation statistic needs samples");
  std::vector<double> logs;
  logs.reserve(xi_samples.size());
  for (double x : xi_samples) logs.push_back(std::log2(x));
  std::sort(logs.begin(), logs.end());
  const long double median = lower_quantile(logs, 0.5);
  return static_cast<double>(std::sqrt(static_cast<long double>(height)) * std::fabs(median - mk_value(height).log2_mk));
}

double bary_conjecture_log(int height, unsigned b, double c_b) {
  if (height < 1) throw ConfigError("K must be at least 1");
  if (b < 2) throw ConfigError("branching factor must be at least 2");
  const double k = height;
  return k - std::sqrt(2.0 * k) + c_b * std::log(k) / std::log(static_cast<double>(b));
}

}  // namespace dstbam
