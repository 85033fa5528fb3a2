#pragma once

#include <span>

namespace dstbam {

/// Centering m_K for the aggregation count, with its terms broken out:
/// log2 m_K = K - sqrt(2K) + log2(K)/2 - 1/ln 2 + log2(K) / (4 sqrt(2K)).
struct AsymptoticPrediction {
  int height = 0;
  long double sqrt_term = 0;        // -sqrt(2K)
  long double half_log_term = 0;    // +log2(K)/2
  long double inv_ln2_term = 0;     // -1/ln 2
  long double correction_term = 0;  // +log2(K)/(4 sqrt(2K))
  long double log2_mk = 0;
  long double mk = 0;
};

AsymptoticPrediction mk_value(int height);

/// sqrt(K) * |median(log2 xi) - log2 m_K|, median by the lower-middle order
/// statistic. Throws EmptySampleError on an empty sample.
double deviation_statistic(std::span<const double> xi_samples, int height);

/// K - sqrt(2K) + c_b log_b K: the conjectured b-ary centering of log_b xi_K,
/// with the unknown constant c_b supplied by the caller. Reported, never tested
/// against simulation.
double bary_conjecture_log(int height, unsigned branching, double c_b);

}  // namespace dstbam
