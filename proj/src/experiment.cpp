#include "dstbam/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "dstbam/asymptotics.hpp"
#include "dstbam/bam.hpp"
#include "dstbam/ctdst.hpp"
#include "dstbam/dst.hpp"
#include "dstbam/errors.hpp"
#include "dstbam/oracle.hpp"
#include "dstbam/parallel.hpp"
#include "dstbam/stats.hpp"

#ifndef DSTBAM_VERSION
#define DSTBAM_VERSION "dev"
#endif

namespace dstbam {

using nlohmann::json;

namespace {

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

// Stream roles; distinct tags give independent replicate streams.
constexpr std::uint64_t kTagXi = fnv1a("bam-xi");
constexpr std::uint64_t kTagXiCt = fnv1a("bam-xi-ct");
constexpr std::uint64_t kTagDstHit = fnv1a("dst-height-hit");
constexpr std::uint64_t kTagDstGrow = fnv1a("dst-grow");
constexpr std::uint64_t kTagPoisson = fnv1a("ct/poissonized");
constexpr std::uint64_t kTagFpp = fnv1a("ct/fpp");
constexpr std::uint64_t kTagClock = fnv1a("ct/clock");
constexpr std::uint64_t kTagFppY = fnv1a("fpp-y");
constexpr std::uint64_t kTagCouple = fnv1a("couple-check");
constexpr std::uint64_t kTagRecY = fnv1a("recursion/y");
constexpr std::uint64_t kTagRecXi = fnv1a("recursion/xi");
constexpr std::uint64_t kTagAsym = fnv1a("asym");
constexpr std::uint64_t kTagBary = fnv1a("bary");
constexpr std::uint64_t kTagRetry = fnv1a("retry");

// Artifact-chosen corridor for sqrt(K) |median log2 xi_K - log2 m_K|; the
// asymptotic result only says this is bounded in probability.
constexpr double kDeviationBound = 5.0;
constexpr double kRatioLow = 0.7;
constexpr double kRatioHigh = 1.5;

std::uint64_t attempt_seed(std::uint64_t seed, int attempt) {
  return attempt == 0 ? seed : mix64(seed ^ kTagRetry);
}

json test_json(const std::string& name, const TestResult& r) {
  return json{{"name", name},       {"test", r.test},   {"statistic", r.statistic},
              {"p_value", r.p_value}, {"n1", r.n1},       {"n2", r.n2},
              {"dof", r.dof},       {"alpha", r.alpha}, {"passed", r.passed()}};
}

json check_json(const std::string& name, const std::string& kind, double value, double bound, bool passed) {
  return json{{"name", name}, {"test", kind}, {"value", value}, {"bound", bound}, {"passed", passed}};
}

/// Distributional check with one retry on a fresh seed; both attempts logged.
json distributional(const std::string& name, std::uint64_t seed,
                    const std::function<TestResult(std::uint64_t)>& run) {
  auto attempt = [&](int i) {
    try {
      return test_json(name, run(attempt_seed(seed, i)));
    } catch (const ModelMismatchError& e) {
      // A sample value outside the oracle support is a failed test, not a crash.
      return json{{"name", name}, {"test", "chisq"}, {"error", e.what()}, {"passed", false}};
    }
  };
  json j = attempt(0);
  if (!j.at("passed").get<bool>()) {
    json second = attempt(1);
    j["passed"] = second.at("passed");
    j["retry"] = std::move(second);
  }
  return j;
}

json summary_json(const Summary& s) {
  json q = json::object();
  for (const auto& [p, v] : s.quantiles) {
    char key[16];
    std::snprintf(key, sizeof key, "%.2f", p);
    q[key] = v;
  }
  return json{{"n", s.n},         {"mean", s.mean}, {"median", s.median}, {"variance", s.variance},
              {"std_error", s.std_error}, {"min", s.min}, {"max", s.max}, {"quantiles", q}};
}

json empirical_pmf_json(std::span<const std::int64_t> xs) {
  const auto counts = count_values(xs);
  json pmf = json::object();
  if (counts.size() > 256) return pmf;
  for (const auto& [k, c] : counts) pmf[std::to_string(k)] = static_cast<double>(c) / static_cast<double>(xs.size());
  return pmf;
}

json exact_pmf_json(const Pmf& pmf) {
  json out = json::object();
  for (const auto& [k, p] : pmf) out[std::to_string(k)] = to_string(p);
  return out;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

bool within_xi_oracle(int k, unsigned b) {
  return k >= 1 && k - 1 <= NodePath::max_depth(b) && NodePath::count_up_to(b, k - 1) <= 15;
}

void add_sample_table(ResultRecord& rec, std::span<const std::int64_t> xs) {
  rec.columns = {"replicate", "value"};
  rec.rows.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) rec.rows.push_back({json(i), json(xs[i])});
}

void add_sample_table(ResultRecord& rec, std::span<const double> xs) {
  rec.columns = {"replicate", "value"};
  rec.rows.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) rec.rows.push_back({json(i), json(xs[i])});
}

std::vector<std::int64_t> sample_xi(int k, unsigned b, std::int64_t n, int jobs, std::uint64_t seed,
                                    std::uint64_t tag) {
  // One scratch tree per replicate block keeps memory flat for large K.
  return map_replicates<std::int64_t>(n, jobs, [&](std::int64_t r) {
    thread_local std::unique_ptr<BorderAggregation> scratch;
    if (!scratch || scratch->height() != k || scratch->branching() != b) {
      scratch = std::make_unique<BorderAggregation>(k, b);
    }
    RandomStream rng = replicate_stream(seed, tag, r);
    return run_discrete(*scratch, rng);
  });
}

// ---------------------------------------------------------------------------

void run_bam_xi(const ExperimentConfig& c, ResultRecord& rec) {
  const int k = c.heights.front();
  const auto xs = sample_xi(k, c.branching, c.replicates, c.jobs, c.seed, kTagXi);
  add_sample_table(rec, xs);
  const auto ds = to_doubles(xs);
  rec.summary = summary_json(summarize(ds));
  rec.summary["empirical_pmf"] = empirical_pmf_json(xs);
  rec.report.push_back("xi_" + std::to_string(k) + " (b=" + std::to_string(c.branching) + "): mean " +
                       fixed(rec.summary["mean"], 4) + ", median " + fixed(rec.summary["median"], 0));
  if (within_xi_oracle(k, c.branching)) {
    const Pmf exact = exact_xi_pmf(k, c.branching);
    rec.summary["exact_pmf"] = exact_pmf_json(exact);
    rec.tests.push_back(distributional("xi pmf vs exact oracle", c.seed, [&](std::uint64_t s) {
      const auto sample = s == c.seed ? xs : sample_xi(k, c.branching, c.replicates, c.jobs, s, kTagXi);
      return chisq_gof(count_values(sample), exact);
    }));
  }
  const std::string min_check = "xi_K >= K on every run";
  const bool min_ok = std::all_of(xs.begin(), xs.end(), [&](std::int64_t x) { return x >= k; });
  rec.tests.push_back(check_json(min_check, "exact", static_cast<double>(*std::min_element(xs.begin(), xs.end())), k, min_ok));
}

void run_bam_xi_ct(const ExperimentConfig& c, ResultRecord& rec) {
  const int k = c.heights.front();
  const unsigned b = c.branching;
  struct Pair {
    std::int64_t particles;
    double time;
  };
  auto sample = [&](std::uint64_t seed) {
    return map_replicates<Pair>(c.replicates, c.jobs, [&](std::int64_t r) {
      RandomStream rng = replicate_stream(seed, kTagXiCt, r);
      const auto out = run_continuous(k, b, rng);
      return Pair{out.particles, out.time};
    });
  };
  const auto pairs = sample(c.seed);
  std::vector<double> times, counts;
  for (const auto& p : pairs) {
    times.push_back(p.time);
    counts.push_back(static_cast<double>(p.particles));
  }
  add_sample_table(rec, times);
  const Summary st = summarize(times);
  const Summary sc = summarize(counts);
  rec.summary = summary_json(st);
  rec.summary["xi_mean"] = sc.mean;
  rec.summary["xi_std_error"] = sc.std_error;
  const double combined = std::sqrt(st.std_error * st.std_error + sc.std_error * sc.std_error);
  const double gap = std::fabs(st.mean - sc.mean);
  rec.tests.push_back(check_json("mean Xi_K equals mean xi_K (3 combined SE)", "corridor", gap, 3.0 * combined,
                                 gap <= 3.0 * combined));
  // Xi_K has the law of the minimal passage time to depth K-1.
  if (NodePath::count_up_to(b, k - 1) <= (1u << 16)) {
    rec.tests.push_back(distributional("Xi_K vs minimal passage time to depth K-1", c.seed, [&](std::uint64_t s) {
      std::vector<double> xi_times;
      if (s == c.seed) {
        xi_times = times;
      } else {
        for (const auto& p : sample(s)) xi_times.push_back(p.time);
      }
      const auto ys = map_replicates<double>(c.replicates, c.jobs, [&](std::int64_t r) {
        return min_path_times(sample_weights(k - 1, b, replicate_stream(s, kTagFppY, r))).min_by_depth.back();
      });
      return ks_two_sample(xi_times, ys);
    }));
  }
  rec.report.push_back("Xi_" + std::to_string(k) + ": mean " + fixed(st.mean, 4) + " vs xi mean " + fixed(sc.mean, 4));
}

void run_dst_height_hit(const ExperimentConfig& c, ResultRecord& rec) {
  const int k = c.heights.front();
  auto sample = [&](std::uint64_t seed) {
    return map_replicates<std::int64_t>(c.replicates, c.jobs, [&](std::int64_t r) {
      RandomStream rng = replicate_stream(seed, kTagDstHit, r);
      return height_hitting_time(k, c.branching, rng);
    });
  };
  const auto xs = sample(c.seed);
  add_sample_table(rec, xs);
  rec.summary = summary_json(summarize(to_doubles(xs)));
  rec.summary["empirical_pmf"] = empirical_pmf_json(xs);
  if (within_xi_oracle(k, c.branching)) {
    const Pmf exact = exact_xi_pmf(k, c.branching);
    rec.summary["exact_xi_pmf"] = exact_pmf_json(exact);
    rec.tests.push_back(distributional("hitting time vs exact xi_K pmf", c.seed, [&](std::uint64_t s) {
      return chisq_gof(count_values(s == c.seed ? xs : sample(s)), exact);
    }));
  }
  rec.report.push_back("height hitting time K=" + std::to_string(k) + ": mean " + fixed(rec.summary["mean"], 4));
}

void run_dst_grow(const ExperimentConfig& c, ResultRecord& rec) {
  const auto n = c.size;
  auto sample = [&](std::uint64_t seed) {
    return map_replicates<std::int64_t>(c.replicates, c.jobs, [&](std::int64_t r) {
      DstProcess proc(c.branching, replicate_stream(seed, kTagDstGrow, r));
      for (std::int64_t i = 0; i < n; ++i) proc.grow_one();
      return static_cast<std::int64_t>(proc.tree().external_height());
    });
  };
  const auto hs = sample(c.seed);
  add_sample_table(rec, hs);
  rec.summary = summary_json(summarize(to_doubles(hs)));
  rec.summary["empirical_pmf"] = empirical_pmf_json(hs);
  if (n <= 6) {
    // Height of D_n is at most n, so the exact tails for K <= 6 give the full pmf.
    Pmf exact;
    for (int k = 0; k <= n; ++k) {
      const Rational ge = exact_height_cdf(k, static_cast<int>(n), c.branching).back();
      const Rational gt = k + 1 <= 6 ? exact_height_cdf(k + 1, static_cast<int>(n), c.branching).back() : Rational(0);
      if (ge - gt > 0) exact[k] = ge - gt;
    }
    rec.summary["exact_pmf"] = exact_pmf_json(exact);
    rec.tests.push_back(distributional("height of D_n vs exact pmf", c.seed, [&](std::uint64_t s) {
      return chisq_gof(count_values(s == c.seed ? hs : sample(s)), exact);
    }));
  }
  rec.report.push_back("h_e(D_" + std::to_string(n) + "): mean " + fixed(rec.summary["mean"], 4));
}

int fpp_cap(unsigned b) { return std::min(40, NodePath::max_depth(b) - 1); }

struct CtHeights {
  std::vector<double> poissonized, fpp, clock;
};

CtHeights sample_ct(const ExperimentConfig& c, std::uint64_t seed) {
  const double t = c.time;
  const unsigned b = c.branching;
  CtHeights out;
  out.poissonized = map_replicates<double>(c.replicates, c.jobs, [&](std::int64_t r) {
    RandomStream rng = replicate_stream(seed, kTagPoisson, r);
    return static_cast<double>(sample_poissonized(t, b, rng).external_height());
  });
  out.fpp = map_replicates<double>(c.replicates, c.jobs, [&](std::int64_t r) {
    const auto field = EdgeWeightField::sample(fpp_cap(b), b, replicate_stream(seed, kTagFpp, r),
                                               EdgeWeightField::Storage::lazy);
    return static_cast<double>(fpp_tree_at(t, field).external_height());
  });
  out.clock = map_replicates<double>(c.replicates, c.jobs, [&](std::int64_t r) {
    RandomStream rng = replicate_stream(seed, kTagClock, r);
    return static_cast<double>(clock_tree_at(t, b, rng).external_height());
  });
  return out;
}

void run_ct_compare(const ExperimentConfig& c, ResultRecord& rec) {
  std::map<std::uint64_t, CtHeights> cache;
  auto get = [&](std::uint64_t seed) -> const CtHeights& {
    auto it = cache.find(seed);
    if (it == cache.end()) it = cache.emplace(seed, sample_ct(c, seed)).first;
    return it->second;
  };
  const CtHeights& h = get(c.seed);
  rec.columns = {"replicate", "poissonized", "fpp", "clock"};
  for (std::size_t i = 0; i < h.fpp.size(); ++i) {
    rec.rows.push_back({json(i), json(static_cast<std::int64_t>(h.poissonized[i])),
                        json(static_cast<std::int64_t>(h.fpp[i])), json(static_cast<std::int64_t>(h.clock[i]))});
  }
  rec.summary["poissonized"] = summary_json(summarize(h.poissonized));
  rec.summary["fpp"] = summary_json(summarize(h.fpp));
  rec.summary["clock"] = summary_json(summarize(h.clock));
  using Member = std::vector<double> CtHeights::*;
  const std::vector<std::tuple<std::string, Member, Member>> pairs = {
      {"poissonized vs fpp", &CtHeights::poissonized, &CtHeights::fpp},
      {"poissonized vs clock", &CtHeights::poissonized, &CtHeights::clock},
      {"fpp vs clock", &CtHeights::fpp, &CtHeights::clock}};
  for (const auto& [name, a, b] : pairs) {
    rec.tests.push_back(distributional("height at t: " + name, c.seed, [&, a = a, b = b](std::uint64_t s) {
      const CtHeights& hs = get(s);
      return ks_two_sample(hs.*a, hs.*b);
    }));
  }
  rec.report.push_back("mean height at t=" + fixed(c.time, 3) + ": poissonized " +
                       fixed(rec.summary["poissonized"]["mean"], 4) + ", fpp " + fixed(rec.summary["fpp"]["mean"], 4) +
                       ", clock " + fixed(rec.summary["clock"]["mean"], 4));
}

void run_fpp_y(const ExperimentConfig& c, ResultRecord& rec) {
  const int k = c.heights.front();
  const auto ys = map_replicates<double>(c.replicates, c.jobs, [&](std::int64_t r) {
    return min_path_times(sample_weights(k, c.branching, replicate_stream(c.seed, kTagFppY, r))).min_by_depth.back();
  });
  add_sample_table(rec, ys);
  rec.summary = summary_json(summarize(ys));
  rec.report.push_back("minimal passage time to depth " + std::to_string(k) + ": mean " + fixed(rec.summary["mean"], 4));
}

void run_couple_check(const ExperimentConfig& c, ResultRecord& rec) {
  const int k = c.heights.front();
  const auto outcomes = map_replicates<CoupledOutcome>(c.replicates, c.jobs, [&](std::int64_t r) {
    return run_coupled(k, sample_weights(k, c.branching, replicate_stream(c.seed, kTagCouple, r)));
  });
  rec.columns = {"replicate", "aggregation_time", "passage_time", "equal"};
  std::int64_t equal = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const bool same = outcomes[i].aggregation_time == outcomes[i].passage_time;
    equal += same;
    rec.rows.push_back({json(i), json(outcomes[i].aggregation_time), json(outcomes[i].passage_time), json(same)});
  }
  const auto n = static_cast<std::int64_t>(outcomes.size());
  rec.summary = {{"equalities", equal}, {"runs", n}, {"depth", k}};
  rec.tests.push_back(check_json("coupled Xi_{K+1} == minimal passage time (bitwise)", "exact",
                                 static_cast<double>(equal), static_cast<double>(n), equal == n));
  rec.report.push_back(std::to_string(equal) + "/" + std::to_string(n) + " exact equalities");
}

void run_recursion_check(const ExperimentConfig& c, ResultRecord& rec) {
  const unsigned b = c.branching;
  rec.columns = {"K", "y_ks_statistic", "y_ks_p_value", "xi_ks_statistic", "xi_ks_p_value"};
  for (int k : c.heights) {
    json ty = distributional("recursion vs direct minimal passage time, depth " + std::to_string(k), c.seed,
                             [&](std::uint64_t s) {
                               const auto rec_y = map_replicates<double>(c.replicates, c.jobs, [&](std::int64_t r) {
                                 RandomStream rng = replicate_stream(s, kTagRecY ^ static_cast<std::uint64_t>(k), r);
                                 return recursion_sample(k, b, rng);
                               });
                               const auto direct = map_replicates<double>(c.replicates, c.jobs, [&](std::int64_t r) {
                                 const auto f = sample_weights(k, b, replicate_stream(s, kTagFppY ^ static_cast<std::uint64_t>(k), r));
                                 return min_path_times(f).min_by_depth.back();
                               });
                               return ks_two_sample(rec_y, direct);
                             });
    json tx = nullptr;
    if (k >= 1) {
      tx = distributional("recursion vs direct Xi, height " + std::to_string(k), c.seed, [&](std::uint64_t s) {
        const auto rec_x = map_replicates<double>(c.replicates, c.jobs, [&](std::int64_t r) {
          RandomStream rng = replicate_stream(s, kTagRecXi ^ static_cast<std::uint64_t>(k), r);
          return recursion_sample_xi(k, b, rng);
        });
        const auto direct = map_replicates<double>(c.replicates, c.jobs, [&](std::int64_t r) {
          RandomStream rng = replicate_stream(s, kTagXiCt ^ static_cast<std::uint64_t>(k), r);
          return run_continuous(k, b, rng).time;
        });
        return ks_two_sample(rec_x, direct);
      });
    }
    std::string line = "K=" + std::to_string(k) + ": passage-time KS p=" + fixed(ty["p_value"], 4);
    if (k >= 1) {
      rec.rows.push_back({json(k), ty["statistic"], ty["p_value"], tx["statistic"], tx["p_value"]});
      line += ", Xi KS p=" + fixed(tx["p_value"], 4);
    } else {
      rec.rows.push_back({json(k), ty["statistic"], ty["p_value"], json(nullptr), json(nullptr)});
    }
    rec.report.push_back(line);
    rec.tests.push_back(std::move(ty));
    if (k >= 1) rec.tests.push_back(std::move(tx));
  }
}

void run_oracle_tc(const ExperimentConfig& c, ResultRecord& rec) {
  const int k = c.heights.front();
  const TcCheck check = check_tc_exact(k, c.branching);
  rec.columns = {"n", "xi_cdf", "height_tail", "equal"};
  for (const auto& row : check.rows) {
    rec.rows.push_back({json(row.n), json(to_string(row.xi_cdf)), json(to_string(row.height_tail)),
                        json(row.xi_cdf == row.height_tail)});
  }
  rec.summary = {{"verdict", check.equal ? "EQUAL" : "DIFFER"}, {"K", k}, {"b", c.branching}};
  rec.tests.push_back(check_json("P(xi_K <= n) == P(h_e(D_n) >= K), exact", "exact", check.equal ? 1.0 : 0.0, 1.0,
                                 check.equal));
  std::istringstream lines(check.report());
  for (std::string line; std::getline(lines, line);) rec.report.push_back(line);
}

void run_oracle_xi(const ExperimentConfig& c, ResultRecord& rec) {
  const int k = c.heights.front();
  const Pmf pmf = exact_xi_pmf(k, c.branching);
  rec.columns = {"value", "probability", "probability_float"};
  for (const auto& [x, p] : pmf) rec.rows.push_back({json(x), json(to_string(p)), json(p.get_d())});
  const bool sums = total_mass(pmf) == 1;
  rec.summary = {{"K", k}, {"b", c.branching}, {"support_min", pmf.begin()->first}, {"support_max", pmf.rbegin()->first}};
  rec.tests.push_back(check_json("pmf sums to exactly 1", "exact", sums ? 1.0 : 0.0, 1.0, sums));
  const bool min_ok = pmf.begin()->first == k;
  rec.tests.push_back(check_json("support minimum equals K", "exact", static_cast<double>(pmf.begin()->first), k, min_ok));
  for (const auto& [x, p] : pmf) rec.report.push_back("P(xi_" + std::to_string(k) + " = " + std::to_string(x) + ") = " + to_string(p));
}

std::vector<std::int64_t> sample_xi_for_asym(const ExperimentConfig& c, int k) {
  return sample_xi(k, 2, c.replicates, c.jobs, c.seed, kTagAsym ^ static_cast<std::uint64_t>(k));
}

void run_asym_txi(const ExperimentConfig& c, ResultRecord& rec) {
  rec.columns = {"K", "n", "median_xi", "log2_median_xi", "log2_mk", "deviation", "bracket_log2_low",
                 "bracket_log2_high", "in_bracket"};
  for (int k : c.heights) {
    const auto xs = to_doubles(sample_xi_for_asym(c, k));
    const Summary s = summarize(xs);
    const auto pred = mk_value(k);
    const double dev = deviation_statistic(xs, k);
    // whp bracket 2^{K - 2 sqrt K} <= xi_K <= 2^{K - 1}, lower-order terms dropped; reported only
    const double lo = k - 2.0 * std::sqrt(static_cast<double>(k));
    const double hi = k - 1.0;
    const double lm = std::log2(s.median);
    const bool in_bracket = lm >= lo && lm <= hi;
    rec.rows.push_back({json(k), json(s.n), json(s.median), json(lm), json(static_cast<double>(pred.log2_mk)), json(dev),
                        json(lo), json(hi), json(in_bracket)});
    rec.tests.push_back(check_json("sqrt(K)|median log2 xi - log2 m_K| <= 5, K=" + std::to_string(k), "corridor", dev,
                                   kDeviationBound, dev <= kDeviationBound));
    rec.report.push_back("K=" + std::to_string(k) + ": log2 median xi " + fixed(lm, 4) + ", log2 m_K " +
                         fixed(static_cast<double>(pred.log2_mk), 4) + ", deviation " + fixed(dev, 3));
  }
}

void run_asym_te(const ExperimentConfig& c, ResultRecord& rec) {
  rec.columns = {"K", "n", "mean_xi", "std_error", "mk", "ratio", "ratio_std_error"};
  double prev_gap = -1.0, prev_se = 0.0;
  int prev_k = 0;
  for (int k : c.heights) {
    const Summary s = summarize(to_doubles(sample_xi_for_asym(c, k)));
    const double mk = static_cast<double>(mk_value(k).mk);
    const double ratio = s.mean / mk;
    const double ratio_se = s.std_error / mk;
    rec.rows.push_back({json(k), json(s.n), json(s.mean), json(s.std_error), json(mk), json(ratio), json(ratio_se)});
    rec.tests.push_back(check_json("mean xi / m_K in [0.7, 1.5], K=" + std::to_string(k), "corridor", ratio,
                                   ratio < kRatioLow ? kRatioLow : kRatioHigh, ratio >= kRatioLow && ratio <= kRatioHigh));
    const double gap = std::fabs(ratio - 1.0);
    if (prev_gap >= 0.0) {
      const double tol = std::sqrt(prev_se * prev_se + ratio_se * ratio_se);
      rec.tests.push_back(check_json("|ratio - 1| non-increasing, K=" + std::to_string(prev_k) + " -> " +
                                         std::to_string(k),
                                     "corridor", gap, prev_gap + tol, gap <= prev_gap + tol));
    }
    prev_gap = gap;
    prev_se = ratio_se;
    prev_k = k;
    rec.report.push_back("K=" + std::to_string(k) + ": mean xi / m_K = " + fixed(ratio, 4) + " +- " + fixed(ratio_se, 4));
  }
}

void run_bary(const ExperimentConfig& c, ResultRecord& rec) {
  const unsigned b = c.branching;
  rec.columns = {"K", "b", "c_b", "conjecture_log_b", "median_log_b_xi", "mean_xi"};
  for (int k : c.heights) {
    const double conj = bary_conjecture_log(k, b, c.c_b);
    json med = nullptr, mean = nullptr;
    if (c.replicates > 0) {
      const auto xs = to_doubles(sample_xi(k, b, c.replicates, c.jobs, c.seed, kTagBary ^ static_cast<std::uint64_t>(k)));
      const Summary s = summarize(xs);
      med = std::log(s.median) / std::log(static_cast<double>(b));
      mean = s.mean;
    }
    rec.rows.push_back({json(k), json(b), json(c.c_b), json(conj), med, mean});
    std::string line = "K=" + std::to_string(k) + " b=" + std::to_string(b) + ": conjectured log_b xi " + fixed(conj, 4);
    if (!med.is_null()) line += ", simulated log_b median " + fixed(med.get<double>(), 4);
    rec.report.push_back(line);
  }
  rec.summary = {{"note", "conjectured centering, reported without assertion"}};
}

using Runner = void (*)(const ExperimentConfig&, ResultRecord&);

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table = {
      {"dst-grow", run_dst_grow},         {"dst-height-hit", run_dst_height_hit},
      {"ct-compare", run_ct_compare},     {"fpp-y", run_fpp_y},
      {"bam-xi", run_bam_xi},             {"bam-xi-ct", run_bam_xi_ct},
      {"couple-check", run_couple_check}, {"recursion-check", run_recursion_check},
      {"oracle-tc", run_oracle_tc},       {"oracle-xi", run_oracle_xi},
      {"asym-txi", run_asym_txi},         {"asym-te", run_asym_te},
      {"bary", run_bary}};
  return table;
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string cell_text(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return v.dump();
  if (v.is_number_float()) return format_double(v.get<double>());
  return v.dump();
}

}  // namespace

const std::vector<std::string>& experiment_commands() {
  static const std::vector<std::string> names = {
      "dst-grow",  "dst-height-hit", "ct-compare", "fpp-y",    "bam-xi",   "bam-xi-ct", "couple-check",
      "recursion-check", "oracle-tc", "oracle-xi", "asym-txi", "asym-te", "bary"};
  return names;
}

std::vector<int> parse_height_list(const std::string& text) {
  std::vector<long> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = text.find(':', start);
    const std::string piece = text.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
    std::size_t used = 0;
    long value = 0;
    try {
      value = std::stol(piece, &used);
    } catch (const std::exception&) {
      throw ConfigError("invalid K specification '" + text + "'");
    }
    if (used != piece.size()) throw ConfigError("invalid K specification '" + text + "'");
    parts.push_back(value);
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (parts.size() > 3) throw ConfigError("K range is first:last[:step]");
  const long first = parts[0];
  const long last = parts.size() > 1 ? parts[1] : first;
  const long step = parts.size() > 2 ? parts[2] : 1;
  if (step <= 0 || last < first || last - first > 1000) throw ConfigError("invalid K range '" + text + "'");
  std::vector<int> out;
  for (long k = first; k <= last; k += step) out.push_back(static_cast<int>(k));
  return out;
}

void validate(const ExperimentConfig& c) {
  if (!runners().contains(c.command)) throw ConfigError("unknown command '" + c.command + "'");
  const unsigned b = c.branching;
  if (b < 2 || b > 16) throw ConfigError("--b must be in [2, 16]");
  if (c.jobs < 1 || c.jobs > 256) throw ConfigError("--jobs must be in [1, 256]");
  const bool bary_report_only = c.command == "bary" && c.replicates == 0;
  if (!bary_report_only && (c.replicates < 1 || c.replicates > 100'000'000)) {
    throw ConfigError("--n must be in [1, 1e8]");
  }

  const std::string& cmd = c.command;
  const bool needs_k = cmd != "dst-grow" && cmd != "ct-compare";
  if (needs_k && c.heights.empty()) throw ConfigError(cmd + " requires --K");
  const bool allows_zero = cmd == "fpp-y" || cmd == "couple-check" || cmd == "recursion-check";
  for (int k : c.heights) {
    if (k < (allows_zero ? 0 : 1)) throw ConfigError("--K out of range for " + cmd);
  }
  const bool single_k = cmd != "recursion-check" && cmd != "asym-txi" && cmd != "asym-te" && cmd != "bary";
  if (needs_k && single_k && c.heights.size() != 1) throw ConfigError(cmd + " takes a single --K");
  if ((cmd == "asym-txi" || cmd == "asym-te") && b != 2) throw ConfigError(cmd + " is defined for b = 2");

  auto nodes_up_to = [&](int depth) -> std::uint64_t {
    if (depth > NodePath::max_depth(b)) return ~std::uint64_t{0};
    return NodePath::count_up_to(b, depth);
  };
  for (int k : c.heights) {
    if ((cmd == "bam-xi" || cmd == "bam-xi-ct" || cmd.starts_with("asym") || cmd == "bary") &&
        nodes_up_to(k - 1) > (std::uint64_t{1} << 27)) {
      throw CapacityError("T_K exceeds the aggregation node budget");
    }
    if ((cmd == "fpp-y" || cmd == "couple-check") && nodes_up_to(k) > EdgeWeightField::kEagerLimit) {
      throw CapacityError("weight field exceeds the eager budget");
    }
    if (cmd == "recursion-check" && nodes_up_to(k) > (std::uint64_t{1} << 20)) {
      throw CapacityError("recursion samplers are limited to about 2^20 draws per sample");
    }
    if (cmd == "dst-height-hit" && k > 30) throw CapacityError("dst-height-hit supports K <= 30");
    if ((cmd == "oracle-tc" || cmd == "oracle-xi") && !within_xi_oracle(k, b)) {
      throw CapacityError("exact aggregation oracle budget is at most 15 internal nodes");
    }
  }
  if (cmd == "ct-compare" && (!(c.time >= 0.0) || c.time > 1e4)) throw ConfigError("--t must be in [0, 1e4]");
  if (cmd == "dst-grow" && (c.size < 0 || c.size > 10'000'000)) throw ConfigError("--size must be in [0, 1e7]");
}

json config_to_json(const ExperimentConfig& c) {
  json j = {{"command", c.command},
            {"K", c.heights},
            {"b", c.branching},
            {"n", c.replicates},
            {"t", c.time},
            {"size", c.size},
            {"cb", c.c_b},
            {"seed", c.seed},
            {"format", c.format == OutputFormat::csv ? "csv" : "json"},
            {"assert", c.assert_tests}};
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.command = j.at("command").get<std::string>();
  c.heights = j.at("K").get<std::vector<int>>();
  c.branching = j.at("b").get<unsigned>();
  c.replicates = j.at("n").get<std::int64_t>();
  c.time = j.at("t").get<double>();
  c.size = j.at("size").get<std::int64_t>();
  c.c_b = j.at("cb").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.format = j.at("format").get<std::string>() == "json" ? OutputFormat::json : OutputFormat::csv;
  c.assert_tests = j.at("assert").get<bool>();
  return c;
}

bool ResultRecord::all_passed() const {
  return std::all_of(tests.begin(), tests.end(), [](const json& t) { return t.at("passed").get<bool>(); });
}

ResultRecord run_experiment(const ExperimentConfig& config) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  ResultRecord rec;
  rec.experiment = config.command;
  rec.config = config_to_json(config);
  runners().at(config.command)(config, rec);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rec.wallclock = utc_now() + " elapsed_s=" + fixed(elapsed, 3);
  return rec;
}

json to_json(const ResultRecord& rec, bool include_table) {
  json j = {{"experiment", rec.experiment},
            {"code_version", DSTBAM_VERSION},
            {"config", rec.config},
            {"wallclock", rec.wallclock},
            {"summary", rec.summary},
            {"tests", rec.tests},
            {"all_passed", rec.all_passed()},
            {"report", rec.report}};
  if (include_table) j["table"] = {{"columns", rec.columns}, {"rows", rec.rows}};
  return j;
}

ResultRecord record_from_json(const json& j) {
  ResultRecord rec;
  rec.experiment = j.at("experiment").get<std::string>();
  rec.config = j.at("config");
  rec.wallclock = j.at("wallclock").get<std::string>();
  rec.summary = j.at("summary");
  rec.tests = j.at("tests");
  rec.report = j.at("report").get<std::vector<std::string>>();
  if (j.contains("table")) {
    rec.columns = j.at("table").at("columns").get<std::vector<std::string>>();
    for (const auto& row : j.at("table").at("rows")) rec.rows.push_back(row.get<std::vector<json>>());
  }
  return rec;
}

std::string render_json(const ResultRecord& rec, bool include_table) {
  // Rows stay on one line each so the timestamp is the only varying line.
  json j = to_json(rec, false);
  std::string text = j.dump(2);
  if (!include_table) return text + "\n";
  std::ostringstream table;
  table << ",\n  \"table\": {\n    \"columns\": " << json(rec.columns).dump() << ",\n    \"rows\": [";
  for (std::size_t i = 0; i < rec.rows.size(); ++i) {
    table << (i == 0 ? "\n      " : ",\n      ") << json(rec.rows[i]).dump();
  }
  table << (rec.rows.empty() ? "]\n  }" : "\n    ]\n  }");
  const auto close = text.rfind('}');
  return text.substr(0, close - 1) + table.str() + "\n}\n";
}

std::string render_csv(const ResultRecord& rec) {
  std::ostringstream os;
  for (std::size_t i = 0; i < rec.columns.size(); ++i) os << (i ? "," : "") << rec.columns[i];
  os << '\n';
  for (const auto& row : rec.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
    os << '\n';
  }
  return os.str();
}

void write_outputs(const ResultRecord& rec, const ExperimentConfig& config) {
  if (!config.out) return;
  auto write = [](const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file '" + path + "'");
    f << text;
  };
  if (config.format == OutputFormat::csv) {
    write(*config.out, render_csv(rec));
    write(*config.out + ".summary.json", render_json(rec, false));
  } else {
    write(*config.out, render_json(rec, true));
  }
}

}  // namespace dstbam
