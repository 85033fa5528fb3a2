// Acceptance suite: one PASS/FAIL line per criterion, exit status = number of FAILs.
#include <algorithm>
#include <chrono>
#include <numeric>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include "dstbam/bam.hpp"
#include "dstbam/ctdst.hpp"
#include "dstbam/experiment.hpp"
#include "dstbam/oracle.hpp"
#include "dstbam/parallel.hpp"
#include "dstbam/stats.hpp"

using namespace dstbam;
using nlohmann::json;

namespace {

constexpr std::uint64_t kSeed = 20240601;

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

ExperimentConfig config(const std::string& cmd, std::vector<int> heights, std::int64_t n) {
  ExperimentConfig c;
  c.command = cmd;
  c.heights = std::move(heights);
  c.replicates = n;
  c.seed = kSeed;
  c.jobs = jobs();
  return c;
}

// Prints the logged attempts of a distributional test.
std::string describe_test(const json& t) {
  char buf[256];
  if (t.contains("p_value")) {
    std::snprintf(buf, sizeof buf, "%s=%.4g p=%.4g", t.at("test").get<std::string>().c_str(),
                  t.at("statistic").get<double>(), t.at("p_value").get<double>());
  } else if (t.contains("value")) {
    std::snprintf(buf, sizeof buf, "value=%.6g bound=%.6g", t.at("value").get<double>(), t.at("bound").get<double>());
  } else {
    std::snprintf(buf, sizeof buf, "%s", t.value("error", "").c_str());
  }
  std::string out = buf;
  if (t.contains("retry")) out += " (retry: " + describe_test(t.at("retry")) + ")";
  return out;
}

struct Criterion {
  int id;
  std::string title;
  bool passed = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& note) {
    passed = passed && ok;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + note);
  }
  void require_tests(const ResultRecord& rec) {
    for (const auto& t : rec.tests) require(t.at("passed").get<bool>(), t.at("name").get<std::string>() + ": " + describe_test(t));
  }
};

class Suite {
 public:
  template <class Fn>
  void run(int id, const std::string& title, Fn&& body) {
    Criterion c{id, title, true, {}};
    const auto start = std::chrono::steady_clock::now();
    try {
      body(c);
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& n : c.notes) std::printf("    %s\n", n.c_str());
    std::printf("CRITERION %d %s: %s (%.1fs)\n", id, c.passed ? "PASS" : "FAIL", title.c_str(), secs);
    std::fflush(stdout);
    failures_ += !c.passed;
  }
  int failures() const { return failures_; }

 private:
  int failures_ = 0;
};

}  // namespace

int main() {
  Suite suite;

  suite.run(1, "pathwise coupling Xi_{K+1} == min passage time, K=0..12, 1e4 fields each", [](Criterion& c) {
    for (int k = 0; k <= 12; ++k) {
      const auto rec = run_experiment(config("couple-check", {k}, 10000));
      c.require(rec.all_passed(), "K=" + std::to_string(k) + ": " + rec.report.back());
    }
  });

  suite.run(2, "exact duality P(xi_K <= n) == P(h_e(D_n) >= K)", [](Criterion& c) {
    for (auto [k, b] : {std::pair{1, 2u}, {2, 2u}, {3, 2u}, {4, 2u}, {2, 3u}, {3, 3u}}) {
      const auto check = check_tc_exact(k, b);
      c.require(check.equal, "K=" + std::to_string(k) + " b=" + std::to_string(b) + " rows=" +
                                 std::to_string(check.rows.size()) + (check.equal ? " EQUAL" : " DIFFER"));
    }
  });

  suite.run(3, "exact small cases xi_1 = 1, xi_2 = 2, xi_3 ~ {3: 1/2, 4: 1/2}", [](Criterion& c) {
    for (int k : {1, 2}) {
      auto cfg = config("bam-xi", {k}, 100000);
      const auto rec = run_experiment(cfg);
      const bool constant = std::all_of(rec.rows.begin(), rec.rows.end(),
                                        [&](const auto& row) { return row.at(1).template get<std::int64_t>() == k; });
      c.require(constant, "xi_" + std::to_string(k) + " constant over 1e5 runs");
    }
    const Pmf p3 = exact_xi_pmf(3, 2);
    c.require(p3 == Pmf{{3, Rational(1, 2)}, {4, Rational(1, 2)}}, "exact_xi_pmf(3,2) = {3: 1/2, 4: 1/2}");
    c.require_tests(run_experiment(config("bam-xi", {3}, 100000)));
  });

  suite.run(4, "construction equivalence at t = 2, 8, 32 and FPP height identity", [](Criterion& c) {
    for (double t : {2.0, 8.0, 32.0}) {
      auto cfg = config("ct-compare", {}, 100000);
      cfg.time = t;
      const auto rec = run_experiment(cfg);
      for (const auto& test : rec.tests) {
        c.require(test.at("passed").get<bool>(),
                  "t=" + std::to_string(static_cast<int>(t)) + " " + test.at("name").get<std::string>() + ": " +
                      describe_test(test));
      }
    }
    const auto violations = map_replicates<int>(10000, jobs(), [](std::int64_t r) {
      RandomStream rng = replicate_stream(kSeed, 0xf00d, r);
      const double t = rng.next_uniform() * 40.0;
      const auto field = EdgeWeightField::sample(40, 2, rng.derive(1), EdgeWeightField::Storage::lazy);
      const auto y = min_path_times_until(field, t);
      return fpp_tree_at(t, field).external_height() != y.height_at(t) ? 1 : 0;
    });
    const int total = std::accumulate(violations.begin(), violations.end(), 0);
    c.require(total == 0, "h_e(C(t)) == max{k : Y_k <= t} + 1 on 1e4 instances, violations=" + std::to_string(total));
  });

  suite.run(5, "distributional recursions vs direct samplers, K <= 8, N = 1e5", [](Criterion& c) {
    c.require_tests(run_experiment(config("recursion-check", parse_height_list("0:8"), 100000)));
  });

  suite.run(6, "sqrt(K)|median log2 xi_K - log2 m_K| <= 5, K = 12..20 step 2, N = 1e4", [](Criterion& c) {
    const auto rec = run_experiment(config("asym-txi", parse_height_list("12:20:2"), 10000));
    c.require_tests(rec);
    for (const auto& line : rec.report) c.notes.push_back("     " + line);
  });

  suite.run(7, "mean xi_K / m_K in [0.7, 1.5] and |ratio - 1| non-increasing, K = 14, 16, 18, N = 1e4",
            [](Criterion& c) {
              const auto rec = run_experiment(config("asym-te", parse_height_list("14:18:2"), 10000));
              c.require_tests(rec);
              for (const auto& line : rec.report) c.notes.push_back("     " + line);
            });

  suite.run(8, "E Xi_K = E xi_K within 3 combined SE, K = 5, N = 1e5", [](Criterion& c) {
    const auto rec = run_experiment(config("bam-xi-ct", {5}, 100000));
    for (const auto& t : rec.tests) {
      const std::string name = t.at("name").get<std::string>();
      if (name.starts_with("mean")) {
        c.require(t.at("passed").get<bool>(), name + ": " + describe_test(t));
      } else {
        c.notes.push_back("info " + name + ": " + describe_test(t));
      }
    }
  });

  suite.run(9, "same seed, --jobs 1 vs --jobs 8 give identical sample files", [](Criterion& c) {
    std::vector<ExperimentConfig> cases = {
        config("dst-height-hit", {6}, 2000), config("bam-xi", {8}, 2000),       config("bam-xi-ct", {6}, 2000),
        config("fpp-y", {6}, 2000),          config("couple-check", {6}, 2000), config("recursion-check", {3}, 2000),
        config("oracle-tc", {3}, 1),         config("oracle-xi", {4}, 1),       config("asym-txi", {10, 12}, 300),
        config("asym-te", {10, 12}, 300),    config("bary", {6}, 300)};
    auto grow = config("dst-grow", {}, 2000);
    grow.size = 20;
    cases.push_back(grow);
    auto ct = config("ct-compare", {}, 2000);
    ct.time = 8.0;
    cases.push_back(ct);
    for (auto one : cases) {
      one.jobs = 1;
      auto many = one;
      many.jobs = 8;
      const auto a = run_experiment(one);
      const auto b = run_experiment(many);
      auto strip = [](const ResultRecord& r) {
        auto j = to_json(r);
        j.erase("wallclock");
        return j.dump();
      };
      c.require(render_csv(a) == render_csv(b) && strip(a) == strip(b), one.command + " identical");
    }
  });

  std::printf("%d criteria failed\n", suite.failures());
  return suite.failures() == 0 ? 0 : 1;
}
