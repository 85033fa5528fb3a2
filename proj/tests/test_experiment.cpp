#include <doctest.h>

#include "dstbam/errors.hpp"
#include "dstbam/experiment.hpp"

using namespace dstbam;

namespace {

ExperimentConfig make(const std::string& cmd, std::vector<int> k, std::int64_t n = 200) {
  ExperimentConfig c;
  c.command = cmd;
  c.heights = std::move(k);
  c.replicates = n;
  c.seed = 99;
  return c;
}

}  // namespace

TEST_CASE("height lists") {
  CHECK(parse_height_list("12") == std::vector<int>{12});
  CHECK(parse_height_list("12:16") == std::vector<int>{12, 13, 14, 15, 16});
  CHECK(parse_height_list("12:20:4") == std::vector<int>{12, 16, 20});
  CHECK_THROWS_AS(parse_height_list("x"), ConfigError);
  CHECK_THROWS_AS(parse_height_list("5:3"), ConfigError);
  CHECK_THROWS_AS(parse_height_list("1:2:0"), ConfigError);
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(validate(make("nope", {3})), ConfigError);
  CHECK_THROWS_AS(validate(make("bam-xi", {})), ConfigError);
  CHECK_THROWS_AS(validate(make("bam-xi", {0})), ConfigError);
  CHECK_THROWS_AS(validate(make("bam-xi", {3}, 0)), ConfigError);
  CHECK_THROWS_AS(validate(make("bam-xi", {3, 4})), ConfigError);
  CHECK_THROWS_AS(validate(make("bam-xi", {40})), CapacityError);
  CHECK_THROWS_AS(validate(make("oracle-xi", {5})), CapacityError);
  CHECK_THROWS_AS(validate(make("couple-check", {30})), CapacityError);
  auto bad_b = make("bam-xi", {3});
  bad_b.branching = 1;
  CHECK_THROWS_AS(validate(bad_b), ConfigError);
  auto bad_t = make("ct-compare", {});
  bad_t.time = -1.0;
  CHECK_THROWS_AS(validate(bad_t), ConfigError);
  CHECK_NOTHROW(validate(make("fpp-y", {0})));
}

TEST_CASE("sample vectors use replicate,value columns") {
  const auto rec = run_experiment(make("bam-xi", {3}));
  const auto csv = render_csv(rec);
  CHECK(csv.rfind("replicate,value\n0,", 0) == 0);
  CHECK(rec.rows.size() == 200);
  CHECK(rec.all_passed());
  CHECK(rec.summary.contains("empirical_pmf"));
}

TEST_CASE("json round trip") {
  const auto rec = run_experiment(make("couple-check", {4}, 50));
  const auto back = record_from_json(nlohmann::json::parse(render_json(rec)));
  CHECK(to_json(back) == to_json(rec));
  CHECK(rec.report.back() == "50/50 exact equalities");

  const auto cfg = make("asym-te", {14, 16});
  CHECK(config_to_json(config_from_json(config_to_json(cfg))) == config_to_json(cfg));
}

TEST_CASE("config echo reproduces the run") {
  const auto rec = run_experiment(make("fpp-y", {3}, 100));
  const auto again = run_experiment(config_from_json(rec.config));
  CHECK(render_csv(again) == render_csv(rec));
}

TEST_CASE("timestamp is a single line") {
  const auto text = render_json(run_experiment(make("oracle-xi", {3})));
  std::size_t count = 0;
  for (std::size_t pos = 0; (pos = text.find("wallclock", pos)) != std::string::npos; ++pos) ++count;
  CHECK(count == 1);
}

TEST_CASE("worker count does not change results") {
  for (const char* cmd : {"bam-xi", "bam-xi-ct", "dst-height-hit", "fpp-y", "couple-check"}) {
    auto one = make(cmd, {4}, 300);
    auto many = one;
    many.jobs = 8;
    CHECK_MESSAGE(render_csv(run_experiment(one)) == render_csv(run_experiment(many)), cmd);
  }
  auto ct = make("ct-compare", {}, 300);
  ct.time = 3.0;
  auto ct8 = ct;
  ct8.jobs = 8;
  CHECK(render_csv(run_experiment(ct)) == render_csv(run_experiment(ct8)));
}

TEST_CASE("report-only b-ary output") {
  auto c = make("bary", {8}, 0);
  c.branching = 3;
  const auto rec = run_experiment(c);
  CHECK(rec.tests.empty());
  CHECK(rec.rows.at(0).at(3).get<double>() == doctest::Approx(5.8928).epsilon(1e-4));
}
