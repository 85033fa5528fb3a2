#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dstbam/errors.hpp"
#include "dstbam/experiment.hpp"

namespace {

enum Exit { kOk = 0, kOther = 1, kConfig = 2, kTestFailed = 3, kCapacity = 4 };

const char* describe(const std::string& cmd) {
  if (cmd == "dst-grow") return "height of the random DST after --size insertions";
  if (cmd == "dst-height-hit") return "insertions until the DST reaches external height K";
  if (cmd == "ct-compare") return "height at time --t from Poissonized growth, FPP and the clock process";
  if (cmd == "fpp-y") return "minimal passage time to depth K";
  if (cmd == "bam-xi") return "particles needed to make the root of T_K sticky";
  if (cmd == "bam-xi-ct") return "continuous-time aggregation time Xi_K";
  if (cmd == "couple-check") return "coupled aggregation vs minimal passage time, bitwise";
  if (cmd == "recursion-check") return "distributional recursions vs direct samplers";
  if (cmd == "oracle-tc") return "exact duality table P(xi_K <= n) vs P(h_e(D_n) >= K)";
  if (cmd == "oracle-xi") return "exact pmf of xi_K";
  if (cmd == "asym-txi") return "median log2 xi_K against log2 m_K";
  if (cmd == "asym-te") return "mean xi_K / m_K";
  if (cmd == "bary") return "b-ary conjectured centering (report only)";
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  dstbam::ExperimentConfig config;
  if (const char* env = std::getenv(dstbam::kSeedEnvVar)) {
    try {
      config.seed = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "error: " << dstbam::kSeedEnvVar << " is not an unsigned integer\n";
      return kConfig;
    }
  }

  CLI::App app{"Digital search trees, first-passage percolation and border aggregation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", DSTBAM_VERSION);

  std::string heights;
  std::string format = "csv";
  std::string out;
  for (const auto& name : dstbam::experiment_commands()) {
    CLI::App* sub = app.add_subcommand(name, describe(name));
    sub->add_option("--K", heights, "height K, or first:last[:step]");
    sub->add_option("--b", config.branching, "branching number")->capture_default_str();
    sub->add_option("--n", config.replicates, "replicates")->capture_default_str();
    sub->add_option("--t", config.time, "time for ct-compare");
    sub->add_option("--size", config.size, "insertions for dst-grow");
    sub->add_option("--cb", config.c_b, "constant c_b for bary")->capture_default_str();
    sub->add_option("--seed", config.seed, std::string("master seed (default $") + dstbam::kSeedEnvVar + " or 1)");
    sub->add_option("--jobs", config.jobs, "worker threads")->capture_default_str();
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_option("--out", out, "output path");
    sub->add_flag("--assert", config.assert_tests, "exit 3 when a check fails");
    sub->callback([&config, name] { config.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (!heights.empty()) config.heights = dstbam::parse_height_list(heights);
    config.format = format == "json" ? dstbam::OutputFormat::json : dstbam::OutputFormat::csv;
    if (!out.empty()) config.out = out;

    const dstbam::ResultRecord record = dstbam::run_experiment(config);
    if (config.out) {
      dstbam::write_outputs(record, config);
      for (const auto& line : record.report) std::cout << line << '\n';
    } else {
      std::cout << (config.format == dstbam::OutputFormat::csv ? dstbam::render_csv(record)
                                                               : dstbam::render_json(record));
      for (const auto& line : record.report) std::cerr << line << '\n';
    }
    for (const auto& t : record.tests) {
      if (!t.at("passed").get<bool>()) std::cerr << "FAILED: " << t.at("name").get<std::string>() << '\n';
    }
    if (config.assert_tests && !record.all_passed()) return kTestFailed;
    return kOk;
  } catch (const dstbam::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const dstbam::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return kCapacity;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
}
