#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace dstbam {

inline constexpr const char* kSeedEnvVar = "DSTBAM_SEED";

enum class OutputFormat { csv, json };

struct ExperimentConfig {
  std::string command;
  std::vector<int> heights;        // --K: one value or a range
  unsigned branching = 2;          // --b
  std::int64_t replicates = 10000; // --n
  double time = 0.0;               // --t
  std::int64_t size = 0;           // --size (dst-grow)
  double c_b = 1.0;                // --cb (bary)
  std::uint64_t seed = 1;
  int jobs = 1;
  std::optional<std::string> out;
  OutputFormat format = OutputFormat::csv;
  bool assert_tests = false;
};

/// Commands understood by run_experiment, in help order.
const std::vector<std::string>& experiment_commands();

/// Parses "12", "12:20" or "12:20:2" (inclusive) into a list of heights.
std::vector<int> parse_height_list(const std::string& text);

/// Throws ConfigError for invalid parameters and CapacityError for
/// parameters outside a module budget.
void validate(const ExperimentConfig& config);

nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Outcome of one experiment: a table (sample vector or per-K rows), an
/// aggregate summary, named checks, and human-readable report lines.
struct ResultRecord {
  std::string experiment;
  nlohmann::json config;
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;
  nlohmann::json summary = nlohmann::json::object();
  nlohmann::json tests = nlohmann::json::array();
  std::vector<std::string> report;
  std::string wallclock;  // timestamp and elapsed time, the only non-reproducible field

  bool all_passed() const;
};

ResultRecord run_experiment(const ExperimentConfig& config);

std::string render_csv(const ResultRecord& record);
/// Pretty JSON with every field on its own line, table included when asked.
std::string render_json(const ResultRecord& record, bool include_table = true);
nlohmann::json to_json(const ResultRecord& record, bool include_table = true);
ResultRecord record_from_json(const nlohmann::json& j);

/// Writes --out in the configured format. CSV output also writes the JSON
/// summary (without the table) to "<out>.summary.json".
void write_outputs(const ResultRecord& record, const ExperimentConfig& config);

}  // namespace dstbam
