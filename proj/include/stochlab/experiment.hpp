#pragma once
// Experiment configuration, dispatch to the modules, and result files.
//
// An experiment is a module name, a parameter object and a master seed. The
// worker count is deliberately not part of the configuration: results never
// depend on it.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stochlab/exact.hpp"

namespace stochlab {

inline constexpr const char* kFormatTag = "stochlab/1";

/// Module names accepted by run_experiment.
const std::vector<std::string>& experiment_modules();

struct ExperimentConfig {
  std::string module;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = kDefaultSeed;
  std::string output;  // empty: no files written
  std::string format = kFormatTag;

  /// Rejects unknown or mistyped fields with a message naming the field.
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Reads a JSON config file, or the configuration embedded in a CSV result.
ExperimentConfig load_config(const std::filesystem::path& path);

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct Provenance {
  std::uint64_t seed = 0;
  std::string version;
  std::string timestamp;  // UTC, ISO 8601
  double runtime_seconds = 0.0;
};

struct ResultRecord {
  ExperimentConfig config;
  ResultTable table;
  nlohmann::json summary = nlohmann::json::object();
  Provenance provenance;
  bool violation = false;  // a conjecture check failed
  std::string witness;     // witness text for violations
};

/// Validates the parameters and runs the module. Throws InvalidParameter on
/// configuration errors.
ResultRecord run_experiment(const ExperimentConfig& config, unsigned workers = 0);

/// CSV with '#'-prefixed header lines holding the config and provenance.
void write_csv(const ResultRecord& record, std::ostream& out);
/// Only the column header and data rows of write_csv.
std::string data_columns(const ResultRecord& record);
nlohmann::json to_json(const ResultRecord& record);

/// Writes through a temporary file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Writes <output> (CSV), <output>.json and, on a violation,
/// <output>.witness.txt. Returns the paths written.
std::vector<std::filesystem::path> write_outputs(const ResultRecord& record);

std::vector<SimpleGraph> ingest_graphs(const std::filesystem::path& path);

const char* library_version() noexcept;

}  // namespace stochlab
