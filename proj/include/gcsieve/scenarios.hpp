#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gcsieve/model_io.hpp"

namespace gcsieve {

/// One pass/fail comparison. `relation` is one of "<=", ">=", "<", ">", "==".
struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;
  double threshold = 0.0;
  bool passed = false;
};

struct Verdict {
  std::string scenario;
  std::string config_hash;
  std::vector<Check> checks;
  /// Measured quantities reported without a threshold.
  nlohmann::json info = nlohmann::json::object();

  [[nodiscard]] bool passed() const;
};

struct ScenarioResult {
  Verdict verdict;
  /// File name -> CSV contents.
  std::map<std::string, std::string> tables;
};

/// theorem1, theorem2, squeezing, theorem3, qome, dfs_ns
[[nodiscard]] const std::vector<std::string>& scenario_ids();

/// Runs a scenario. Every threshold is taken from config["thresholds"]; a
/// missing entry is a ConfigError. `threads` parallelizes multistart searches
/// without changing results.
[[nodiscard]] ScenarioResult run_scenario(const std::string& id, const nlohmann::json& config, int threads = 1);

[[nodiscard]] nlohmann::json to_json(const Verdict& v);

/// Writes verdict.json and the tables into `dir` (atomically, file by file).
void write_outputs(const ScenarioResult& r, const std::filesystem::path& dir);

/// Command-line entry point. Exit codes: 0 verdict PASS (or plain success),
/// 2 verdict FAIL, 1 usage or configuration error.
int run_cli(int argc, const char* const* argv);

}  // namespace gcsieve
