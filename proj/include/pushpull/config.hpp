#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pushpull/errors.hpp"
#include "pushpull/problems.hpp"
#include "pushpull/solver.hpp"

namespace pushpull {

/// Objective selection. A non-empty preset is expanded to a full configuration
/// before parsing; explicit keys in the user file override the preset values.
struct ProblemSpec {
  std::string preset;
  std::string kind;  // "ridge" | "logistic"

  // ridge
  int p = 0;
  int s = 1;  // observations per agent
  double noise_sigma = 1.0;
  std::uint64_t seed = 0;

  // logistic
  std::string dataset;
  CsvSchema schema;
  int train_rows = 0;
  int test_rows = 0;

  double lambda = 0.0;  // shared regularization weight
};

struct NetworkSpec {
  int n = 0;
  int horizon = 0;
  double extra_edge_prob = 0.3;
  std::uint64_t seed = 0;
};

struct AnalysisSpec {
  bool certificate = false;
  bool verify_propositions = false;
  bool analytic_sigma = false;
};

struct RunConfig {
  ProblemSpec problem;
  NetworkSpec network;
  SolverConfig solver;
  AnalysisSpec analysis;
  std::string output_dir = "out";

  void validate() const;  // throws ConfigError
};

/// Strict parse: unknown keys at any level raise ConfigError naming the key.
RunConfig parse_run_config(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);
RunConfig load_run_config(const std::string& path);

/// Mode grid over a shared base configuration. Empty axis = the base value.
struct SweepConfig {
  RunConfig base;
  std::vector<SolverMode> modes;
  std::vector<double> alphas;
  std::vector<double> betas;
  std::vector<double> gammas;
};

SweepConfig parse_sweep_config(const nlohmann::json& j);
SweepConfig load_sweep_config(const std::string& path);

/// Full configuration json for a named preset; throws ConfigError for an
/// unknown name.
nlohmann::json preset_config(const std::string& name);
std::vector<std::string> preset_names();

/// Returns the path as-is when it exists, otherwise retries under
/// $PUSHPULL_DATA_DIR; throws ConfigError with a fetch hint when neither
/// resolves.
std::string resolve_dataset_path(const std::string& path);

SolverMode parse_mode(const std::string& name);

}  // namespace pushpull
