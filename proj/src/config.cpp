#include "pushpull/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>

namespace pushpull {

namespace {

void require_object(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError("config: \"" + where + "\" must be an object");
}

void reject_unknown_keys(const nlohmann::json& j, const std::string& where,
                         std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = std::any_of(allowed.begin(), allowed.end(),
                             [&](const char* k) { return it.key() == k; });
    if (!known)
      throw ConfigError("config: unknown key \"" + it.key() + "\" in \"" + where + "\"");
  }
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, const std::string& where, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config: bad value for \"" + where + "." + key + "\"");
  }
}

CsvSchema parse_schema(const nlohmann::json& j) {
  require_object(j, "problem.schema");
  reject_unknown_keys(j, "problem.schema",
                      {"label_column", "positive_label", "negative_label",
                       "feature_columns", "normalize"});
  CsvSchema schema;
  schema.label_column = get_or<std::string>(j, "label_column", "problem.schema", "");
  schema.positive_label = get_or<std::string>(j, "positive_label", "problem.schema", "");
  schema.negative_label = get_or<std::string>(j, "negative_label", "problem.schema", "");
  schema.feature_columns =
      get_or<std::vector<std::string>>(j, "feature_columns", "problem.schema", {});
  schema.normalize = get_or<bool>(j, "normalize", "problem.schema", false);
  return schema;
}

ProblemSpec parse_problem(const nlohmann::json& j) {
  require_object(j, "problem");
  reject_unknown_keys(j, "problem",
                      {"preset", "kind", "p", "s", "noise_sigma", "seed", "dataset",
                       "schema", "train_rows", "test_rows", "lambda"});
  ProblemSpec spec;
  spec.preset = get_or<std::string>(j, "preset", "problem", "");
  spec.kind = get_or<std::string>(j, "kind", "problem", "");
  spec.p = get_or<int>(j, "p", "problem", 0);
  spec.s = get_or<int>(j, "s", "problem", 1);
  spec.noise_sigma = get_or<double>(j, "noise_sigma", "problem", 1.0);
  spec.seed = get_or<std::uint64_t>(j, "seed", "problem", 0);
  spec.dataset = get_or<std::string>(j, "dataset", "problem", "");
  if (j.contains("schema")) spec.schema = parse_schema(j.at("schema"));
  spec.train_rows = get_or<int>(j, "train_rows", "problem", 0);
  spec.test_rows = get_or<int>(j, "test_rows", "problem", 0);
  spec.lambda = get_or<double>(j, "lambda", "problem", 0.0);
  return spec;
}

NetworkSpec parse_network(const nlohmann::json& j) {
  require_object(j, "network");
  reject_unknown_keys(j, "network", {"n", "horizon", "extra_edge_prob", "seed"});
  NetworkSpec net;
  net.n = get_or<int>(j, "n", "network", 0);
  net.horizon = get_or<int>(j, "horizon", "network", 0);
  net.extra_edge_prob = get_or<double>(j, "extra_edge_prob", "network", 0.3);
  net.seed = get_or<std::uint64_t>(j, "seed", "network", 0);
  return net;
}

SolverConfig parse_solver(const nlohmann::json& j) {
  require_object(j, "solver");
  reject_unknown_keys(
      j, "solver", {"alpha", "beta", "gamma", "max_iters", "stop_tolerance", "log_stride"});
  SolverConfig cfg;
  cfg.alpha = get_or<double>(j, "alpha", "solver", cfg.alpha);
  cfg.beta = get_or<double>(j, "beta", "solver", cfg.beta);
  cfg.gamma = get_or<double>(j, "gamma", "solver", cfg.gamma);
  cfg.max_iters = get_or<int>(j, "max_iters", "solver", cfg.max_iters);
  cfg.stop_tolerance = get_or<double>(j, "stop_tolerance", "solver", cfg.stop_tolerance);
  cfg.log_stride = get_or<int>(j, "log_stride", "solver", cfg.log_stride);
  return cfg;
}

AnalysisSpec parse_analysis(const nlohmann::json& j) {
  require_object(j, "analysis");
  reject_unknown_keys(j, "analysis",
                      {"certificate", "verify_propositions", "analytic_sigma"});
  AnalysisSpec spec;
  spec.certificate = get_or<bool>(j, "certificate", "analysis", false);
  spec.verify_propositions = get_or<bool>(j, "verify_propositions", "analysis", false);
  spec.analytic_sigma = get_or<bool>(j, "analytic_sigma", "analysis", false);
  return spec;
}

}  // namespace

void RunConfig::validate() const {
  if (network.n < 2) throw ConfigError("config: network.n must be >= 2");
  if (network.horizon < 1) throw ConfigError("config: network.horizon must be >= 1");
  if (network.extra_edge_prob < 0.0 || network.extra_edge_prob > 1.0)
    throw ConfigError("config: network.extra_edge_prob must be in [0, 1]");
  try {
    solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (problem.lambda < 0.0) throw ConfigError("config: problem.lambda must be >= 0");
  if (problem.kind == "ridge") {
    if (problem.p < 1) throw ConfigError("config: problem.p must be >= 1 for ridge");
    if (problem.s < 1) throw ConfigError("config: problem.s must be >= 1 for ridge");
    if (problem.noise_sigma < 0.0)
      throw ConfigError("config: problem.noise_sigma must be >= 0");
  } else if (problem.kind == "logistic") {
    if (problem.dataset.empty()) throw ConfigError("config: problem.dataset is required");
    if (problem.schema.label_column.empty())
      throw ConfigError("config: problem.schema.label_column is required");
    if (problem.train_rows < 1)
      throw ConfigError("config: problem.train_rows must be >= 1");
    if (problem.test_rows < 0) throw ConfigError("config: problem.test_rows must be >= 0");
  } else {
    throw ConfigError("config: problem.kind must be \"ridge\" or \"logistic\"");
  }
}

RunConfig parse_run_config(const nlohmann::json& j) {
  require_object(j, "<root>");
  nlohmann::json full = j;
  if (j.contains("problem") && j.at("problem").is_object() &&
      j.at("problem").contains("preset")) {
    std::string name;
    try {
      name = j.at("problem").at("preset").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("config: bad value for \"problem.preset\"");
    }
    full = preset_config(name);
    full.merge_patch(j);
  }
  reject_unknown_keys(full, "<root>",
                      {"problem", "network", "solver", "analysis", "output_dir"});
  if (!full.contains("problem")) throw ConfigError("config: missing \"problem\" section");
  if (!full.contains("network")) throw ConfigError("config: missing \"network\" section");
  if (!full.contains("solver")) throw ConfigError("config: missing \"solver\" section");

  RunConfig cfg;
  cfg.problem = parse_problem(full.at("problem"));
  cfg.network = parse_network(full.at("network"));
  cfg.solver = parse_solver(full.at("solver"));
  if (full.contains("analysis")) cfg.analysis = parse_analysis(full.at("analysis"));
  cfg.output_dir = get_or<std::string>(full, "output_dir", "<root>", cfg.output_dir);
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json problem{{"kind", cfg.problem.kind}, {"lambda", cfg.problem.lambda}};
  if (!cfg.problem.preset.empty()) problem["preset"] = cfg.problem.preset;
  if (cfg.problem.kind == "ridge") {
    problem["p"] = cfg.problem.p;
    problem["s"] = cfg.problem.s;
    problem["noise_sigma"] = cfg.problem.noise_sigma;
    problem["seed"] = cfg.problem.seed;
  } else {
    problem["dataset"] = cfg.problem.dataset;
    problem["train_rows"] = cfg.problem.train_rows;
    problem["test_rows"] = cfg.problem.test_rows;
    problem["schema"] = {{"label_column", cfg.problem.schema.label_column},
                         {"positive_label", cfg.problem.schema.positive_label},
                         {"negative_label", cfg.problem.schema.negative_label},
                         {"feature_columns", cfg.problem.schema.feature_columns},
                         {"normalize", cfg.problem.schema.normalize}};
  }
  return nlohmann::json{
      {"problem", std::move(problem)},
      {"network",
       {{"n", cfg.network.n},
        {"horizon", cfg.network.horizon},
        {"extra_edge_prob", cfg.network.extra_edge_prob},
        {"seed", cfg.network.seed}}},
      {"solver",
       {{"alpha", cfg.solver.alpha},
        {"beta", cfg.solver.beta},
        {"gamma", cfg.solver.gamma},
        {"max_iters", cfg.solver.max_iters},
        {"stop_tolerance", cfg.solver.stop_tolerance},
        {"log_stride", cfg.solver.log_stride}}},
      {"analysis",
       {{"certificate", cfg.analysis.certificate},
        {"verify_propositions", cfg.analysis.verify_propositions},
        {"analytic_sigma", cfg.analysis.analytic_sigma}}},
      {"output_dir", cfg.output_dir}};
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("config: cannot open " + path);
  nlohmann::json j;
  try {
    file >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: invalid json in " + path + ": " + e.what());
  }
  return parse_run_config(j);
}

SolverMode parse_mode(const std::string& name) {
  if (name == "plain") return SolverMode::Plain;
  if (name == "heavy-ball") return SolverMode::HeavyBall;
  if (name == "nesterov") return SolverMode::Nesterov;
  if (name == "combined") return SolverMode::Combined;
  throw ConfigError("config: unknown mode \"" + name + "\"");
}

SweepConfig parse_sweep_config(const nlohmann::json& j) {
  require_object(j, "<root>");
  reject_unknown_keys(j, "<root>", {"base", "modes", "grid"});
  if (!j.contains("base")) throw ConfigError("config: missing \"base\" section");

  SweepConfig sweep;
  sweep.base = parse_run_config(j.at("base"));
  auto mode_names = get_or<std::vector<std::string>>(j, "modes", "<root>",
                                                     {"plain", "heavy-ball", "nesterov",
                                                      "combined"});
  if (mode_names.empty()) throw ConfigError("config: modes must be non-empty");
  for (const auto& name : mode_names) sweep.modes.push_back(parse_mode(name));

  if (j.contains("grid")) {
    const auto& grid = j.at("grid");
    require_object(grid, "grid");
    reject_unknown_keys(grid, "grid", {"alpha", "beta", "gamma"});
    sweep.alphas = get_or<std::vector<double>>(grid, "alpha", "grid", {});
    sweep.betas = get_or<std::vector<double>>(grid, "beta", "grid", {});
    sweep.gammas = get_or<std::vector<double>>(grid, "gamma", "grid", {});
  }
  auto axis = [](size_t k) { return std::max<size_t>(k, 1); };
  size_t combos = sweep.modes.size() * axis(sweep.alphas.size()) *
                  axis(sweep.betas.size()) * axis(sweep.gammas.size());
  if (combos > 10000) throw ConfigError("config: sweep grid exceeds 10000 combinations");
  return sweep;
}

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("config: cannot open " + path);
  nlohmann::json j;
  try {
    file >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: invalid json in " + path + ": " + e.what());
  }
  return parse_sweep_config(j);
}

std::string resolve_dataset_path(const std::string& path) {
  namespace fs = std::filesystem;
  if (fs::exists(path)) return path;
  if (const char* root = std::getenv("PUSHPULL_DATA_DIR")) {
    fs::path candidate = fs::path(root) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  throw ConfigError("config: dataset \"" + path +
                    "\" not found; place it in the working directory or point "
                    "PUSHPULL_DATA_DIR at a directory containing it");
}

}  // namespace pushpull
