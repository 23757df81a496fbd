#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pushpull/runner.hpp"

namespace {

// --config and --preset are mutually exclusive ways to produce the same json.
nlohmann::json run_json(const std::string& config_path, const std::string& preset) {
  if (!config_path.empty() && !preset.empty())
    throw pushpull::ConfigError("config: use either --config or --preset, not both");
  if (!config_path.empty()) {
    std::ifstream file(config_path);
    if (!file) throw pushpull::ConfigError("config: cannot open " + config_path);
    nlohmann::json j;
    try {
      file >> j;
    } catch (const nlohmann::json::exception& e) {
      throw pushpull::ConfigError("config: invalid json in " + config_path + ": " +
                                  e.what());
    }
    return j;
  }
  if (!preset.empty()) return pushpull::preset_config(preset);
  throw pushpull::ConfigError("config: one of --config or --preset is required");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and rate-bound analyzer for push-pull optimization over "
               "time-varying directed networks"};
  app.require_subcommand(1);
  app.fallthrough();  // lets global flags appear after the subcommand

  pushpull::GlobalOpts opts;
  app.add_option("--jobs", opts.jobs, "Concurrent runs for compare")->check(CLI::Range(1, 256));
  app.add_option("--out", opts.out_dir, "Output directory override");
  app.add_flag("--quiet", opts.quiet, "Suppress progress output");

  std::string config_path, preset;
  auto add_source = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Configuration json file");
    sub->add_option("--preset", preset, "Built-in configuration name");
  };

  CLI::App* cmd_run = app.add_subcommand("run", "Solve one configured instance");
  CLI::App* cmd_compare =
      app.add_subcommand("compare", "Run the momentum variants on a shared instance");
  CLI::App* cmd_bounds =
      app.add_subcommand("bounds", "Evaluate the linear-rate certificate only");
  CLI::App* cmd_stats =
      app.add_subcommand("graph-stats", "Per-iteration graph diagnostics");
  for (CLI::App* sub : {cmd_run, cmd_compare, cmd_bounds, cmd_stats}) add_source(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    nlohmann::json j = run_json(config_path, preset);
    if (cmd_run->parsed())
      return pushpull::cmd_run(pushpull::parse_run_config(j), opts);
    if (cmd_compare->parsed()) {
      // a plain run config is promoted to an all-modes sweep over it
      pushpull::SweepConfig sweep;
      if (j.contains("base"))
        sweep = pushpull::parse_sweep_config(j);
      else
        sweep = pushpull::parse_sweep_config(nlohmann::json{{"base", j}});
      return pushpull::cmd_compare(sweep, opts);
    }
    if (cmd_bounds->parsed())
      return pushpull::cmd_bounds(pushpull::parse_run_config(j), opts);
    return pushpull::cmd_graph_stats(pushpull::parse_run_config(j), opts);
  } catch (const pushpull::DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
