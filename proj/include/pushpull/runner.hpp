#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pushpull/analysis.hpp"
#include "pushpull/config.hpp"
#include "pushpull/solver.hpp"

namespace pushpull {

struct GlobalOpts {
  int jobs = 1;
  std::string out_dir;  // overrides the config's output_dir when non-empty
  bool quiet = false;
};

/// Everything a solver run needs, assembled from one configuration: the
/// problem, the graph sequence over min(horizon, max_iters) steps, both
/// absorbing vector sequences, and zero-initialized agent states.
struct PreparedRun {
  RunConfig cfg;
  ProblemSet problem;
  DigraphSequence graphs;
  std::vector<StochasticVector> phi;
  std::vector<StochasticVector> pi;
  Eigen::MatrixXd x0;
  Eigen::MatrixXd x_prev;
  std::optional<Dataset> test_set;  // logistic problems with test_rows > 0
};

PreparedRun prepare(const RunConfig& cfg);

/// Exit codes: 0 converged, 2 iteration budget exhausted, 3 divergence;
/// configuration problems throw ConfigError before any run starts.
int cmd_run(const RunConfig& cfg, const GlobalOpts& opts);
int cmd_compare(const SweepConfig& sweep, const GlobalOpts& opts);
int cmd_bounds(const RunConfig& cfg, const GlobalOpts& opts);
int cmd_graph_stats(const RunConfig& cfg, const GlobalOpts& opts);

/// Writes to <path>.tmp and renames, so readers never observe partial files.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace pushpull
