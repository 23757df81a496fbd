#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "pushpull/problems.hpp"
#include "pushpull/weights.hpp"

namespace pushpull {

/// Per-agent iterate state; rows index agents, columns index coordinates.
struct AgentSwarm {
  Eigen::MatrixXd x;       // current decisions x_k
  Eigen::MatrixXd x_prev;  // x_{k-1}
  Eigen::MatrixXd s;       // extrapolated decisions s_k
  Eigen::MatrixXd y;       // gradient trackers y_k
  Eigen::MatrixXd grad_s;  // cached gradients at s_k
  int k = 0;
};

enum class SolverMode { Plain, HeavyBall, Nesterov, Combined };

std::string to_string(SolverMode mode);

struct SolverConfig {
  double alpha = 0.1;
  double beta = 0.0;   // heavy-ball coefficient
  double gamma = 0.0;  // Nesterov coefficient
  int max_iters = 1000;
  double stop_tolerance = 1e-9;  // consensus error max_i ||x_i - mean||; 0 disables
  int log_stride = 1;
  bool keep_history = false;

  SolverMode mode() const;
  void validate() const;
};

enum class RunStatus { Converged, MaxIters, Truncated };

std::string to_string(RunStatus status);

struct RunRow {
  int k = 0;
  double residual = 0.0;        // (1/n) sum_i ||x_k^i - x*||
  double optimality_gap = 0.0;  // ||xhat_k - x*||
  double consensus_D = 0.0;
  double state_diff = 0.0;
  double tracking_S = 0.0;
};

struct RunRecord {
  std::vector<RunRow> rows;
  RunStatus status = RunStatus::MaxIters;
  int iterations = 0;
  double final_residual = 0.0;
  double wall_ms = 0.0;
  double max_tracking_conservation_dev = 0.0;  // worst relative Sum(y) vs Sum(grad) drift
  SolverConfig config;
  std::uint64_t graph_seed = 0;
  Eigen::MatrixXd final_x;          // decisions at the last iteration
  std::vector<AgentSwarm> history;  // filled when config.keep_history
};

/// s_0 := x_0 and y_0 := grad f_i(s_0), so the tracker-sum identity holds
/// exactly at k = 0.
AgentSwarm init(const ProblemSet& problem, const Eigen::MatrixXd& x0,
                const Eigen::MatrixXd& x_prev);

/// One synchronous round: pull of decisions through A_k, momentum extrapolation,
/// and push of gradient trackers through B_k.
AgentSwarm step(const AgentSwarm& swarm, const MixingPair& mix, const SolverConfig& cfg,
                const ProblemSet& problem);

/// Runs until the consensus error drops below stop_tolerance, the mixing
/// sequence is exhausted, or max_iters is reached. phi and pi must cover
/// mixing.size() + 1 indices.
RunRecord run(const ProblemSet& problem, const std::vector<MixingPair>& mixing,
              const SolverConfig& cfg, const std::vector<StochasticVector>& phi,
              const std::vector<StochasticVector>& pi, const Eigen::VectorXd& x_star,
              const Eigen::MatrixXd& x0, const Eigen::MatrixXd& x_prev);

/// Same loop, but mixing matrices are built from the graph sequence one step
/// at a time so long horizons do not hold every matrix in memory.
RunRecord run(const ProblemSet& problem, const DigraphSequence& graphs,
              const SolverConfig& cfg, const std::vector<StochasticVector>& phi,
              const std::vector<StochasticVector>& pi, const Eigen::VectorXd& x_star,
              const Eigen::MatrixXd& x0, const Eigen::MatrixXd& x_prev);

double consensus_error(const Eigen::MatrixXd& x);

void write_run_csv(std::ostream& out, const RunRecord& record);
nlohmann::json run_summary_json(const RunRecord& record);

}  // namespace pushpull
