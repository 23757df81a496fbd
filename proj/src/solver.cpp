#include "pushpull/solver.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>

#include "pushpull/analysis.hpp"

namespace pushpull {

std::string to_string(SolverMode mode) {
  switch (mode) {
    case SolverMode::Plain: return "plain";
    case SolverMode::HeavyBall: return "heavy-ball";
    case SolverMode::Nesterov: return "nesterov";
    case SolverMode::Combined: return "combined";
  }
  return "unknown";
}

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Converged: return "converged";
    case RunStatus::MaxIters: return "max-iters";
    case RunStatus::Truncated: return "truncated";
  }
  return "unknown";
}

SolverMode SolverConfig::mode() const {
  if (beta > 0.0 && gamma > 0.0) return SolverMode::Combined;
  if (beta > 0.0) return SolverMode::HeavyBall;
  if (gamma > 0.0) return SolverMode::Nesterov;
  return SolverMode::Plain;
}

void SolverConfig::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("SolverConfig: alpha must be > 0");
  if (beta < 0.0 || gamma < 0.0)
    throw std::invalid_argument("SolverConfig: beta and gamma must be >= 0");
  if (max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters must be >= 1");
  if (stop_tolerance < 0.0)
    throw std::invalid_argument("SolverConfig: stop_tolerance must be >= 0");
  if (log_stride < 1) throw std::invalid_argument("SolverConfig: log_stride must be >= 1");
}

AgentSwarm init(const ProblemSet& problem, const Eigen::MatrixXd& x0,
                const Eigen::MatrixXd& x_prev) {
  const int n = problem.n_agents();
  const int p = problem.dimension;
  if (x0.rows() != n || x0.cols() != p || x_prev.rows() != n || x_prev.cols() != p)
    throw std::invalid_argument("init: state shape does not match problem");
  AgentSwarm swarm;
  swarm.x = x0;
  swarm.x_prev = x_prev;
  swarm.s = x0;
  swarm.grad_s.resize(n, p);
  for (int i = 0; i < n; ++i)
    swarm.grad_s.row(i) = problem.oracles[static_cast<size_t>(i)]->gradient(swarm.s.row(i));
  swarm.y = swarm.grad_s;
  swarm.k = 0;
  return swarm;
}

AgentSwarm step(const AgentSwarm& swarm, const MixingPair& mix, const SolverConfig& cfg,
                const ProblemSet& problem) {
  const int n = problem.n_agents();
  const int p = problem.dimension;
  if (swarm.x.rows() != n || swarm.x.cols() != p || mix.A.rows() != n)
    throw std::invalid_argument("step: dimension mismatch");

  AgentSwarm next;
  next.x = mix.A * swarm.s - cfg.alpha * swarm.y + cfg.beta * (swarm.x - swarm.x_prev);
  next.s = next.x + cfg.gamma * (next.x - swarm.x);
  if (!next.x.allFinite() || !next.s.allFinite())
    throw DivergenceError("step: non-finite decision at iteration " +
                              std::to_string(swarm.k + 1),
                          swarm.k + 1);
  next.grad_s.resize(n, p);
  for (int i = 0; i < n; ++i)
    next.grad_s.row(i) = problem.oracles[static_cast<size_t>(i)]->gradient(next.s.row(i));
  next.y = mix.B * swarm.y + next.grad_s - swarm.grad_s;
  if (!next.y.allFinite())
    throw DivergenceError("step: non-finite tracker at iteration " +
                              std::to_string(swarm.k + 1),
                          swarm.k + 1);
  next.x_prev = swarm.x;
  next.k = swarm.k + 1;
  return next;
}

double consensus_error(const Eigen::MatrixXd& x) {
  Eigen::RowVectorXd mean = x.colwise().mean();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    worst = std::max(worst, (x.row(i) - mean).norm());
  return worst;
}

namespace {

double residual_metric(const Eigen::MatrixXd& x, const Eigen::VectorXd& x_star) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    sum += (x.row(i).transpose() - x_star).norm();
  return sum / static_cast<double>(x.rows());
}

double tracking_deviation(const AgentSwarm& swarm) {
  Eigen::VectorXd y_sum = swarm.y.colwise().sum();
  Eigen::VectorXd g_sum = swarm.grad_s.colwise().sum();
  return (y_sum - g_sum).norm() / (1.0 + g_sum.norm());
}

}  // namespace

namespace {

RunRecord run_impl(const ProblemSet& problem,
                   const std::function<MixingPair(int)>& mix_at, int horizon,
                   const SolverConfig& cfg, const std::vector<StochasticVector>& phi,
                   const std::vector<StochasticVector>& pi, const Eigen::VectorXd& x_star,
                   const Eigen::MatrixXd& x0, const Eigen::MatrixXd& x_prev) {
  cfg.validate();
  if (horizon < 1) throw std::invalid_argument("run: empty mixing sequence");
  if (phi.size() < static_cast<size_t>(horizon) + 1 ||
      pi.size() < static_cast<size_t>(horizon) + 1)
    throw std::invalid_argument("run: phi/pi must cover the mixing horizon plus one");

  const auto t0 = std::chrono::steady_clock::now();
  RunRecord record;
  record.config = cfg;

  AgentSwarm swarm = init(problem, x0, x_prev);
  auto log_row = [&](const AgentSwarm& sw) {
    IterateQuantities q =
        quantities(sw.x, sw.x_prev, sw.y, phi[static_cast<size_t>(sw.k)].entries,
                   pi[static_cast<size_t>(sw.k)].entries, x_star, sw.k);
    record.rows.push_back({sw.k, residual_metric(sw.x, x_star), q.opt_gap, q.consensus_D,
                           q.state_diff, q.tracking_S});
  };

  record.max_tracking_conservation_dev = tracking_deviation(swarm);
  if (cfg.keep_history) record.history.push_back(swarm);
  log_row(swarm);
  record.status = RunStatus::MaxIters;
  while (true) {
    // the criterion only becomes meaningful once one step has spread the
    // agents apart; a consensual start (e.g. all zeros) must not stop at k=0
    if (swarm.k > 0 && cfg.stop_tolerance > 0.0 &&
        consensus_error(swarm.x) <= cfg.stop_tolerance) {
      record.status = RunStatus::Converged;
      break;
    }
    if (swarm.k >= cfg.max_iters) break;
    if (swarm.k >= horizon) {
      record.status = RunStatus::Truncated;
      break;
    }
    swarm = step(swarm, mix_at(swarm.k), cfg, problem);
    record.max_tracking_conservation_dev =
        std::max(record.max_tracking_conservation_dev, tracking_deviation(swarm));
    if (cfg.keep_history) record.history.push_back(swarm);
    if (swarm.k % cfg.log_stride == 0 || swarm.k == cfg.max_iters) log_row(swarm);
  }
  if (record.rows.back().k != swarm.k) log_row(swarm);

  record.iterations = swarm.k;
  record.final_x = swarm.x;
  record.final_residual = record.rows.back().residual;
  record.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return record;
}

}  // namespace

RunRecord run(const ProblemSet& problem, const std::vector<MixingPair>& mixing,
              const SolverConfig& cfg, const std::vector<StochasticVector>& phi,
              const std::vector<StochasticVector>& pi, const Eigen::VectorXd& x_star,
              const Eigen::MatrixXd& x0, const Eigen::MatrixXd& x_prev) {
  auto mix_at = [&](int k) { return mixing[static_cast<size_t>(k)]; };
  return run_impl(problem, mix_at, static_cast<int>(mixing.size()), cfg, phi, pi, x_star,
                  x0, x_prev);
}

RunRecord run(const ProblemSet& problem, const DigraphSequence& graphs,
              const SolverConfig& cfg, const std::vector<StochasticVector>& phi,
              const std::vector<StochasticVector>& pi, const Eigen::VectorXd& x_star,
              const Eigen::MatrixXd& x0, const Eigen::MatrixXd& x_prev) {
  auto mix_at = [&](int k) {
    return build_mixing_pair(graphs.graphs[static_cast<size_t>(k)], k);
  };
  RunRecord record = run_impl(problem, mix_at, static_cast<int>(graphs.graphs.size()), cfg,
                              phi, pi, x_star, x0, x_prev);
  record.graph_seed = graphs.seed;
  return record;
}

void write_run_csv(std::ostream& out, const RunRecord& record) {
  out << "k,residual,optimality_gap,consensus_D,state_diff,tracking_S\n";
  out.precision(17);
  for (const auto& row : record.rows)
    out << row.k << ',' << row.residual << ',' << row.optimality_gap << ','
        << row.consensus_D << ',' << row.state_diff << ',' << row.tracking_S << '\n';
}

nlohmann::json run_summary_json(const RunRecord& record) {
  return nlohmann::json{
      {"config",
       {{"alpha", record.config.alpha},
        {"beta", record.config.beta},
        {"gamma", record.config.gamma},
        {"max_iters", record.config.max_iters},
        {"stop_tolerance", record.config.stop_tolerance},
        {"log_stride", record.config.log_stride},
        {"mode", to_string(record.config.mode())}}},
      {"status", to_string(record.status)},
      {"iterations", record.iterations},
      {"final_residual", record.final_residual},
      {"max_tracking_conservation_dev", record.max_tracking_conservation_dev},
      {"graph_seed", record.graph_seed},
      {"wall_ms", record.wall_ms}};
}

}  // namespace pushpull
