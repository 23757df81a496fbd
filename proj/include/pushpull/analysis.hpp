#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "pushpull/graph.hpp"
#include "pushpull/solver.hpp"
#include "pushpull/weights.hpp"

namespace pushpull {

/// The four per-iterate convergence quantities: optimality gap of the
/// phi-weighted average, weighted consensus dispersion, stacked state
/// difference, and pi-weighted gradient-tracking error.
struct IterateQuantities {
  double opt_gap = 0.0;
  double consensus_D = 0.0;
  double state_diff = 0.0;
  double tracking_S = 0.0;
  int k = 0;
};

IterateQuantities quantities(const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_prev,
                             const Eigen::MatrixXd& y, const Eigen::VectorXd& phi_k,
                             const Eigen::VectorXd& pi_k, const Eigen::VectorXd& x_star,
                             int k);

/// Per-step contraction constants. varphi_next, min_pi, min_pi_next support
/// the per-step recursion matrix and the step-size window checks.
struct StepConstants {
  double r = 0.0;
  double c = 0.0;
  double varphi = 0.0;
  double tau = 0.0;
  double varphi_next = 0.0;
  double min_pi = 0.0;
  double min_pi_next = 0.0;
  int k = 0;
};

StepConstants step_constants(const GraphStats& stats, const Eigen::VectorXd& phi_k,
                             const Eigen::VectorXd& phi_next, const Eigen::VectorXd& pi_k,
                             const Eigen::VectorXd& pi_next, double a, double b);

/// Horizon maxima of the per-step constants plus the contraction bound
/// q <= 1 - alpha n sigma mu.
struct HorizonBounds {
  double c = 0.0;
  double tau = 0.0;
  double r = 0.0;
  double varphi = 0.0;
  double sigma = 0.0;
  double q_bound = 0.0;
};

/// When analytic_sigma is set, sigma falls back to b^n / n instead of the
/// measured minimum over the pi sequence.
HorizonBounds horizon_bounds(const std::vector<StepConstants>& steps,
                             const std::vector<StochasticVector>& pi, double alpha, int n,
                             double mu, double L, bool analytic_sigma = false,
                             double b = 0.0);

struct EtaConstants {
  double eta1 = 0.0;
  double eta2 = 0.0;
  double eta3 = 0.0;
  double eta4 = 0.0;
  double eta5 = 0.0;
  double eta6 = 0.0;
};

EtaConstants eta_constants(const HorizonBounds& bounds, int n, double mu, double L,
                           double gamma);

/// 4x4 nonnegative recursion bound matrix built from the horizon maxima; its
/// third row is L r (1+gamma) times the fourth row plus the (tau, L r gamma)
/// additive terms.
Eigen::Matrix4d m_matrix(double alpha, double beta, double gamma,
                         const HorizonBounds& bounds, int n, double mu, double L);

/// Per-step recursion matrix M_k from the step-k constants.
Eigen::Matrix4d m_matrix_step(double alpha, double beta, double gamma,
                              const StepConstants& sc, int n, double mu, double L);

double spectral_radius(const Eigen::Matrix4d& M);

/// det(I - M) by explicit cofactor expansion.
double det_i_minus_m(const Eigen::Matrix4d& M);

struct ParameterRanges {
  double alpha_max = 0.0;  // Eq-19-style minimum at kappa = max(beta, gamma)
  double kappa_max = 0.0;  // eta1 / eta5
  bool empty_alpha_range = false;
  bool momentum_ok = false;  // kappa < kappa_max
  bool linear_ok = false;    // beta + gamma sqrt(n) < 1
  bool alpha_ok = false;
  bool verdict = false;
};

ParameterRanges parameter_ranges(const EtaConstants& etas, const HorizonBounds& bounds,
                                 int n, double mu, double L, double alpha, double beta,
                                 double gamma);

struct Certificate {
  int n = 0;
  double a = 0.0;
  double b = 0.0;
  double mu = 0.0;
  double L = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  HorizonBounds bounds;
  std::optional<EtaConstants> etas;  // absent when gamma sqrt(n) >= 1
  Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
  double rho_M = 0.0;
  ParameterRanges ranges;
  bool analytic_sigma = false;
  int horizon = 0;
};

Certificate build_certificate(const std::vector<GraphStats>& stats,
                              const std::vector<MixingPair>& mixing,
                              const std::vector<StochasticVector>& phi,
                              const std::vector<StochasticVector>& pi, double mu, double L,
                              double alpha, double beta, double gamma,
                              bool analytic_sigma = false);

nlohmann::json certificate_to_json(const Certificate& cert);

/// One row of the empirical check of the per-iterate recursion inequalities.
/// Slack is (rhs - lhs) / max(1, rhs); negative beyond tolerance = violation.
struct PropositionSlack {
  int k = 0;
  double p1 = 0.0;
  double p2 = 0.0;
  double p3 = 0.0;
  double p4 = 0.0;
  double p5 = 0.0;  // worst component of the stacked inequality
  bool p1_skipped = false;
  std::string skip_reason;
};

struct PropositionReport {
  int checked = 0;
  int skipped = 0;
  int violations = 0;
  double max_violation = 0.0;  // magnitude of the worst violated margin
  double min_slack = 0.0;
  std::vector<PropositionSlack> slacks;
};

/// Recomputes the right-hand sides of the four per-iterate inequalities (and
/// the stacked matrix form) along a stride-1 trace with retained state
/// history, at relative tolerance 1e-9.
PropositionReport verify_propositions(const RunRecord& record,
                                      const std::vector<GraphStats>& stats,
                                      const std::vector<StochasticVector>& phi,
                                      const std::vector<StochasticVector>& pi, double a,
                                      double b, double alpha, double beta, double gamma,
                                      double mu, double L, const Eigen::VectorXd& x_star);

void write_slacks_csv(std::ostream& out, const PropositionReport& report);

struct RateFit {
  double rho_hat = 0.0;
  double r_squared = 0.0;
};

/// Least-squares slope of log residual vs k over the tail half of the series;
/// truncates at the first non-positive entry.
RateFit fit_linear_rate(const std::vector<double>& residuals);

}  // namespace pushpull
