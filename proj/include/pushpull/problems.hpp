#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pushpull/errors.hpp"

namespace pushpull {

/// Differentiable local objective of one agent.
class AgentOracle {
 public:
  virtual ~AgentOracle() = default;
  virtual int dimension() const = 0;
  virtual double evaluate(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& x) const = 0;
  virtual double lipschitz() const = 0;

  /// Quadratic oracles expose gradient(x) = Q x - c for closed-form solves.
  virtual bool quadratic_form(Eigen::MatrixXd* /*Q*/, Eigen::VectorXd* /*c*/) const {
    return false;
  }
};

struct ProblemSet {
  std::vector<std::shared_ptr<const AgentOracle>> oracles;
  double global_L = 0.0;
  double global_mu = 0.0;
  Eigen::VectorXd reference_optimum;
  double reference_gradient_norm = 0.0;
  int dimension = 0;

  int n_agents() const { return static_cast<int>(oracles.size()); }
  double average_value(const Eigen::VectorXd& x) const;
  Eigen::VectorXd average_gradient(const Eigen::VectorXd& x) const;
};

struct Dataset {
  Eigen::MatrixXd features;  // m x p
  Eigen::VectorXd labels;    // +1 / -1 for classification
};

struct CsvSchema {
  std::string label_column;
  std::string positive_label;
  std::string negative_label;                // when set, rows with other labels are dropped
  std::vector<std::string> feature_columns;  // empty: all columns except the label
  bool normalize = false;                    // per-feature min-max to [0,1]
};

/// Sensor-fusion ridge regression: f_i(x) = ||z_i - H_i x||^2 + lambda ||x||^2
/// with H_i uniform on the unit cube, scaled so the data term has unit
/// Lipschitz constant, and z_i = H_i x_true + N(0, noise_sigma^2) noise.
ProblemSet ridge_problem(int n, int p, int s, double lambda, double noise_sigma,
                         std::uint64_t seed);

/// L2-regularized logistic regression with intercept; the decision variable is
/// [x_0, x_1:] of dimension p+1. Rows are split among agents in contiguous
/// equal blocks, remainder to the last agent.
ProblemSet logistic_problem(const Dataset& data, int n_agents, double lambda);

/// Returns x with ||grad f(x)|| <= tolerance: closed form for quadratic
/// problems, accelerated descent otherwise (iteration cap 1e6).
Eigen::VectorXd solve_reference(const ProblemSet& problem, double tolerance);

Dataset load_csv(const std::string& path, const CsvSchema& schema);

struct Conditioning {
  double L = 0.0;
  double mu = 0.0;
  double Q = 0.0;
};
Conditioning constants(const ProblemSet& problem);

/// Test accuracy of the intercept-first logistic decision vector on a dataset.
double classification_accuracy(const Dataset& test, const Eigen::VectorXd& x);

}  // namespace pushpull
