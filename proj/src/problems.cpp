#include "pushpull/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace pushpull {

double ProblemSet::average_value(const Eigen::VectorXd& x) const {
  double sum = 0.0;
  for (const auto& f : oracles) sum += f->evaluate(x);
  return sum / static_cast<double>(oracles.size());
}

Eigen::VectorXd ProblemSet::average_gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dimension);
  for (const auto& f : oracles) g += f->gradient(x);
  return g / static_cast<double>(oracles.size());
}

namespace {

class RidgeOracle final : public AgentOracle {
 public:
  RidgeOracle(Eigen::MatrixXd H, Eigen::VectorXd z, double lambda)
      : H_(std::move(H)), z_(std::move(z)), lambda_(lambda) {
    Eigen::MatrixXd Q = 2.0 * (H_.transpose() * H_ +
                               lambda_ * Eigen::MatrixXd::Identity(H_.cols(), H_.cols()));
    lipschitz_ = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Q).eigenvalues().maxCoeff();
  }

  int dimension() const override { return static_cast<int>(H_.cols()); }

  double evaluate(const Eigen::VectorXd& x) const override {
    return (z_ - H_ * x).squaredNorm() + lambda_ * x.squaredNorm();
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override {
    return 2.0 * (H_.transpose() * (H_ * x - z_)) + 2.0 * lambda_ * x;
  }

  double lipschitz() const override { return lipschitz_; }

  bool quadratic_form(Eigen::MatrixXd* Q, Eigen::VectorXd* c) const override {
    if (Q) *Q = 2.0 * (H_.transpose() * H_ +
                       lambda_ * Eigen::MatrixXd::Identity(H_.cols(), H_.cols()));
    if (c) *c = 2.0 * H_.transpose() * z_;
    return true;
  }

 private:
  Eigen::MatrixXd H_;
  Eigen::VectorXd z_;
  double lambda_;
  double lipschitz_;
};

class LogisticOracle final : public AgentOracle {
 public:
  // features: batch rows with a prepended all-ones intercept column.
  LogisticOracle(Eigen::MatrixXd features, Eigen::VectorXd labels, double lambda)
      : B_(std::move(features)), y_(std::move(labels)), lambda_(lambda) {
    const double m = static_cast<double>(B_.rows());
    double smax = Eigen::JacobiSVD<Eigen::MatrixXd>(B_).singularValues()(0);
    lipschitz_ = lambda_ + smax * smax / (4.0 * m);
  }

  int dimension() const override { return static_cast<int>(B_.cols()); }

  double evaluate(const Eigen::VectorXd& x) const override {
    const double m = static_cast<double>(B_.rows());
    Eigen::ArrayXd margins = -(B_ * x).array() * y_.array();
    // log(1 + exp(t)) computed stably for large |t|
    double sum = 0.0;
    for (Eigen::Index i = 0; i < margins.size(); ++i) {
      double t = margins(i);
      sum += (t > 0.0) ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
    }
    return sum / m + 0.5 * lambda_ * x.squaredNorm();
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override {
    const double m = static_cast<double>(B_.rows());
    Eigen::ArrayXd z = (B_ * x).array() * y_.array();
    // d/dz ln(1+exp(-z)) = -sigmoid(-z)
    Eigen::ArrayXd w = -y_.array() / (1.0 + z.exp());
    return B_.transpose() * w.matrix() / m + lambda_ * x;
  }

  double lipschitz() const override { return lipschitz_; }

 private:
  Eigen::MatrixXd B_;
  Eigen::VectorXd y_;
  double lambda_;
  double lipschitz_;
};

void check_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

}  // namespace

ProblemSet ridge_problem(int n, int p, int s, double lambda, double noise_sigma,
                         std::uint64_t seed) {
  if (n < 1 || p < 1 || s < 1)
    throw std::invalid_argument("ridge_problem: n, p, s must be >= 1");
  if (lambda <= 0.0)
    throw std::invalid_argument("ridge_problem: lambda must be > 0 for strong convexity");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> cube(0.0, 1.0);

  Eigen::VectorXd x_true(p);
  for (int i = 0; i < p; ++i) x_true(i) = gauss(rng);

  ProblemSet problem;
  problem.dimension = p;
  Eigen::MatrixXd hess_sum = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd rhs_sum = Eigen::VectorXd::Zero(p);
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd H(s, p);
    for (int r = 0; r < s; ++r)
      for (int c = 0; c < p; ++c) H(r, c) = cube(rng);
    // Data term x -> ||z - Hx||^2 has Lipschitz constant 2 smax(H)^2; scale to 1.
    double smax = Eigen::JacobiSVD<Eigen::MatrixXd>(H).singularValues()(0);
    if (smax > 0.0) H /= smax * std::sqrt(2.0);
    Eigen::VectorXd noise(s);
    for (int r = 0; r < s; ++r) noise(r) = noise_sigma * gauss(rng);
    Eigen::VectorXd z = H * x_true + noise;
    hess_sum += 2.0 * (H.transpose() * H + lambda * Eigen::MatrixXd::Identity(p, p));
    rhs_sum += 2.0 * H.transpose() * z;
    problem.oracles.push_back(std::make_shared<RidgeOracle>(std::move(H), std::move(z), lambda));
  }

  Eigen::MatrixXd avg_hess = hess_sum / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(avg_hess);
  problem.global_L = eig.eigenvalues().maxCoeff();
  problem.global_mu = eig.eigenvalues().minCoeff();
  problem.reference_optimum = hess_sum.ldlt().solve(rhs_sum);
  problem.reference_gradient_norm =
      problem.average_gradient(problem.reference_optimum).norm();
  return problem;
}

ProblemSet logistic_problem(const Dataset& data, int n_agents, double lambda) {
  const int m = static_cast<int>(data.features.rows());
  const int p = static_cast<int>(data.features.cols());
  if (m == 0) throw std::invalid_argument("logistic_problem: empty dataset");
  if (n_agents < 1 || n_agents > m)
    throw std::invalid_argument("logistic_problem: bad agent count");
  if (lambda <= 0.0) throw std::invalid_argument("logistic_problem: lambda must be > 0");
  check_finite(data.features, "logistic_problem");
  if (data.labels.size() != m)
    throw std::invalid_argument("logistic_problem: feature/label row mismatch");
  for (Eigen::Index i = 0; i < data.labels.size(); ++i)
    if (data.labels(i) != 1.0 && data.labels(i) != -1.0)
      throw std::invalid_argument("logistic_problem: labels must be +1/-1");

  ProblemSet problem;
  problem.dimension = p + 1;
  const int base = m / n_agents;
  int row = 0;
  double lipschitz_sum = 0.0;
  for (int i = 0; i < n_agents; ++i) {
    int batch = (i == n_agents - 1) ? m - row : base;
    Eigen::MatrixXd B(batch, p + 1);
    B.col(0).setOnes();
    B.rightCols(p) = data.features.middleRows(row, batch);
    Eigen::VectorXd y = data.labels.segment(row, batch);
    auto oracle = std::make_shared<LogisticOracle>(std::move(B), std::move(y), lambda);
    lipschitz_sum += oracle->lipschitz();
    problem.oracles.push_back(std::move(oracle));
    row += batch;
  }
  problem.global_mu = lambda;
  problem.global_L = std::max(lipschitz_sum / static_cast<double>(n_agents), lambda);
  problem.reference_optimum = solve_reference(problem, 1e-12);
  problem.reference_gradient_norm =
      problem.average_gradient(problem.reference_optimum).norm();
  return problem;
}

Eigen::VectorXd solve_reference(const ProblemSet& problem, double tolerance) {
  if (problem.global_mu <= 0.0)
    throw std::invalid_argument("solve_reference: problem must be strongly convex");

  // Closed form when every oracle is quadratic.
  bool all_quadratic = true;
  Eigen::MatrixXd Q_sum = Eigen::MatrixXd::Zero(problem.dimension, problem.dimension);
  Eigen::VectorXd c_sum = Eigen::VectorXd::Zero(problem.dimension);
  for (const auto& f : problem.oracles) {
    Eigen::MatrixXd Q;
    Eigen::VectorXd c;
    if (!f->quadratic_form(&Q, &c)) {
      all_quadratic = false;
      break;
    }
    Q_sum += Q;
    c_sum += c;
  }
  if (all_quadratic) return Q_sum.ldlt().solve(c_sum);

  // Nesterov accelerated descent for the strongly convex case.
  const double L = problem.global_L;
  const double mu = problem.global_mu;
  const double theta = (std::sqrt(L / mu) - 1.0) / (std::sqrt(L / mu) + 1.0);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(problem.dimension);
  Eigen::VectorXd x_prev = x;
  constexpr long kIterationCap = 1000000;
  double gnorm = problem.average_gradient(x).norm();
  for (long it = 0; it < kIterationCap && gnorm > tolerance; ++it) {
    Eigen::VectorXd v = x + theta * (x - x_prev);
    Eigen::VectorXd x_next = v - problem.average_gradient(v) / L;
    x_prev = x;
    x = x_next;
    gnorm = problem.average_gradient(x).norm();
  }
  if (gnorm > tolerance)
    throw ConvergenceFailureError("solve_reference: iteration cap reached", gnorm);
  return x;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // trim whitespace and CR
    size_t a = cell.find_first_not_of(" \t\r");
    size_t b = cell.find_last_not_of(" \t\r");
    cells.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
  }
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream file(path);
  if (!file) throw std::invalid_argument("load_csv: cannot open " + path);

  std::string line;
  if (!std::getline(file, line)) throw ParseError("load_csv: empty file", 0);
  auto header = split_csv_line(line);

  auto column_index = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw SchemaError("load_csv: missing column \"" + name + "\"");
    return static_cast<int>(it - header.begin());
  };

  int label_idx = column_index(schema.label_column);
  std::vector<int> feature_idx;
  if (schema.feature_columns.empty()) {
    for (int i = 0; i < static_cast<int>(header.size()); ++i)
      if (i != label_idx) feature_idx.push_back(i);
  } else {
    for (const auto& name : schema.feature_columns) feature_idx.push_back(column_index(name));
  }

  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  int row_number = 0;
  while (std::getline(file, line)) {
    ++row_number;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw ParseError("load_csv: wrong cell count", row_number);
    const std::string& raw_label = cells[static_cast<size_t>(label_idx)];
    if (!schema.negative_label.empty() && raw_label != schema.positive_label &&
        raw_label != schema.negative_label)
      continue;
    std::vector<double> feats;
    feats.reserve(feature_idx.size());
    for (int idx : feature_idx) {
      try {
        size_t pos = 0;
        double v = std::stod(cells[static_cast<size_t>(idx)], &pos);
        if (pos != cells[static_cast<size_t>(idx)].size()) throw std::invalid_argument("");
        if (!std::isfinite(v)) throw std::invalid_argument("");
        feats.push_back(v);
      } catch (const std::exception&) {
        throw ParseError("load_csv: non-numeric feature cell in column \"" +
                             header[static_cast<size_t>(idx)] + "\"",
                         row_number);
      }
    }
    labels.push_back(raw_label == schema.positive_label ? 1.0 : -1.0);
    rows.push_back(std::move(feats));
  }

  Dataset data;
  data.features.resize(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(feature_idx.size()));
  data.labels.resize(static_cast<Eigen::Index>(labels.size()));
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t c = 0; c < rows[r].size(); ++c)
      data.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    data.labels(static_cast<Eigen::Index>(r)) = labels[r];
  }

  if (schema.normalize && data.features.rows() > 0) {
    for (Eigen::Index c = 0; c < data.features.cols(); ++c) {
      double lo = data.features.col(c).minCoeff();
      double hi = data.features.col(c).maxCoeff();
      if (hi > lo)
        data.features.col(c) = (data.features.col(c).array() - lo) / (hi - lo);
      else
        data.features.col(c).setZero();
    }
  }
  return data;
}

Conditioning constants(const ProblemSet& problem) {
  return {problem.global_L, problem.global_mu, problem.global_L / problem.global_mu};
}

double classification_accuracy(const Dataset& test, const Eigen::VectorXd& x) {
  const Eigen::Index m = test.features.rows();
  if (m == 0) throw std::invalid_argument("classification_accuracy: empty test set");
  if (x.size() != test.features.cols() + 1)
    throw std::invalid_argument("classification_accuracy: dimension mismatch");
  int correct = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    double score = x(0) + test.features.row(i).dot(x.tail(x.size() - 1));
    double pred = score >= 0.0 ? 1.0 : -1.0;
    if (pred == test.labels(i)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(m);
}

}  // namespace pushpull
