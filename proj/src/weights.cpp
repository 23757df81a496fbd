#include "pushpull/weights.hpp"

#include <cmath>
#include <limits>

namespace pushpull {

namespace {
constexpr double kStochasticTol = 1e-12;
}

Eigen::MatrixXd build_row_stochastic(const Digraph& g) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(g.n, g.n);
  auto in_adj = g.in_adjacency();
  for (int i = 0; i < g.n; ++i) {
    double w = 1.0 / (static_cast<double>(in_adj[i].size()) + 1.0);
    A(i, i) = w;
    for (int j : in_adj[i]) A(i, j) = w;
  }
  return A;
}

Eigen::MatrixXd build_column_stochastic(const Digraph& g) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(g.n, g.n);
  auto out_adj = g.out_adjacency();
  for (int i = 0; i < g.n; ++i) {
    double w = 1.0 / (static_cast<double>(out_adj[i].size()) + 1.0);
    B(i, i) = w;
    for (int j : out_adj[i]) B(j, i) = w;
  }
  return B;
}

double min_positive_entry(const Eigen::MatrixXd& m) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (m(r, c) > 0.0) best = std::min(best, m(r, c));
  return best;
}

MixingPair build_mixing_pair(const Digraph& g, int graph_index) {
  MixingPair mix;
  mix.A = build_row_stochastic(g);
  mix.B = build_column_stochastic(g);
  mix.a_min = min_positive_entry(mix.A);
  mix.b_min = min_positive_entry(mix.B);
  mix.graph_index = graph_index;
  return mix;
}

std::vector<MixingPair> build_mixing_sequence(const DigraphSequence& seq) {
  std::vector<MixingPair> out;
  out.reserve(seq.graphs.size());
  for (size_t k = 0; k < seq.graphs.size(); ++k)
    out.push_back(build_mixing_pair(seq.graphs[k], static_cast<int>(k)));
  return out;
}

std::vector<StochasticVector> pi_sequence(const std::vector<Eigen::MatrixXd>& Bs) {
  if (Bs.empty()) throw std::invalid_argument("pi_sequence: empty matrix list");
  const Eigen::Index n = Bs.front().rows();
  for (const auto& B : Bs) {
    if (B.rows() != n || B.cols() != n)
      throw InvalidMatrixError("pi_sequence: inconsistent matrix shape");
    Eigen::RowVectorXd colsum = B.colwise().sum();
    if ((colsum.array() - 1.0).abs().maxCoeff() > kStochasticTol || B.minCoeff() < 0.0)
      throw InvalidMatrixError("pi_sequence: matrix is not column-stochastic");
  }
  std::vector<StochasticVector> pis;
  pis.reserve(Bs.size() + 1);
  Eigen::VectorXd pi = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  pis.push_back({pi, VectorLabel::Pi, 0});
  for (size_t k = 0; k < Bs.size(); ++k) {
    pi = Bs[k] * pi;
    pis.push_back({pi, VectorLabel::Pi, static_cast<int>(k) + 1});
  }
  return pis;
}

std::vector<StochasticVector> phi_sequence(const std::vector<Eigen::MatrixXd>& As,
                                           const Eigen::VectorXd& terminal) {
  if (As.empty()) throw std::invalid_argument("phi_sequence: empty matrix list");
  const Eigen::Index n = As.front().rows();
  if (terminal.size() != n) throw std::invalid_argument("phi_sequence: terminal size mismatch");
  if (std::abs(terminal.sum() - 1.0) > kStochasticTol || terminal.minCoeff() < 0.0)
    throw std::invalid_argument("phi_sequence: terminal is not stochastic");
  for (const auto& A : As) {
    if (A.rows() != n || A.cols() != n)
      throw InvalidMatrixError("phi_sequence: inconsistent matrix shape");
    Eigen::VectorXd rowsum = A.rowwise().sum();
    if ((rowsum.array() - 1.0).abs().maxCoeff() > kStochasticTol || A.minCoeff() < 0.0)
      throw InvalidMatrixError("phi_sequence: matrix is not row-stochastic");
  }
  const int T = static_cast<int>(As.size());
  std::vector<StochasticVector> phis(static_cast<size_t>(T) + 1);
  Eigen::VectorXd phi = terminal;
  phis[static_cast<size_t>(T)] = {phi, VectorLabel::Phi, T};
  for (int k = T - 1; k >= 0; --k) {
    phi = As[static_cast<size_t>(k)].transpose() * phi;
    phis[static_cast<size_t>(k)] = {phi, VectorLabel::Phi, k};
  }
  return phis;
}

std::vector<StochasticVector> pi_sequence(const DigraphSequence& seq) {
  if (seq.graphs.empty()) throw std::invalid_argument("pi_sequence: empty graph sequence");
  std::vector<StochasticVector> pis;
  pis.reserve(seq.graphs.size() + 1);
  Eigen::VectorXd pi = Eigen::VectorXd::Constant(seq.n, 1.0 / static_cast<double>(seq.n));
  pis.push_back({pi, VectorLabel::Pi, 0});
  for (size_t k = 0; k < seq.graphs.size(); ++k) {
    pi = build_column_stochastic(seq.graphs[k]) * pi;
    pis.push_back({pi, VectorLabel::Pi, static_cast<int>(k) + 1});
  }
  return pis;
}

std::vector<StochasticVector> phi_sequence(const DigraphSequence& seq,
                                           const Eigen::VectorXd& terminal) {
  if (seq.graphs.empty()) throw std::invalid_argument("phi_sequence: empty graph sequence");
  if (terminal.size() != seq.n)
    throw std::invalid_argument("phi_sequence: terminal size mismatch");
  const int T = static_cast<int>(seq.graphs.size());
  std::vector<StochasticVector> phis(static_cast<size_t>(T) + 1);
  Eigen::VectorXd phi = terminal;
  phis[static_cast<size_t>(T)] = {phi, VectorLabel::Phi, T};
  for (int k = T - 1; k >= 0; --k) {
    phi = build_row_stochastic(seq.graphs[static_cast<size_t>(k)]).transpose() * phi;
    phis[static_cast<size_t>(k)] = {phi, VectorLabel::Phi, k};
  }
  return phis;
}

std::vector<StochasticVector> phi_sequence(const DigraphSequence& seq) {
  return phi_sequence(seq,
                      Eigen::VectorXd::Constant(seq.n, 1.0 / static_cast<double>(seq.n)));
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m, const std::string& kind, int k) {
  nlohmann::json entries = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) entries.push_back(m(r, c));
  return nlohmann::json{{"n", m.rows()}, {"kind", kind}, {"k", k}, {"entries", std::move(entries)}};
}

}  // namespace pushpull
