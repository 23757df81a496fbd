#pragma once

#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "pushpull/graph.hpp"

namespace pushpull {

/// Row-stochastic pull matrix and column-stochastic push matrix aligned with
/// one graph of the sequence, plus their minimum positive entries.
struct MixingPair {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  double a_min = 0.0;
  double b_min = 0.0;
  int graph_index = 0;
};

enum class VectorLabel { Phi, Pi };

/// Stochastic vector of one of the two absorbing sequences.
struct StochasticVector {
  Eigen::VectorXd entries;
  VectorLabel label = VectorLabel::Pi;
  int index = 0;
};

/// A[i][j] = 1/(|in-neighbors(i)| + 1) for j in in-neighbors(i) or j == i.
Eigen::MatrixXd build_row_stochastic(const Digraph& g);

/// B[j][i] = 1/(|out-neighbors(i)| + 1) for j in out-neighbors(i) or j == i.
Eigen::MatrixXd build_column_stochastic(const Digraph& g);

MixingPair build_mixing_pair(const Digraph& g, int graph_index);
std::vector<MixingPair> build_mixing_sequence(const DigraphSequence& seq);

double min_positive_entry(const Eigen::MatrixXd& m);

/// Forward recursion pi_{k+1} = B_k pi_k from pi_0 = (1/n) 1.
/// Returns pi_0 .. pi_T for T = Bs.size().
std::vector<StochasticVector> pi_sequence(const std::vector<Eigen::MatrixXd>& Bs);

/// Backward recursion phi_k = A_k^T phi_{k+1} from phi_T = terminal, so that
/// phi_{k+1}^T A_k = phi_k^T holds for every step. Returns phi_0 .. phi_T.
std::vector<StochasticVector> phi_sequence(const std::vector<Eigen::MatrixXd>& As,
                                           const Eigen::VectorXd& terminal);

/// Same recursions built directly from a graph sequence with the uniform
/// weighting scheme; matrices are materialized one step at a time.
std::vector<StochasticVector> pi_sequence(const DigraphSequence& seq);
std::vector<StochasticVector> phi_sequence(const DigraphSequence& seq,
                                           const Eigen::VectorXd& terminal);
std::vector<StochasticVector> phi_sequence(const DigraphSequence& seq);  // uniform terminal

/// Debug dump: row-major entries with an {"n", "kind", "k"} header.
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m, const std::string& kind, int k);

}  // namespace pushpull
