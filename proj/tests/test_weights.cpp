#include <doctest.h>

#include "pushpull/weights.hpp"

using namespace pushpull;

namespace {
constexpr double kTol = 1e-12;
}

TEST_CASE("single node mixing matrices are [1]") {
  Digraph g = Digraph::from_edges(1, {});
  CHECK(build_row_stochastic(g)(0, 0) == doctest::Approx(1.0));
  CHECK(build_column_stochastic(g)(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("row matrix support matches in-neighborhoods with uniform weights") {
  DigraphSequence seq = generate_sequence(6, 10, 0.4, 21);
  for (const auto& g : seq.graphs) {
    Eigen::MatrixXd A = build_row_stochastic(g);
    auto in_adj = g.in_adjacency();
    for (int i = 0; i < g.n; ++i) {
      CHECK(A.row(i).sum() == doctest::Approx(1.0).epsilon(kTol));
      double w = 1.0 / (static_cast<double>(in_adj[static_cast<size_t>(i)].size()) + 1.0);
      CHECK(A(i, i) == doctest::Approx(w));
      for (int j = 0; j < g.n; ++j) {
        if (j == i) continue;
        if (g.has_edge(j, i))
          CHECK(A(i, j) == doctest::Approx(w));
        else
          CHECK(A(i, j) == 0.0);
      }
    }
  }
}

TEST_CASE("column matrix support matches out-neighborhoods with uniform weights") {
  DigraphSequence seq = generate_sequence(6, 10, 0.4, 22);
  for (const auto& g : seq.graphs) {
    Eigen::MatrixXd B = build_column_stochastic(g);
    auto out_adj = g.out_adjacency();
    for (int i = 0; i < g.n; ++i) {
      CHECK(B.col(i).sum() == doctest::Approx(1.0).epsilon(kTol));
      double w = 1.0 / (static_cast<double>(out_adj[static_cast<size_t>(i)].size()) + 1.0);
      CHECK(B(i, i) == doctest::Approx(w));
      for (int j = 0; j < g.n; ++j) {
        if (j == i) continue;
        if (g.has_edge(i, j))
          CHECK(B(j, i) == doctest::Approx(w));
        else
          CHECK(B(j, i) == 0.0);
      }
    }
  }
}

TEST_CASE("identity matrices are fixed points of both recursions") {
  std::vector<Eigen::MatrixXd> eyes(5, Eigen::MatrixXd::Identity(4, 4));
  auto pis = pi_sequence(eyes);
  REQUIRE(pis.size() == 6);
  for (const auto& pi : pis)
    CHECK((pi.entries.array() - 0.25).abs().maxCoeff() < kTol);

  Eigen::VectorXd terminal(4);
  terminal << 0.1, 0.2, 0.3, 0.4;
  auto phis = phi_sequence(eyes, terminal);
  REQUIRE(phis.size() == 6);
  for (const auto& phi : phis) CHECK((phi.entries - terminal).norm() < kTol);
}

TEST_CASE("recursion identities hold along random sequences") {
  DigraphSequence seq = generate_sequence(7, 30, 0.3, 31);
  auto mixing = build_mixing_sequence(seq);
  std::vector<Eigen::MatrixXd> As, Bs;
  for (const auto& mix : mixing) {
    As.push_back(mix.A);
    Bs.push_back(mix.B);
  }
  auto pis = pi_sequence(Bs);
  auto phis = phi_sequence(As, Eigen::VectorXd::Constant(7, 1.0 / 7.0));
  REQUIRE(pis.size() == 31);
  REQUIRE(phis.size() == 31);
  for (size_t k = 0; k < 30; ++k) {
    CHECK((pis[k + 1].entries - Bs[k] * pis[k].entries).norm() < kTol);
    // phi_{k+1}^T A_k = phi_k^T
    CHECK((As[k].transpose() * phis[k + 1].entries - phis[k].entries).norm() < kTol);
    CHECK(pis[k].entries.sum() == doctest::Approx(1.0).epsilon(kTol));
    CHECK(phis[k].entries.sum() == doctest::Approx(1.0).epsilon(kTol));
    CHECK(pis[k].entries.minCoeff() > 0.0);
    CHECK(phis[k].entries.minCoeff() > 0.0);
  }
}

TEST_CASE("graph-sequence overloads agree with the matrix versions") {
  DigraphSequence seq = generate_sequence(5, 20, 0.5, 17);
  auto mixing = build_mixing_sequence(seq);
  std::vector<Eigen::MatrixXd> As, Bs;
  for (const auto& mix : mixing) {
    As.push_back(mix.A);
    Bs.push_back(mix.B);
  }
  auto pis_direct = pi_sequence(seq);
  auto pis_matrix = pi_sequence(Bs);
  auto phis_direct = phi_sequence(seq);
  auto phis_matrix = phi_sequence(As, Eigen::VectorXd::Constant(5, 0.2));
  REQUIRE(pis_direct.size() == pis_matrix.size());
  REQUIRE(phis_direct.size() == phis_matrix.size());
  for (size_t k = 0; k < pis_direct.size(); ++k) {
    CHECK((pis_direct[k].entries - pis_matrix[k].entries).norm() == 0.0);
    CHECK((phis_direct[k].entries - phis_matrix[k].entries).norm() == 0.0);
  }
}

TEST_CASE("absorbing-vector lower bounds hold for n up to 8") {
  // every entry of phi_k and pi_k stays above a^n/n and b^n/n respectively
  for (int n : {2, 4, 8}) {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
      DigraphSequence seq = generate_sequence(n, 50, 0.3, seed);
      auto mixing = build_mixing_sequence(seq);
      double a = 1.0, b = 1.0;
      for (const auto& mix : mixing) {
        a = std::min(a, mix.a_min);
        b = std::min(b, mix.b_min);
      }
      double phi_floor = std::pow(a, n) / n;
      double pi_floor = std::pow(b, n) / n;
      for (const auto& phi : phi_sequence(seq))
        CHECK(phi.entries.minCoeff() >= phi_floor - kTol);
      for (const auto& pi : pi_sequence(seq))
        CHECK(pi.entries.minCoeff() >= pi_floor - kTol);
    }
  }
}

TEST_CASE("stochasticity validation rejects bad matrices") {
  Eigen::MatrixXd bad = Eigen::MatrixXd::Constant(3, 3, 0.4);
  CHECK_THROWS_AS(pi_sequence(std::vector<Eigen::MatrixXd>{bad}), InvalidMatrixError);
  CHECK_THROWS_AS(phi_sequence(std::vector<Eigen::MatrixXd>{bad},
                               Eigen::VectorXd::Constant(3, 1.0 / 3.0)),
                  InvalidMatrixError);
  // row-stochastic but not column-stochastic
  Eigen::MatrixXd rs(2, 2);
  rs << 1.0, 0.0, 0.6, 0.4;
  CHECK_THROWS_AS(pi_sequence(std::vector<Eigen::MatrixXd>{rs}), InvalidMatrixError);
  CHECK_NOTHROW(phi_sequence(std::vector<Eigen::MatrixXd>{rs},
                             Eigen::VectorXd::Constant(2, 0.5)));
  Eigen::VectorXd bad_terminal(2);
  bad_terminal << 0.7, 0.6;
  CHECK_THROWS_AS(phi_sequence(std::vector<Eigen::MatrixXd>{rs}, bad_terminal),
                  std::invalid_argument);
}

TEST_CASE("min_positive_entry ignores zeros") {
  Eigen::MatrixXd m(2, 2);
  m << 0.0, 0.5, 0.25, 0.0;
  CHECK(min_positive_entry(m) == doctest::Approx(0.25));
}
