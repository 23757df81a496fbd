#include <doctest.h>

#include <random>

#include "pushpull/solver.hpp"

using namespace pushpull;

namespace {

// One-agent quadratic f(x) = 0.5 x^T Q x - c^T x with random SPD Q.
class QuadraticOracle : public AgentOracle {
 public:
  QuadraticOracle(Eigen::MatrixXd Q, Eigen::VectorXd c) : Q_(std::move(Q)), c_(std::move(c)) {}
  int dimension() const override { return static_cast<int>(c_.size()); }
  double evaluate(const Eigen::VectorXd& x) const override {
    return 0.5 * x.dot(Q_ * x) - c_.dot(x);
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override { return Q_ * x - c_; }
  double lipschitz() const override {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Q_).eigenvalues().maxCoeff();
  }

 private:
  Eigen::MatrixXd Q_;
  Eigen::VectorXd c_;
};

ProblemSet random_quadratic(int p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd G(p, p);
  Eigen::VectorXd c(p);
  for (int i = 0; i < p; ++i) {
    c(i) = normal(rng);
    for (int j = 0; j < p; ++j) G(i, j) = normal(rng);
  }
  Eigen::MatrixXd Q = G.transpose() * G + Eigen::MatrixXd::Identity(p, p);
  ProblemSet problem;
  problem.oracles.push_back(std::make_shared<QuadraticOracle>(Q, c));
  problem.dimension = p;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
  problem.global_L = es.eigenvalues().maxCoeff();
  problem.global_mu = es.eigenvalues().minCoeff();
  problem.reference_optimum = Q.ldlt().solve(c);
  return problem;
}

// n = 1 mixing: A = B = [1].
MixingPair identity_mixing() {
  MixingPair mix;
  mix.A = Eigen::MatrixXd::Ones(1, 1);
  mix.B = Eigen::MatrixXd::Ones(1, 1);
  mix.a_min = 1.0;
  mix.b_min = 1.0;
  return mix;
}

}  // namespace

TEST_CASE("init ties s to x and seeds trackers with gradients") {
  ProblemSet problem = random_quadratic(3, 5);
  Eigen::MatrixXd x0 = Eigen::MatrixXd::Random(1, 3);
  AgentSwarm swarm = init(problem, x0, x0);
  CHECK((swarm.s - swarm.x).norm() == 0.0);
  CHECK((swarm.y.row(0).transpose() - problem.oracles[0]->gradient(x0.row(0))).norm() ==
        0.0);
  CHECK(swarm.k == 0);
  CHECK_THROWS_AS(init(problem, Eigen::MatrixXd::Zero(2, 3), Eigen::MatrixXd::Zero(2, 3)),
                  std::invalid_argument);
}

TEST_CASE("n=1 trajectories match the centralized recursions to 1e-12") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ProblemSet problem = random_quadratic(4, seed);
    const auto grad = [&](const Eigen::VectorXd& v) {
      return problem.oracles[0]->gradient(v);
    };
    const double alpha = 0.8 / problem.global_L;

    struct ModeParams {
      double beta, gamma;
    };
    for (ModeParams mp : {ModeParams{0.0, 0.0}, ModeParams{0.3, 0.0}, ModeParams{0.0, 0.3},
                          ModeParams{0.3, 0.2}}) {
      SolverConfig cfg;
      cfg.alpha = alpha;
      cfg.beta = mp.beta;
      cfg.gamma = mp.gamma;

      Eigen::VectorXd x = Eigen::VectorXd::Zero(4), x_prev = x, s = x;
      AgentSwarm swarm = init(problem, x.transpose(), x_prev.transpose());
      MixingPair mix = identity_mixing();
      for (int k = 0; k < 100; ++k) {
        swarm = step(swarm, mix, cfg, problem);
        // centralized accelerated recursion, independently assembled
        Eigen::VectorXd x_next = s - alpha * grad(s) + mp.beta * (x - x_prev);
        Eigen::VectorXd s_next = x_next + mp.gamma * (x_next - x);
        x_prev = x;
        x = x_next;
        s = s_next;
        CHECK((swarm.x.row(0).transpose() - x).lpNorm<Eigen::Infinity>() <= 1e-12);
        CHECK((swarm.s.row(0).transpose() - s).lpNorm<Eigen::Infinity>() <= 1e-12);
      }
    }
  }
}

TEST_CASE("n=1 plain mode contracts by exactly q(alpha) on a quadratic") {
  // scalar f(x) = 0.5 L x^2 combined with mu-curvature coordinate
  Eigen::MatrixXd Q(2, 2);
  Q << 2.0, 0.0, 0.0, 0.5;  // L = 2, mu = 0.5
  ProblemSet problem;
  problem.oracles.push_back(std::make_shared<QuadraticOracle>(Q, Eigen::VectorXd::Zero(2)));
  problem.dimension = 2;
  const double alpha = 0.5;  // 1/L
  const double q = std::max(std::abs(1 - alpha * 0.5), std::abs(1 - alpha * 2.0));

  SolverConfig cfg;
  cfg.alpha = alpha;
  Eigen::MatrixXd x0(1, 2);
  x0 << 1.0, 1.0;
  AgentSwarm swarm = init(problem, x0, x0);
  double err = std::abs(swarm.x(0, 1));
  for (int k = 0; k < 20; ++k) {
    swarm = step(swarm, identity_mixing(), cfg, problem);
    // per-coordinate contraction (1 - alpha q_i); the max-rate coordinate
    // dominates, so after each step the error is exactly q^k on it
    CHECK(std::abs(swarm.x(0, 1)) == doctest::Approx(err * q).epsilon(1e-12));
    err *= q;
  }
}

TEST_CASE("3-agent step equals hand-assembled matrix arithmetic") {
  ProblemSet problem = ridge_problem(3, 2, 2, 0.1, 0.3, 14);
  DigraphSequence seq = generate_sequence(3, 1, 0.5, 9);
  MixingPair mix = build_mixing_pair(seq.graphs[0], 0);

  SolverConfig cfg;
  cfg.alpha = 0.05;
  cfg.beta = 0.4;
  cfg.gamma = 0.2;

  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x0(3, 2), xm1(3, 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) {
      x0(i, j) = normal(rng);
      xm1(i, j) = normal(rng);
    }

  AgentSwarm swarm = init(problem, x0, xm1);
  AgentSwarm next = step(swarm, mix, cfg, problem);

  // straight-line recomputation of the three update formulas
  Eigen::MatrixXd grad0(3, 2);
  for (int i = 0; i < 3; ++i)
    grad0.row(i) = problem.oracles[static_cast<size_t>(i)]->gradient(x0.row(i));
  Eigen::MatrixXd x1 = mix.A * x0 - cfg.alpha * grad0 + cfg.beta * (x0 - xm1);
  Eigen::MatrixXd s1 = x1 + cfg.gamma * (x1 - x0);
  Eigen::MatrixXd grad1(3, 2);
  for (int i = 0; i < 3; ++i)
    grad1.row(i) = problem.oracles[static_cast<size_t>(i)]->gradient(s1.row(i));
  Eigen::MatrixXd y1 = mix.B * grad0 + grad1 - grad0;

  CHECK((next.x - x1).norm() <= 1e-14);
  CHECK((next.s - s1).norm() <= 1e-14);
  CHECK((next.y - y1).norm() <= 1e-14);
}

TEST_CASE("gamma = 0 keeps s identical to x after every step") {
  ProblemSet problem = ridge_problem(4, 3, 2, 0.1, 0.2, 20);
  DigraphSequence seq = generate_sequence(4, 10, 0.4, 6);
  SolverConfig cfg;
  cfg.alpha = 0.05;
  cfg.beta = 0.3;
  AgentSwarm swarm = init(problem, Eigen::MatrixXd::Zero(4, 3), Eigen::MatrixXd::Zero(4, 3));
  for (int k = 0; k < 10; ++k) {
    swarm = step(swarm, build_mixing_pair(seq.graphs[static_cast<size_t>(k)], k), cfg,
                 problem);
    CHECK((swarm.s - swarm.x).norm() == 0.0);
  }
}

TEST_CASE("alpha = 0 freezes a consensual plain-mode start") {
  // step() itself places no lower bound on alpha; pure averaging holds a
  // consensual state fixed
  ProblemSet problem = ridge_problem(3, 2, 2, 0.1, 0.3, 2);
  DigraphSequence seq = generate_sequence(3, 5, 0.4, 4);
  SolverConfig cfg;
  cfg.alpha = 0.0;
  Eigen::MatrixXd x0 = Eigen::MatrixXd::Ones(3, 2);
  AgentSwarm swarm = init(problem, x0, x0);
  for (int k = 0; k < 5; ++k) {
    swarm = step(swarm, build_mixing_pair(seq.graphs[static_cast<size_t>(k)], k), cfg,
                 problem);
    CHECK((swarm.x - x0).norm() <= 1e-14);
  }
}

TEST_CASE("run is bitwise deterministic") {
  ProblemSet problem = ridge_problem(5, 3, 2, 0.1, 0.4, 8);
  DigraphSequence seq = generate_sequence(5, 300, 0.4, 12);
  auto phi = phi_sequence(seq);
  auto pi = pi_sequence(seq);
  SolverConfig cfg;
  cfg.alpha = 0.05;
  cfg.beta = 0.3;
  cfg.gamma = 0.05;
  cfg.max_iters = 300;
  cfg.stop_tolerance = 1e-9;
  Eigen::MatrixXd x0 = Eigen::MatrixXd::Zero(5, 3);

  RunRecord a = run(problem, seq, cfg, phi, pi, problem.reference_optimum, x0, x0);
  RunRecord b = run(problem, seq, cfg, phi, pi, problem.reference_optimum, x0, x0);
  REQUIRE(a.rows.size() == b.rows.size());
  for (size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].residual == b.rows[i].residual);
    CHECK(a.rows[i].tracking_S == b.rows[i].tracking_S);
  }
  CHECK((a.final_x - b.final_x).norm() == 0.0);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("trajectories are equivariant under agent relabeling") {
  const int n = 4, p = 2;
  ProblemSet problem = ridge_problem(n, p, 2, 0.1, 0.3, 30);
  DigraphSequence seq = generate_sequence(n, 20, 0.4, 31);
  std::vector<int> perm{2, 0, 3, 1};

  ProblemSet permuted;
  permuted.dimension = p;
  permuted.global_L = problem.global_L;
  permuted.global_mu = problem.global_mu;
  for (int i = 0; i < n; ++i)
    permuted.oracles.push_back(problem.oracles[static_cast<size_t>(perm[static_cast<size_t>(i)])]);

  DigraphSequence perm_seq;
  perm_seq.n = n;
  std::vector<int> inv(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) inv[static_cast<size_t>(perm[static_cast<size_t>(i)])] = i;
  for (const auto& g : seq.graphs) {
    std::vector<std::pair<int, int>> edges;
    for (auto [u, v] : g.edges)
      edges.emplace_back(inv[static_cast<size_t>(u)], inv[static_cast<size_t>(v)]);
    perm_seq.graphs.push_back(Digraph::from_edges(n, std::move(edges)));
  }

  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x0(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) x0(i, j) = normal(rng);
  Eigen::MatrixXd x0_perm(n, p);
  for (int i = 0; i < n; ++i) x0_perm.row(i) = x0.row(perm[static_cast<size_t>(i)]);

  SolverConfig cfg;
  cfg.alpha = 0.05;
  cfg.beta = 0.2;
  cfg.gamma = 0.1;

  AgentSwarm a = init(problem, x0, x0);
  AgentSwarm b = init(permuted, x0_perm, x0_perm);
  for (int k = 0; k < 20; ++k) {
    a = step(a, build_mixing_pair(seq.graphs[static_cast<size_t>(k)], k), cfg, problem);
    b = step(b, build_mixing_pair(perm_seq.graphs[static_cast<size_t>(k)], k), cfg,
             permuted);
    // permuting agents reorders the mixing sums, so only float-level equality
    for (int i = 0; i < n; ++i)
      CHECK((b.x.row(i) - a.x.row(perm[static_cast<size_t>(i)])).norm() <= 1e-12);
  }
}

TEST_CASE("wildly large steps fail loudly with the iteration index") {
  ProblemSet problem = random_quadratic(3, 77);
  SolverConfig cfg;
  cfg.alpha = 1e150;
  cfg.beta = 1e150;
  AgentSwarm swarm = init(problem, Eigen::MatrixXd::Ones(1, 3), Eigen::MatrixXd::Zero(1, 3));
  MixingPair mix = identity_mixing();
  CHECK_THROWS_AS(
      [&] {
        for (int k = 0; k < 1000; ++k) swarm = step(swarm, mix, cfg, problem);
      }(),
      DivergenceError);
}

TEST_CASE("run statuses: converged, max-iters, truncated") {
  ProblemSet problem = ridge_problem(4, 2, 2, 0.1, 0.3, 40);
  DigraphSequence seq = generate_sequence(4, 500, 0.4, 41);
  auto phi = phi_sequence(seq);
  auto pi = pi_sequence(seq);
  Eigen::MatrixXd x0 = Eigen::MatrixXd::Zero(4, 2);

  SolverConfig cfg;
  cfg.alpha = 0.1;
  cfg.max_iters = 500;
  cfg.stop_tolerance = 1e-8;
  RunRecord conv = run(problem, seq, cfg, phi, pi, problem.reference_optimum, x0, x0);
  CHECK(conv.status == RunStatus::Converged);
  CHECK(conv.iterations > 0);

  cfg.stop_tolerance = 0.0;  // disabled
  cfg.max_iters = 50;
  RunRecord maxed = run(problem, seq, cfg, phi, pi, problem.reference_optimum, x0, x0);
  CHECK(maxed.status == RunStatus::MaxIters);
  CHECK(maxed.iterations == 50);

  DigraphSequence shorter = generate_sequence(4, 20, 0.4, 41);
  auto phi_s = phi_sequence(shorter);
  auto pi_s = pi_sequence(shorter);
  RunRecord trunc = run(problem, shorter, cfg, phi_s, pi_s, problem.reference_optimum, x0, x0);
  CHECK(trunc.status == RunStatus::Truncated);
  CHECK(trunc.iterations == 20);
}

TEST_CASE("log stride keeps first and last rows") {
  ProblemSet problem = ridge_problem(3, 2, 2, 0.1, 0.3, 50);
  DigraphSequence seq = generate_sequence(3, 105, 0.4, 51);
  auto phi = phi_sequence(seq);
  auto pi = pi_sequence(seq);
  SolverConfig cfg;
  cfg.alpha = 0.05;
  cfg.max_iters = 105;
  cfg.stop_tolerance = 0.0;
  cfg.log_stride = 10;
  Eigen::MatrixXd x0 = Eigen::MatrixXd::Zero(3, 2);
  RunRecord rec = run(problem, seq, cfg, phi, pi, problem.reference_optimum, x0, x0);
  REQUIRE(!rec.rows.empty());
  CHECK(rec.rows.front().k == 0);
  CHECK(rec.rows.back().k == 105);
  for (size_t i = 0; i + 1 < rec.rows.size(); ++i)
    CHECK(rec.rows[i].k % 10 == 0);
}

TEST_CASE("config validation rejects out-of-range fields") {
  SolverConfig cfg;
  cfg.alpha = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.alpha = 0.1;
  cfg.beta = -0.1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.beta = 0.0;
  cfg.max_iters = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.max_iters = 10;
  cfg.log_stride = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("mode labels derive from the momentum coefficients") {
  SolverConfig cfg;
  CHECK(cfg.mode() == SolverMode::Plain);
  cfg.beta = 0.1;
  CHECK(cfg.mode() == SolverMode::HeavyBall);
  cfg.beta = 0.0;
  cfg.gamma = 0.1;
  CHECK(cfg.mode() == SolverMode::Nesterov);
  cfg.beta = 0.1;
  CHECK(cfg.mode() == SolverMode::Combined);
  CHECK(to_string(SolverMode::Combined) == "combined");
}
