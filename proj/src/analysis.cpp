#include "pushpull/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace pushpull {

IterateQuantities quantities(const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_prev,
                             const Eigen::MatrixXd& y, const Eigen::VectorXd& phi_k,
                             const Eigen::VectorXd& pi_k, const Eigen::VectorXd& x_star,
                             int k) {
  const Eigen::Index n = x.rows();
  if (phi_k.size() != n || pi_k.size() != n)
    throw std::invalid_argument("quantities: weight vector size mismatch");
  if (pi_k.minCoeff() <= 0.0)
    throw std::invalid_argument("quantities: pi_k must have positive entries");

  IterateQuantities q;
  q.k = k;

  Eigen::RowVectorXd xhat = phi_k.transpose() * x;
  q.opt_gap = (xhat.transpose() - x_star).norm();

  double d2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    d2 += phi_k(i) * (x.row(i) - xhat).squaredNorm();
  q.consensus_D = std::sqrt(d2);

  q.state_diff = (x - x_prev).norm();

  Eigen::RowVectorXd y_sum = y.colwise().sum();
  double s2 = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    s2 += pi_k(j) * (y.row(j) / pi_k(j) - y_sum).squaredNorm();
  q.tracking_S = std::sqrt(s2);
  return q;
}

StepConstants step_constants(const GraphStats& stats, const Eigen::VectorXd& phi_k,
                             const Eigen::VectorXd& phi_next, const Eigen::VectorXd& pi_k,
                             const Eigen::VectorXd& pi_next, double a, double b) {
  if (stats.n < 2)
    throw std::invalid_argument("step_constants: graph functionals need n >= 2");
  if (a <= 0.0 || a > 1.0 || b <= 0.0 || b > 1.0)
    throw std::invalid_argument("step_constants: a and b must lie in (0, 1]");
  for (const auto* v : {&phi_k, &phi_next, &pi_k, &pi_next})
    if (v->minCoeff() <= 0.0)
      throw std::invalid_argument("step_constants: weight vectors must be positive");

  const double dk = static_cast<double>(stats.diameter) *
                    static_cast<double>(stats.max_edge_utility);
  StepConstants sc;
  sc.r = std::sqrt(static_cast<double>(stats.n)) + 1.0 / std::sqrt(pi_next.minCoeff());
  double c_rad = 1.0 - phi_next.minCoeff() * a * a /
                           (phi_k.maxCoeff() * phi_k.maxCoeff() * dk);
  double tau_rad = 1.0 - pi_k.minCoeff() * pi_k.minCoeff() * b * b /
                             (pi_k.maxCoeff() * pi_k.maxCoeff() * pi_next.maxCoeff() * dk);
  if (c_rad < 0.0 || c_rad >= 1.0)
    throw CertificateViolationError("step_constants: c radicand outside [0, 1)");
  if (tau_rad < 0.0 || tau_rad >= 1.0)
    throw CertificateViolationError("step_constants: tau radicand outside [0, 1)");
  sc.c = std::sqrt(c_rad);
  sc.tau = std::sqrt(tau_rad);
  sc.varphi = std::sqrt(1.0 / phi_k.minCoeff());
  sc.varphi_next = std::sqrt(1.0 / phi_next.minCoeff());
  sc.min_pi = pi_k.minCoeff();
  sc.min_pi_next = pi_next.minCoeff();
  return sc;
}

HorizonBounds horizon_bounds(const std::vector<StepConstants>& steps,
                             const std::vector<StochasticVector>& pi, double alpha, int n,
                             double mu, double L, bool analytic_sigma, double b) {
  if (steps.empty()) throw std::invalid_argument("horizon_bounds: no step constants");
  const double window = 2.0 / (static_cast<double>(n) * (L + mu));
  if (!(alpha > 0.0) || !(alpha < window))
    throw std::invalid_argument(
        "horizon_bounds: alpha must lie in (0, 2/(n(L+mu))) = (0, " +
        std::to_string(window) + ")");

  HorizonBounds bounds;
  for (const auto& sc : steps) {
    bounds.c = std::max(bounds.c, sc.c);
    bounds.tau = std::max(bounds.tau, sc.tau);
    bounds.r = std::max(bounds.r, sc.r);
    bounds.varphi = std::max({bounds.varphi, sc.varphi, sc.varphi_next});
  }
  if (analytic_sigma) {
    if (b <= 0.0 || b > 1.0)
      throw std::invalid_argument("horizon_bounds: analytic sigma needs b in (0, 1]");
    bounds.sigma = std::pow(b, n) / static_cast<double>(n);
  } else {
    double sigma = 1.0;
    for (const auto& v : pi) sigma = std::min(sigma, v.entries.minCoeff());
    bounds.sigma = sigma;
  }
  if (bounds.sigma <= 0.0)
    throw std::invalid_argument("horizon_bounds: sigma must be positive");
  bounds.q_bound = 1.0 - alpha * static_cast<double>(n) * bounds.sigma * mu;
  return bounds;
}

EtaConstants eta_constants(const HorizonBounds& bounds, int n, double mu, double L,
                           double gamma) {
  const double rn = std::sqrt(static_cast<double>(n));
  if (gamma * rn >= 1.0)
    throw std::invalid_argument("eta_constants: gamma * sqrt(n) must be < 1");
  const double c = bounds.c;
  const double tau = bounds.tau;
  const double r = bounds.r;
  const double varphi = bounds.varphi;
  const double nsm = static_cast<double>(n) * bounds.sigma * mu;

  EtaConstants eta;
  eta.eta1 = (1.0 - tau) * (1.0 - c) * nsm;
  eta.eta2 = (1.0 - tau) * (nsm * L * rn * varphi + L * L * n * varphi * varphi);
  eta.eta3 = L * r * ((1.0 + c) * varphi + 1.0 - c) * (nsm + L * rn * varphi);
  eta.eta4 = (1.0 - tau) * ((1.0 + c) * varphi + 1.0 - c);
  eta.eta5 = eta.eta1 * (rn - c) +
             (nsm * (1.0 + c + L * rn) + 2.0 * L * rn * varphi) * eta.eta4;
  eta.eta6 = (1.0 + gamma * c - gamma * rn) * eta.eta2 + (1.0 + gamma) * eta.eta3 +
             L * L * n * varphi * eta.eta4;
  return eta;
}

Eigen::Matrix4d m_matrix(double alpha, double beta, double gamma,
                         const HorizonBounds& bounds, int n, double mu, double L) {
  const double window = 2.0 / (static_cast<double>(n) * (L + mu));
  if (!(alpha > 0.0) || !(alpha < window))
    throw std::invalid_argument("m_matrix: alpha outside (0, 2/(n(L+mu)))");
  const double rn = std::sqrt(static_cast<double>(n));
  const double c = bounds.c;
  const double tau = bounds.tau;
  const double r = bounds.r;
  const double varphi = bounds.varphi;
  const double aLrf = alpha * L * rn * varphi;

  Eigen::Matrix4d M;
  M.row(0) << 1.0 - alpha * static_cast<double>(n) * bounds.sigma * mu, aLrf, alpha,
      beta + gamma * (1.0 + alpha * L * rn);
  M.row(1) << aLrf, c + aLrf, alpha, beta + gamma * (c + alpha * L * rn);
  M.row(3) << aLrf, (c + 1.0) * varphi + aLrf, alpha,
      beta + gamma * rn * (1.0 + alpha * L);
  M.row(2) = L * r * (1.0 + gamma) * M.row(3);
  M(2, 2) += tau;
  M(2, 3) += L * r * gamma;
  return M;
}

Eigen::Matrix4d m_matrix_step(double alpha, double beta, double gamma,
                              const StepConstants& sc, int n, double mu, double L) {
  const double rn = std::sqrt(static_cast<double>(n));
  const double npi = alpha * static_cast<double>(n) * sc.min_pi;
  const double qk = std::max(std::abs(1.0 - npi * mu), std::abs(1.0 - npi * L));
  const double aLrf = alpha * L * rn * sc.varphi;

  Eigen::Matrix4d M;
  M.row(0) << qk, aLrf, alpha, beta + gamma * (1.0 + alpha * L * rn);
  M.row(1) << aLrf, sc.c + aLrf, alpha, beta + gamma * (sc.c + alpha * L * rn);
  M.row(3) << aLrf, sc.c * sc.varphi_next + sc.varphi + aLrf, alpha,
      beta + gamma * rn * (1.0 + alpha * L);
  M.row(2) = L * sc.r * (1.0 + gamma) * M.row(3);
  M(2, 2) += sc.tau;
  M(2, 3) += L * sc.r * gamma;
  return M;
}

double spectral_radius(const Eigen::Matrix4d& M) {
  if (!M.allFinite()) throw std::invalid_argument("spectral_radius: non-finite entries");
  Eigen::EigenSolver<Eigen::Matrix4d> solver(M, /*computeEigenvectors=*/false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

double det3(double a11, double a12, double a13, double a21, double a22, double a23,
            double a31, double a32, double a33) {
  return a11 * (a22 * a33 - a23 * a32) - a12 * (a21 * a33 - a23 * a31) +
         a13 * (a21 * a32 - a22 * a31);
}

}  // namespace

double det_i_minus_m(const Eigen::Matrix4d& M) {
  Eigen::Matrix4d A = Eigen::Matrix4d::Identity() - M;
  double det = 0.0;
  for (int c = 0; c < 4; ++c) {
    int cols[3];
    int idx = 0;
    for (int j = 0; j < 4; ++j)
      if (j != c) cols[idx++] = j;
    double minor = det3(A(1, cols[0]), A(1, cols[1]), A(1, cols[2]), A(2, cols[0]),
                        A(2, cols[1]), A(2, cols[2]), A(3, cols[0]), A(3, cols[1]),
                        A(3, cols[2]));
    det += ((c % 2 == 0) ? 1.0 : -1.0) * A(0, c) * minor;
  }
  return det;
}

ParameterRanges parameter_ranges(const EtaConstants& etas, const HorizonBounds& bounds,
                                 int n, double mu, double L, double alpha, double beta,
                                 double gamma) {
  const double rn = std::sqrt(static_cast<double>(n));
  const double kappa = std::max(beta, gamma);

  ParameterRanges ranges;
  ranges.kappa_max = etas.eta1 / etas.eta5;
  ranges.empty_alpha_range = (etas.eta1 - kappa * etas.eta5) <= 0.0;
  double momentum_term = (etas.eta1 - kappa * etas.eta5) / etas.eta6;
  ranges.alpha_max = std::min({(1.0 - bounds.c) / (L * rn * bounds.varphi),
                               (1.0 - bounds.tau) / (L * bounds.r), momentum_term,
                               2.0 / (static_cast<double>(n) * (L + mu))});
  ranges.momentum_ok = kappa < ranges.kappa_max;
  ranges.linear_ok = beta + gamma * rn < 1.0;
  // The theorem's proof needs the strict versions of these conditions, so the
  // verdict uses strict inequalities throughout.
  ranges.alpha_ok = alpha > 0.0 && alpha < ranges.alpha_max;
  ranges.verdict = ranges.alpha_ok && ranges.momentum_ok && ranges.linear_ok;
  return ranges;
}

Certificate build_certificate(const std::vector<GraphStats>& stats,
                              const std::vector<MixingPair>& mixing,
                              const std::vector<StochasticVector>& phi,
                              const std::vector<StochasticVector>& pi, double mu, double L,
                              double alpha, double beta, double gamma,
                              bool analytic_sigma) {
  if (stats.empty() || mixing.size() != stats.size())
    throw std::invalid_argument("build_certificate: stats/mixing size mismatch");
  if (phi.size() < stats.size() + 1 || pi.size() < stats.size() + 1)
    throw std::invalid_argument("build_certificate: phi/pi must cover horizon plus one");

  Certificate cert;
  cert.n = stats.front().n;
  cert.mu = mu;
  cert.L = L;
  cert.alpha = alpha;
  cert.beta = beta;
  cert.gamma = gamma;
  cert.analytic_sigma = analytic_sigma;
  cert.horizon = static_cast<int>(stats.size());

  cert.a = 1.0;
  cert.b = 1.0;
  for (const auto& mix : mixing) {
    cert.a = std::min(cert.a, mix.a_min);
    cert.b = std::min(cert.b, mix.b_min);
  }

  std::vector<StepConstants> steps;
  steps.reserve(stats.size());
  for (size_t k = 0; k < stats.size(); ++k) {
    StepConstants sc = step_constants(stats[k], phi[k].entries, phi[k + 1].entries,
                                      pi[k].entries, pi[k + 1].entries, cert.a, cert.b);
    sc.k = static_cast<int>(k);
    steps.push_back(sc);
  }
  cert.bounds =
      horizon_bounds(steps, pi, alpha, cert.n, mu, L, analytic_sigma, cert.b);
  cert.M = m_matrix(alpha, beta, gamma, cert.bounds, cert.n, mu, L);
  cert.rho_M = spectral_radius(cert.M);

  if (gamma * std::sqrt(static_cast<double>(cert.n)) < 1.0) {
    cert.etas = eta_constants(cert.bounds, cert.n, mu, L, gamma);
    cert.ranges =
        parameter_ranges(*cert.etas, cert.bounds, cert.n, mu, L, alpha, beta, gamma);
  } else {
    // eta6 is undefined here; the linear constraint already fails.
    cert.ranges.linear_ok = false;
    cert.ranges.verdict = false;
    cert.ranges.alpha_max = std::min(
        {(1.0 - cert.bounds.c) / (L * std::sqrt(static_cast<double>(cert.n)) *
                                  cert.bounds.varphi),
         (1.0 - cert.bounds.tau) / (L * cert.bounds.r),
         2.0 / (static_cast<double>(cert.n) * (L + mu))});
  }
  return cert;
}

nlohmann::json certificate_to_json(const Certificate& cert) {
  nlohmann::json j{{"n", cert.n},
                   {"a", cert.a},
                   {"b", cert.b},
                   {"mu", cert.mu},
                   {"L", cert.L},
                   {"alpha", cert.alpha},
                   {"beta", cert.beta},
                   {"gamma", cert.gamma},
                   {"c", cert.bounds.c},
                   {"tau", cert.bounds.tau},
                   {"r", cert.bounds.r},
                   {"varphi", cert.bounds.varphi},
                   {"sigma", cert.bounds.sigma},
                   {"q_bound", cert.bounds.q_bound},
                   {"rho_M", cert.rho_M},
                   {"alpha_max", cert.ranges.alpha_max},
                   {"verdict", cert.ranges.verdict},
                   {"empty_alpha_range", cert.ranges.empty_alpha_range},
                   {"linear_constraint_ok", cert.ranges.linear_ok},
                   {"sigma_source", cert.analytic_sigma ? "analytic" : "measured"},
                   {"horizon", cert.horizon}};
  if (cert.etas) {
    j["eta1"] = cert.etas->eta1;
    j["eta2"] = cert.etas->eta2;
    j["eta3"] = cert.etas->eta3;
    j["eta4"] = cert.etas->eta4;
    j["eta5"] = cert.etas->eta5;
    j["eta6"] = cert.etas->eta6;
    j["kappa_max"] = cert.ranges.kappa_max;
  } else {
    j["eta_note"] = "gamma*sqrt(n) >= 1: eta6 undefined";
  }
  Eigen::Matrix4d M = cert.M;
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < 4; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < 4; ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  j["M"] = std::move(rows);
  return j;
}

PropositionReport verify_propositions(const RunRecord& record,
                                      const std::vector<GraphStats>& stats,
                                      const std::vector<StochasticVector>& phi,
                                      const std::vector<StochasticVector>& pi, double a,
                                      double b, double alpha, double beta, double gamma,
                                      double mu, double L, const Eigen::VectorXd& x_star) {
  if (record.history.empty())
    throw std::invalid_argument("verify_propositions: run history not retained");
  if (record.config.log_stride != 1)
    throw std::invalid_argument("verify_propositions: requires stride-1 logging");
  const size_t K = record.history.size() - 1;
  if (stats.size() < K || phi.size() < K + 1 || pi.size() < K + 1)
    throw std::invalid_argument("verify_propositions: stats/phi/pi too short");

  const int n = static_cast<int>(record.history.front().x.rows());
  const double rn = std::sqrt(static_cast<double>(n));
  constexpr double kRelTol = 1e-9;

  PropositionReport report;
  report.min_slack = std::numeric_limits<double>::infinity();

  auto vq = [&](size_t k) {
    const AgentSwarm& sw = record.history[k];
    return quantities(sw.x, sw.x_prev, sw.y, phi[k].entries, pi[k].entries, x_star,
                      static_cast<int>(k));
  };

  IterateQuantities cur = vq(0);
  for (size_t k = 0; k < K; ++k) {
    IterateQuantities next = vq(k + 1);
    StepConstants sc = step_constants(stats[k], phi[k].entries, phi[k + 1].entries,
                                      pi[k].entries, pi[k + 1].entries, a, b);
    sc.k = static_cast<int>(k);

    PropositionSlack slack;
    slack.k = static_cast<int>(k);

    auto margin = [&](double lhs, double rhs) {
      double m = (rhs - lhs) / std::max(1.0, rhs);
      report.min_slack = std::min(report.min_slack, m);
      if (m < -kRelTol) {
        ++report.violations;
        report.max_violation = std::max(report.max_violation, -m);
      }
      return m;
    };

    const double window = 2.0 / (static_cast<double>(n) * sc.min_pi * L);
    slack.p1_skipped = !(alpha > 0.0 && alpha < window);
    if (slack.p1_skipped) {
      slack.skip_reason = "alpha outside (0, 2/(n min(pi_k) L))";
      ++report.skipped;
    } else {
      const double npi = alpha * static_cast<double>(n) * sc.min_pi;
      const double qk = std::max(std::abs(1.0 - npi * mu), std::abs(1.0 - npi * L));
      double rhs1 = qk * cur.opt_gap + alpha * L * rn * sc.varphi * cur.consensus_D +
                    alpha * cur.tracking_S +
                    (beta + (1.0 + alpha * L * rn) * gamma) * cur.state_diff;
      slack.p1 = margin(next.opt_gap, rhs1);
    }

    double rhs2 = (sc.c + alpha * L * rn * sc.varphi) * cur.consensus_D +
                  alpha * cur.tracking_S + alpha * L * rn * sc.varphi * cur.opt_gap +
                  (beta + gamma * (sc.c + alpha * L * rn)) * cur.state_diff;
    slack.p2 = margin(next.consensus_D, rhs2);

    double rhs3 = (beta + gamma * rn * (1.0 + alpha * L)) * cur.state_diff +
                  alpha * cur.tracking_S + alpha * L * rn * sc.varphi * cur.opt_gap +
                  (sc.c * sc.varphi_next + sc.varphi + alpha * L * rn * sc.varphi) *
                      cur.consensus_D;
    slack.p3 = margin(next.state_diff, rhs3);

    double rhs4 = sc.tau * cur.tracking_S + L * sc.r * (1.0 + gamma) * next.state_diff +
                  L * sc.r * gamma * cur.state_diff;
    slack.p4 = margin(next.tracking_S, rhs4);

    // Stacked inequality V_{k+1} <= M_k V_k; row 1 shares the P1 window.
    Eigen::Matrix4d Mk = m_matrix_step(alpha, beta, gamma, sc, n, mu, L);
    Eigen::Vector4d Vk(cur.opt_gap, cur.consensus_D, cur.tracking_S, cur.state_diff);
    Eigen::Vector4d Vn(next.opt_gap, next.consensus_D, next.tracking_S, next.state_diff);
    Eigen::Vector4d rhs = Mk * Vk;
    slack.p5 = std::numeric_limits<double>::infinity();
    for (int row = slack.p1_skipped ? 1 : 0; row < 4; ++row)
      slack.p5 = std::min(slack.p5, margin(Vn(row), rhs(row)));

    report.slacks.push_back(std::move(slack));
    ++report.checked;
    cur = next;
  }
  if (report.slacks.empty()) report.min_slack = 0.0;
  return report;
}

void write_slacks_csv(std::ostream& out, const PropositionReport& report) {
  out << "k,p1_slack,p2_slack,p3_slack,p4_slack,p5_slack,p1_skipped\n";
  out.precision(17);
  for (const auto& s : report.slacks)
    out << s.k << ',' << s.p1 << ',' << s.p2 << ',' << s.p3 << ',' << s.p4 << ','
        << s.p5 << ',' << (s.p1_skipped ? 1 : 0) << '\n';
}

RateFit fit_linear_rate(const std::vector<double>& residuals) {
  std::vector<double> series;
  for (double r : residuals) {
    if (r <= 0.0) break;
    series.push_back(r);
  }
  if (series.size() < 10)
    throw std::invalid_argument("fit_linear_rate: need at least 10 positive entries");

  const size_t start = series.size() / 2;
  const size_t m = series.size() - start;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = start; i < series.size(); ++i) {
    double xi = static_cast<double>(i);
    double yi = std::log(series[i]);
    sx += xi;
    sy += yi;
    sxx += xi * xi;
    sxy += xi * yi;
  }
  const double denom = static_cast<double>(m) * sxx - sx * sx;
  const double slope = (static_cast<double>(m) * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / static_cast<double>(m);

  double ss_res = 0.0, ss_tot = 0.0;
  const double mean_y = sy / static_cast<double>(m);
  for (size_t i = start; i < series.size(); ++i) {
    double yi = std::log(series[i]);
    double fit = intercept + slope * static_cast<double>(i);
    ss_res += (yi - fit) * (yi - fit);
    ss_tot += (yi - mean_y) * (yi - mean_y);
  }
  RateFit out;
  out.rho_hat = std::exp(slope);
  out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return out;
}

}  // namespace pushpull
