#include "pushpull/runner.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

namespace pushpull {

namespace fs = std::filesystem;

namespace {

fs::path output_dir(const RunConfig& cfg, const GlobalOpts& opts) {
  fs::path dir = opts.out_dir.empty() ? cfg.output_dir : opts.out_dir;
  fs::create_directories(dir);
  return dir;
}

Dataset slice_rows(const Dataset& data, int first, int count) {
  Dataset out;
  out.features = data.features.middleRows(first, count);
  out.labels = data.labels.segment(first, count);
  return out;
}

std::vector<GraphStats> stats_sequence(const DigraphSequence& graphs) {
  std::vector<GraphStats> stats;
  stats.reserve(graphs.graphs.size());
  for (const auto& g : graphs.graphs) stats.push_back(graph_stats(g));
  return stats;
}

int status_exit_code(RunStatus status) {
  return status == RunStatus::Converged ? 0 : 2;
}

}  // namespace

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
    if (!out) throw std::runtime_error("short write to " + tmp);
  }
  fs::rename(tmp, path);
}

PreparedRun prepare(const RunConfig& cfg) {
  cfg.validate();
  PreparedRun prep;
  prep.cfg = cfg;

  if (cfg.problem.kind == "ridge") {
    prep.problem = ridge_problem(cfg.network.n, cfg.problem.p, cfg.problem.s,
                                 cfg.problem.lambda, cfg.problem.noise_sigma,
                                 cfg.problem.seed);
  } else {
    Dataset full = load_csv(resolve_dataset_path(cfg.problem.dataset), cfg.problem.schema);
    const int needed = cfg.problem.train_rows + cfg.problem.test_rows;
    if (full.features.rows() < needed)
      throw ConfigError("config: dataset has " + std::to_string(full.features.rows()) +
                        " usable rows, need " + std::to_string(needed));
    Dataset train = slice_rows(full, 0, cfg.problem.train_rows);
    prep.problem = logistic_problem(train, cfg.network.n, cfg.problem.lambda);
    if (cfg.problem.test_rows > 0)
      prep.test_set = slice_rows(full, cfg.problem.train_rows, cfg.problem.test_rows);
  }

  const int horizon = std::min(cfg.network.horizon, cfg.solver.max_iters);
  prep.graphs = generate_sequence(cfg.network.n, horizon, cfg.network.extra_edge_prob,
                                  cfg.network.seed);
  prep.phi = phi_sequence(prep.graphs);
  prep.pi = pi_sequence(prep.graphs);
  prep.x0 = Eigen::MatrixXd::Zero(cfg.network.n, prep.problem.dimension);
  prep.x_prev = prep.x0;
  return prep;
}

int cmd_run(const RunConfig& cfg, const GlobalOpts& opts) {
  PreparedRun prep = prepare(cfg);
  const fs::path dir = output_dir(cfg, opts);

  SolverConfig solver = cfg.solver;
  solver.keep_history = cfg.analysis.verify_propositions;

  RunRecord record = run(prep.problem, prep.graphs, solver, prep.phi, prep.pi,
                         prep.problem.reference_optimum, prep.x0, prep.x_prev);

  {
    std::ostringstream csv;
    write_run_csv(csv, record);
    write_text_atomic((dir / "run.csv").string(), csv.str());
  }

  nlohmann::json summary = run_summary_json(record);
  summary["problem"] = {{"kind", cfg.problem.kind},
                        {"n", cfg.network.n},
                        {"dimension", prep.problem.dimension},
                        {"L", prep.problem.global_L},
                        {"mu", prep.problem.global_mu}};
  if (!cfg.problem.preset.empty()) summary["problem"]["preset"] = cfg.problem.preset;
  if (prep.test_set) {
    Eigen::VectorXd mean = record.final_x.colwise().mean();
    summary["accuracy"] = classification_accuracy(*prep.test_set, mean);
  }

  std::vector<GraphStats> stats;
  std::vector<MixingPair> mixing;
  if (cfg.analysis.certificate || cfg.analysis.verify_propositions) {
    stats = stats_sequence(prep.graphs);
    mixing = build_mixing_sequence(prep.graphs);
  }

  if (cfg.analysis.certificate) {
    Certificate cert = build_certificate(stats, mixing, prep.phi, prep.pi,
                                         prep.problem.global_mu, prep.problem.global_L,
                                         solver.alpha, solver.beta, solver.gamma,
                                         cfg.analysis.analytic_sigma);
    write_text_atomic((dir / "certificate.json").string(),
                      certificate_to_json(cert).dump(2) + "\n");
    summary["certificate_verdict"] = cert.ranges.verdict;
  }

  if (cfg.analysis.verify_propositions) {
    double a = 1.0, b = 1.0;
    for (const auto& mix : mixing) {
      a = std::min(a, mix.a_min);
      b = std::min(b, mix.b_min);
    }
    PropositionReport report = verify_propositions(
        record, stats, prep.phi, prep.pi, a, b, solver.alpha, solver.beta, solver.gamma,
        prep.problem.global_mu, prep.problem.global_L, prep.problem.reference_optimum);
    std::ostringstream csv;
    write_slacks_csv(csv, report);
    write_text_atomic((dir / "slacks.csv").string(), csv.str());
    summary["propositions"] = {{"checked", report.checked},
                               {"skipped", report.skipped},
                               {"violations", report.violations},
                               {"max_violation", report.max_violation},
                               {"min_slack", report.min_slack}};
  }

  write_text_atomic((dir / "summary.json").string(), summary.dump(2) + "\n");

  if (!opts.quiet)
    std::cout << "run: " << to_string(record.status) << " after " << record.iterations
              << " iterations, final residual " << record.final_residual << "\n";
  return status_exit_code(record.status);
}

namespace {

struct CompareEntry {
  std::string label;
  SolverConfig solver;
};

struct CompareResult {
  CompareEntry entry;
  RunRecord record;
  double accuracy = -1.0;  // -1: not applicable
  bool diverged = false;
  std::string error;
};

std::vector<CompareEntry> sweep_entries(const SweepConfig& sweep) {
  auto axis = [](const std::vector<double>& v, double base) {
    return v.empty() ? std::vector<double>{base} : v;
  };
  const SolverConfig& base = sweep.base.solver;
  std::vector<CompareEntry> entries;
  const bool gridded =
      sweep.alphas.size() + sweep.betas.size() + sweep.gammas.size() > 0;
  for (SolverMode mode : sweep.modes) {
    for (double alpha : axis(sweep.alphas, base.alpha)) {
      for (double beta : axis(sweep.betas, base.beta)) {
        for (double gamma : axis(sweep.gammas, base.gamma)) {
          SolverConfig cfg = base;
          cfg.alpha = alpha;
          cfg.beta = (mode == SolverMode::HeavyBall || mode == SolverMode::Combined)
                         ? beta
                         : 0.0;
          cfg.gamma = (mode == SolverMode::Nesterov || mode == SolverMode::Combined)
                          ? gamma
                          : 0.0;
          std::string label = to_string(mode);
          if (gridded) {
            std::ostringstream tag;
            tag << label << " a=" << cfg.alpha;
            if (cfg.beta > 0.0) tag << " b=" << cfg.beta;
            if (cfg.gamma > 0.0) tag << " g=" << cfg.gamma;
            label = tag.str();
          }
          // plain/heavy-ball/nesterov collapse duplicate grid points
          if (std::any_of(entries.begin(), entries.end(),
                          [&](const CompareEntry& e) { return e.label == label; }))
            continue;
          entries.push_back({label, cfg});
        }
      }
    }
  }
  return entries;
}

}  // namespace

int cmd_compare(const SweepConfig& sweep, const GlobalOpts& opts) {
  PreparedRun prep = prepare(sweep.base);
  const fs::path dir = output_dir(sweep.base, opts);
  std::vector<CompareEntry> entries = sweep_entries(sweep);

  std::vector<CompareResult> results(entries.size());
  auto run_one = [&](size_t idx) {
    CompareResult res;
    res.entry = entries[idx];
    try {
      res.record = run(prep.problem, prep.graphs, entries[idx].solver, prep.phi, prep.pi,
                       prep.problem.reference_optimum, prep.x0, prep.x_prev);
      if (prep.test_set) {
        Eigen::VectorXd mean = res.record.final_x.colwise().mean();
        res.accuracy = classification_accuracy(*prep.test_set, mean);
      }
    } catch (const DivergenceError& e) {
      res.diverged = true;
      res.error = e.what();
    }
    results[idx] = std::move(res);
  };

  const size_t jobs = static_cast<size_t>(std::max(1, opts.jobs));
  for (size_t begin = 0; begin < entries.size(); begin += jobs) {
    std::vector<std::future<void>> batch;
    for (size_t i = begin; i < std::min(begin + jobs, entries.size()); ++i)
      batch.push_back(std::async(std::launch::async, run_one, i));
    for (auto& f : batch) f.get();
  }

  std::ostringstream traces;
  traces.precision(17);
  traces << "label,k,residual,optimality_gap,consensus_D,state_diff,tracking_S\n";
  for (const auto& res : results)
    for (const auto& row : res.record.rows)
      traces << res.entry.label << ',' << row.k << ',' << row.residual << ','
             << row.optimality_gap << ',' << row.consensus_D << ',' << row.state_diff
             << ',' << row.tracking_S << '\n';
  write_text_atomic((dir / "compare.csv").string(), traces.str());

  std::ostringstream table;
  table.precision(17);
  table << "label,alpha,beta,gamma,status,iterations,wall_ms,final_residual,accuracy\n";
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& res : results) {
    std::string status = res.diverged ? "diverged" : to_string(res.record.status);
    table << res.entry.label << ',' << res.entry.solver.alpha << ','
          << res.entry.solver.beta << ',' << res.entry.solver.gamma << ',' << status << ','
          << res.record.iterations << ',' << res.record.wall_ms << ','
          << res.record.final_residual << ',';
    if (res.accuracy >= 0.0) table << res.accuracy;
    table << '\n';
    nlohmann::json j = run_summary_json(res.record);
    j["label"] = res.entry.label;
    j["status"] = status;
    if (res.accuracy >= 0.0) j["accuracy"] = res.accuracy;
    if (res.diverged) j["error"] = res.error;
    runs.push_back(std::move(j));
  }
  write_text_atomic((dir / "table.csv").string(), table.str());
  write_text_atomic((dir / "compare_summary.json").string(),
                    nlohmann::json{{"runs", std::move(runs)}}.dump(2) + "\n");

  if (!opts.quiet) {
    std::cout << "label                     status      iters     wall_ms";
    if (prep.test_set) std::cout << "   accuracy";
    std::cout << "\n";
    for (const auto& res : results) {
      std::string status = res.diverged ? "diverged" : to_string(res.record.status);
      std::ostringstream line;
      line.setf(std::ios::left);
      line.width(26);
      line << res.entry.label;
      line.width(12);
      line << status;
      line.width(10);
      line << res.record.iterations;
      line.width(10);
      line << static_cast<long long>(res.record.wall_ms);
      std::cout << line.str();
      if (res.accuracy >= 0.0) std::cout << "  " << res.accuracy;
      std::cout << "\n";
    }
  }

  int code = 0;
  for (const auto& res : results) {
    if (res.diverged) return 3;
    if (res.record.status != RunStatus::Converged) code = 2;
  }
  return code;
}

int cmd_bounds(const RunConfig& cfg, const GlobalOpts& opts) {
  PreparedRun prep = prepare(cfg);
  const fs::path dir = output_dir(cfg, opts);

  std::vector<GraphStats> stats = stats_sequence(prep.graphs);
  std::vector<MixingPair> mixing = build_mixing_sequence(prep.graphs);
  Certificate cert = build_certificate(stats, mixing, prep.phi, prep.pi,
                                       prep.problem.global_mu, prep.problem.global_L,
                                       cfg.solver.alpha, cfg.solver.beta, cfg.solver.gamma,
                                       cfg.analysis.analytic_sigma);
  write_text_atomic((dir / "certificate.json").string(),
                    certificate_to_json(cert).dump(2) + "\n");
  if (!opts.quiet)
    std::cout << "bounds: verdict=" << (cert.ranges.verdict ? "pass" : "fail")
              << " rho_M=" << cert.rho_M << " alpha_max=" << cert.ranges.alpha_max << "\n";
  return 0;
}

int cmd_graph_stats(const RunConfig& cfg, const GlobalOpts& opts) {
  cfg.validate();
  const fs::path dir = output_dir(cfg, opts);
  DigraphSequence graphs = generate_sequence(cfg.network.n, cfg.network.horizon,
                                             cfg.network.extra_edge_prob, cfg.network.seed);

  std::ostringstream csv;
  csv << "k,diameter,max_edge_utility,min_in_degree,min_out_degree\n";
  int max_d = 0, max_k = 0, min_in_all = cfg.network.n, min_out_all = cfg.network.n;
  for (size_t k = 0; k < graphs.graphs.size(); ++k) {
    const Digraph& g = graphs.graphs[k];
    GraphStats stats = graph_stats(g);
    int min_in = g.n, min_out = g.n;
    auto in_adj = g.in_adjacency();
    auto out_adj = g.out_adjacency();
    for (int i = 0; i < g.n; ++i) {
      min_in = std::min(min_in, static_cast<int>(in_adj[i].size()));
      min_out = std::min(min_out, static_cast<int>(out_adj[i].size()));
    }
    csv << k << ',' << stats.diameter << ',' << stats.max_edge_utility << ',' << min_in
        << ',' << min_out << '\n';
    max_d = std::max(max_d, stats.diameter);
    max_k = std::max(max_k, stats.max_edge_utility);
    min_in_all = std::min(min_in_all, min_in);
    min_out_all = std::min(min_out_all, min_out);
  }
  write_text_atomic((dir / "graph_stats.csv").string(), csv.str());
  write_text_atomic((dir / "graph_stats.json").string(),
                    nlohmann::json{{"n", cfg.network.n},
                                   {"horizon", cfg.network.horizon},
                                   {"max_diameter", max_d},
                                   {"max_edge_utility", max_k},
                                   {"min_in_degree", min_in_all},
                                   {"min_out_degree", min_out_all}}
                            .dump(2) +
                        "\n");
  if (!opts.quiet)
    std::cout << "graph-stats: max diameter " << max_d << ", max edge utility " << max_k
              << "\n";
  return 0;
}

}  // namespace pushpull
