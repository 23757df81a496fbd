#include "pushpull/graph.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <set>
#include <string>

namespace pushpull {

Digraph Digraph::from_edges(int n, std::vector<std::pair<int, int>> edges) {
  if (n < 1) throw std::invalid_argument("Digraph: node count must be >= 1");
  std::sort(edges.begin(), edges.end());
  for (size_t idx = 0; idx < edges.size(); ++idx) {
    auto [i, j] = edges[idx];
    if (i < 0 || i >= n || j < 0 || j >= n)
      throw std::invalid_argument("Digraph: node index out of range");
    if (i == j) throw std::invalid_argument("Digraph: explicit self-loop (self-loops are implicit)");
    if (idx > 0 && edges[idx] == edges[idx - 1])
      throw std::invalid_argument("Digraph: duplicate edge");
  }
  Digraph g;
  g.n = n;
  g.edges = std::move(edges);
  return g;
}

bool Digraph::has_edge(int i, int j) const {
  return std::binary_search(edges.begin(), edges.end(), std::make_pair(i, j));
}

std::vector<std::vector<int>> Digraph::out_adjacency() const {
  std::vector<std::vector<int>> adj(n);
  for (auto [i, j] : edges) adj[i].push_back(j);
  return adj;
}

std::vector<std::vector<int>> Digraph::in_adjacency() const {
  std::vector<std::vector<int>> adj(n);
  for (auto [i, j] : edges) adj[j].push_back(i);
  return adj;
}

DigraphSequence generate_sequence(int n, int horizon, double extra_edge_prob,
                                  std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate_sequence: n must be >= 1");
  if (horizon < 1) throw std::invalid_argument("generate_sequence: horizon must be >= 1");
  if (extra_edge_prob < 0.0 || extra_edge_prob > 1.0)
    throw std::invalid_argument("generate_sequence: extra_edge_prob must be in [0,1]");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  DigraphSequence seq;
  seq.n = n;
  seq.seed = seed;
  seq.graphs.reserve(static_cast<size_t>(horizon));
  for (int k = 0; k < horizon; ++k) {
    std::vector<std::pair<int, int>> edges;
    if (n > 1) {
      for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (i == j || j == (i + 1) % n) continue;
          if (coin(rng) < extra_edge_prob) edges.emplace_back(i, j);
        }
      }
    }
    seq.graphs.push_back(Digraph::from_edges(n, std::move(edges)));
  }
  return seq;
}

namespace {

// BFS distances from a single source over the given adjacency.
std::vector<int> bfs_distances(const std::vector<std::vector<int>>& adj, int src) {
  std::vector<int> dist(adj.size(), -1);
  std::deque<int> queue{src};
  dist[src] = 0;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int v : adj[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

}  // namespace

bool is_strongly_connected(const Digraph& g) {
  if (g.n == 1) return true;
  auto fwd = bfs_distances(g.out_adjacency(), 0);
  auto bwd = bfs_distances(g.in_adjacency(), 0);
  for (int v = 0; v < g.n; ++v) {
    if (fwd[v] < 0 || bwd[v] < 0) return false;
  }
  return true;
}

std::vector<std::vector<int>> all_pairs_distances(const Digraph& g) {
  auto adj = g.out_adjacency();
  std::vector<std::vector<int>> dist(g.n);
  for (int i = 0; i < g.n; ++i) dist[i] = bfs_distances(adj, i);
  return dist;
}

int diameter(const Digraph& g) {
  if (g.n < 2) throw std::invalid_argument("diameter: needs n >= 2");
  if (!is_strongly_connected(g))
    throw InfeasibleGraphError("diameter: graph is not strongly connected");
  auto dist = all_pairs_distances(g);
  int diam = 0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      if (i != j) diam = std::max(diam, dist[i][j]);
  return diam;
}

int max_edge_utility(const Digraph& g) {
  if (g.n < 2) throw std::invalid_argument("max_edge_utility: needs n >= 2");
  if (!is_strongly_connected(g))
    throw InfeasibleGraphError("max_edge_utility: graph is not strongly connected");
  auto dist = all_pairs_distances(g);
  int best = 0;
  for (auto [u, v] : g.edges) {
    int count = 0;
    for (int j = 0; j < g.n; ++j) {
      for (int l = 0; l < g.n; ++l) {
        if (j == l) continue;
        if (dist[j][u] + 1 + dist[v][l] == dist[j][l]) ++count;
      }
    }
    best = std::max(best, count);
  }
  return best;
}

GraphStats graph_stats(const Digraph& g) {
  if (g.n < 2) throw std::invalid_argument("graph_stats: needs n >= 2");
  if (!is_strongly_connected(g))
    throw InfeasibleGraphError("graph_stats: graph is not strongly connected");
  auto dist = all_pairs_distances(g);
  GraphStats stats;
  stats.n = g.n;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      if (i != j) stats.diameter = std::max(stats.diameter, dist[i][j]);
  for (auto [u, v] : g.edges) {
    int count = 0;
    for (int j = 0; j < g.n; ++j)
      for (int l = 0; l < g.n; ++l)
        if (j != l && dist[j][u] + 1 + dist[v][l] == dist[j][l]) ++count;
    stats.max_edge_utility = std::max(stats.max_edge_utility, count);
  }
  return stats;
}

void to_json(nlohmann::json& j, const Digraph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (auto [a, b] : g.edges) edges.push_back({a, b});
  j = nlohmann::json{{"n", g.n}, {"edges", std::move(edges)}};
}

void from_json(const nlohmann::json& j, Digraph& g) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j.at("edges"))
    edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  g = Digraph::from_edges(j.at("n").get<int>(), std::move(edges));
}

void to_json(nlohmann::json& j, const DigraphSequence& s) {
  j = nlohmann::json{{"n", s.n}, {"seed", s.seed}, {"graphs", s.graphs}};
}

void from_json(const nlohmann::json& j, DigraphSequence& s) {
  s.n = j.at("n").get<int>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.graphs = j.at("graphs").get<std::vector<Digraph>>();
  for (const auto& g : s.graphs) {
    if (g.n != s.n) throw std::invalid_argument("DigraphSequence: node count mismatch");
    if (!is_strongly_connected(g))
      throw InfeasibleGraphError("DigraphSequence: graph is not strongly connected");
  }
}

}  // namespace pushpull
