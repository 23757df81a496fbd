#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>

#include "pushpull/graph.hpp"

using namespace pushpull;

namespace {

Digraph ring(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return Digraph::from_edges(n, std::move(edges));
}

Digraph complete(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) edges.emplace_back(i, j);
  return Digraph::from_edges(n, std::move(edges));
}

// Floyd-Warshall, an independent all-pairs oracle.
std::vector<std::vector<int>> fw_distances(const Digraph& g) {
  const int inf = 1 << 20;
  std::vector<std::vector<int>> d(static_cast<size_t>(g.n),
                                  std::vector<int>(static_cast<size_t>(g.n), inf));
  for (int i = 0; i < g.n; ++i) d[static_cast<size_t>(i)][static_cast<size_t>(i)] = 0;
  for (auto [u, v] : g.edges) d[static_cast<size_t>(u)][static_cast<size_t>(v)] = 1;
  for (int m = 0; m < g.n; ++m)
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j)
        d[static_cast<size_t>(i)][static_cast<size_t>(j)] =
            std::min(d[static_cast<size_t>(i)][static_cast<size_t>(j)],
                     d[static_cast<size_t>(i)][static_cast<size_t>(m)] +
                         d[static_cast<size_t>(m)][static_cast<size_t>(j)]);
  for (auto& row : d)
    for (auto& v : row)
      if (v >= inf) v = -1;
  return d;
}

// Enumerates every shortest path between a pair and records which edges occur
// on at least one of them; the utility of an edge is the number of ordered
// pairs it can serve. Exponential, for small n only.
int enumeration_edge_utility(const Digraph& g) {
  auto dist = fw_distances(g);
  auto out = g.out_adjacency();
  std::vector<std::vector<std::pair<int, int>>> per_pair_edges;
  for (int j = 0; j < g.n; ++j) {
    for (int l = 0; l < g.n; ++l) {
      if (j == l) continue;
      std::vector<std::pair<int, int>> edges_here;
      std::vector<int> path{j};
      // DFS over shortest paths only
      std::function<void(int)> dfs = [&](int u) {
        if (u == l) {
          for (size_t i = 0; i + 1 < path.size(); ++i)
            edges_here.emplace_back(path[i], path[i + 1]);
          return;
        }
        for (int v : out[static_cast<size_t>(u)]) {
          if (dist[static_cast<size_t>(u)][static_cast<size_t>(l)] ==
              1 + dist[static_cast<size_t>(v)][static_cast<size_t>(l)]) {
            path.push_back(v);
            dfs(v);
            path.pop_back();
          }
        }
      };
      dfs(j);
      std::sort(edges_here.begin(), edges_here.end());
      edges_here.erase(std::unique(edges_here.begin(), edges_here.end()),
                       edges_here.end());
      per_pair_edges.push_back(std::move(edges_here));
    }
  }
  int best = 0;
  for (auto [u, v] : g.edges) {
    int count = 0;
    for (const auto& edges_here : per_pair_edges)
      if (std::binary_search(edges_here.begin(), edges_here.end(), std::make_pair(u, v)))
        ++count;
    best = std::max(best, count);
  }
  return best;
}

Digraph random_connected(int n, double p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  while (true) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && coin(rng) < p) edges.emplace_back(i, j);
    Digraph g = Digraph::from_edges(n, std::move(edges));
    if (is_strongly_connected(g)) return g;
  }
}

}  // namespace

TEST_CASE("from_edges rejects malformed inputs") {
  CHECK_THROWS_AS(Digraph::from_edges(3, {{0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(Digraph::from_edges(3, {{0, 1}, {0, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(Digraph::from_edges(3, {{0, 3}}), std::invalid_argument);
  CHECK_THROWS_AS(Digraph::from_edges(3, {{-1, 0}}), std::invalid_argument);
}

TEST_CASE("3-ring reference values") {
  Digraph g = ring(3);
  CHECK(is_strongly_connected(g));
  CHECK(diameter(g) == 2);
  CHECK(max_edge_utility(g) == 3);
}

TEST_CASE("complete graph reference values") {
  Digraph g = complete(3);
  CHECK(diameter(g) == 1);
  CHECK(max_edge_utility(g) == 1);
}

TEST_CASE("diameter and stats reject degenerate or disconnected inputs") {
  CHECK_THROWS_AS(diameter(Digraph::from_edges(1, {})), std::invalid_argument);
  Digraph chain = Digraph::from_edges(3, {{0, 1}, {1, 2}});
  CHECK_FALSE(is_strongly_connected(chain));
  CHECK_THROWS_AS(diameter(chain), InfeasibleGraphError);
  CHECK_THROWS_AS(graph_stats(chain), InfeasibleGraphError);
}

TEST_CASE("all-pairs distances match Floyd-Warshall on random graphs") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    Digraph g = random_connected(6, 0.35, rng);
    CHECK(all_pairs_distances(g) == fw_distances(g));
  }
}

TEST_CASE("edge utility matches exhaustive shortest-path enumeration") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    Digraph g = random_connected(5, 0.4, rng);
    CHECK(max_edge_utility(g) == enumeration_edge_utility(g));
  }
}

TEST_CASE("graph stats are invariant under node relabeling") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Digraph g = random_connected(6, 0.3, rng);
    std::vector<int> perm(6);
    for (int i = 0; i < 6; ++i) perm[static_cast<size_t>(i)] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::pair<int, int>> edges;
    for (auto [u, v] : g.edges)
      edges.emplace_back(perm[static_cast<size_t>(u)], perm[static_cast<size_t>(v)]);
    Digraph h = Digraph::from_edges(6, std::move(edges));
    GraphStats sg = graph_stats(g), sh = graph_stats(h);
    CHECK(sg.diameter == sh.diameter);
    CHECK(sg.max_edge_utility == sh.max_edge_utility);
  }
}

TEST_CASE("adding an edge never increases the diameter") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    Digraph g = random_connected(6, 0.25, rng);
    std::vector<std::pair<int, int>> missing;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        if (i != j && !g.has_edge(i, j)) missing.emplace_back(i, j);
    if (missing.empty()) continue;
    auto extra = missing[rng() % missing.size()];
    auto edges = g.edges;
    edges.push_back(extra);
    Digraph h = Digraph::from_edges(6, std::move(edges));
    CHECK(diameter(h) <= diameter(g));
  }
}

TEST_CASE("generate_sequence is deterministic, ring-backed, strongly connected") {
  DigraphSequence a = generate_sequence(6, 40, 0.3, 99);
  DigraphSequence b = generate_sequence(6, 40, 0.3, 99);
  REQUIRE(a.graphs.size() == 40);
  for (size_t k = 0; k < a.graphs.size(); ++k) {
    CHECK(a.graphs[k].edges == b.graphs[k].edges);
    CHECK(is_strongly_connected(a.graphs[k]));
    for (int i = 0; i < 6; ++i) CHECK(a.graphs[k].has_edge(i, (i + 1) % 6));
  }
  DigraphSequence c = generate_sequence(6, 40, 0.3, 100);
  bool any_diff = false;
  for (size_t k = 0; k < a.graphs.size(); ++k)
    if (a.graphs[k].edges != c.graphs[k].edges) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("extra_edge_prob = 0 yields exactly the ring") {
  DigraphSequence seq = generate_sequence(3, 2, 0.0, 7);
  REQUIRE(seq.graphs.size() == 2);
  for (const auto& g : seq.graphs)
    CHECK(g.edges == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 0}});
}

TEST_CASE("generate_sequence rejects empty shapes") {
  CHECK_THROWS_AS(generate_sequence(0, 5, 0.3, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_sequence(3, 0, 0.3, 1), std::invalid_argument);
}

TEST_CASE("sequence json round-trip preserves structure and validates") {
  DigraphSequence seq = generate_sequence(4, 5, 0.5, 3);
  nlohmann::json j = seq;
  DigraphSequence back = j.get<DigraphSequence>();
  CHECK(back.n == seq.n);
  CHECK(back.seed == seq.seed);
  REQUIRE(back.graphs.size() == seq.graphs.size());
  for (size_t k = 0; k < seq.graphs.size(); ++k)
    CHECK(back.graphs[k].edges == seq.graphs[k].edges);

  nlohmann::json bad = {{"n", 3},
                        {"seed", 0},
                        {"graphs", {{{"n", 3}, {"edges", {{0, 1}, {1, 2}}}}}}};
  CHECK_THROWS_AS(bad.get<DigraphSequence>(), InfeasibleGraphError);
}
