#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pushpull/errors.hpp"

#include <json.hpp>

namespace pushpull {

/// Directed graph on nodes [0, n). An edge (i, j) means "i sends to j".
/// Self-loops are implicit (every node is its own in- and out-neighbor)
/// and never stored explicitly.
struct Digraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // sorted, unique, no self-loops

  /// Validates node indices, drops nothing: duplicates or self-loops are errors.
  static Digraph from_edges(int n, std::vector<std::pair<int, int>> edges);

  bool has_edge(int i, int j) const;
  std::vector<std::vector<int>> out_adjacency() const;  // explicit edges only
  std::vector<std::vector<int>> in_adjacency() const;
};

/// One graph per iteration; all strongly connected, all on the same node set.
struct DigraphSequence {
  int n = 0;
  std::uint64_t seed = 0;  // 0 if hand-built
  std::vector<Digraph> graphs;
};

struct GraphStats {
  int n = 0;
  int diameter = 0;
  int max_edge_utility = 0;
};

/// Directed ring i -> (i+1 mod n) plus each other ordered pair independently
/// with probability extra_edge_prob. The ring guarantees strong connectivity.
/// Identical arguments reproduce the identical sequence.
DigraphSequence generate_sequence(int n, int horizon, double extra_edge_prob,
                                  std::uint64_t seed);

bool is_strongly_connected(const Digraph& g);

/// Shortest directed path lengths between all ordered pairs (n BFS runs).
/// dist[i][j] = -1 when j is unreachable from i; dist[i][i] = 0.
std::vector<std::vector<int>> all_pairs_distances(const Digraph& g);

/// Longest of all shortest directed path lengths between distinct nodes.
/// Requires strong connectivity and n >= 2.
int diameter(const Digraph& g);

/// Largest number of ordered pairs (j, l), j != l, any single edge (u, v) can
/// serve on a shortest path, i.e. pairs with dist(j,u) + 1 + dist(v,l) = dist(j,l).
/// Per-pair path choices are independent, so this equals the covering maximum.
int max_edge_utility(const Digraph& g);

GraphStats graph_stats(const Digraph& g);

void to_json(nlohmann::json& j, const Digraph& g);
void from_json(const nlohmann::json& j, Digraph& g);
void to_json(nlohmann::json& j, const DigraphSequence& s);
void from_json(const nlohmann::json& j, DigraphSequence& s);

}  // namespace pushpull
