#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bcv/bipartite_graph.hpp"
#include "bcv/labels.hpp"

namespace bcv {

/// Undirected weighted graph with nonnegative weights, zero diagonal and an
/// exactly symmetric adjacency list (each edge stored in both endpoints).
class WeightedGraph {
 public:
  explicit WeightedGraph(int n);

  /// Adds w to the (u, v) weight, symmetric. u == v or w < 0 throws.
  void add_weight(int u, int v, double w);

  int size() const { return n_; }
  const std::vector<std::pair<int, double>>& neighbors(int u) const { return adj_[u]; }
  double total_weight() const { return total_weight_; }  // sum over unordered pairs
  double weighted_degree(int u) const { return degree_[u]; }

 private:
  int n_ = 0;
  std::vector<std::vector<std::pair<int, double>>> adj_;
  std::vector<double> degree_;
  double total_weight_ = 0.0;
};

/// One-mode projection by co-neighbor counts: for side 1,
/// weight(u, v) = #common side-2 neighbors of u and v (u != v).
WeightedGraph project(const BipartiteGraph& A, int side);

/// Newman-Girvan modularity of a partition of G.
double modularity(const WeightedGraph& g, const std::vector<int>& labels);

/// Greedy multilevel modularity maximization (local moves to the neighbor
/// community with maximal gain, then aggregation, repeated until no gain).
/// Node visit order is shuffled by seed. Throws on an all-zero-weight graph.
LabelVector modularity_communities(const WeightedGraph& g, std::uint64_t seed);

struct BimodularityResult {
  LabelVector labels1;         // side-1 module ids
  LabelVector labels2;         // side-2 module ids
  double q = 0.0;              // Barber bipartite modularity of the best run
  int modules_side1 = 0;       // nonempty modules restricted to side 1
  int modules_side2 = 0;
  std::vector<double> sweep_q;  // Q after each half-sweep of the winning run
};

/// Barber bipartite modularity maximized by alternating label updates (BRIM
/// style), restarted over module counts 1..max_modules with `restarts`
/// random initializations each; the assignment with the highest Q wins.
BimodularityResult bimodularity_communities(const BipartiteGraph& A, int max_modules,
                                            std::uint64_t seed, int restarts = 10);

}  // namespace bcv
