#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "bcv/baselines.hpp"
#include "bcv/rng.hpp"
#include "bcv/sbm.hpp"
#include "oracles.hpp"

using namespace bcv;

namespace {

BipartiteGraph complete_graph(int n1, int n2) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) edges.emplace_back(i, j);
  }
  return BipartiteGraph(n1, n2, std::move(edges));
}

/// Two disjoint complete bipartite blocks.
BipartiteGraph two_block_graph(int half1, int half2) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < 2 * half1; ++i) {
    for (int j = 0; j < 2 * half2; ++j) {
      if ((i < half1) == (j < half2)) edges.emplace_back(i, j);
    }
  }
  return BipartiteGraph(2 * half1, 2 * half2, std::move(edges));
}

WeightedGraph two_cliques(int size, double within, double between) {
  WeightedGraph g(2 * size);
  for (int u = 0; u < 2 * size; ++u) {
    for (int v = u + 1; v < 2 * size; ++v) {
      const bool same = (u < size) == (v < size);
      if (same) {
        g.add_weight(u, v, within);
      } else if (between > 0.0) {
        g.add_weight(u, v, between);
      }
    }
  }
  return g;
}

}  // namespace

TEST_CASE("WeightedGraph enforces its invariants") {
  WeightedGraph g(3);
  g.add_weight(0, 1, 2.0);
  g.add_weight(1, 2, 1.0);
  g.add_weight(0, 1, 1.0);  // accumulates
  CHECK(g.total_weight() == doctest::Approx(4.0));
  CHECK(g.weighted_degree(1) == doctest::Approx(4.0));
  CHECK(g.neighbors(0).size() == 1);
  CHECK(g.neighbors(0)[0].second == doctest::Approx(3.0));

  CHECK_THROWS_AS(g.add_weight(0, 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(g.add_weight(0, 1, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(g.add_weight(0, 5, 1.0), std::invalid_argument);
}

TEST_CASE("project counts co-neighbors") {
  const WeightedGraph side1 = project(complete_graph(3, 4), 1);
  CHECK(side1.size() == 3);
  for (int u = 0; u < 3; ++u) {
    for (const auto& [v, w] : side1.neighbors(u)) CHECK(w == doctest::Approx(4.0));
    CHECK(side1.neighbors(u).size() == 2);
  }

  // 2x3 graph with edges {(1,1),(1,2),(2,2)} one-indexed: the two side-1
  // nodes share exactly one neighbor.
  const BipartiteGraph g(2, 3, {{0, 0}, {0, 1}, {1, 1}});
  const WeightedGraph p1 = project(g, 1);
  CHECK(p1.neighbors(0).size() == 1);
  CHECK(p1.neighbors(0)[0].first == 1);
  CHECK(p1.neighbors(0)[0].second == doctest::Approx(1.0));

  const WeightedGraph p2 = project(g, 2);
  CHECK(p2.weighted_degree(0) == doctest::Approx(1.0));  // events 1-2 share woman 1
  CHECK(p2.weighted_degree(2) == doctest::Approx(0.0));

  // Projection weights are integral co-neighbor counts.
  for (int u = 0; u < p2.size(); ++u) {
    for (const auto& [v, w] : p2.neighbors(u)) CHECK(w == std::floor(w));
  }

  // An edge-free graph projects to all-zero weights (clustering it is what
  // fails, not the projection).
  const WeightedGraph hollow = project(BipartiteGraph(2, 2, {}), 1);
  CHECK(hollow.total_weight() == 0.0);
  CHECK_THROWS_AS(modularity_communities(hollow, 1), std::invalid_argument);
}

TEST_CASE("modularity_communities splits disconnected cliques exactly") {
  const WeightedGraph g = two_cliques(5, 1.0, 0.0);
  const LabelVector labels = modularity_communities(g, 3);
  CHECK(num_communities(labels) == 2);
  for (int u = 1; u < 5; ++u) CHECK(labels[u] == labels[0]);
  for (int u = 6; u < 10; ++u) CHECK(labels[u] == labels[5]);
  CHECK(labels[0] != labels[5]);

  // A single clique collapses to one community.
  WeightedGraph clique(4);
  for (int u = 0; u < 4; ++u) {
    for (int v = u + 1; v < 4; ++v) clique.add_weight(u, v, 1.0);
  }
  CHECK(num_communities(modularity_communities(clique, 1)) == 1);

  WeightedGraph zero(3);
  CHECK_THROWS_AS(modularity_communities(zero, 1), std::invalid_argument);
}

TEST_CASE("modularity agrees with the direct double-sum definition") {
  Rng rng(15);
  WeightedGraph g(8);
  for (int u = 0; u < 8; ++u) {
    for (int v = u + 1; v < 8; ++v) {
      if (rng.bernoulli(0.4)) g.add_weight(u, v, rng.uniform(0.5, 2.0));
    }
  }
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<int> labels(8);
    for (auto& c : labels) c = static_cast<int>(rng.uniform_int(3));
    CHECK(modularity(g, labels) ==
          doctest::Approx(oracle::direct_modularity(g, labels)).epsilon(1e-12));
  }
}

TEST_CASE("louvain result beats trivial partitions and matches exhaustive search") {
  const WeightedGraph g = two_cliques(4, 2.0, 0.25);  // 8 nodes
  const LabelVector labels = modularity_communities(g, 7);
  const double q = modularity(g, labels.labels);

  std::vector<int> singletons(8);
  for (int u = 0; u < 8; ++u) singletons[u] = u;
  CHECK(q >= modularity(g, singletons) - 1e-12);
  CHECK(q >= modularity(g, std::vector<int>(8, 0)) - 1e-12);

  CHECK(q == doctest::Approx(oracle::exhaustive_max_modularity(g)).epsilon(1e-9));

  // 10-node two-block graph: the returned partition is at least as good as
  // the planted one.
  const WeightedGraph g10 = two_cliques(5, 2.0, 0.1);
  const LabelVector labels10 = modularity_communities(g10, 19);
  std::vector<int> planted(10, 0);
  for (int u = 5; u < 10; ++u) planted[u] = 1;
  CHECK(modularity(g10, labels10.labels) >= modularity(g10, planted) - 1e-9);
}

TEST_CASE("bimodularity: trivial module structures") {
  const BimodularityResult split = bimodularity_communities(two_block_graph(4, 3), 6, 5);
  CHECK(split.modules_side1 == 2);
  CHECK(split.modules_side2 == 2);
  // Joint module ids match across sides within each block.
  CHECK(split.labels1[0] == split.labels2[0]);
  CHECK(split.labels1[4] == split.labels2[3]);
  CHECK(split.labels1[0] != split.labels1[4]);

  const BimodularityResult whole = bimodularity_communities(complete_graph(5, 4), 6, 5);
  CHECK(whole.modules_side1 == 1);
  CHECK(whole.modules_side2 == 1);

  CHECK_THROWS_AS(bimodularity_communities(BipartiteGraph(3, 3, {}), 4, 1),
                  std::invalid_argument);
}

TEST_CASE("bimodularity objective is nondecreasing within the winning run") {
  Rng rng(33);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 25; ++j) {
      const bool same = (i % 2) == (j % 2);
      if (rng.bernoulli(same ? 0.6 : 0.1)) edges.emplace_back(i, j);
    }
  }
  const BipartiteGraph g(20, 25, std::move(edges));
  const BimodularityResult result = bimodularity_communities(g, 8, 11);
  REQUIRE(!result.sweep_q.empty());
  for (std::size_t i = 1; i < result.sweep_q.size(); ++i) {
    CHECK(result.sweep_q[i] >= result.sweep_q[i - 1] - 1e-12);
  }
  CHECK(result.q == doctest::Approx(result.sweep_q.back()));
}

TEST_CASE("bimodularity recovers a small planted (2,2) structure") {
  SbmSpec spec;
  spec.K1 = 2;
  spec.K2 = 2;
  spec.B.resize(2, 2);
  spec.B << 0.6, 0.05, 0.05, 0.6;
  spec.membership = MultinomialMembership{{0.5, 0.5}, {0.5, 0.5}};

  int hits = 0;
  for (int seed = 0; seed < 10; ++seed) {
    const SbmSample sample = generate_sbm(spec, 40, 40, 700 + seed);
    const BimodularityResult result = bimodularity_communities(sample.graph, 8, seed);
    if (result.modules_side1 == 2 && result.modules_side2 == 2) ++hits;
  }
  CHECK(hits >= 9);
}
