#include "bcv/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "bcv/rng.hpp"

namespace bcv {

WeightedGraph::WeightedGraph(int n) : n_(n), adj_(n), degree_(n, 0.0) {
  if (n < 1) throw std::invalid_argument("WeightedGraph: node count must be positive");
}

void WeightedGraph::add_weight(int u, int v, double w) {
  if (u < 0 || u >= n_ || v < 0 || v >= n_) {
    throw std::invalid_argument("WeightedGraph: node index out of range");
  }
  if (u == v) throw std::invalid_argument("WeightedGraph: self-loops not allowed");
  if (w < 0.0) throw std::invalid_argument("WeightedGraph: negative weight");
  if (w == 0.0) return;

  auto bump = [](std::vector<std::pair<int, double>>& list, int node, double inc) {
    for (auto& [other, weight] : list) {
      if (other == node) {
        weight += inc;
        return;
      }
    }
    list.emplace_back(node, inc);
  };
  bump(adj_[u], v, w);
  bump(adj_[v], u, w);
  degree_[u] += w;
  degree_[v] += w;
  total_weight_ += w;
}

WeightedGraph project(const BipartiteGraph& A, int side) {
  if (side != 1 && side != 2) throw std::invalid_argument("project: side must be 1 or 2");

  const int n = side == 1 ? A.n1() : A.n2();
  const int other = side == 1 ? A.n2() : A.n1();

  std::unordered_map<std::uint64_t, double> weights;
  for (int j = 0; j < other; ++j) {
    const auto nbrs = side == 1 ? A.col_neighbors(j) : A.row_neighbors(j);
    for (std::size_t a = 0; a < nbrs.size(); ++a) {
      for (std::size_t b = a + 1; b < nbrs.size(); ++b) {
        weights[static_cast<std::uint64_t>(nbrs[a]) * n + nbrs[b]] += 1.0;
      }
    }
  }

  std::vector<std::pair<std::uint64_t, double>> sorted(weights.begin(), weights.end());
  std::sort(sorted.begin(), sorted.end());

  WeightedGraph g(n);
  for (const auto& [key, w] : sorted) {
    g.add_weight(static_cast<int>(key / n), static_cast<int>(key % n), w);
  }
  return g;
}

double modularity(const WeightedGraph& g, const std::vector<int>& labels) {
  if (static_cast<int>(labels.size()) != g.size()) {
    throw std::invalid_argument("modularity: label length must match node count");
  }
  const double two_m = 2.0 * g.total_weight();
  if (two_m <= 0.0) throw std::invalid_argument("modularity: graph has zero total weight");

  std::unordered_map<int, double> internal, degree;
  for (int u = 0; u < g.size(); ++u) {
    degree[labels[u]] += g.weighted_degree(u);
    for (const auto& [v, w] : g.neighbors(u)) {
      if (labels[v] == labels[u]) internal[labels[u]] += w;  // counts each pair twice
    }
  }
  double q = 0.0;
  for (const auto& [c, deg] : degree) {
    const double in_c = internal.count(c) ? internal.at(c) : 0.0;
    q += in_c / two_m - (deg / two_m) * (deg / two_m);
  }
  return q;
}

namespace {

// Working graph for the multilevel pass; aggregation introduces self-loops,
// which the public WeightedGraph forbids.
struct LevelGraph {
  std::vector<std::vector<std::pair<int, double>>> adj;
  std::vector<double> self_loop;
  std::vector<double> degree;  // includes 2 * self_loop
  double two_m = 0.0;

  int size() const { return static_cast<int>(adj.size()); }
};

LevelGraph level_from(const WeightedGraph& g) {
  LevelGraph lg;
  lg.adj.resize(g.size());
  lg.self_loop.assign(g.size(), 0.0);
  lg.degree.assign(g.size(), 0.0);
  for (int u = 0; u < g.size(); ++u) {
    lg.adj[u].assign(g.neighbors(u).begin(), g.neighbors(u).end());
    lg.degree[u] = g.weighted_degree(u);
    lg.two_m += g.weighted_degree(u);
  }
  return lg;
}

// One round of local moves; returns true if any node changed community.
bool local_move_pass(const LevelGraph& g, std::vector<int>& comm,
                     std::vector<double>& comm_degree, const std::vector<int>& order) {
  bool moved = false;
  std::vector<double> link(g.size(), 0.0);
  std::vector<int> touched;

  for (const int u : order) {
    const int old_c = comm[u];
    touched.clear();
    for (const auto& [v, w] : g.adj[u]) {
      const int c = comm[v];
      if (link[c] == 0.0) touched.push_back(c);
      link[c] += w;
    }
    if (link[old_c] == 0.0) touched.push_back(old_c);

    comm_degree[old_c] -= g.degree[u];
    std::sort(touched.begin(), touched.end());

    int best_c = old_c;
    double best_gain = link[old_c] - g.degree[u] * comm_degree[old_c] / g.two_m;
    for (const int c : touched) {
      if (c == old_c) continue;
      const double gain = link[c] - g.degree[u] * comm_degree[c] / g.two_m;
      if (gain > best_gain) {
        best_gain = gain;
        best_c = c;
      }
    }
    comm_degree[best_c] += g.degree[u];
    if (best_c != old_c) {
      comm[u] = best_c;
      moved = true;
    }
    for (const int c : touched) link[c] = 0.0;
  }
  return moved;
}

LevelGraph aggregate(const LevelGraph& g, const std::vector<int>& comm, int n_comms) {
  LevelGraph out;
  out.adj.resize(n_comms);
  out.self_loop.assign(n_comms, 0.0);
  out.degree.assign(n_comms, 0.0);
  out.two_m = g.two_m;

  std::unordered_map<std::uint64_t, double> between;
  for (int u = 0; u < g.size(); ++u) {
    out.self_loop[comm[u]] += g.self_loop[u];
    out.degree[comm[u]] += g.degree[u];
    for (const auto& [v, w] : g.adj[u]) {
      const int cu = comm[u];
      const int cv = comm[v];
      if (cu == cv) {
        out.self_loop[cu] += 0.5 * w;  // each intra pair visited from both ends
      } else if (cu < cv) {
        between[static_cast<std::uint64_t>(cu) * n_comms + cv] += w;
      }
    }
  }
  std::vector<std::pair<std::uint64_t, double>> sorted(between.begin(), between.end());
  std::sort(sorted.begin(), sorted.end());
  for (const auto& [key, w] : sorted) {
    const int cu = static_cast<int>(key / n_comms);
    const int cv = static_cast<int>(key % n_comms);
    out.adj[cu].emplace_back(cv, w);
    out.adj[cv].emplace_back(cu, w);
  }
  return out;
}

}  // namespace

LabelVector modularity_communities(const WeightedGraph& g, std::uint64_t seed) {
  if (g.total_weight() <= 0.0) {
    throw std::invalid_argument("modularity_communities: all edge weights are zero");
  }

  LevelGraph level = level_from(g);
  std::vector<int> node_to_final(g.size());
  std::iota(node_to_final.begin(), node_to_final.end(), 0);

  Rng rng(derive_seed(seed, 0x10a7ULL));
  for (int depth = 0; level.size() > 1; ++depth) {
    std::vector<int> comm(level.size());
    std::iota(comm.begin(), comm.end(), 0);
    std::vector<double> comm_degree = level.degree;

    std::vector<int> order(level.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    bool any_move = false;
    while (local_move_pass(level, comm, comm_degree, order)) any_move = true;
    if (!any_move) break;

    // Renumber communities compactly and push the mapping down to the
    // original nodes.
    std::vector<int> remap(level.size(), -1);
    int next = 0;
    for (int u = 0; u < level.size(); ++u) {
      if (remap[comm[u]] < 0) remap[comm[u]] = next++;
    }
    for (int u = 0; u < level.size(); ++u) comm[u] = remap[comm[u]];
    for (int& c : node_to_final) c = comm[c];

    if (next == level.size()) break;
    level = aggregate(level, comm, next);
  }

  return renumber_first_appearance(LabelVector(std::move(node_to_final), 1));
}

namespace {

double barber_q(const BipartiteGraph& A, const std::vector<int>& g1, const std::vector<int>& g2,
                int modules) {
  const double m = static_cast<double>(A.edge_count());
  double matches = 0.0;
  for (const auto& [i, j] : A.edges()) {
    if (g1[i] == g2[j]) matches += 1.0;
  }
  std::vector<double> d_tot(modules, 0.0), e_tot(modules, 0.0);
  for (int i = 0; i < A.n1(); ++i) d_tot[g1[i]] += A.row_degree(i);
  for (int j = 0; j < A.n2(); ++j) e_tot[g2[j]] += A.col_degree(j);
  double null = 0.0;
  for (int t = 0; t < modules; ++t) null += d_tot[t] * e_tot[t];
  return (matches - null / m) / m;
}

// Assigns every side-1 node to the module maximizing its Q contribution
// given fixed side-2 labels (and vice versa via the transposed call).
// Ties go to the lowest module index. Returns true if any label changed.
bool brim_half_sweep(const BipartiteGraph& A, int side, std::vector<int>& mine,
                     const std::vector<int>& theirs, int modules) {
  const double m = static_cast<double>(A.edge_count());
  const int n = side == 1 ? A.n1() : A.n2();

  std::vector<double> other_mass(modules, 0.0);
  if (side == 1) {
    for (int j = 0; j < A.n2(); ++j) other_mass[theirs[j]] += A.col_degree(j);
  } else {
    for (int i = 0; i < A.n1(); ++i) other_mass[theirs[i]] += A.row_degree(i);
  }

  bool changed = false;
  std::vector<double> link(modules, 0.0);
  for (int u = 0; u < n; ++u) {
    const auto nbrs = side == 1 ? A.row_neighbors(u) : A.col_neighbors(u);
    for (const int v : nbrs) link[theirs[v]] += 1.0;
    const double deg = static_cast<double>(nbrs.size());

    int best_t = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < modules; ++t) {
      const double score = link[t] - deg * other_mass[t] / m;
      if (score > best_score) {
        best_score = score;
        best_t = t;
      }
    }
    if (best_t != mine[u]) {
      mine[u] = best_t;
      changed = true;
    }
    for (const int v : nbrs) link[theirs[v]] = 0.0;
  }
  return changed;
}

}  // namespace

BimodularityResult bimodularity_communities(const BipartiteGraph& A, int max_modules,
                                            std::uint64_t seed, int restarts) {
  if (A.edge_count() == 0) {
    throw std::invalid_argument("bimodularity_communities: graph has no edges");
  }
  if (max_modules < 1) throw std::invalid_argument("bimodularity_communities: max_modules < 1");
  if (restarts < 1) throw std::invalid_argument("bimodularity_communities: restarts < 1");
  max_modules = std::min({max_modules, A.n1() + A.n2()});

  BimodularityResult best;
  best.q = -std::numeric_limits<double>::infinity();

  constexpr int kMaxSweeps = 500;
  for (int modules = 1; modules <= max_modules; ++modules) {
    for (int r = 0; r < restarts; ++r) {
      Rng rng(derive_seed(seed, 0xb1bULL, static_cast<std::uint64_t>(modules),
                          static_cast<std::uint64_t>(r)));
      std::vector<int> g1(A.n1(), 0), g2(A.n2(), 0);
      for (int j = 0; j < A.n2(); ++j) g2[j] = static_cast<int>(rng.uniform_int(modules));

      std::vector<double> sweep_q;
      for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        const bool c1 = brim_half_sweep(A, 1, g1, g2, modules);
        sweep_q.push_back(barber_q(A, g1, g2, modules));
        const bool c2 = brim_half_sweep(A, 2, g2, g1, modules);
        sweep_q.push_back(barber_q(A, g1, g2, modules));
        if (!c1 && !c2) break;
      }

      const double q = sweep_q.back();
      if (q > best.q) {
        best.q = q;
        best.labels1 = LabelVector(g1, 1);
        best.labels2 = LabelVector(g2, 2);
        best.sweep_q = std::move(sweep_q);
      }
    }
  }

  best.modules_side1 = num_communities(best.labels1);
  best.modules_side2 = num_communities(best.labels2);
  return best;
}

}  // namespace bcv
