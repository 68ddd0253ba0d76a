#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "bcv/bipartite_graph.hpp"
#include "bcv/labels.hpp"

namespace bcv {

/// Fixed community assignments for both sides.
struct ExplicitLabels {
  std::vector<int> c1;
  std::vector<int> c2;
};

/// Labels drawn independently from per-side multinomial distributions.
struct MultinomialMembership {
  std::vector<double> pi1;
  std::vector<double> pi2;
};

/// Bipartite stochastic block model: K1 x K2 block probability matrix B and a
/// membership mechanism. Edge (i, j) is Bernoulli(B[c1_i, c2_j]).
struct SbmSpec {
  int K1 = 1;
  int K2 = 1;
  Eigen::MatrixXd B;  // K1 x K2, entries in [0, 1]
  std::variant<ExplicitLabels, MultinomialMembership> membership =
      MultinomialMembership{{1.0}, {1.0}};

  /// Checks K1/K2/B only (dimensions and entries in [0, 1]).
  void validate_block_matrix() const;

  /// Throws std::invalid_argument on dimension mismatch, B entries outside
  /// [0, 1], or membership probabilities that are negative or do not sum to 1
  /// within 1e-12.
  void validate() const;
};

struct SbmSample {
  BipartiteGraph graph;
  LabelVector c1;
  LabelVector c2;
};

/// Samples a graph from the model. Multinomial labels are redrawn (at most
/// 100 times) until every community on each side is nonempty; exhausting the
/// retries throws std::runtime_error. Deterministic for a fixed seed.
SbmSample generate_sbm(const SbmSpec& spec, int n1, int n2, std::uint64_t seed);

/// P = E[A], i.e. P_ij = B[c1_i, c2_j]. rank(P) <= min{K1, K2}.
Eigen::MatrixXd true_mean_matrix(const SbmSpec& spec, const LabelVector& c1,
                                 const LabelVector& c2);

}  // namespace bcv
