#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bcv/bipartite_graph.hpp"
#include "bcv/kmeans.hpp"
#include "bcv/labels.hpp"
#include "bcv/sbm.hpp"
#include "bcv/split.hpp"
#include "bcv/svd.hpp"

namespace bcv {

/// Data-driven penalty factor form. The default scales as
/// C * rho_hat^{3/2} / sqrt(min{n1, n2}); the alternate
/// C * rho_hat^2 / sqrt(log max{n1, n2}) is kept for sensitivity studies.
enum class PenaltyRule { kRho32SqrtMinN, kRho2SqrtLogN };

/// Model complexity d_{K1,K2}. Product (K1*K2, the parameter count of the
/// block matrix) by default; a sparse override table can pin specific pairs.
struct ComplexityRule {
  std::map<std::pair<int, int>, double> table;

  double operator()(int K1, int K2) const {
    if (!table.empty()) {
      const auto it = table.find({K1, K2});
      if (it != table.end()) return it->second;
    }
    return static_cast<double>(K1) * K2;
  }
};

struct BcvConfig {
  SplitMode mode = SplitMode::kKFold;
  /// Replication count S: fold count under kfold, split count under Bernoulli.
  int folds = 10;
  /// Training proportion for Bernoulli splits (kfold implies w = 1 - 1/S).
  double w = 0.9;
  double C = 0.01;
  PenaltyRule penalty_rule = PenaltyRule::kRho32SqrtMinN;
  int patience = 3;
  /// k-means restarts per clustering call.
  int restarts = 10;
  /// Largest frontier step; 0 means min{n1, n2}.
  int max_frontier = 0;
  ComplexityRule d_rule;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
};

/// One (K1', K2') evaluation on a single replication.
struct CandidateFit {
  int K1 = 0;
  int K2 = 0;
  int rank = 0;  // min{K1, K2}
  LabelVector labels1;
  LabelVector labels2;
  Eigen::MatrixXd Bhat;  // K1 x K2, entries in [0, 1]
  double test_mse = 0.0;
  double penalty = 0.0;
  double total = 0.0;  // test_mse + penalty, computed as that exact sum
};

/// Replication-averaged score of one candidate pair.
struct CandidateScore {
  double mse = 0.0;
  double penalty = 0.0;
  double total = 0.0;
  int step = 0;  // frontier step at which the pair was visited
};

struct FrontierStep {
  int k = 0;
  int n_new = 0;              // candidates added at this step
  double best_new = 0.0;      // best averaged total among them
  double best_so_far = 0.0;   // global best after the step
  bool improved = false;
};

struct SelectionResult {
  int K1hat = 0;
  int K2hat = 0;
  std::map<std::pair<int, int>, CandidateScore> surface;
  std::vector<FrontierStep> trace;
  double lambda = 0.0;
  double rho_hat = 0.0;
  std::vector<std::string> warnings;
};

/// (1/w) S_H(Y, k) for Y = A masked to the training pairs of replication s,
/// kept in factored form (U, sigma / w, V).
TruncatedSvd complete_matrix(const BipartiteGraph& A, const SplitPlan& plan, int s, int k,
                             const SvdOptions& svd_options = {});

/// Fully observed variant (every pair training, w = 1); used for final refits
/// and noiseless oracle checks.
TruncatedSvd complete_matrix_full(const BipartiteGraph& A, int k,
                                  const SvdOptions& svd_options = {});

/// Spectral labels: k-means with K1p clusters on the rows of U and K2p
/// clusters on the rows of V. Requires completed.rank() == min{K1p, K2p}.
/// Outputs are renumbered surjectively in first-appearance order.
std::pair<LabelVector, LabelVector> estimate_labels(const TruncatedSvd& completed, int K1p,
                                                    int K2p, int restarts, std::uint64_t seed);

/// Block-mean estimator on the training pairs of replication s: entry
/// (k1, k2) is the mean of A over training pairs in that block; blocks with
/// no training pair fall back to the global training-edge density.
Eigen::MatrixXd estimate_blocks(const BipartiteGraph& A, const SplitPlan& plan, int s,
                                const LabelVector& labels1, const LabelVector& labels2,
                                int K1p, int K2p);

/// lambda = C * rho_hat^{3/2} / sqrt(min{n1,n2}) on the full matrix A
/// (or the alternate form). An empty graph yields 0.
double penalty_factor(const BipartiteGraph& A, double C,
                      PenaltyRule rule = PenaltyRule::kRho32SqrtMinN);

/// Full candidate evaluation on replication s: completion at rank
/// min{K1p,K2p}, spectral labels, block estimates, held-out MSE, penalty
/// d_{K1p,K2p} * lambda. `precomputed_svd`, when given, must equal
/// complete_matrix(A, plan, s, min{K1p,K2p}).
CandidateFit candidate_loss(const BipartiteGraph& A, const SplitPlan& plan, int s, int K1p,
                            int K2p, double lambda, const ComplexityRule& d_rule,
                            std::uint64_t seed, int restarts = 10,
                            const TruncatedSvd* precomputed_svd = nullptr,
                            const SvdOptions& svd_options = {});

/// The full selection procedure: builds the split plan, runs the adaptive
/// frontier search (step k visits all pairs with max{K1',K2'} = k, stopping
/// after `patience` consecutive steps without improving the global best),
/// and returns the argmin over all visited candidates. Ties break toward
/// the smallest K1'*K2', then the smallest K1'. Candidate evaluations are
/// independent tasks seeded by hash(seed, s, K1', K2'), so results do not
/// depend on visit or scheduling order; with patience = INT_MAX and
/// max_frontier = m the output equals an exhaustive grid search on [m]x[m].
SelectionResult select(const BipartiteGraph& A, const BcvConfig& config = {});

/// Variant evaluating on a caller-supplied plan instead of building one.
SelectionResult select(const BipartiteGraph& A, const BcvConfig& config,
                       const SplitPlan& plan);

/// Incoherence diagnostic: 1 - max over 2-subsets I of [K2] of the spectral
/// norm of (V V^T - I_{K2}) restricted to I, where V holds the right singular
/// vectors of Bbar = N1^{1/2} B N2^{1/2}. Throws if Bbar is zero.
double incoherence_beta(const SbmSpec& spec, const LabelVector& c1, const LabelVector& c2);

}  // namespace bcv
