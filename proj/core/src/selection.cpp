#include "bcv/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/SVD>

#include "bcv/parallel.hpp"
#include "bcv/rng.hpp"

namespace bcv {

namespace {

Eigen::SparseMatrix<double> training_matrix(const BipartiteGraph& A, const SplitPlan& plan,
                                            int s) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(A.edges().size());
  const std::int64_t n2 = A.n2();
  for (const auto& [i, j] : A.edges()) {
    if (plan.in_training(s, static_cast<std::int64_t>(i) * n2 + j)) {
      triplets.emplace_back(i, j, 1.0);
    }
  }
  Eigen::SparseMatrix<double> y(A.n1(), A.n2());
  y.setFromTriplets(triplets.begin(), triplets.end());
  y.makeCompressed();
  return y;
}

/// Per-block tallies of pairs and edges, split by training/evaluation
/// membership of replication s. Blocks with out-of-range labels are a
/// programming error and throw via community_sizes.
struct BlockTallies {
  Eigen::MatrixXd train_pairs;
  Eigen::MatrixXd train_edges;
  Eigen::MatrixXd eval_pairs;
  Eigen::MatrixXd eval_edges;
  double train_pair_total = 0.0;
  double train_edge_total = 0.0;
  std::int64_t eval_count = 0;
};

BlockTallies block_tallies(const BipartiteGraph& A, const SplitPlan& plan, int s,
                           const LabelVector& labels1, const LabelVector& labels2, int K1p,
                           int K2p) {
  if (s < 0 || s >= plan.replications()) {
    throw std::invalid_argument("block_tallies: replication index out of range");
  }
  if (static_cast<int>(labels1.size()) != A.n1() || static_cast<int>(labels2.size()) != A.n2()) {
    throw std::invalid_argument("block_tallies: label lengths must match graph sides");
  }
  const auto sizes1 = community_sizes(labels1, K1p);
  const auto sizes2 = community_sizes(labels2, K2p);

  BlockTallies t;
  t.train_pairs.setZero(K1p, K2p);
  t.train_edges.setZero(K1p, K2p);
  t.eval_pairs.setZero(K1p, K2p);
  t.eval_edges.setZero(K1p, K2p);

  // Pair counts: all pairs in a block form the outer product of community
  // sizes; training counts follow by subtracting the evaluation tallies.
  const auto& eval = plan.eval_set(s);
  t.eval_count = static_cast<std::int64_t>(eval.size());
  const int n2 = A.n2();
  for (const std::uint32_t p : eval) {
    const int i = static_cast<int>(p / n2);
    const int j = static_cast<int>(p % n2);
    t.eval_pairs(labels1[i], labels2[j]) += 1.0;
  }
  for (int k1 = 0; k1 < K1p; ++k1) {
    for (int k2 = 0; k2 < K2p; ++k2) {
      t.train_pairs(k1, k2) =
          static_cast<double>(sizes1[k1]) * sizes2[k2] - t.eval_pairs(k1, k2);
    }
  }

  for (const auto& [i, j] : A.edges()) {
    const std::int64_t p = static_cast<std::int64_t>(i) * n2 + j;
    if (plan.in_training(s, p)) {
      t.train_edges(labels1[i], labels2[j]) += 1.0;
    } else {
      t.eval_edges(labels1[i], labels2[j]) += 1.0;
    }
  }

  t.train_pair_total = t.train_pairs.sum();
  t.train_edge_total = t.train_edges.sum();
  return t;
}

Eigen::MatrixXd blocks_from_tallies(const BlockTallies& t) {
  // Cells with no training pair cannot be estimated; they get the global
  // training density.
  const double fallback =
      t.train_pair_total > 0.0 ? t.train_edge_total / t.train_pair_total : 0.0;
  Eigen::MatrixXd bhat(t.train_pairs.rows(), t.train_pairs.cols());
  for (Eigen::Index k1 = 0; k1 < bhat.rows(); ++k1) {
    for (Eigen::Index k2 = 0; k2 < bhat.cols(); ++k2) {
      bhat(k1, k2) = t.train_pairs(k1, k2) > 0.0
                         ? t.train_edges(k1, k2) / t.train_pairs(k1, k2)
                         : fallback;
    }
  }
  return bhat;
}

// Held-out squared error via per-block identity: on a block with c evaluation
// pairs of which e are edges, sum (A - b)^2 = c b^2 - 2 e b + e for 0/1 A.
double eval_mse(const BlockTallies& t, const Eigen::MatrixXd& bhat) {
  double sum = 0.0;
  for (Eigen::Index k1 = 0; k1 < bhat.rows(); ++k1) {
    for (Eigen::Index k2 = 0; k2 < bhat.cols(); ++k2) {
      const double b = bhat(k1, k2);
      sum += t.eval_pairs(k1, k2) * b * b - 2.0 * b * t.eval_edges(k1, k2) +
             t.eval_edges(k1, k2);
    }
  }
  return sum / static_cast<double>(t.eval_count);
}

void validate_config(const BcvConfig& config) {
  if (config.patience < 1) throw std::invalid_argument("select: patience must be >= 1");
  if (config.folds < 1) throw std::invalid_argument("select: folds must be >= 1");
  if (config.C <= 0.0) throw std::invalid_argument("select: C must be positive");
  if (config.restarts < 1) throw std::invalid_argument("select: restarts must be >= 1");
}

}  // namespace

TruncatedSvd complete_matrix(const BipartiteGraph& A, const SplitPlan& plan, int s, int k,
                             const SvdOptions& svd_options) {
  if (s < 0 || s >= plan.replications()) {
    throw std::invalid_argument("complete_matrix: replication index out of range");
  }
  if (plan.n1() != A.n1() || plan.n2() != A.n2()) {
    throw std::invalid_argument("complete_matrix: plan dimensions do not match the graph");
  }
  TruncatedSvd svd = truncated_svd(training_matrix(A, plan, s), k, svd_options);
  svd.sigma /= plan.training_proportion();
  return svd;
}

TruncatedSvd complete_matrix_full(const BipartiteGraph& A, int k,
                                  const SvdOptions& svd_options) {
  return truncated_svd(A.to_sparse(), k, svd_options);
}

std::pair<LabelVector, LabelVector> estimate_labels(const TruncatedSvd& completed, int K1p,
                                                    int K2p, int restarts,
                                                    std::uint64_t seed) {
  if (completed.rank() != std::min(K1p, K2p)) {
    throw std::invalid_argument("estimate_labels: completion rank must equal min{K1',K2'}");
  }
  KMeansOptions options;
  options.restarts = restarts;
  const KMeansResult side1 =
      kmeans(completed.U, K1p, options, derive_seed(seed, 0x10ccULL, 1));
  const KMeansResult side2 =
      kmeans(completed.V, K2p, options, derive_seed(seed, 0x10ccULL, 2));
  return {renumber_first_appearance(LabelVector(side1.labels, 1)),
          renumber_first_appearance(LabelVector(side2.labels, 2))};
}

Eigen::MatrixXd estimate_blocks(const BipartiteGraph& A, const SplitPlan& plan, int s,
                                const LabelVector& labels1, const LabelVector& labels2,
                                int K1p, int K2p) {
  return blocks_from_tallies(block_tallies(A, plan, s, labels1, labels2, K1p, K2p));
}

double penalty_factor(const BipartiteGraph& A, double C, PenaltyRule rule) {
  if (C <= 0.0) throw std::invalid_argument("penalty_factor: C must be positive");
  const double rho = A.density();
  switch (rule) {
    case PenaltyRule::kRho32SqrtMinN:
      return C * std::pow(rho, 1.5) / std::sqrt(static_cast<double>(std::min(A.n1(), A.n2())));
    case PenaltyRule::kRho2SqrtLogN:
      return C * rho * rho / std::sqrt(std::log(static_cast<double>(std::max(A.n1(), A.n2()))));
  }
  throw std::logic_error("penalty_factor: unknown rule");
}

CandidateFit candidate_loss(const BipartiteGraph& A, const SplitPlan& plan, int s, int K1p,
                            int K2p, double lambda, const ComplexityRule& d_rule,
                            std::uint64_t seed, int restarts,
                            const TruncatedSvd* precomputed_svd,
                            const SvdOptions& svd_options) {
  if (K1p < 1 || K2p < 1) throw std::invalid_argument("candidate_loss: K1', K2' must be >= 1");
  if (s < 0 || s >= plan.replications()) {
    throw std::invalid_argument("candidate_loss: replication index out of range");
  }
  if (plan.eval_set(s).empty()) {
    throw std::runtime_error("candidate_loss: evaluation set of replication " +
                             std::to_string(s) + " is empty");
  }

  CandidateFit fit;
  fit.K1 = K1p;
  fit.K2 = K2p;
  fit.rank = std::min(K1p, K2p);

  TruncatedSvd local;
  const TruncatedSvd* svd = precomputed_svd;
  if (svd == nullptr) {
    local = complete_matrix(A, plan, s, fit.rank, svd_options);
    svd = &local;
  }

  std::tie(fit.labels1, fit.labels2) = estimate_labels(*svd, K1p, K2p, restarts, seed);

  const BlockTallies tallies = block_tallies(A, plan, s, fit.labels1, fit.labels2, K1p, K2p);
  fit.Bhat = blocks_from_tallies(tallies);
  fit.test_mse = eval_mse(tallies, fit.Bhat);
  fit.penalty = d_rule(K1p, K2p) * lambda;
  fit.total = fit.test_mse + fit.penalty;
  return fit;
}

SelectionResult select(const BipartiteGraph& A, const BcvConfig& config) {
  const SplitPlan plan =
      config.mode == SplitMode::kKFold
          ? make_kfold_split(A.n1(), A.n2(), config.folds, derive_seed(config.seed, 0x5917ULL))
          : make_bernoulli_split(A.n1(), A.n2(), config.w, config.folds,
                                 derive_seed(config.seed, 0x5917ULL));
  return select(A, config, plan);
}

SelectionResult select(const BipartiteGraph& A, const BcvConfig& config,
                       const SplitPlan& plan) {
  validate_config(config);
  if (plan.n1() != A.n1() || plan.n2() != A.n2()) {
    throw std::invalid_argument("select: plan dimensions do not match the graph");
  }

  const int min_side = std::min(A.n1(), A.n2());
  const int max_frontier =
      config.max_frontier > 0 ? std::min(config.max_frontier, min_side) : min_side;
  const int S = plan.replications();

  SelectionResult result;
  result.rho_hat = A.density();
  result.lambda = penalty_factor(A, config.C, config.penalty_rule);
  if (A.edge_count() == 0) {
    result.warnings.push_back(
        "empty graph: lambda = 0 and every candidate ties at zero loss; "
        "the tie-break selects (1,1)");
  }

  // SVDs depend only on (replication, rank), so candidates at the same rank
  // share one factorization.
  std::map<std::pair<int, int>, TruncatedSvd> svd_cache;

  double best_total = std::numeric_limits<double>::infinity();
  int no_improve = 0;

  for (int k = 1; k <= max_frontier; ++k) {
    std::vector<std::pair<int, int>> cands;
    for (int i = 1; i <= k; ++i) cands.emplace_back(i, k);
    for (int j = 1; j < k; ++j) cands.emplace_back(k, j);
    std::sort(cands.begin(), cands.end());

    std::vector<std::pair<int, int>> missing;  // (s, rank)
    for (int s = 0; s < S; ++s) {
      for (const auto& [k1, k2] : cands) {
        const std::pair<int, int> key{s, std::min(k1, k2)};
        if (svd_cache.emplace(key, TruncatedSvd{}).second) missing.push_back(key);
      }
    }
    parallel_for(static_cast<std::int64_t>(missing.size()), config.threads, [&](std::int64_t t) {
      const auto [s, rank] = missing[t];
      svd_cache[{s, rank}] = complete_matrix(A, plan, s, rank);
    });

    const std::int64_t n_tasks = static_cast<std::int64_t>(S) * cands.size();
    std::vector<CandidateFit> fits(n_tasks);
    parallel_for(n_tasks, config.threads, [&](std::int64_t t) {
      const int s = static_cast<int>(t / cands.size());
      const auto [k1, k2] = cands[t % cands.size()];
      fits[t] = candidate_loss(A, plan, s, k1, k2, result.lambda, config.d_rule,
                               derive_seed(config.seed, s, k1, k2), config.restarts,
                               &svd_cache.at({s, std::min(k1, k2)}));
    });

    double best_new = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < cands.size(); ++c) {
      double mse_sum = 0.0;
      for (int s = 0; s < S; ++s) mse_sum += fits[s * cands.size() + c].test_mse;
      CandidateScore score;
      score.mse = mse_sum / static_cast<double>(S);
      score.penalty = config.d_rule(cands[c].first, cands[c].second) * result.lambda;
      score.total = score.mse + score.penalty;
      score.step = k;
      result.surface.emplace(cands[c], score);
      best_new = std::min(best_new, score.total);
    }

    const bool improved = best_new < best_total;
    if (improved) {
      best_total = best_new;
      no_improve = 0;
    } else {
      ++no_improve;
    }
    result.trace.push_back({k, static_cast<int>(cands.size()), best_new, best_total, improved});
    if (no_improve >= config.patience) break;
  }

  // Argmin over everything visited; ties prefer the smaller K1'*K2', then K1'.
  const std::pair<int, int>* best_pair = nullptr;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [pair, score] : result.surface) {
    bool take = false;
    if (score.total < best) {
      take = true;
    } else if (score.total == best && best_pair != nullptr) {
      const long long d_new = static_cast<long long>(pair.first) * pair.second;
      const long long d_old = static_cast<long long>(best_pair->first) * best_pair->second;
      take = d_new < d_old || (d_new == d_old && pair.first < best_pair->first);
    }
    if (take) {
      best = score.total;
      best_pair = &pair;
    }
  }
  result.K1hat = best_pair->first;
  result.K2hat = best_pair->second;
  return result;
}

double incoherence_beta(const SbmSpec& spec, const LabelVector& c1, const LabelVector& c2) {
  spec.validate_block_matrix();
  const auto sizes1 = community_sizes(c1, spec.K1);
  const auto sizes2 = community_sizes(c2, spec.K2);

  Eigen::VectorXd sqrt_n1(spec.K1), sqrt_n2(spec.K2);
  for (int k = 0; k < spec.K1; ++k) sqrt_n1[k] = std::sqrt(static_cast<double>(sizes1[k]));
  for (int k = 0; k < spec.K2; ++k) sqrt_n2[k] = std::sqrt(static_cast<double>(sizes2[k]));

  const Eigen::MatrixXd bbar = sqrt_n1.asDiagonal() * spec.B * sqrt_n2.asDiagonal();
  if (bbar.norm() == 0.0) {
    throw std::invalid_argument("incoherence_beta: Bbar is the zero matrix");
  }
  if (spec.K2 < 2) return 1.0;

  const int K = std::min(spec.K1, spec.K2);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(bbar, Eigen::ComputeThinV);
  const Eigen::MatrixXd v = svd.matrixV().leftCols(K);
  const Eigen::MatrixXd m =
      v * v.transpose() - Eigen::MatrixXd::Identity(spec.K2, spec.K2);

  double worst = 0.0;
  for (int i = 0; i < spec.K2; ++i) {
    for (int j = i + 1; j < spec.K2; ++j) {
      const double mu = 0.5 * (m(i, i) + m(j, j));
      const double r = std::hypot(0.5 * (m(i, i) - m(j, j)), m(i, j));
      worst = std::max(worst, std::abs(mu) + r);
    }
  }
  return 1.0 - worst;
}

}  // namespace bcv
