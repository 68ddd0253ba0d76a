#pragma once

#include <cstdint>
#include <vector>

namespace bcv {

enum class SplitMode { kBernoulli, kKFold };

/// Assignment of every pair (i, j) in [n1] x [n2] to a training or evaluation
/// set, for each of S replications. K-fold partitions the pairs into S
/// near-equal evaluation blocks (each pair evaluated exactly once, implied
/// w = 1 - 1/S); Bernoulli assigns each pair to training independently with
/// probability w, independently across replications.
class SplitPlan {
 public:
  SplitMode mode() const { return mode_; }
  int n1() const { return n1_; }
  int n2() const { return n2_; }
  int replications() const { return S_; }
  double training_proportion() const { return w_; }
  std::int64_t pair_count() const { return static_cast<std::int64_t>(n1_) * n2_; }

  /// Pair index convention: p = i * n2 + j.
  bool in_training(int s, std::int64_t pair) const {
    if (mode_ == SplitMode::kKFold) return fold_[pair] != s;
    return (train_bits_[s][pair >> 6] >> (pair & 63)) & 1ULL;
  }

  /// Ascending pair indices of the evaluation set of replication s.
  const std::vector<std::uint32_t>& eval_set(int s) const { return eval_pairs_[s]; }

  friend SplitPlan make_bernoulli_split(int n1, int n2, double w, int S, std::uint64_t seed);
  friend SplitPlan make_kfold_split(int n1, int n2, int S, std::uint64_t seed);
  friend SplitPlan make_full_split(int n1, int n2);

 private:
  SplitPlan() = default;

  SplitMode mode_ = SplitMode::kKFold;
  int n1_ = 0;
  int n2_ = 0;
  int S_ = 0;
  double w_ = 0.0;
  std::vector<std::uint8_t> fold_;                         // kfold: fold id per pair
  std::vector<std::vector<std::uint64_t>> train_bits_;     // bernoulli: S bitmasks
  std::vector<std::vector<std::uint32_t>> eval_pairs_;
};

/// Independent Bernoulli(w) training membership per pair, S replications.
/// Requires 0 < w < 1 and S >= 1.
SplitPlan make_bernoulli_split(int n1, int n2, double w, int S, std::uint64_t seed);

/// Random permutation of pair indices chopped into S near-equal evaluation
/// folds. Requires S >= 2 and S <= n1*n2.
SplitPlan make_kfold_split(int n1, int n2, int S, std::uint64_t seed);

/// Degenerate single-replication plan with every pair in training (w = 1
/// and an empty evaluation set); used for full-matrix refits and noiseless
/// oracle checks, not for cross-validation.
SplitPlan make_full_split(int n1, int n2);

}  // namespace bcv
