#include "bcv/split.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "bcv/rng.hpp"

namespace bcv {

namespace {

void check_sides(int n1, int n2) {
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("make_split: side sizes must be positive");
  const std::int64_t pairs = static_cast<std::int64_t>(n1) * n2;
  if (pairs > static_cast<std::int64_t>(std::numeric_limits<std::uint32_t>::max())) {
    throw std::invalid_argument("make_split: pair count exceeds 2^32");
  }
}

}  // namespace

SplitPlan make_bernoulli_split(int n1, int n2, double w, int S, std::uint64_t seed) {
  check_sides(n1, n2);
  if (!(w > 0.0 && w < 1.0)) {
    throw std::invalid_argument("make_bernoulli_split: w must lie in (0,1), got " +
                                std::to_string(w));
  }
  if (S < 1) throw std::invalid_argument("make_bernoulli_split: S must be >= 1");

  SplitPlan plan;
  plan.mode_ = SplitMode::kBernoulli;
  plan.n1_ = n1;
  plan.n2_ = n2;
  plan.S_ = S;
  plan.w_ = w;

  const std::int64_t pairs = plan.pair_count();
  const std::size_t words = static_cast<std::size_t>((pairs + 63) / 64);
  plan.train_bits_.assign(S, std::vector<std::uint64_t>(words, 0));
  plan.eval_pairs_.resize(S);

  for (int s = 0; s < S; ++s) {
    Rng rng(derive_seed(seed, 0xbe72ULL, static_cast<std::uint64_t>(s)));
    auto& bits = plan.train_bits_[s];
    auto& eval = plan.eval_pairs_[s];
    for (std::int64_t p = 0; p < pairs; ++p) {
      if (rng.bernoulli(w)) {
        bits[p >> 6] |= 1ULL << (p & 63);
      } else {
        eval.push_back(static_cast<std::uint32_t>(p));
      }
    }
  }
  return plan;
}

SplitPlan make_full_split(int n1, int n2) {
  check_sides(n1, n2);
  SplitPlan plan;
  plan.mode_ = SplitMode::kBernoulli;
  plan.n1_ = n1;
  plan.n2_ = n2;
  plan.S_ = 1;
  plan.w_ = 1.0;
  const std::int64_t pairs = plan.pair_count();
  plan.train_bits_.assign(1, std::vector<std::uint64_t>((pairs + 63) / 64, ~0ULL));
  plan.eval_pairs_.resize(1);
  return plan;
}

SplitPlan make_kfold_split(int n1, int n2, int S, std::uint64_t seed) {
  check_sides(n1, n2);
  const std::int64_t pairs = static_cast<std::int64_t>(n1) * n2;
  if (S < 2) throw std::invalid_argument("make_kfold_split: S must be >= 2");
  if (S > pairs) throw std::invalid_argument("make_kfold_split: S exceeds pair count");
  if (S > 255) throw std::invalid_argument("make_kfold_split: S must be <= 255");

  SplitPlan plan;
  plan.mode_ = SplitMode::kKFold;
  plan.n1_ = n1;
  plan.n2_ = n2;
  plan.S_ = S;
  plan.w_ = 1.0 - 1.0 / static_cast<double>(S);

  std::vector<std::uint32_t> perm(pairs);
  for (std::int64_t p = 0; p < pairs; ++p) perm[p] = static_cast<std::uint32_t>(p);
  Rng rng(derive_seed(seed, 0xf01dULL));
  rng.shuffle(perm);

  // Chop the permutation into S blocks whose sizes differ by at most one.
  plan.fold_.assign(pairs, 0);
  plan.eval_pairs_.resize(S);
  const std::int64_t base = pairs / S;
  const std::int64_t extra = pairs % S;
  std::int64_t pos = 0;
  for (int s = 0; s < S; ++s) {
    const std::int64_t len = base + (s < extra ? 1 : 0);
    auto& eval = plan.eval_pairs_[s];
    eval.assign(perm.begin() + pos, perm.begin() + pos + len);
    std::sort(eval.begin(), eval.end());
    for (std::uint32_t p : eval) plan.fold_[p] = static_cast<std::uint8_t>(s);
    pos += len;
  }
  return plan;
}

}  // namespace bcv
