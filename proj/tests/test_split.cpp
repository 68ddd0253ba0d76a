#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "bcv/split.hpp"

using namespace bcv;

TEST_CASE("kfold split partitions every pair exactly once") {
  const SplitPlan plan = make_kfold_split(20, 30, 10, 42);
  CHECK(plan.replications() == 10);
  CHECK(plan.training_proportion() == doctest::Approx(0.9));

  std::set<std::uint32_t> seen;
  for (int s = 0; s < 10; ++s) {
    CHECK(plan.eval_set(s).size() == 60);
    for (const auto p : plan.eval_set(s)) {
      CHECK(seen.insert(p).second);  // disjoint
      CHECK(!plan.in_training(s, p));
    }
  }
  CHECK(seen.size() == 600);  // union covers all pairs

  // Pairs outside the eval fold are training pairs for that replication.
  for (int s = 0; s < 10; ++s) {
    std::int64_t train_count = 0;
    for (std::int64_t p = 0; p < 600; ++p) train_count += plan.in_training(s, p) ? 1 : 0;
    CHECK(train_count == 540);
  }
}

TEST_CASE("bernoulli split concentrates near w and is seed-stable") {
  const SplitPlan plan = make_bernoulli_split(100, 100, 0.9, 3, 7);
  for (int s = 0; s < 3; ++s) {
    const std::int64_t eval = static_cast<std::int64_t>(plan.eval_set(s).size());
    const std::int64_t train = 10000 - eval;
    CHECK(std::abs(static_cast<double>(train) - 9000.0) <= 5.0 * std::sqrt(10000 * 0.9 * 0.1));
    for (const auto p : plan.eval_set(s)) CHECK(!plan.in_training(s, p));
  }

  const SplitPlan again = make_bernoulli_split(100, 100, 0.9, 3, 7);
  for (int s = 0; s < 3; ++s) CHECK(plan.eval_set(s) == again.eval_set(s));

  const SplitPlan kfold = make_kfold_split(20, 30, 10, 42);
  const SplitPlan kfold_again = make_kfold_split(20, 30, 10, 42);
  for (int s = 0; s < 10; ++s) CHECK(kfold.eval_set(s) == kfold_again.eval_set(s));
}

TEST_CASE("split parameter validation") {
  CHECK_THROWS_AS(make_bernoulli_split(10, 10, 0.0, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_bernoulli_split(10, 10, 1.0, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_bernoulli_split(10, 10, -0.2, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_bernoulli_split(10, 10, 0.5, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_kfold_split(10, 10, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_kfold_split(2, 2, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_kfold_split(0, 10, 2, 1), std::invalid_argument);
}
