#include <benchmark/benchmark.h>

#include <utility>
#include <vector>

#include "bcv/datasets.hpp"
#include "bcv/kmeans.hpp"
#include "bcv/rng.hpp"
#include "bcv/selection.hpp"
#include "bcv/split.hpp"
#include "bcv/svd.hpp"

namespace {

bcv::SbmSpec planted_spec(int k, double r) {
  bcv::SbmSpec spec;
  spec.K1 = k;
  spec.K2 = k;
  spec.B = Eigen::MatrixXd::Constant(k, k, 0.2 * r);
  for (int i = 0; i < k; ++i) spec.B(i, i) = 0.85 * r;
  spec.membership = bcv::MultinomialMembership{std::vector<double>(k, 1.0 / k),
                                               std::vector<double>(k, 1.0 / k)};
  return spec;
}

void BM_GenerateSbm(benchmark::State& state) {
  const auto spec = planted_spec(3, 0.1);
  const int n = static_cast<int>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bcv::generate_sbm(spec, n, n, seed++));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * n);
}
BENCHMARK(BM_GenerateSbm)->Arg(300)->Arg(900);

void BM_TruncatedSvdDense(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  bcv::Rng rng(7);
  Eigen::MatrixXd m(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) m(i, j) = rng.uniform(0.0, 1.0);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(bcv::truncated_svd(m, 3));
  }
}
BENCHMARK(BM_TruncatedSvdDense)->Arg(128)->Arg(512);

void BM_TruncatedSvdSparseRandomized(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto sample = bcv::generate_sbm(planted_spec(3, 0.1), n, n, 5);
  const Eigen::SparseMatrix<double> m = sample.graph.to_sparse();
  for (auto _ : state) {
    benchmark::DoNotOptimize(bcv::truncated_svd(m, 3));
  }
  state.SetItemsProcessed(state.iterations() * sample.graph.edge_count());
}
BENCHMARK(BM_TruncatedSvdSparseRandomized)->Arg(900)->Arg(2000);

void BM_KMeans(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  bcv::Rng rng(11);
  Eigen::MatrixXd pts(n, 3);
  for (int i = 0; i < n; ++i) {
    const int c = static_cast<int>(rng.uniform_int(3));
    for (int d = 0; d < 3; ++d) pts(i, d) = c * 2.0 + rng.normal() * 0.3;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(bcv::kmeans(pts, 3, {}, 42));
  }
}
BENCHMARK(BM_KMeans)->Arg(900)->Arg(4000);

void BM_CandidateLoss(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto sample = bcv::generate_sbm(planted_spec(3, 0.1), n, n, 9);
  const bcv::SplitPlan plan = bcv::make_kfold_split(n, n, 10, 3);
  const double lambda = bcv::penalty_factor(sample.graph, 0.01);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        bcv::candidate_loss(sample.graph, plan, 0, 3, 3, lambda, {}, seed++));
  }
}
BENCHMARK(BM_CandidateLoss)->Arg(300)->Arg(900);

void BM_SouthernWomenSelect(benchmark::State& state) {
  const bcv::BipartiteGraph women = bcv::southern_women();
  std::uint64_t seed = 1;
  for (auto _ : state) {
    bcv::BcvConfig config;
    config.seed = seed++;
    config.threads = 1;
    benchmark::DoNotOptimize(bcv::select(women, config));
  }
}
BENCHMARK(BM_SouthernWomenSelect);

}  // namespace

BENCHMARK_MAIN();
