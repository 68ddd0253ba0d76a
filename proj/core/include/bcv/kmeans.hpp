#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace bcv {

struct KMeansResult {
  std::vector<int> labels;  // in [0, K)
  Eigen::MatrixXd centers;  // K x dim
  double objective = 0.0;   // sum of squared distances to assigned centers
};

struct KMeansOptions {
  int restarts = 10;
  int max_iters = 300;
};

/// Lloyd iterations from k-means++ seeds, best of `restarts` runs. Distance
/// ties assign to the lowest center index; a center that loses all points is
/// re-seeded at the point farthest from its assigned center. Deterministic
/// for a fixed seed (per-restart streams are derived from it), so the
/// best-of-r objective is nonincreasing in r.
KMeansResult kmeans(const Eigen::MatrixXd& points, int K, const KMeansOptions& options,
                    std::uint64_t seed);

}  // namespace bcv
