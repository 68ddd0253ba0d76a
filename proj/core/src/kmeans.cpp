#include "bcv/kmeans.hpp"

#include <limits>
#include <stdexcept>
#include <string>

#include "bcv/rng.hpp"

namespace bcv {

namespace {

struct Assignment {
  std::vector<int> labels;
  Eigen::VectorXd dist2;  // squared distance to assigned center
};

Assignment assign_points(const Eigen::MatrixXd& pts, const Eigen::MatrixXd& centers) {
  const int m = static_cast<int>(pts.rows());
  const int K = static_cast<int>(centers.rows());
  Assignment a;
  a.labels.resize(m);
  a.dist2.resize(m);
  for (int i = 0; i < m; ++i) {
    int best = 0;
    double best_d = (pts.row(i) - centers.row(0)).squaredNorm();
    for (int c = 1; c < K; ++c) {
      const double d = (pts.row(i) - centers.row(c)).squaredNorm();
      if (d < best_d) {  // ties keep the lowest center index
        best_d = d;
        best = c;
      }
    }
    a.labels[i] = best;
    a.dist2[i] = best_d;
  }
  return a;
}

Eigen::MatrixXd kmeanspp_init(const Eigen::MatrixXd& pts, int K, Rng& rng) {
  const int m = static_cast<int>(pts.rows());
  Eigen::MatrixXd centers(K, pts.cols());
  centers.row(0) = pts.row(static_cast<int>(rng.uniform_int(m)));
  Eigen::VectorXd d2(m);
  for (int i = 0; i < m; ++i) d2[i] = (pts.row(i) - centers.row(0)).squaredNorm();

  for (int c = 1; c < K; ++c) {
    const double total = d2.sum();
    int pick;
    if (total > 0.0) {
      const double u = rng.uniform01() * total;
      double acc = 0.0;
      pick = m - 1;
      for (int i = 0; i < m; ++i) {
        acc += d2[i];
        if (u < acc) {
          pick = i;
          break;
        }
      }
    } else {
      // Fewer distinct points than centers; any point works.
      pick = static_cast<int>(rng.uniform_int(m));
    }
    centers.row(c) = pts.row(pick);
    for (int i = 0; i < m; ++i) {
      d2[i] = std::min(d2[i], (pts.row(i) - centers.row(c)).squaredNorm());
    }
  }
  return centers;
}

KMeansResult lloyd_run(const Eigen::MatrixXd& pts, int K, int max_iters, Rng& rng) {
  const int m = static_cast<int>(pts.rows());
  Eigen::MatrixXd centers = kmeanspp_init(pts, K, rng);
  Assignment cur = assign_points(pts, centers);

  for (int iter = 0; iter < max_iters; ++iter) {
    Eigen::MatrixXd means = Eigen::MatrixXd::Zero(K, pts.cols());
    std::vector<int> counts(K, 0);
    for (int i = 0; i < m; ++i) {
      means.row(cur.labels[i]) += pts.row(i);
      ++counts[cur.labels[i]];
    }
    Eigen::VectorXd reseed_d2 = cur.dist2;
    for (int c = 0; c < K; ++c) {
      if (counts[c] > 0) {
        means.row(c) /= static_cast<double>(counts[c]);
      } else {
        // Re-seed a starved center at the point farthest from its assigned
        // center; each re-seeded point is consumed so two starved centers
        // cannot land on the same row.
        int far = 0;
        for (int i = 1; i < m; ++i) {
          if (reseed_d2[i] > reseed_d2[far]) far = i;
        }
        means.row(c) = pts.row(far);
        reseed_d2[far] = -1.0;
      }
    }
    centers = means;
    Assignment next = assign_points(pts, centers);
    const bool changed = next.labels != cur.labels;
    cur = std::move(next);
    if (!changed) break;
  }

  KMeansResult result;
  result.labels = std::move(cur.labels);
  result.centers = std::move(centers);
  result.objective = cur.dist2.sum();
  return result;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, int K, const KMeansOptions& options,
                    std::uint64_t seed) {
  const int m = static_cast<int>(points.rows());
  if (K < 1) throw std::invalid_argument("kmeans: K must be positive");
  if (K > m) {
    throw std::invalid_argument("kmeans: K=" + std::to_string(K) + " exceeds point count " +
                                std::to_string(m));
  }
  if (options.restarts < 1) throw std::invalid_argument("kmeans: restarts must be positive");
  if (!points.allFinite()) throw std::invalid_argument("kmeans: non-finite coordinates");

  KMeansResult best;
  best.objective = std::numeric_limits<double>::infinity();
  for (int r = 0; r < options.restarts; ++r) {
    Rng rng(derive_seed(seed, 0x6d5aULL, static_cast<std::uint64_t>(r)));
    KMeansResult run = lloyd_run(points, K, options.max_iters, rng);
    if (run.objective < best.objective) best = std::move(run);
  }
  return best;
}

}  // namespace bcv
