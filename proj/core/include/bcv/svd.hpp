#pragma once

#include <cstdint>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace bcv {

/// Rank-k factorization U * diag(sigma) * V^T with column-orthonormal U, V
/// and nonincreasing nonnegative sigma. Columns are sign-normalized so the
/// first nonzero entry of each U column is nonnegative.
struct TruncatedSvd {
  Eigen::MatrixXd U;      // n1 x k
  Eigen::MatrixXd V;      // n2 x k
  Eigen::VectorXd sigma;  // k, nonincreasing

  int rank() const { return static_cast<int>(sigma.size()); }
  Eigen::MatrixXd reconstruct() const { return U * sigma.asDiagonal() * V.transpose(); }
};

struct SvdOptions {
  /// Matrices whose smaller dimension is at most this use an exact dense SVD;
  /// larger ones use randomized subspace iteration. Candidate ranks in this
  /// codebase are tiny, so the randomized path stays cheap at any size.
  int dense_cutoff = 512;
  int oversample = 10;
  int max_power_iters = 7;
  /// Early-stop threshold on the relative change of the singular values
  /// between power iterations.
  double tol = 1e-8;
  /// Seed for the randomized range finder; with the fixed default the
  /// factorization is a pure function of (M, k).
  std::uint64_t seed = 0x51cc5eed2024ULL;
};

/// Best rank-k approximation by truncated SVD. Throws std::invalid_argument
/// if k is outside [1, min(rows, cols)] or the matrix has non-finite entries.
TruncatedSvd truncated_svd(const Eigen::MatrixXd& m, int k, const SvdOptions& options = {});
TruncatedSvd truncated_svd(const Eigen::SparseMatrix<double>& m, int k,
                           const SvdOptions& options = {});

}  // namespace bcv
