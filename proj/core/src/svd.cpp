#include "bcv/svd.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "bcv/rng.hpp"

namespace bcv {

namespace {

void check_rank(Eigen::Index rows, Eigen::Index cols, int k) {
  const auto min_dim = std::min(rows, cols);
  if (k < 1 || k > min_dim) {
    throw std::invalid_argument("truncated_svd: k=" + std::to_string(k) +
                                " outside [1," + std::to_string(min_dim) + "]");
  }
}

void enforce_sign_convention(Eigen::MatrixXd& U, Eigen::MatrixXd& V) {
  for (Eigen::Index c = 0; c < U.cols(); ++c) {
    for (Eigen::Index r = 0; r < U.rows(); ++r) {
      const double v = U(r, c);
      if (v != 0.0) {
        if (v < 0.0) {
          U.col(c) = -U.col(c);
          V.col(c) = -V.col(c);
        }
        break;
      }
    }
  }
}

TruncatedSvd dense_exact(const Eigen::MatrixXd& m, int k) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  TruncatedSvd out;
  out.U = svd.matrixU().leftCols(k);
  out.V = svd.matrixV().leftCols(k);
  out.sigma = svd.singularValues().head(k);
  enforce_sign_convention(out.U, out.V);
  return out;
}

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = rng.normal();
  }
  return g;
}

Eigen::MatrixXd thin_q(const Eigen::MatrixXd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

// Randomized subspace iteration (range finder + power iterations). Only the
// products M*X and M^T*X touch the matrix, so a sparse M stays sparse.
template <class Matrix>
TruncatedSvd randomized(const Matrix& m, int k, const SvdOptions& options) {
  const Eigen::Index n1 = m.rows();
  const Eigen::Index n2 = m.cols();
  const Eigen::Index l = std::min<Eigen::Index>(k + options.oversample, std::min(n1, n2));

  Eigen::MatrixXd z = m * gaussian_matrix(n2, l, options.seed);
  Eigen::MatrixXd q = thin_q(z);

  Eigen::VectorXd prev_sigma;
  Eigen::MatrixXd small_u, small_v;
  Eigen::VectorXd sigma;
  for (int iter = 0; iter <= options.max_power_iters; ++iter) {
    // B^T = M^T Q is n2 x l; the SVD of B gives the current estimate.
    Eigen::MatrixXd bt = m.transpose() * q;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(bt.transpose(),
                                       Eigen::ComputeThinU | Eigen::ComputeThinV);
    sigma = svd.singularValues().head(k);
    small_u = svd.matrixU().leftCols(k);
    small_v = svd.matrixV().leftCols(k);

    if (prev_sigma.size() == sigma.size()) {
      const double denom = std::max(sigma.norm(), 1e-300);
      if ((sigma - prev_sigma).norm() / denom < options.tol) break;
    }
    prev_sigma = sigma;
    if (iter == options.max_power_iters) break;

    Eigen::MatrixXd q2 = thin_q(bt);
    z = m * q2;
    q = thin_q(z);
  }

  TruncatedSvd out;
  out.U = q * small_u;
  out.V = small_v;
  out.sigma = sigma;
  enforce_sign_convention(out.U, out.V);
  return out;
}

}  // namespace

TruncatedSvd truncated_svd(const Eigen::MatrixXd& m, int k, const SvdOptions& options) {
  check_rank(m.rows(), m.cols(), k);
  if (!m.allFinite()) throw std::invalid_argument("truncated_svd: non-finite entries");
  if (std::min(m.rows(), m.cols()) <= options.dense_cutoff) return dense_exact(m, k);
  return randomized(m, k, options);
}

TruncatedSvd truncated_svd(const Eigen::SparseMatrix<double>& m, int k,
                           const SvdOptions& options) {
  check_rank(m.rows(), m.cols(), k);
  for (int outer = 0; outer < m.outerSize(); ++outer) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, outer); it; ++it) {
      if (!std::isfinite(it.value())) {
        throw std::invalid_argument("truncated_svd: non-finite entries");
      }
    }
  }
  if (std::min(m.rows(), m.cols()) <= options.dense_cutoff) {
    return dense_exact(Eigen::MatrixXd(m), k);
  }
  return randomized(m, k, options);
}

}  // namespace bcv
