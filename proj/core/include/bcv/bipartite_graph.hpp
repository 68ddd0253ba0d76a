#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace bcv {

/// Unweighted bipartite graph on node sets [n1] and [n2], stored as a sorted
/// coordinate list plus row-major (CSR) and column-major (CSC) adjacency
/// indices. Immutable after construction, so instances can be shared freely
/// across threads.
class BipartiteGraph {
 public:
  /// Throws std::invalid_argument on out-of-range indices or duplicate edges.
  BipartiteGraph(int n1, int n2, std::vector<std::pair<int, int>> edges);

  int n1() const { return n1_; }
  int n2() const { return n2_; }
  std::int64_t edge_count() const { return static_cast<std::int64_t>(edges_.size()); }
  std::int64_t pair_count() const { return static_cast<std::int64_t>(n1_) * n2_; }
  double density() const {
    return pair_count() == 0 ? 0.0 : static_cast<double>(edge_count()) / static_cast<double>(pair_count());
  }

  /// Edges sorted row-major: (i, j) with i ascending, then j.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  /// Column indices j adjacent to row node i, ascending.
  std::span<const int> row_neighbors(int i) const {
    return {col_index_.data() + row_ptr_[i], col_index_.data() + row_ptr_[i + 1]};
  }
  /// Row indices i adjacent to column node j, ascending.
  std::span<const int> col_neighbors(int j) const {
    return {row_index_.data() + col_ptr_[j], row_index_.data() + col_ptr_[j + 1]};
  }

  int row_degree(int i) const { return static_cast<int>(row_ptr_[i + 1] - row_ptr_[i]); }
  int col_degree(int j) const { return static_cast<int>(col_ptr_[j + 1] - col_ptr_[j]); }

  bool has_edge(int i, int j) const;

  Eigen::SparseMatrix<double> to_sparse() const;
  Eigen::MatrixXd to_dense() const;

 private:
  int n1_ = 0;
  int n2_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::int64_t> row_ptr_;
  std::vector<int> col_index_;
  std::vector<std::int64_t> col_ptr_;
  std::vector<int> row_index_;
};

}  // namespace bcv
