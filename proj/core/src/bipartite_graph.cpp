#include "bcv/bipartite_graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace bcv {

BipartiteGraph::BipartiteGraph(int n1, int n2, std::vector<std::pair<int, int>> edges)
    : n1_(n1), n2_(n2), edges_(std::move(edges)) {
  if (n1 <= 0 || n2 <= 0) {
    throw std::invalid_argument("BipartiteGraph: side sizes must be positive, got n1=" +
                                std::to_string(n1) + " n2=" + std::to_string(n2));
  }
  for (const auto& [i, j] : edges_) {
    if (i < 0 || i >= n1 || j < 0 || j >= n2) {
      throw std::invalid_argument("BipartiteGraph: edge (" + std::to_string(i) + "," +
                                  std::to_string(j) + ") out of bounds for " +
                                  std::to_string(n1) + "x" + std::to_string(n2));
    }
  }
  std::sort(edges_.begin(), edges_.end());
  const auto dup = std::adjacent_find(edges_.begin(), edges_.end());
  if (dup != edges_.end()) {
    throw std::invalid_argument("BipartiteGraph: duplicate edge (" + std::to_string(dup->first) +
                                "," + std::to_string(dup->second) + ")");
  }

  row_ptr_.assign(static_cast<std::size_t>(n1) + 1, 0);
  col_ptr_.assign(static_cast<std::size_t>(n2) + 1, 0);
  col_index_.resize(edges_.size());
  row_index_.resize(edges_.size());

  for (const auto& [i, j] : edges_) {
    ++row_ptr_[i + 1];
    ++col_ptr_[j + 1];
  }
  for (int i = 0; i < n1; ++i) row_ptr_[i + 1] += row_ptr_[i];
  for (int j = 0; j < n2; ++j) col_ptr_[j + 1] += col_ptr_[j];

  // Edges are row-major sorted, so the CSR fill is sequential and the CSC
  // fill lands each column's row indices in ascending order.
  std::vector<std::int64_t> col_fill(col_ptr_.begin(), col_ptr_.end() - 1);
  std::int64_t pos = 0;
  for (const auto& [i, j] : edges_) {
    col_index_[pos++] = j;
    row_index_[col_fill[j]++] = i;
  }
  (void)pos;
}

bool BipartiteGraph::has_edge(int i, int j) const {
  if (i < 0 || i >= n1_ || j < 0 || j >= n2_) return false;
  const auto nbrs = row_neighbors(i);
  return std::binary_search(nbrs.begin(), nbrs.end(), j);
}

Eigen::SparseMatrix<double> BipartiteGraph::to_sparse() const {
  Eigen::SparseMatrix<double> m(n1_, n2_);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(edges_.size());
  for (const auto& [i, j] : edges_) triplets.emplace_back(i, j, 1.0);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

Eigen::MatrixXd BipartiteGraph::to_dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n1_, n2_);
  for (const auto& [i, j] : edges_) m(i, j) = 1.0;
  return m;
}

}  // namespace bcv
