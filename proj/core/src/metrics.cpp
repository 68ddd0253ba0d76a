#include "bcv/metrics.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace bcv {

namespace {

struct Contingency {
  std::vector<std::vector<long long>> counts;  // R x C
  std::vector<long long> row_sums;
  std::vector<long long> col_sums;
  long long n = 0;
};

Contingency contingency_table(const LabelVector& a, const LabelVector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("metrics: label vectors must have equal length");
  }
  int ra = 0, rb = 0;
  for (int c : a.labels) {
    if (c < 0) throw std::invalid_argument("metrics: negative label");
    ra = std::max(ra, c + 1);
  }
  for (int c : b.labels) {
    if (c < 0) throw std::invalid_argument("metrics: negative label");
    rb = std::max(rb, c + 1);
  }
  Contingency t;
  t.n = static_cast<long long>(a.size());
  t.counts.assign(ra, std::vector<long long>(rb, 0));
  t.row_sums.assign(ra, 0);
  t.col_sums.assign(rb, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++t.counts[a[i]][b[i]];
    ++t.row_sums[a[i]];
    ++t.col_sums[b[i]];
  }
  return t;
}

double choose2(long long n) { return 0.5 * static_cast<double>(n) * (n - 1); }

/// O(n^3) Hungarian algorithm (potential form) for a max-sum assignment on a
/// square profit matrix.
long long max_assignment(const std::vector<std::vector<long long>>& profit) {
  const int n = static_cast<int>(profit.size());
  // Convert to min-cost with nonnegative entries.
  long long top = 0;
  for (const auto& row : profit) {
    for (long long v : row) top = std::max(top, v);
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> potential_u(n + 1, 0.0), potential_v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0);  // match[j] = row assigned to column j (1-based)
  std::vector<int> path(n + 1, 0);

  auto cost = [&](int i, int j) {
    return static_cast<double>(top - profit[i - 1][j - 1]);
  };

  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> min_cost(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = kInf;
      int j1 = -1;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double reduced = cost(i0, j) - potential_u[i0] - potential_v[j];
        if (reduced < min_cost[j]) {
          min_cost[j] = reduced;
          path[j] = j0;
        }
        if (min_cost[j] < delta) {
          delta = min_cost[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          potential_u[match[j]] += delta;
          potential_v[j] -= delta;
        } else {
          min_cost[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = path[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }

  long long total = 0;
  for (int j = 1; j <= n; ++j) {
    if (match[j] != 0) total += profit[match[j] - 1][j - 1];
  }
  return total;
}

}  // namespace

double adjusted_rand_index(const LabelVector& a, const LabelVector& b) {
  if (a.size() < 2) throw std::invalid_argument("adjusted_rand_index: need length >= 2");
  const Contingency t = contingency_table(a, b);

  double index = 0.0;
  for (const auto& row : t.counts) {
    for (long long v : row) index += choose2(v);
  }
  double sum_a = 0.0, sum_b = 0.0;
  for (long long v : t.row_sums) sum_a += choose2(v);
  for (long long v : t.col_sums) sum_b += choose2(v);

  const double expected = sum_a * sum_b / choose2(t.n);
  const double max_index = 0.5 * (sum_a + sum_b);
  const double denom = max_index - expected;
  if (denom == 0.0) return 1.0;  // both partitions degenerate and identical in structure
  return (index - expected) / denom;
}

double label_agreement(const LabelVector& a, const LabelVector& b) {
  const Contingency t = contingency_table(a, b);
  const int ra = static_cast<int>(t.row_sums.size());
  const int rb = static_cast<int>(t.col_sums.size());
  if (ra > 64 || rb > 64) {
    throw std::invalid_argument("label_agreement: more than 64 clusters (got " +
                                std::to_string(std::max(ra, rb)) + ")");
  }
  const int n = std::max(ra, rb);
  std::vector<std::vector<long long>> profit(n, std::vector<long long>(n, 0));
  for (int i = 0; i < ra; ++i) {
    for (int j = 0; j < rb; ++j) profit[i][j] = t.counts[i][j];
  }
  return static_cast<double>(max_assignment(profit)) / static_cast<double>(t.n);
}

RecoveryTally tally_recovery(const std::vector<std::pair<int, int>>& estimates,
                             std::pair<int, int> truth) {
  if (estimates.empty()) throw std::invalid_argument("tally_recovery: empty result list");
  RecoveryTally tally;
  tally.reps = static_cast<int>(estimates.size());
  for (const auto& [k1, k2] : estimates) {
    if (k1 == truth.first) ++tally.hits1;
    if (k2 == truth.second) ++tally.hits2;
  }
  return tally;
}

}  // namespace bcv
