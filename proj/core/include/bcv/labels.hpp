#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace bcv {

/// Community assignment for one side of a bipartite graph. Labels are
/// 0-based; `side` records which node set the vector refers to (1 or 2).
struct LabelVector {
  std::vector<int> labels;
  int side = 1;

  LabelVector() = default;
  LabelVector(std::vector<int> l, int s) : labels(std::move(l)), side(s) {}

  std::size_t size() const { return labels.size(); }
  int operator[](std::size_t i) const { return labels[i]; }
};

/// Number of distinct labels actually used.
inline int num_communities(const LabelVector& lv) {
  std::vector<int> seen(lv.labels);
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
  return static_cast<int>(seen.size());
}

/// Sizes n_{rk} for k in [0, K). Throws if any label falls outside [0, K).
inline std::vector<int> community_sizes(const LabelVector& lv, int K) {
  std::vector<int> sizes(K, 0);
  for (int c : lv.labels) {
    if (c < 0 || c >= K) {
      throw std::invalid_argument("community_sizes: label " + std::to_string(c) +
                                  " outside [0," + std::to_string(K) + ")");
    }
    ++sizes[c];
  }
  return sizes;
}

/// Remaps labels onto 0..m-1 in order of first appearance, so the result is
/// surjective onto the set of nonempty communities.
inline LabelVector renumber_first_appearance(const LabelVector& lv) {
  LabelVector out;
  out.side = lv.side;
  out.labels.reserve(lv.labels.size());
  std::vector<int> remap;
  int next = 0;
  for (int c : lv.labels) {
    if (c < 0) throw std::invalid_argument("renumber_first_appearance: negative label");
    if (c >= static_cast<int>(remap.size())) remap.resize(c + 1, -1);
    if (remap[c] < 0) remap[c] = next++;
    out.labels.push_back(remap[c]);
  }
  return out;
}

/// min_k n_{rk} / n_r over the declared K communities; the empirical balance
/// constant of the partition. Empty communities give 0.
inline double balance_ratio(const LabelVector& lv, int K) {
  if (lv.labels.empty() || K <= 0) return 0.0;
  const auto sizes = community_sizes(lv, K);
  const int min_size = *std::min_element(sizes.begin(), sizes.end());
  return static_cast<double>(min_size) / static_cast<double>(lv.labels.size());
}

}  // namespace bcv
