#pragma once

#include <utility>
#include <vector>

#include "bcv/labels.hpp"

namespace bcv {

/// Chance-corrected partition similarity from the pair-counting contingency
/// table. 1.0 iff the partitions are identical up to relabeling; invariant
/// under label permutation of either argument. Requires equal lengths >= 2.
double adjusted_rand_index(const LabelVector& a, const LabelVector& b);

/// Fraction of positions agreeing after the best label matching, computed by
/// optimal assignment (Hungarian method) on the confusion matrix; unequal
/// cluster counts are padded with zero rows/columns. Cluster counts are
/// capped at 64.
double label_agreement(const LabelVector& a, const LabelVector& b);

/// Per-side success counts over simulation replications.
struct RecoveryTally {
  int reps = 0;
  int hits1 = 0;
  int hits2 = 0;

  double rate1() const { return reps == 0 ? 0.0 : static_cast<double>(hits1) / reps; }
  double rate2() const { return reps == 0 ? 0.0 : static_cast<double>(hits2) / reps; }
};

/// Counts replications whose estimated pair matches the truth on each side.
RecoveryTally tally_recovery(const std::vector<std::pair<int, int>>& estimates,
                             std::pair<int, int> truth);

}  // namespace bcv
