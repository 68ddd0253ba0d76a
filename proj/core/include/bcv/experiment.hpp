#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bcv/baselines.hpp"
#include "bcv/metrics.hpp"
#include "bcv/rng.hpp"
#include "bcv/sbm.hpp"
#include "bcv/selection.hpp"

namespace bcv {

struct MethodSet {
  bool bcv = true;
  bool projection = false;
  bool bimodularity = false;
};

/// One simulation sweep: a generating mechanism (setting id + balance variant
/// + sparsity scale r), a grid of size parameters, replications, and the
/// methods to run. For "balanced-*" settings the grid holds n0 with sides
/// (K1*n0, K2*n0); for "poly-*" it holds n1 with n2 = round(n1^{3/2}).
struct ExperimentConfig {
  std::string setting = "balanced-1";
  bool balanced = true;
  double r = 0.05;
  std::vector<int> n_grid = {300};
  int reps = 20;
  MethodSet methods;
  BcvConfig bcv;
  int max_modules = 25;  // bimodularity sweep bound
  std::uint64_t seed = 1;
  int threads = 0;

  // setting == "custom": explicit model, sizes fixed, grid ignored.
  std::optional<SbmSpec> custom_spec;
  int custom_n1 = 0;
  int custom_n2 = 0;

  /// Invoked with a short status line as replications finish (may be called
  /// from worker threads, serialized internally). Empty = silent.
  std::function<void(const std::string&)> progress;
};

/// Per-replication model factory for a setting. Settings whose B0 is random
/// draw it fresh from the provided stream on every call.
struct SettingGenerator {
  std::pair<int, int> truth;
  std::function<SbmSpec(Rng&)> make_spec;
  std::function<std::pair<int, int>(int)> sizes;
};

/// Throws std::invalid_argument for an unknown setting id or an ill-formed
/// custom block.
SettingGenerator build_setting(const ExperimentConfig& config);

struct MethodOutcome {
  int K1hat = 0;
  int K2hat = 0;
  double seconds = 0.0;
  bool ok = false;
  std::string error;
};

struct ReplicationRecord {
  int rep = 0;
  std::uint64_t seed = 0;
  int n1 = 0;
  int n2 = 0;
  double density = 0.0;
  double balance1 = 0.0;  // empirical min_k n_{1k}/n_1
  double balance2 = 0.0;
  bool generated = false;
  std::string error;
  std::map<std::string, MethodOutcome> outcomes;
};

struct GridPointRecord {
  int n_value = 0;
  int n1 = 0;
  int n2 = 0;
  std::vector<ReplicationRecord> replications;
  std::map<std::string, RecoveryTally> tallies;  // over replications that ran
  int failed = 0;
};

struct RunRecord {
  std::pair<int, int> truth;
  std::vector<GridPointRecord> points;
  double wall_seconds = 0.0;
};

/// Runs the sweep. Replications execute concurrently with seeds derived from
/// (master seed, grid value, replication index); a failed replication is
/// recorded and excluded from the tallies rather than aborting the sweep.
RunRecord run_experiment(const ExperimentConfig& config);

struct DatasetResult {
  SelectionResult selection;
  LabelVector labels1;  // refit at the selected pair on the fully observed matrix
  LabelVector labels2;
  std::optional<double> metadata_ari;
  std::optional<int> metadata_matches;  // positions agreeing after optimal matching
};

/// BCV on a single dataset: selection, then a final label refit at
/// (K1hat, K2hat). `side1_metadata`, when given, is an external labeling of
/// side 1 (e.g. party affiliation) scored by ARI and matched agreement.
DatasetResult run_dataset(const BipartiteGraph& A, const BcvConfig& config,
                          const std::vector<int>* side1_metadata = nullptr);

/// Full-precision double (round-trips exactly through text).
std::string format_double(double v);

/// Long-format loss surface: header K1,K2,mse,penalty,total,n_visited_step,
/// one row per visited candidate in (K1, K2) order.
void write_surface_csv(const SelectionResult& result, const std::string& path);

/// Slice at fixed K1: header K2,mse,penalty,total.
void write_surface_slice_csv(const SelectionResult& result, int K1, const std::string& path);

/// Surface CSV at `path` plus the conditional slice at K1hat, written next to
/// it with a "_slice" suffix. Throws if the surface is empty.
void emit_heatmap(const SelectionResult& result, const std::string& path);

/// Per-grid-point, per-method recovery table.
void write_summary_csv(const ExperimentConfig& config, const RunRecord& record,
                       const std::string& path);

/// One row per (replication, method) with seeds and balance diagnostics.
void write_replications_csv(const ExperimentConfig& config, const RunRecord& record,
                            const std::string& path);

/// side,index,label rows for a refit labeling.
void write_labels_csv(const LabelVector& labels1, const LabelVector& labels2,
                      const std::string& path);

}  // namespace bcv
