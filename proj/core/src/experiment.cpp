#include "bcv/experiment.hpp"

#include <chrono>
#include <mutex>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "bcv/parallel.hpp"

namespace bcv {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Eigen::MatrixXd random_b0(int K1, int K2, Rng& rng) {
  Eigen::MatrixXd b0(K1, K2);
  for (int i = 0; i < K1; ++i) {
    for (int j = 0; j < K2; ++j) {
      b0(i, j) = i == j ? rng.uniform(0.7, 1.0) : rng.uniform(0.1, 0.3);
    }
  }
  return b0;
}

Eigen::MatrixXd setting3_b0() {
  Eigen::MatrixXd b0 = Eigen::MatrixXd::Constant(10, 14, 0.25);
  for (int i = 0; i < 10; ++i) b0(i, i) = 1.0;
  for (int i = 0; i < 3; ++i) b0(i, 11) = 0.75;
  for (int i = 3; i < 6; ++i) b0(i, 12) = 0.75;
  for (int i = 6; i < 10; ++i) b0(i, 13) = 0.75;
  return b0;
}

Eigen::MatrixXd poly2_b0() {
  Eigen::MatrixXd b0(3, 6);
  b0 << 1.00, 0.25, 0.25, 0.75, 0.75, 0.25,
        0.25, 1.00, 0.25, 0.75, 0.25, 0.75,
        0.25, 0.25, 1.00, 0.25, 0.75, 0.75;
  return b0;
}

std::vector<double> uniform_pi(int K) {
  return std::vector<double>(K, 1.0 / static_cast<double>(K));
}

int poly_n2(int n1) {
  return static_cast<int>(std::llround(std::pow(static_cast<double>(n1), 1.5)));
}

}  // namespace

SettingGenerator build_setting(const ExperimentConfig& config) {
  const double r = config.r;
  const bool balanced = config.balanced;
  SettingGenerator gen;

  if (config.setting == "balanced-1" || config.setting == "poly-1") {
    gen.truth = {3, 3};
    const std::vector<double> pi =
        balanced ? uniform_pi(3) : std::vector<double>{1.0 / 6, 1.0 / 3, 1.0 / 2};
    gen.make_spec = [r, pi](Rng& rng) {
      SbmSpec spec;
      spec.K1 = 3;
      spec.K2 = 3;
      spec.B = r * random_b0(3, 3, rng);
      spec.membership = MultinomialMembership{pi, pi};
      return spec;
    };
    if (config.setting == "balanced-1") {
      gen.sizes = [](int n0) { return std::pair<int, int>{3 * n0, 3 * n0}; };
    } else {
      gen.sizes = [](int n1) { return std::pair<int, int>{n1, poly_n2(n1)}; };
    }
    return gen;
  }

  if (config.setting == "balanced-2") {
    gen.truth = {3, 4};
    const std::vector<double> pi1 =
        balanced ? uniform_pi(3) : std::vector<double>{1.0 / 2, 1.0 / 3, 1.0 / 6};
    const std::vector<double> pi2 =
        balanced ? uniform_pi(4) : std::vector<double>{3.0 / 8, 1.0 / 4, 1.0 / 4, 1.0 / 8};
    gen.make_spec = [r, pi1, pi2](Rng& rng) {
      SbmSpec spec;
      spec.K1 = 3;
      spec.K2 = 4;
      spec.B = r * random_b0(3, 4, rng);
      spec.membership = MultinomialMembership{pi1, pi2};
      return spec;
    };
    gen.sizes = [](int n0) { return std::pair<int, int>{3 * n0, 4 * n0}; };
    return gen;
  }

  if (config.setting == "balanced-3") {
    gen.truth = {10, 14};
    std::vector<double> pi1, pi2;
    if (balanced) {
      pi1 = uniform_pi(10);
      pi2 = uniform_pi(14);
    } else {
      pi1 = {1.0 / 15, 1.0 / 15, 1.0 / 15, 1.0 / 15, 1.0 / 10,
             1.0 / 10, 2.0 / 15, 2.0 / 15, 2.0 / 15, 2.0 / 15};
      pi2 = {1.0 / 21, 1.0 / 21, 1.0 / 21, 1.0 / 21, 1.0 / 21, 1.0 / 14, 1.0 / 14,
             1.0 / 14, 1.0 / 14, 2.0 / 21, 2.0 / 21, 2.0 / 21, 2.0 / 21, 2.0 / 21};
    }
    const Eigen::MatrixXd b0 = setting3_b0();
    gen.make_spec = [r, pi1, pi2, b0](Rng&) {
      SbmSpec spec;
      spec.K1 = 10;
      spec.K2 = 14;
      spec.B = r * b0;
      spec.membership = MultinomialMembership{pi1, pi2};
      return spec;
    };
    gen.sizes = [](int n0) { return std::pair<int, int>{10 * n0, 14 * n0}; };
    return gen;
  }

  if (config.setting == "poly-2") {
    gen.truth = {3, 6};
    const std::vector<double> pi1 =
        balanced ? uniform_pi(3) : std::vector<double>{1.0 / 2, 1.0 / 3, 1.0 / 6};
    const std::vector<double> pi2 =
        balanced ? uniform_pi(6)
                 : std::vector<double>{1.0 / 4, 1.0 / 4, 1.0 / 6, 1.0 / 6, 1.0 / 12, 1.0 / 12};
    const Eigen::MatrixXd b0 = poly2_b0();
    gen.make_spec = [r, pi1, pi2, b0](Rng&) {
      SbmSpec spec;
      spec.K1 = 3;
      spec.K2 = 6;
      spec.B = r * b0;
      spec.membership = MultinomialMembership{pi1, pi2};
      return spec;
    };
    gen.sizes = [](int n1) { return std::pair<int, int>{n1, poly_n2(n1)}; };
    return gen;
  }

  if (config.setting == "custom") {
    if (!config.custom_spec.has_value()) {
      throw std::invalid_argument("build_setting: custom setting requires custom_spec");
    }
    if (config.custom_n1 < 1 || config.custom_n2 < 1) {
      throw std::invalid_argument("build_setting: custom setting requires positive sizes");
    }
    config.custom_spec->validate();
    gen.truth = {config.custom_spec->K1, config.custom_spec->K2};
    const SbmSpec spec = *config.custom_spec;
    gen.make_spec = [spec](Rng&) { return spec; };
    const int n1 = config.custom_n1;
    const int n2 = config.custom_n2;
    gen.sizes = [n1, n2](int) { return std::pair<int, int>{n1, n2}; };
    return gen;
  }

  throw std::invalid_argument("build_setting: unknown setting '" + config.setting + "'");
}

namespace {

ReplicationRecord run_replication(const ExperimentConfig& config, const SettingGenerator& gen,
                                  int n_value, int rep, int inner_threads) {
  ReplicationRecord record;
  record.rep = rep;
  record.seed = derive_seed(config.seed, static_cast<std::uint64_t>(n_value),
                            static_cast<std::uint64_t>(rep));
  const auto [n1, n2] = gen.sizes(n_value);
  record.n1 = n1;
  record.n2 = n2;

  std::optional<SbmSample> sample;
  try {
    Rng spec_rng(derive_seed(record.seed, 0x0b0ULL));
    const SbmSpec spec = gen.make_spec(spec_rng);
    sample = generate_sbm(spec, n1, n2, derive_seed(record.seed, 0x96aULL));
    record.generated = true;
    record.density = sample->graph.density();
    record.balance1 = balance_ratio(sample->c1, spec.K1);
    record.balance2 = balance_ratio(sample->c2, spec.K2);
  } catch (const std::exception& e) {
    record.error = e.what();
    return record;
  }

  if (config.methods.bcv) {
    MethodOutcome out;
    const auto start = Clock::now();
    try {
      BcvConfig bcv_config = config.bcv;
      bcv_config.seed = derive_seed(record.seed, 0xbc4ULL);
      bcv_config.threads = inner_threads;
      const SelectionResult sel = select(sample->graph, bcv_config);
      out.K1hat = sel.K1hat;
      out.K2hat = sel.K2hat;
      out.ok = true;
    } catch (const std::exception& e) {
      out.error = e.what();
    }
    out.seconds = seconds_since(start);
    record.outcomes["bcv"] = out;
  }

  if (config.methods.projection) {
    MethodOutcome out;
    const auto start = Clock::now();
    try {
      const std::uint64_t pseed = derive_seed(record.seed, 0x990ULL);
      const LabelVector side1 = modularity_communities(project(sample->graph, 1), pseed);
      const LabelVector side2 =
          modularity_communities(project(sample->graph, 2), derive_seed(pseed, 2));
      out.K1hat = num_communities(side1);
      out.K2hat = num_communities(side2);
      out.ok = true;
    } catch (const std::exception& e) {
      out.error = e.what();
    }
    out.seconds = seconds_since(start);
    record.outcomes["projection"] = out;
  }

  if (config.methods.bimodularity) {
    MethodOutcome out;
    const auto start = Clock::now();
    try {
      const BimodularityResult bimod = bimodularity_communities(
          sample->graph, config.max_modules, derive_seed(record.seed, 0xb10ULL));
      out.K1hat = bimod.modules_side1;
      out.K2hat = bimod.modules_side2;
      out.ok = true;
    } catch (const std::exception& e) {
      out.error = e.what();
    }
    out.seconds = seconds_since(start);
    record.outcomes["bimodularity"] = out;
  }

  return record;
}

}  // namespace

RunRecord run_experiment(const ExperimentConfig& config) {
  if (config.reps < 1) throw std::invalid_argument("run_experiment: reps must be >= 1");
  const SettingGenerator gen = build_setting(config);
  const std::vector<int> grid =
      config.setting == "custom" ? std::vector<int>{0} : config.n_grid;
  if (grid.empty()) throw std::invalid_argument("run_experiment: empty size grid");

  const auto start = Clock::now();
  RunRecord record;
  record.truth = gen.truth;

  const int outer_threads = resolve_threads(config.threads);
  const int inner_threads = outer_threads > 1 ? 1 : config.threads;

  std::mutex progress_mu;
  auto report = [&](const std::string& line) {
    if (!config.progress) return;
    std::lock_guard<std::mutex> lock(progress_mu);
    config.progress(line);
  };

  for (const int n_value : grid) {
    GridPointRecord point;
    point.n_value = n_value;
    std::tie(point.n1, point.n2) = gen.sizes(n_value);
    point.replications.resize(config.reps);

    parallel_for(config.reps, config.threads, [&](std::int64_t rep) {
      point.replications[rep] =
          run_replication(config, gen, n_value, static_cast<int>(rep), inner_threads);
      const ReplicationRecord& r = point.replications[rep];
      std::string line = config.setting + " n=" + std::to_string(n_value) + " rep " +
                         std::to_string(rep + 1) + "/" + std::to_string(config.reps);
      if (!r.generated) {
        line += " failed: " + r.error;
      } else {
        for (const auto& [method, outcome] : r.outcomes) {
          line += " " + method + "=(" + std::to_string(outcome.K1hat) + "," +
                  std::to_string(outcome.K2hat) + ")";
        }
      }
      report(line);
    });

    for (const auto& rep : point.replications) {
      if (!rep.generated) {
        ++point.failed;
        continue;
      }
      for (const auto& [method, outcome] : rep.outcomes) {
        if (!outcome.ok) continue;
        auto& tally = point.tallies[method];
        ++tally.reps;
        if (outcome.K1hat == record.truth.first) ++tally.hits1;
        if (outcome.K2hat == record.truth.second) ++tally.hits2;
      }
    }
    record.points.push_back(std::move(point));
  }

  record.wall_seconds = seconds_since(start);
  return record;
}

DatasetResult run_dataset(const BipartiteGraph& A, const BcvConfig& config,
                          const std::vector<int>* side1_metadata) {
  DatasetResult result;
  result.selection = select(A, config);

  const int rank = std::min(result.selection.K1hat, result.selection.K2hat);
  const TruncatedSvd completed = complete_matrix_full(A, rank);
  std::tie(result.labels1, result.labels2) =
      estimate_labels(completed, result.selection.K1hat, result.selection.K2hat,
                      config.restarts, derive_seed(config.seed, 0x2ef1ULL));

  if (side1_metadata != nullptr) {
    if (static_cast<int>(side1_metadata->size()) != A.n1()) {
      throw std::invalid_argument("run_dataset: metadata length must equal n1");
    }
    const LabelVector meta(*side1_metadata, 1);
    result.metadata_ari = adjusted_rand_index(result.labels1, meta);
    result.metadata_matches = static_cast<int>(
        std::llround(label_agreement(result.labels1, meta) * static_cast<double>(A.n1())));
  }
  return result;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_surface_csv(const SelectionResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_surface_csv: cannot open '" + path + "'");
  out << "K1,K2,mse,penalty,total,n_visited_step\n";
  for (const auto& [pair, score] : result.surface) {
    out << pair.first << ',' << pair.second << ',' << format_double(score.mse) << ','
        << format_double(score.penalty) << ',' << format_double(score.total) << ','
        << score.step << '\n';
  }
}

void write_surface_slice_csv(const SelectionResult& result, int K1, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_surface_slice_csv: cannot open '" + path + "'");
  out << "K2,mse,penalty,total\n";
  for (const auto& [pair, score] : result.surface) {
    if (pair.first != K1) continue;
    out << pair.second << ',' << format_double(score.mse) << ','
        << format_double(score.penalty) << ',' << format_double(score.total) << '\n';
  }
}

void emit_heatmap(const SelectionResult& result, const std::string& path) {
  if (result.surface.empty()) throw std::invalid_argument("emit_heatmap: empty surface");
  write_surface_csv(result, path);

  std::string slice_path = path;
  const auto dot = slice_path.rfind('.');
  const auto slash = slice_path.rfind('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
    slice_path.insert(dot, "_slice");
  } else {
    slice_path += "_slice";
  }
  write_surface_slice_csv(result, result.K1hat, slice_path);
}

void write_summary_csv(const ExperimentConfig& config, const RunRecord& record,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_summary_csv: cannot open '" + path + "'");
  out << "setting,balance,r,n,n1,n2,truth_K1,truth_K2,method,reps_run,failed,hits1,hits2,"
         "rate1,rate2\n";
  for (const auto& point : record.points) {
    for (const auto& [method, tally] : point.tallies) {
      out << config.setting << ',' << (config.balanced ? "balanced" : "unbalanced") << ','
          << format_double(config.r) << ',' << point.n_value << ',' << point.n1 << ','
          << point.n2 << ',' << record.truth.first << ',' << record.truth.second << ','
          << method << ',' << tally.reps << ',' << point.failed << ',' << tally.hits1 << ','
          << tally.hits2 << ',' << format_double(tally.rate1()) << ','
          << format_double(tally.rate2()) << '\n';
    }
  }
}

void write_replications_csv(const ExperimentConfig& config, const RunRecord& record,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_replications_csv: cannot open '" + path + "'");
  out << "setting,n,rep,seed,n1,n2,density,balance1,balance2,method,K1hat,K2hat,ok,error\n";
  for (const auto& point : record.points) {
    for (const auto& rep : point.replications) {
      if (!rep.generated) {
        out << config.setting << ',' << point.n_value << ',' << rep.rep << ',' << rep.seed
            << ',' << rep.n1 << ',' << rep.n2 << ",,,,generate,,,0," << rep.error << '\n';
        continue;
      }
      for (const auto& [method, outcome] : rep.outcomes) {
        out << config.setting << ',' << point.n_value << ',' << rep.rep << ',' << rep.seed
            << ',' << rep.n1 << ',' << rep.n2 << ',' << format_double(rep.density) << ','
            << format_double(rep.balance1) << ',' << format_double(rep.balance2) << ','
            << method << ',' << outcome.K1hat << ',' << outcome.K2hat << ','
            << (outcome.ok ? 1 : 0) << ',' << outcome.error << '\n';
      }
    }
  }
}

void write_labels_csv(const LabelVector& labels1, const LabelVector& labels2,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_labels_csv: cannot open '" + path + "'");
  out << "side,index,label\n";
  for (std::size_t i = 0; i < labels1.size(); ++i) out << "1," << i << ',' << labels1[i] << '\n';
  for (std::size_t j = 0; j < labels2.size(); ++j) out << "2," << j << ',' << labels2[j] << '\n';
}

}  // namespace bcv
