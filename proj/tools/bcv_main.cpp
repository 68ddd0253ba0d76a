// Command-line front end: simulation sweeps, single-dataset selection,
// baselines, and loss-surface export.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bcv/datasets.hpp"
#include "bcv/edgelist.hpp"
#include "bcv/experiment.hpp"
#include "bcv/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct IngestFlags {
  std::string input;
  std::string builtin;
  bool zero_indexed = false;
  std::string delimiter;
  int skip_lines = 0;
  int n1 = 0;
  int n2 = 0;
};

void add_ingest_flags(CLI::App* cmd, IngestFlags& flags) {
  auto* input = cmd->add_option("--input", flags.input, "Edgelist file (one 'i j' pair per line)");
  auto* builtin =
      cmd->add_option("--builtin", flags.builtin, "Bundled dataset id (southern-women)");
  input->excludes(builtin);
  cmd->add_flag("--zero-indexed", flags.zero_indexed, "Node ids start at 0 (default: 1)");
  cmd->add_option("--delimiter", flags.delimiter, "Token separator (default: whitespace)");
  cmd->add_option("--skip-lines", flags.skip_lines, "Leading lines to skip");
  cmd->add_option("--n1", flags.n1, "Side-1 size (default: inferred from max index)");
  cmd->add_option("--n2", flags.n2, "Side-2 size (default: inferred from max index)");
}

bcv::BipartiteGraph load_graph(const IngestFlags& flags, json& manifest) {
  if (!flags.builtin.empty()) {
    if (flags.builtin != "southern-women") {
      throw std::runtime_error("unknown builtin dataset '" + flags.builtin + "'");
    }
    manifest["dataset"] = flags.builtin;
    return bcv::southern_women();
  }
  if (flags.input.empty()) throw std::runtime_error("need --input or --builtin");

  bcv::IngestOptions options;
  options.one_indexed = !flags.zero_indexed;
  if (!flags.delimiter.empty()) options.delimiter = flags.delimiter[0];
  options.skip_lines = flags.skip_lines;
  options.n1 = flags.n1;
  options.n2 = flags.n2;
  bcv::IngestResult loaded = bcv::ingest_edgelist(flags.input, options);
  if (loaded.duplicates_dropped > 0) {
    std::cerr << "warning: dropped " << loaded.duplicates_dropped << " duplicate edge(s) from "
              << flags.input << "\n";
  }
  manifest["dataset"] = flags.input;
  manifest["duplicates_dropped"] = loaded.duplicates_dropped;
  return std::move(loaded.graph);
}

struct BcvFlags {
  std::string mode = "kfold";
  int folds = 10;
  double w = 0.9;
  double C = 0.01;
  std::string penalty_rule = "rho15";
  int patience = 3;
  int restarts = 10;
  int max_frontier = 0;
  std::string d_rule = "product";
  std::uint64_t seed = 1;
  int threads = 0;
};

void add_bcv_flags(CLI::App* cmd, BcvFlags& flags) {
  cmd->add_option("--mode", flags.mode, "Split mode: kfold|bernoulli")
      ->check(CLI::IsMember({"kfold", "bernoulli"}));
  cmd->add_option("--folds", flags.folds, "Folds (kfold) / replications (bernoulli)");
  cmd->add_option("--w", flags.w, "Bernoulli training proportion");
  cmd->add_option("--C", flags.C, "Penalty constant");
  cmd->add_option("--penalty-rule", flags.penalty_rule,
                  "rho15 (C*rho^1.5/sqrt(min n)) or rho2log (C*rho^2/sqrt(log n))")
      ->check(CLI::IsMember({"rho15", "rho2log"}));
  cmd->add_option("--patience", flags.patience, "Frontier steps without improvement tolerated");
  cmd->add_option("--restarts", flags.restarts, "k-means restarts");
  cmd->add_option("--max-frontier", flags.max_frontier, "Frontier cap (0 = min side)");
  cmd->add_option("--d-rule", flags.d_rule,
                  "Model complexity: 'product' or path to a K1,K2,d CSV table");
  cmd->add_option("--seed", flags.seed, "Master seed");
  cmd->add_option("--threads", flags.threads, "Worker threads (0 = hardware)");
}

bcv::ComplexityRule parse_d_rule(const std::string& value) {
  bcv::ComplexityRule rule;
  if (value == "product") return rule;
  std::ifstream in(value);
  if (!in) throw std::runtime_error("cannot open d-rule table '" + value + "'");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("K1", 0) == 0) continue;
    std::istringstream ss(line);
    std::string tok;
    int k1, k2;
    double d;
    std::getline(ss, tok, ',');
    k1 = std::stoi(tok);
    std::getline(ss, tok, ',');
    k2 = std::stoi(tok);
    std::getline(ss, tok, ',');
    d = std::stod(tok);
    rule.table[{k1, k2}] = d;
  }
  return rule;
}

// A JSON config file overrides command-line flags key by key.
void apply_json_overrides(const json& j, BcvFlags& flags) {
  if (j.contains("mode")) flags.mode = j["mode"].get<std::string>();
  if (j.contains("folds")) flags.folds = j["folds"].get<int>();
  if (j.contains("w")) flags.w = j["w"].get<double>();
  if (j.contains("C")) flags.C = j["C"].get<double>();
  if (j.contains("penalty_rule")) flags.penalty_rule = j["penalty_rule"].get<std::string>();
  if (j.contains("patience")) flags.patience = j["patience"].get<int>();
  if (j.contains("restarts")) flags.restarts = j["restarts"].get<int>();
  if (j.contains("max_frontier")) flags.max_frontier = j["max_frontier"].get<int>();
  if (j.contains("d_rule")) flags.d_rule = j["d_rule"].get<std::string>();
  if (j.contains("seed")) flags.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("threads")) flags.threads = j["threads"].get<int>();
}

bcv::BcvConfig to_config(const BcvFlags& flags) {
  bcv::BcvConfig config;
  config.mode = flags.mode == "bernoulli" ? bcv::SplitMode::kBernoulli : bcv::SplitMode::kKFold;
  config.folds = flags.folds;
  config.w = flags.w;
  config.C = flags.C;
  config.penalty_rule = flags.penalty_rule == "rho2log" ? bcv::PenaltyRule::kRho2SqrtLogN
                                                        : bcv::PenaltyRule::kRho32SqrtMinN;
  config.patience = flags.patience;
  config.restarts = flags.restarts;
  config.max_frontier = flags.max_frontier;
  config.d_rule = parse_d_rule(flags.d_rule);
  config.seed = flags.seed;
  config.threads = flags.threads;
  return config;
}

json config_echo(const BcvFlags& flags) {
  return json{{"mode", flags.mode},
              {"folds", flags.folds},
              {"w", flags.w},
              {"C", flags.C},
              {"penalty_rule", flags.penalty_rule},
              {"patience", flags.patience},
              {"restarts", flags.restarts},
              {"max_frontier", flags.max_frontier},
              {"d_rule", flags.d_rule},
              {"seed", flags.seed},
              {"threads", flags.threads}};
}

std::vector<int> read_side1_metadata(const std::string& path, int n1, bool one_indexed) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metadata file '" + path + "'");
  std::vector<int> labels(n1, -1);
  std::unordered_map<std::string, int> categories;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 'id,category'");
    }
    const std::string id_str = line.substr(0, comma);
    std::string category = line.substr(comma + 1);
    while (!category.empty() && (category.back() == '\r' || category.back() == ' ')) {
      category.pop_back();
    }
    long id;
    try {
      id = std::stol(id_str);
    } catch (...) {
      continue;  // header row
    }
    if (one_indexed) --id;
    if (id < 0 || id >= n1) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": id out of range");
    }
    const auto [it, inserted] = categories.emplace(category, static_cast<int>(categories.size()));
    labels[id] = it->second;
  }
  for (int i = 0; i < n1; ++i) {
    if (labels[i] < 0) {
      throw std::runtime_error(path + ": no metadata for node " + std::to_string(i + (one_indexed ? 1 : 0)));
    }
  }
  return labels;
}

void write_manifest(const json& manifest, const std::string& dir) {
  std::ofstream out(dir + "/manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest in '" + dir + "'");
  out << manifest.dump(2) << '\n';
}

void ensure_dir(const std::string& dir) {
  if (!dir.empty()) fs::create_directories(dir);
}

json selection_to_json(const bcv::SelectionResult& sel) {
  json j;
  j["K1hat"] = sel.K1hat;
  j["K2hat"] = sel.K2hat;
  j["lambda"] = sel.lambda;
  j["rho_hat"] = sel.rho_hat;
  j["candidates_visited"] = sel.surface.size();
  j["frontier_steps"] = sel.trace.size();
  j["warnings"] = sel.warnings;
  return j;
}

int run_simulate(const std::string& config_path, std::string setting, std::string balance,
                 double r, std::vector<int> n_grid, int reps, std::vector<std::string> methods,
                 int max_modules, BcvFlags bcv_flags, std::string out_dir) {
  json file_config;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config '" + config_path + "'");
    in >> file_config;
    apply_json_overrides(file_config, bcv_flags);
    if (file_config.contains("setting")) setting = file_config["setting"].get<std::string>();
    if (file_config.contains("balance")) balance = file_config["balance"].get<std::string>();
    if (file_config.contains("r")) r = file_config["r"].get<double>();
    if (file_config.contains("n_grid")) n_grid = file_config["n_grid"].get<std::vector<int>>();
    if (file_config.contains("reps")) reps = file_config["reps"].get<int>();
    if (file_config.contains("methods")) {
      methods = file_config["methods"].get<std::vector<std::string>>();
    }
    if (file_config.contains("max_modules")) max_modules = file_config["max_modules"].get<int>();
    if (file_config.contains("out")) out_dir = file_config["out"].get<std::string>();
  }

  bcv::ExperimentConfig config;
  config.setting = setting;
  config.balanced = balance != "unbalanced";
  config.r = r;
  config.n_grid = n_grid;
  config.reps = reps;
  config.methods = {false, false, false};
  for (const auto& m : methods) {
    if (m == "bcv") {
      config.methods.bcv = true;
    } else if (m == "projection") {
      config.methods.projection = true;
    } else if (m == "bimodularity") {
      config.methods.bimodularity = true;
    } else {
      throw std::runtime_error("unknown method '" + m + "'");
    }
  }
  config.bcv = to_config(bcv_flags);
  config.max_modules = max_modules;
  config.seed = bcv_flags.seed;
  config.threads = bcv_flags.threads;
  config.progress = [](const std::string& line) { std::cerr << line << "\n"; };

  if (setting == "custom") {
    if (!file_config.contains("custom")) {
      throw std::runtime_error("custom setting requires a 'custom' block in --config");
    }
    const json& c = file_config["custom"];
    bcv::SbmSpec spec;
    const auto rows = c.at("B").get<std::vector<std::vector<double>>>();
    spec.K1 = static_cast<int>(rows.size());
    spec.K2 = rows.empty() ? 0 : static_cast<int>(rows[0].size());
    spec.B.resize(spec.K1, spec.K2);
    for (int i = 0; i < spec.K1; ++i) {
      for (int j = 0; j < spec.K2; ++j) spec.B(i, j) = rows[i][j];
    }
    spec.membership = bcv::MultinomialMembership{c.at("pi1").get<std::vector<double>>(),
                                                 c.at("pi2").get<std::vector<double>>()};
    config.custom_spec = std::move(spec);
    config.custom_n1 = c.at("n1").get<int>();
    config.custom_n2 = c.at("n2").get<int>();
  }

  const bcv::RunRecord record = bcv::run_experiment(config);

  for (const auto& point : record.points) {
    for (const auto& [method, tally] : point.tallies) {
      std::cout << config.setting << " n=" << point.n_value << " (" << point.n1 << "x"
                << point.n2 << ") " << method << ": recovery (" << tally.rate1() << ", "
                << tally.rate2() << ") over " << tally.reps << " reps\n";
    }
    if (point.failed > 0) {
      std::cout << "  " << point.failed << " replication(s) failed to generate\n";
    }
  }

  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    bcv::write_summary_csv(config, record, out_dir + "/summary.csv");
    bcv::write_replications_csv(config, record, out_dir + "/replications.csv");

    json manifest;
    manifest["tool"] = "bcv simulate";
    manifest["version"] = BCV_VERSION_STRING;
    manifest["config"] = config_echo(bcv_flags);
    manifest["config"]["setting"] = config.setting;
    manifest["config"]["balance"] = config.balanced ? "balanced" : "unbalanced";
    manifest["config"]["r"] = config.r;
    manifest["config"]["n_grid"] = config.n_grid;
    manifest["config"]["reps"] = config.reps;
    manifest["config"]["methods"] = methods;
    manifest["truth"] = {record.truth.first, record.truth.second};
    json points = json::array();
    for (const auto& point : record.points) {
      json p;
      p["n"] = point.n_value;
      p["n1"] = point.n1;
      p["n2"] = point.n2;
      p["failed"] = point.failed;
      for (const auto& [method, tally] : point.tallies) {
        p["tallies"][method] = {{"reps", tally.reps},
                                {"hits1", tally.hits1},
                                {"hits2", tally.hits2},
                                {"rate1", tally.rate1()},
                                {"rate2", tally.rate2()}};
      }
      points.push_back(std::move(p));
    }
    manifest["points"] = std::move(points);
    manifest["timings"] = {{"wall_seconds", record.wall_seconds}};
    write_manifest(manifest, out_dir);
    std::cout << "wrote " << out_dir << "/summary.csv, replications.csv, manifest.json\n";
  }
  return 0;
}

int run_select(const IngestFlags& ingest, const BcvFlags& bcv_flags,
               const std::string& metadata_path, const std::string& out_dir,
               bool surface_only, int repeats) {
  json manifest;
  manifest["tool"] = surface_only ? "bcv surface" : "bcv select";
  manifest["version"] = BCV_VERSION_STRING;
  manifest["config"] = config_echo(bcv_flags);
  manifest["config"]["repeats"] = repeats;

  const bcv::BipartiteGraph graph = load_graph(ingest, manifest);
  manifest["n1"] = graph.n1();
  manifest["n2"] = graph.n2();
  manifest["edges"] = graph.edge_count();

  const bcv::BcvConfig config = to_config(bcv_flags);

  std::optional<std::vector<int>> metadata;
  if (!metadata_path.empty()) {
    metadata = read_side1_metadata(metadata_path, graph.n1(), !ingest.zero_indexed);
  }

  const bcv::DatasetResult result =
      bcv::run_dataset(graph, config, metadata ? &*metadata : nullptr);

  std::cout << "selected (K1, K2) = (" << result.selection.K1hat << ", "
            << result.selection.K2hat << ")  lambda=" << result.selection.lambda
            << "  rho_hat=" << result.selection.rho_hat << "\n";
  for (const auto& w : result.selection.warnings) std::cerr << "warning: " << w << "\n";
  if (result.metadata_ari) {
    std::cout << "side-1 ARI vs metadata: " << *result.metadata_ari << " ("
              << *result.metadata_matches << "/" << graph.n1() << " consistent)\n";
  }

  manifest["selection"] = selection_to_json(result.selection);
  if (result.metadata_ari) {
    manifest["metadata_ari"] = *result.metadata_ari;
    manifest["metadata_matches"] = *result.metadata_matches;
  }

  // Extra whole-plan repetitions with derived seeds; reports the modal pair.
  if (repeats > 1) {
    std::map<std::pair<int, int>, int> counts;
    counts[{result.selection.K1hat, result.selection.K2hat}] = 1;
    json repeat_list = json::array();
    repeat_list.push_back({result.selection.K1hat, result.selection.K2hat});
    for (int rep = 1; rep < repeats; ++rep) {
      bcv::BcvConfig rep_config = config;
      rep_config.seed = bcv::derive_seed(config.seed, 0x9e9eULL, rep);
      const bcv::SelectionResult sel = bcv::select(graph, rep_config);
      ++counts[{sel.K1hat, sel.K2hat}];
      repeat_list.push_back({sel.K1hat, sel.K2hat});
    }
    const auto modal = std::max_element(
        counts.begin(), counts.end(),
        [](const auto& a, const auto& b) { return a.second < b.second; });
    std::cout << "modal over " << repeats << " repeats: (" << modal->first.first << ", "
              << modal->first.second << ") x" << modal->second << "\n";
    manifest["repeat_selections"] = std::move(repeat_list);
    manifest["modal"] = {modal->first.first, modal->first.second};
  }

  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    bcv::emit_heatmap(result.selection, out_dir + "/surface.csv");
    if (!surface_only) {
      bcv::write_labels_csv(result.labels1, result.labels2, out_dir + "/labels.csv");
    }
    write_manifest(manifest, out_dir);
    std::cout << "wrote outputs in " << out_dir << "/\n";
  }
  return 0;
}

int run_baseline(const IngestFlags& ingest, const std::string& method, std::uint64_t seed,
                 int max_modules, const std::string& out_dir) {
  json manifest;
  manifest["tool"] = "bcv baseline";
  manifest["version"] = BCV_VERSION_STRING;
  manifest["method"] = method;
  manifest["seed"] = seed;

  const bcv::BipartiteGraph graph = load_graph(ingest, manifest);

  bcv::LabelVector labels1, labels2;
  if (method == "projection") {
    labels1 = bcv::modularity_communities(bcv::project(graph, 1), seed);
    labels2 = bcv::modularity_communities(bcv::project(graph, 2), bcv::derive_seed(seed, 2));
  } else if (method == "bimodularity") {
    const bcv::BimodularityResult result =
        bcv::bimodularity_communities(graph, max_modules, seed);
    labels1 = result.labels1;
    labels2 = result.labels2;
    manifest["bimodularity_q"] = result.q;
  } else {
    throw std::runtime_error("unknown baseline method '" + method + "'");
  }

  const int k1 = bcv::num_communities(labels1);
  const int k2 = bcv::num_communities(labels2);
  std::cout << method << " per-side community counts: (" << k1 << ", " << k2 << ")\n";
  manifest["K1hat"] = k1;
  manifest["K2hat"] = k2;

  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    bcv::write_labels_csv(labels1, labels2, out_dir + "/labels.csv");
    write_manifest(manifest, out_dir);
    std::cout << "wrote outputs in " << out_dir << "/\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bipartite community-count selection by penalized cross-validation"};
  app.set_version_flag("--version", BCV_VERSION_STRING);
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run a simulation sweep");
  std::string sim_setting = "balanced-1";
  std::string sim_balance = "balanced";
  double sim_r = 0.05;
  std::vector<int> sim_n_grid = {300};
  int sim_reps = 20;
  std::vector<std::string> sim_methods = {"bcv"};
  int sim_max_modules = 25;
  std::string sim_out, sim_config;
  BcvFlags sim_bcv;
  simulate->add_option("--setting", sim_setting,
                       "balanced-1|balanced-2|balanced-3|poly-1|poly-2|custom");
  simulate->add_option("--balance", sim_balance, "balanced|unbalanced")
      ->check(CLI::IsMember({"balanced", "unbalanced"}));
  simulate->add_option("--r", sim_r, "Sparsity scale (B = r * B0)");
  simulate->add_option("--n0", sim_n_grid, "Size grid: n0 (balanced-*) or n1 (poly-*)")
      ->delimiter(',');
  simulate->add_option("--reps", sim_reps, "Replications per grid point");
  simulate->add_option("--methods", sim_methods, "Any of bcv,projection,bimodularity")
      ->delimiter(',');
  simulate->add_option("--max-modules", sim_max_modules, "Bimodularity module sweep bound");
  simulate->add_option("--out", sim_out, "Output directory");
  simulate->add_option("--config", sim_config, "JSON config file (overrides flags)");
  add_bcv_flags(simulate, sim_bcv);

  // select
  auto* select_cmd = app.add_subcommand("select", "Select (K1, K2) for one dataset");
  IngestFlags sel_ingest;
  BcvFlags sel_bcv;
  std::string sel_metadata, sel_out, sel_config;
  int sel_repeats = 1;
  add_ingest_flags(select_cmd, sel_ingest);
  add_bcv_flags(select_cmd, sel_bcv);
  select_cmd->add_option("--metadata", sel_metadata, "Side-1 metadata CSV (id,category)");
  select_cmd->add_option("--repeats", sel_repeats,
                         "Rerun the whole plan with derived seeds, report the modal pair");
  select_cmd->add_option("--out", sel_out, "Output directory");
  select_cmd->add_option("--config", sel_config, "JSON config file (overrides flags)");

  // baseline
  auto* baseline = app.add_subcommand("baseline", "Run a baseline method on a dataset");
  IngestFlags base_ingest;
  std::string base_method = "projection";
  std::uint64_t base_seed = 1;
  int base_max_modules = 25;
  std::string base_out;
  add_ingest_flags(baseline, base_ingest);
  baseline->add_option("--method", base_method, "projection|bimodularity")
      ->check(CLI::IsMember({"projection", "bimodularity"}));
  baseline->add_option("--seed", base_seed, "Seed");
  baseline->add_option("--max-modules", base_max_modules, "Bimodularity module sweep bound");
  baseline->add_option("--out", base_out, "Output directory");

  // surface
  auto* surface = app.add_subcommand("surface", "Emit loss-surface heatmap CSVs");
  IngestFlags surf_ingest;
  BcvFlags surf_bcv;
  std::string surf_out = "surface_out", surf_config;
  int surf_repeats = 1;
  add_ingest_flags(surface, surf_ingest);
  add_bcv_flags(surface, surf_bcv);
  surface->add_option("--repeats", surf_repeats,
                      "Rerun the whole plan with derived seeds, report the modal pair");
  surface->add_option("--out", surf_out, "Output directory");
  surface->add_option("--config", surf_config, "JSON config file (overrides flags)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      return run_simulate(sim_config, sim_setting, sim_balance, sim_r, sim_n_grid, sim_reps,
                          sim_methods, sim_max_modules, sim_bcv, sim_out);
    }
    if (select_cmd->parsed()) {
      if (!sel_config.empty()) {
        std::ifstream in(sel_config);
        if (!in) throw std::runtime_error("cannot open config '" + sel_config + "'");
        json j;
        in >> j;
        apply_json_overrides(j, sel_bcv);
      }
      return run_select(sel_ingest, sel_bcv, sel_metadata, sel_out, /*surface_only=*/false,
                        sel_repeats);
    }
    if (baseline->parsed()) {
      return run_baseline(base_ingest, base_method, base_seed, base_max_modules, base_out);
    }
    if (surface->parsed()) {
      if (!surf_config.empty()) {
        std::ifstream in(surf_config);
        if (!in) throw std::runtime_error("cannot open config '" + surf_config + "'");
        json j;
        in >> j;
        apply_json_overrides(j, surf_bcv);
      }
      return run_select(surf_ingest, surf_bcv, "", surf_out, /*surface_only=*/true,
                        surf_repeats);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
