// Copyright 2026 The LFM Auction Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "lfm/cli.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "lfm/common.hpp"
#include "lfm/data_ingest.hpp"
#include "lfm/evaluation.hpp"
#include "lfm/exact_solver.hpp"
#include "lfm/graph_repr.hpp"
#include "lfm/instance_gen.hpp"
#include "lfm/neural_solver.hpp"
#include "lfm/parallel.hpp"

namespace lfm {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Settings {
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string run_dir;
  std::string runs_root = "runs";
  std::string run_id;
  std::string log_level = "info";

  // ingest
  std::string csv;
  bool synthetic = false;
  SyntheticConfig synth{60, 14};
  double unit_scale = 0.25;
  ColumnMap columns;
  int max_bad_rows = 0;

  // generate
  CaseSpec spec;
  int count = 125;
  GenConfig gen;

  // solve
  std::string oracle = "bnb";
  BnbLimits limits;

  // train / eval
  std::vector<std::string> cases;
  std::string models = "both";
  int test_count = 25;
  ModelConfig model;
  TrainConfig train;
  std::string nrmsd_mode = "mean";
  bool timing = false;
  std::vector<int> timing_kappas = {50, 100, 200, 400};
  int timing_instances = 3;
  int timing_repeats = 5;
  int timing_bids_per_prosumer = 2;
  std::string timing_case;

  // plot
  std::string input_dir;
  std::string output_dir;

  // pipeline
  std::vector<std::string> case_specs = {"20:1:0.5", "20:2:0.5", "40:1:0.5",
                                         "40:2:0.5"};
};

struct RunPaths {
  fs::path root;
  fs::path resources() const { return root / "resources"; }
  fs::path instances() const { return root / "instances"; }
  fs::path labels() const { return root / "labels"; }
  fs::path models() const { return root / "models"; }
  fs::path eval() const { return root / "eval"; }
  fs::path plots() const { return root / "plots"; }
};

// "--node-limit" -> "LFM_NODE_LIMIT"
std::string env_name(const std::string& flags) {
  std::string name = flags.substr(flags.rfind("--") + 2);
  std::string out = "LFM_";
  for (char c : name) {
    out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

template <typename T>
CLI::Option* add(CLI::App* app, const std::string& flags, T& value,
                 const std::string& help) {
  return app->add_option(flags, value, help)
      ->capture_default_str()
      ->envname(env_name(flags));
}

CLI::Option* add_flag(CLI::App* app, const std::string& flags, bool& value,
                      const std::string& help) {
  return app->add_flag(flags, value, help)->envname(env_name(flags));
}

void add_ingest_options(CLI::App* app, Settings& s) {
  add(app, "--csv", s.csv, "PV readings CSV (id, timestamp, kW columns)");
  add_flag(app, "--synthetic", s.synthetic, "Use synthetic PV traces instead of a CSV");
  add(app, "--synthetic-homes", s.synth.homes, "Homes in the synthetic traces");
  add(app, "--synthetic-days", s.synth.days, "Days in the synthetic traces");
  add(app, "--unit-scale", s.unit_scale, "kW per flexibility unit");
  add(app, "--column-id", s.columns.id, "CSV column with the home id");
  add(app, "--column-timestamp", s.columns.timestamp, "CSV column with the timestamp");
  add(app, "--column-value", s.columns.value, "CSV column with the PV reading");
  add(app, "--column-capacity", s.columns.capacity, "Optional CSV capacity column");
  add(app, "--max-bad-rows", s.max_bad_rows, "Unparsable rows tolerated");
}

void add_gen_options(CLI::App* app, Settings& s, bool with_case) {
  if (with_case) {
    add(app, "--homes", s.spec.homes, "Prosumers per instance");
    add(app, "--bids-per-prosumer", s.spec.bids_per_prosumer, "Bids per prosumer");
    add(app, "--ess-share", s.spec.ess_share, "Share of prosumers with storage");
  }
  add(app, "--count", s.count, "Instances per case");
  add(app, "--eta-prop", s.gen.eta_prop, "Curve as a share of the bid sums");
  add(app, "--epsilon", s.gen.epsilon, "PV biddable threshold (share of capacity)");
  add(app, "--max-bundle-size", s.gen.max_bundle_size, "Largest bundle");
  add(app, "--eta-eff", s.gen.eta_eff, "Storage round-trip efficiency");
  add(app, "--margin", s.gen.margin, "Profit margin per unit");
  add(app, "--margin-spread", s.gen.margin_spread, "Relative spread of the margin");
  add(app, "--ess-power-limit", s.gen.ess_power_limit, "Storage power limit (0: auto)");
}

void add_solver_options(CLI::App* app, Settings& s) {
  add(app, "--oracle", s.oracle, "Solver: bnb or brute-force")
      ->check(CLI::IsMember({"bnb", "brute-force"}));
  add(app, "--time-limit", s.limits.time_limit_s, "Seconds per instance");
  add(app, "--node-limit", s.limits.node_limit, "Nodes per instance (<0: none)");
}

void add_case_filter(CLI::App* app, Settings& s) {
  add(app, "--case", s.cases, "Case ids to process (default: all)");
}

void add_model_options(CLI::App* app, Settings& s) {
  add(app, "--models", s.models, "gnn, fnn or both")
      ->check(CLI::IsMember({"gnn", "fnn", "both"}));
}

void add_train_options(CLI::App* app, Settings& s) {
  add(app, "--test-count", s.test_count, "Test instances per case");
  add(app, "--hidden", s.model.hidden, "Hidden width");
  add(app, "--rounds", s.model.rounds, "Message-passing rounds");
  add(app, "--aggregation", s.model.aggregation, "sum or mean");
  add(app, "--epochs", s.train.epochs, "Training epochs");
  add(app, "--learning-rate", s.train.learning_rate, "Step size");
  add(app, "--zeta", s.train.zeta, "Weight of the optimal-value term");
  add(app, "--optimizer", s.train.optimizer, "adam or sgd");
}

void add_eval_options(CLI::App* app, Settings& s) {
  add(app, "--nrmsd-mode", s.nrmsd_mode, "mean (as printed) or rms")
      ->check(CLI::IsMember({"mean", "rms"}));
  add_flag(app, "--timing", s.timing, "Measure solver and inference time vs kappa");
  add(app, "--timing-kappas", s.timing_kappas, "Bid counts for the timing series");
  add(app, "--timing-instances", s.timing_instances, "Instances per bid count");
  add(app, "--timing-repeats", s.timing_repeats, "Inference repeats (median)");
  add(app, "--timing-bids-per-prosumer", s.timing_bids_per_prosumer,
      "Bids per prosumer in timing instances");
  add(app, "--timing-case", s.timing_case, "Case whose GNN is timed (default: last)");
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void write_json(const fs::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return json::parse(in);
}

std::string instance_file(int k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "inst_%04d.json", k);
  return buf;
}

std::string utc_stamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

RunPaths resolve_run(const Settings& s, bool may_create) {
  RunPaths p;
  if (!s.run_dir.empty()) {
    p.root = s.run_dir;
  } else if (!s.run_id.empty()) {
    p.root = fs::path(s.runs_root) / s.run_id;
  } else if (may_create) {
    p.root = fs::path(s.runs_root) / (utc_stamp() + "_s" + std::to_string(s.seed));
  } else {
    throw ConfigError("this command needs --run-dir or --run-id");
  }
  if (!may_create && !fs::is_directory(p.root)) {
    throw ConfigError("run directory " + p.root.string() + " does not exist");
  }
  fs::create_directories(p.root);
  return p;
}

// ---- ingest ---------------------------------------------------------------

void cmd_ingest(const Settings& s, const RunPaths& run, const std::string& echo) {
  if (s.synthetic == !s.csv.empty()) {
    throw ConfigError("ingest needs exactly one of --csv or --synthetic");
  }
  std::vector<PvTrace> traces;
  json manifest;
  if (s.synthetic) {
    SyntheticConfig sc = s.synth;
    sc.seed = s.seed;
    traces = synthetic_traces(sc);
    manifest["source"] = "synthetic";
  } else {
    LoadOptions options;
    options.max_bad_rows = s.max_bad_rows;
    LoadResult loaded = load_csv(s.csv, s.columns, options);
    traces = std::move(loaded.traces);
    manifest["source"] = fs::path(s.csv).filename().string();
    manifest["rows_read"] = loaded.report.rows_read;
    manifest["missing_dropped"] = loaded.report.missing_dropped;
    manifest["bad_rows"] = loaded.report.bad_rows;
  }
  if (traces.empty()) throw std::runtime_error("no PV traces to ingest");
  const ResourcePool pool = daily_resources(traces, s.unit_scale);
  if (pool.empty()) throw std::runtime_error("no complete day shared by all homes");
  const fs::path dir = run.resources();
  fs::remove_all(dir);
  json files = json::array();
  for (size_t d = 0; d < pool.size(); ++d) {
    json day = json::array();
    for (size_t h = 0; h < pool[d].size(); ++h) {
      char name[48];
      std::snprintf(name, sizeof name, "d%03zu_h%03zu.json", d, h);
      write_json(dir / name, to_json(pool[d][h]));
      day.push_back(name);
    }
    files.push_back(day);
  }
  json ids = json::array();
  for (const PvTrace& t : traces) ids.push_back(t.home_id);
  manifest["unit_scale"] = s.unit_scale;
  manifest["days"] = pool.size();
  manifest["homes"] = ids;
  manifest["files"] = files;
  write_json(dir / "manifest.json", manifest);
  write_text(dir / "resolved_config.json", echo);
  spdlog::info("ingested {} homes x {} days into {}", ids.size(), pool.size(),
               dir.string());
}

ResourcePool load_pool(const RunPaths& run) {
  const fs::path manifest_path = run.resources() / "manifest.json";
  if (!fs::exists(manifest_path)) {
    throw std::runtime_error("no resources in " + run.resources().string() +
                             "; run ingest first");
  }
  const json manifest = read_json(manifest_path);
  ResourcePool pool;
  for (const json& day : manifest.at("files")) {
    std::vector<ProsumerResources> homes;
    for (const json& f : day) {
      homes.push_back(resources_from_json(read_json(run.resources() / f.get<std::string>())));
    }
    pool.push_back(std::move(homes));
  }
  if (pool.empty() || pool.front().empty()) {
    throw std::runtime_error("resource pool is empty");
  }
  return pool;
}

// ---- generate -------------------------------------------------------------

void cmd_generate(const Settings& s, const RunPaths& run, const std::string& echo) {
  const ResourcePool pool = load_pool(run);
  s.gen.validate();
  if (s.count < 1) throw ConfigError("--count must be >= 1");
  const std::string id = s.spec.id();
  spdlog::info("generating {} instances for case {}", s.count, id);
  const auto instances = generate_corpus(pool, s.spec, s.count, s.gen, s.seed, s.jobs);
  const fs::path dir = run.instances() / id;
  fs::remove_all(dir);
  json files = json::array();
  for (size_t k = 0; k < instances.size(); ++k) {
    write_json(dir / instance_file(static_cast<int>(k)), to_json(instances[k]));
    files.push_back(instance_file(static_cast<int>(k)));
  }
  write_json(dir / "manifest.json",
             json{{"case", id},
                  {"homes", s.spec.homes},
                  {"bids_per_prosumer", s.spec.bids_per_prosumer},
                  {"ess_share", s.spec.ess_share},
                  {"count", s.count},
                  {"seed", s.seed},
                  {"gen", to_json(s.gen)},
                  {"files", files}});
  write_text(dir / "resolved_config.json", echo);
}

std::vector<std::string> case_ids(const Settings& s, const fs::path& dir) {
  if (!s.cases.empty()) return s.cases;
  std::vector<std::string> out;
  if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_directory()) out.push_back(entry.path().filename().string());
    }
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw std::runtime_error("no cases found in " + dir.string());
  return out;
}

std::vector<WdpInstance> load_instances(const RunPaths& run, const std::string& id) {
  const fs::path dir = run.instances() / id;
  if (!fs::exists(dir / "manifest.json")) {
    throw std::runtime_error("case " + id + " has no instances; run generate first");
  }
  const json manifest = read_json(dir / "manifest.json");
  std::vector<WdpInstance> out;
  for (const json& f : manifest.at("files")) {
    out.push_back(instance_from_json(read_json(dir / f.get<std::string>())));
  }
  return out;
}

// ---- solve ----------------------------------------------------------------

void cmd_solve(const Settings& s, const RunPaths& run, const std::string& echo) {
  for (const std::string& id : case_ids(s, run.instances())) {
    const auto instances = load_instances(run, id);
    std::vector<Allocation> labels;
    if (s.oracle == "brute-force") {
      labels.resize(instances.size());
      parallel_for(static_cast<int>(instances.size()), s.jobs, [&](int i) {
        labels[static_cast<size_t>(i)] = brute_force(instances[static_cast<size_t>(i)]);
      });
    } else {
      labels = solve_corpus(instances, s.limits, s.jobs);
    }
    const fs::path dir = run.labels() / id;
    fs::remove_all(dir);
    std::ostringstream timing;
    timing << "instance,status,nodes,wall_time_s\n";
    int optimal = 0, limited = 0, infeasible = 0;
    for (size_t k = 0; k < labels.size(); ++k) {
      const Allocation& a = labels[k];
      write_json(dir / instance_file(static_cast<int>(k)), to_json(a, false));
      timing << k << ',' << to_string(a.status) << ',' << a.node_count << ','
             << format_number(a.wall_time_s) << '\n';
      optimal += a.status == SolveStatus::kOptimal;
      limited += a.status == SolveStatus::kTimeLimit;
      infeasible += a.status == SolveStatus::kInfeasible;
    }
    write_text(dir / "solve_timing.csv", timing.str());
    write_text(dir / "resolved_config.json", echo);
    spdlog::info("case {}: {} optimal, {} hit the limit, {} infeasible", id, optimal,
                 limited, infeasible);
  }
}

std::vector<Allocation> load_labels(const RunPaths& run, const std::string& id,
                                    size_t count) {
  const fs::path dir = run.labels() / id;
  std::vector<Allocation> out;
  for (size_t k = 0; k < count; ++k) {
    const fs::path f = dir / instance_file(static_cast<int>(k));
    if (!fs::exists(f)) {
      throw std::runtime_error("case " + id + " has no labels; run solve first");
    }
    out.push_back(allocation_from_json(read_json(f)));
  }
  const fs::path timing = dir / "solve_timing.csv";
  if (fs::exists(timing)) {
    const Table t = read_csv_table(timing);
    for (size_t r = 0; r < t.rows.size() && r < out.size(); ++r) {
      out[r].wall_time_s = t.number(r, "wall_time_s");
    }
  }
  return out;
}

// ---- train ----------------------------------------------------------------

std::vector<ModelKind> model_kinds(const Settings& s) {
  if (s.models == "gnn") return {ModelKind::kGnn};
  if (s.models == "fnn") return {ModelKind::kFnn};
  return {ModelKind::kGnn, ModelKind::kFnn};
}

std::uint64_t kind_salt(ModelKind kind) { return kind == ModelKind::kGnn ? 1 : 2; }

void cmd_train(const Settings& s, const RunPaths& run, const std::string& echo) {
  s.train.validate();
  s.model.validate();
  for (const std::string& id : case_ids(s, run.labels())) {
    const auto instances = load_instances(run, id);
    const auto labels = load_labels(run, id, instances.size());
    std::vector<int> usable;
    for (size_t i = 0; i < labels.size(); ++i) {
      if (labels[i].has_solution()) usable.push_back(static_cast<int>(i));
    }
    if (usable.size() < 2) throw std::runtime_error("case " + id + ": too few labeled instances");
    const int test_count = std::min<int>(s.test_count, static_cast<int>(usable.size()) / 2);
    const auto [train_pos, test_pos] = split_indices(
        static_cast<int>(usable.size()), test_count, derive_seed(s.seed, fnv1a64(id)));
    std::vector<int> train_ids, test_ids;
    for (int p : train_pos) train_ids.push_back(usable[static_cast<size_t>(p)]);
    for (int p : test_pos) test_ids.push_back(usable[static_cast<size_t>(p)]);

    std::vector<const WdpInstance*> train_instances;
    for (int i : train_ids) train_instances.push_back(&instances[static_cast<size_t>(i)]);
    const FeatureScale scale = corpus_scale(train_instances);
    std::vector<TriGraph> graphs;
    for (int i : train_ids) {
      graphs.push_back(build_graph(instances[static_cast<size_t>(i)], scale,
                                   &labels[static_cast<size_t>(i)].x));
    }
    std::vector<TrainSample> samples;
    for (size_t k = 0; k < graphs.size(); ++k) {
      samples.push_back({&graphs[k], labels[static_cast<size_t>(train_ids[k])].objective});
    }
    const fs::path dir = run.models() / id;
    fs::create_directories(dir);
    write_json(dir / "split.json", json{{"train", train_ids}, {"test", test_ids}});
    for (ModelKind kind : model_kinds(s)) {
      ModelConfig mc = s.model;
      mc.kind = kind;
      mc.seed = derive_seed(s.seed, fnv1a64(id), kind_salt(kind));
      TrainConfig tc = s.train;
      tc.seed = derive_seed(s.seed, fnv1a64(id), kind_salt(kind));
      NeuralModel model(mc, instances.front().horizon(), scale);
      spdlog::info("case {}: training {} on {} instances for {} epochs", id,
                   to_string(kind), samples.size(), tc.epochs);
      const TrainReport report = train(model, samples, tc);
      if (report.aborted) spdlog::error("case {}: {}", id, report.message);
      const std::string name = to_string(kind);
      write_json(dir / (name + ".json"), model.to_json());
      std::ostringstream losses;
      write_train_csv(report, losses);
      write_text(dir / (name + "_loss.csv"), losses.str());
      std::ostringstream timing;
      timing << "epoch,wall_time_s\n";
      for (const EpochStats& e : report.epochs) {
        timing << e.epoch << ',' << format_number(e.wall_time_s) << '\n';
      }
      write_text(dir / (name + "_train_timing.csv"), timing.str());
      spdlog::info("case {}: {} train macro-F1 {:.3f}", id, name, report.train_f1);
      if (report.aborted) throw std::runtime_error("training diverged: " + report.message);
    }
    write_text(dir / "resolved_config.json", echo);
  }
}

// ---- eval -----------------------------------------------------------------

NeuralModel load_model(const RunPaths& run, const std::string& id, ModelKind kind) {
  const fs::path f = run.models() / id / (to_string(kind) + ".json");
  if (!fs::exists(f)) {
    throw std::runtime_error("no " + to_string(kind) + " checkpoint for case " + id +
                             "; run train first");
  }
  return NeuralModel::from_json(read_json(f));
}

void cmd_eval(const Settings& s, const RunPaths& run, const std::string& echo) {
  const NrmsdMode mode = s.nrmsd_mode == "rms" ? NrmsdMode::kRms : NrmsdMode::kMean;
  std::vector<EvalRecord> records;
  const auto ids = case_ids(s, run.models());
  for (const std::string& id : ids) {
    const auto instances = load_instances(run, id);
    const auto labels = load_labels(run, id, instances.size());
    const fs::path split_path = run.models() / id / "split.json";
    if (!fs::exists(split_path)) {
      throw std::runtime_error("case " + id + " has no split; run train first");
    }
    const auto test_ids = read_json(split_path).at("test").get<std::vector<int>>();
    for (ModelKind kind : model_kinds(s)) {
      const NeuralModel model = load_model(run, id, kind);
      std::vector<TriGraph> graphs;
      for (int i : test_ids) {
        graphs.push_back(build_graph(instances.at(static_cast<size_t>(i)), model.scale()));
      }
      std::vector<const WdpInstance*> inst;
      std::vector<const Allocation*> expert;
      std::vector<const TriGraph*> graph_ptrs;
      for (size_t k = 0; k < test_ids.size(); ++k) {
        inst.push_back(&instances[static_cast<size_t>(test_ids[k])]);
        expert.push_back(&labels[static_cast<size_t>(test_ids[k])]);
        graph_ptrs.push_back(&graphs[k]);
      }
      const auto recs = evaluate_model(model, inst, expert, graph_ptrs, id, test_ids, mode);
      records.insert(records.end(), recs.begin(), recs.end());
    }
  }
  const auto aggregates = aggregate(records);
  const fs::path dir = run.eval();
  std::ostringstream results, timing, agg;
  write_results_csv(records, results);
  write_record_timing_csv(records, timing);
  write_aggregates_csv(aggregates, agg);
  write_text(dir / "results.csv", results.str());
  write_text(dir / "record_timing.csv", timing.str());
  write_text(dir / "aggregates.csv", agg.str());
  for (const CaseAggregate& a : aggregates) {
    spdlog::info("{} {}: macro-F1 {:.3f}, dJ {:.2f}%, dNRMSD {:.2f} pp", a.case_id,
                 a.model, a.f1_mean, a.delta_j_mean, a.delta_nrmsd_mean);
  }

  if (s.timing) {
    const std::string timed = s.timing_case.empty() ? ids.back() : s.timing_case;
    const NeuralModel model = load_model(run, timed, ModelKind::kGnn);
    TimingConfig tc;
    tc.kappas = s.timing_kappas;
    tc.instances = s.timing_instances;
    tc.repeats = s.timing_repeats;
    tc.bids_per_prosumer = s.timing_bids_per_prosumer;
    tc.gen = s.gen;
    tc.solver = s.limits;
    tc.seed = s.seed;
    const auto points = measure_timing(load_pool(run), model, tc);
    std::ostringstream out;
    write_timing_csv(points, out);
    write_text(dir / "timing.csv", out.str());
  }
  write_text(dir / "resolved_config.json", echo);
}

// ---- plot -----------------------------------------------------------------

void cmd_plot(const Settings& s, const RunPaths* run) {
  const fs::path in = !s.input_dir.empty() ? fs::path(s.input_dir) : run->eval();
  const fs::path out = !s.output_dir.empty() ? fs::path(s.output_dir) : run->plots();
  const fs::path agg = in / "aggregates.csv";
  if (!fs::exists(agg)) throw std::runtime_error("no aggregates.csv in " + in.string());
  const Table aggregates = read_csv_table(agg);
  write_text(out / "f1_by_case.svg", plot_f1_by_case(aggregates));
  write_text(out / "deltas_by_case.svg", plot_deltas_by_case(aggregates));
  if (fs::exists(in / "timing.csv")) {
    write_text(out / "time_vs_kappa.svg", plot_time_vs_kappa(read_csv_table(in / "timing.csv")));
  }
  spdlog::info("plots written to {}", out.string());
}

std::string resolved_config(const Settings& s, const std::string& command) {
  json synth{{"homes", s.synth.homes}, {"days", s.synth.days}};
  json j{{"command", command},
         {"seed", s.seed},
         {"jobs", s.jobs},
         {"ingest", {{"csv", s.csv},
                     {"synthetic", s.synthetic},
                     {"synthetic_traces", synth},
                     {"unit_scale", s.unit_scale},
                     {"columns", {{"id", s.columns.id},
                                  {"timestamp", s.columns.timestamp},
                                  {"value", s.columns.value},
                                  {"capacity", s.columns.capacity}}},
                     {"max_bad_rows", s.max_bad_rows}}},
         {"generate", {{"case", {{"homes", s.spec.homes},
                                 {"bids_per_prosumer", s.spec.bids_per_prosumer},
                                 {"ess_share", s.spec.ess_share}}},
                       {"count", s.count},
                       {"gen", to_json(s.gen)}}},
         {"solve", {{"oracle", s.oracle},
                    {"time_limit_s", s.limits.time_limit_s},
                    {"node_limit", s.limits.node_limit}}},
         {"train", {{"cases", s.cases},
                    {"models", s.models},
                    {"test_count", s.test_count},
                    {"hidden", s.model.hidden},
                    {"rounds", s.model.rounds},
                    {"aggregation", s.model.aggregation},
                    {"epochs", s.train.epochs},
                    {"learning_rate", s.train.learning_rate},
                    {"zeta", s.train.zeta},
                    {"optimizer", s.train.optimizer}}},
         {"eval", {{"nrmsd_mode", s.nrmsd_mode},
                   {"timing", s.timing},
                   {"timing_kappas", s.timing_kappas},
                   {"timing_instances", s.timing_instances},
                   {"timing_repeats", s.timing_repeats},
                   {"timing_bids_per_prosumer", s.timing_bids_per_prosumer},
                   {"timing_case", s.timing_case}}},
         {"pipeline", {{"cases", s.case_specs}}}};
  return j.dump(2) + "\n";
}

CaseSpec parse_case_spec(const std::string& text) {
  CaseSpec spec;
  char extra = 0;
  if (std::sscanf(text.c_str(), "%d:%d:%lf%c", &spec.homes, &spec.bids_per_prosumer,
                  &spec.ess_share, &extra) != 3 ||
      spec.homes < 1 || spec.bids_per_prosumer < 1 || spec.ess_share < 0.0 ||
      spec.ess_share > 1.0) {
    throw ConfigError("case spec '" + text + "' is not homes:bids_per_prosumer:ess_share");
  }
  return spec;
}

void set_log_level(const std::string& level) {
  const auto parsed = spdlog::level::from_str(level);
  if (parsed == spdlog::level::off && level != "off") {
    throw ConfigError("unknown log level '" + level + "'");
  }
  spdlog::set_level(parsed);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  Settings s;
  CLI::App app{"Local flexibility market auctions: instance generation, exact "
               "winner determination and learned allocation"};
  app.set_config("--config", "", "Config file (TOML); flags override it");
  app.require_subcommand(1);
  add(&app, "--seed", s.seed, "Master seed");
  add(&app, "-j,--jobs", s.jobs, "Worker threads for generate, solve and eval")
      ->check(CLI::PositiveNumber);
  add(&app, "--run-dir", s.run_dir, "Run directory (overrides --runs-root/--run-id)");
  add(&app, "--runs-root", s.runs_root, "Parent of run directories");
  add(&app, "--run-id", s.run_id, "Run id (default: UTC time and seed)");
  add(&app, "--log-level", s.log_level, "trace, debug, info, warn, error, off");

  auto* ingest = app.add_subcommand("ingest", "Load PV traces into per-home resources");
  add_ingest_options(ingest, s);

  auto* generate = app.add_subcommand("generate", "Generate an instance corpus for one case");
  add_gen_options(generate, s, true);

  auto* solve = app.add_subcommand("solve", "Label instances with the exact solver");
  add_case_filter(solve, s);
  add_solver_options(solve, s);

  auto* train_cmd = app.add_subcommand("train", "Train the graph model and the baseline");
  add_case_filter(train_cmd, s);
  add_model_options(train_cmd, s);
  add_train_options(train_cmd, s);

  auto* eval = app.add_subcommand("eval", "Evaluate checkpoints on the test split");
  add_case_filter(eval, s);
  add_model_options(eval, s);
  add_eval_options(eval, s);
  add_gen_options(eval, s, false);
  add_solver_options(eval, s);

  auto* plot = app.add_subcommand("plot", "Render SVG plots from evaluation CSVs");
  add(plot, "--input-dir", s.input_dir, "Directory with aggregates.csv (default: run eval/)");
  add(plot, "--output-dir", s.output_dir, "Output directory (default: run plots/)");

  auto* pipeline = app.add_subcommand("pipeline", "Ingest, generate, solve, train, eval and plot");
  add_ingest_options(pipeline, s);
  add(pipeline, "--cases", s.case_specs, "Cases as homes:bids_per_prosumer:ess_share");
  add_gen_options(pipeline, s, false);
  add_solver_options(pipeline, s);
  add_model_options(pipeline, s);
  add_train_options(pipeline, s);
  add_eval_options(pipeline, s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    set_log_level(s.log_level);
    if (s.jobs < 1) throw ConfigError("--jobs must be >= 1");
    std::string command;
    for (const CLI::App* sub : app.get_subcommands()) command = sub->get_name();
    const std::string echo = resolved_config(s, command);
    if (plot->parsed() && !s.input_dir.empty() && !s.output_dir.empty()) {
      cmd_plot(s, nullptr);
      return 0;
    }
    const bool creates = ingest->parsed() || pipeline->parsed();
    const RunPaths run = resolve_run(s, creates);
    spdlog::info("run directory {}", run.root.string());
    if (ingest->parsed()) cmd_ingest(s, run, echo);
    if (generate->parsed()) cmd_generate(s, run, echo);
    if (solve->parsed()) cmd_solve(s, run, echo);
    if (train_cmd->parsed()) cmd_train(s, run, echo);
    if (eval->parsed()) cmd_eval(s, run, echo);
    if (plot->parsed()) cmd_plot(s, &run);
    if (pipeline->parsed()) {
      if (s.case_specs.empty()) throw ConfigError("--cases is empty");
      std::vector<CaseSpec> specs;
      for (const std::string& text : s.case_specs) specs.push_back(parse_case_spec(text));
      cmd_ingest(s, run, echo);
      Settings step = s;
      step.cases.clear();
      for (const CaseSpec& spec : specs) {
        step.spec = spec;
        cmd_generate(step, run, echo);
        step.cases.push_back(spec.id());
      }
      cmd_solve(step, run, echo);
      cmd_train(step, run, echo);
      cmd_eval(step, run, echo);
      cmd_plot(step, &run);
      write_text(run.root / "resolved_config.json", echo);
    }
    return 0;
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const CLI::Error& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::vector<fs::path> deterministic_outputs(const fs::path& run_dir) {
  std::vector<fs::path> out;
  for (const char* sub : {"instances", "labels", "models"}) {
    const fs::path dir = run_dir / sub;
    if (!fs::is_directory(dir)) continue;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      const std::string name = entry.path().filename().string();
      if (name.find("timing") != std::string::npos || name == "resolved_config.json") {
        continue;
      }
      out.push_back(fs::relative(entry.path(), run_dir));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace lfm
