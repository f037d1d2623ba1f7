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


#ifndef LFM_EVALUATION_HPP_
#define LFM_EVALUATION_HPP_

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "lfm/core_model.hpp"
#include "lfm/exact_solver.hpp"
#include "lfm/graph_repr.hpp"
#include "lfm/instance_gen.hpp"
#include "lfm/neural_solver.hpp"

namespace lfm {

// ---- metrics ---------------------------------------------------------------

// Mean of the per-class F1 scores over {0, 1}. A class missing from both
// pred and truth is skipped; a class missing from one side scores 0.
double macro_f1(const std::vector<int>& pred, const std::vector<int>& truth);

enum class NrmsdMode {
  kMean,  // mean relative over-allocation, as the metric is defined
  kRms,   // square-then-root variant for sensitivity analysis
};

// Per requested interval, (allocated supply in the requested direction -
// |u|) / |u|, averaged over the requested intervals. NaN for an all-zero
// curve.
double nrmsd(const WdpInstance& instance, const std::vector<int>& x,
             NrmsdMode mode = NrmsdMode::kMean);

// 100 (model - expert) / expert. 0 when both are 0; NaN when only the
// expert objective is 0.
double delta_j(double expert_j, double model_j);

// Percentage-point difference of two NRMSD values.
double delta_nrmsd(double expert_nrmsd, double model_nrmsd);

double mean_of(const std::vector<double>& xs);  // NaN entries skipped
double std_of(const std::vector<double>& xs);   // population, NaN skipped
double median_of(std::vector<double> xs);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
  double rss = 0.0;
};
LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y);

// y = a exp(b x), fitted by least squares on log y; rss is measured on y.
struct ExponentialFit {
  double scale = 0.0;
  double rate = 0.0;
  double rss = 0.0;
};
ExponentialFit fit_exponential(const std::vector<double>& x,
                               const std::vector<double>& y);

// Gaussian log-likelihood of residuals with maximum-likelihood variance.
double gaussian_log_likelihood(double rss, int n);

// ---- experiment harness ----------------------------------------------------

struct CaseSpec {
  int homes = 20;
  int bids_per_prosumer = 1;
  double ess_share = 0.5;

  // e.g. "n20_k1_e0.5"
  std::string id() const;
};

// Resources indexed [day][home].
using ResourcePool = std::vector<std::vector<ProsumerResources>>;

// Instance k draws one day and `homes` distinct homes of that day from the
// pool, then runs the generator with a seed derived from (seed, case, k).
std::vector<WdpInstance> generate_corpus(const ResourcePool& pool,
                                         const CaseSpec& spec, int count,
                                         const GenConfig& base,
                                         std::uint64_t seed, int jobs = 1);

std::vector<Allocation> solve_corpus(const std::vector<WdpInstance>& instances,
                                     const BnbLimits& limits, int jobs = 1);

// Seeded split; returns (train indices, test indices), each sorted.
std::pair<std::vector<int>, std::vector<int>> split_indices(int count,
                                                            int test_count,
                                                            std::uint64_t seed);

struct EvalRecord {
  std::string case_id;
  std::string model;  // "gnn" or "fnn"
  int instance = 0;   // index within the case corpus
  int kappa = 0;
  std::string expert_status;
  double expert_j = 0.0;
  double model_j = 0.0;
  double f1 = 0.0;
  double nrmsd_expert = 0.0;
  double nrmsd_model = 0.0;
  double delta_j = 0.0;
  double delta_nrmsd = 0.0;
  bool xor_ok = true;
  bool covered = true;
  double solver_time_s = 0.0;
  double inference_time_s = 0.0;
};

// Runs the model on each instance, repairs the prediction and scores it
// against the expert allocation.
std::vector<EvalRecord> evaluate_model(const NeuralModel& model,
                                       const std::vector<const WdpInstance*>& instances,
                                       const std::vector<const Allocation*>& expert,
                                       const std::vector<const TriGraph*>& graphs,
                                       const std::string& case_id,
                                       const std::vector<int>& instance_ids,
                                       NrmsdMode mode = NrmsdMode::kMean);

struct CaseAggregate {
  std::string case_id;
  std::string model;
  int instances = 0;
  double f1_mean = 0.0;
  double f1_std = 0.0;
  double delta_j_mean = 0.0;
  double delta_j_std = 0.0;
  double abs_delta_j_mean = 0.0;
  double delta_nrmsd_mean = 0.0;
  double delta_nrmsd_std = 0.0;
  double abs_delta_nrmsd_mean = 0.0;
  double nrmsd_expert_mean = 0.0;
  double nrmsd_model_mean = 0.0;
  double xor_ok_rate = 0.0;
  double covered_rate = 0.0;
  double expert_optimal_rate = 0.0;
  double solver_time_mean_s = 0.0;
  double inference_time_mean_s = 0.0;
};

// One aggregate per (case, model) in first-seen order.
std::vector<CaseAggregate> aggregate(const std::vector<EvalRecord>& records);

struct MatrixConfig {
  std::vector<CaseSpec> cases;
  int train_instances = 100;
  int test_instances = 25;
  GenConfig gen;
  BnbLimits solver;
  ModelConfig model;
  TrainConfig train;
  bool train_fnn = true;
  NrmsdMode nrmsd_mode = NrmsdMode::kMean;
  std::uint64_t seed = 1;
  int jobs = 1;
};

struct CaseRun {
  CaseSpec spec;
  std::vector<WdpInstance> instances;
  std::vector<Allocation> expert;
  std::vector<int> train_ids;
  std::vector<int> test_ids;
  NeuralModel gnn;
  NeuralModel fnn;
  TrainReport gnn_report;
  TrainReport fnn_report;
  int time_limited = 0;  // expert runs that hit the solver budget
};

struct MatrixResult {
  std::vector<CaseRun> runs;
  std::vector<EvalRecord> records;
  std::vector<CaseAggregate> aggregates;
};

// Full experiment: generate, solve, split, train GNN (and FNN), evaluate on
// the held-out instances.
MatrixResult run_matrix(const ResourcePool& pool, const MatrixConfig& config);

// Timing of the exact solver and the GNN inference path (graph build,
// forward pass, repair) as functions of kappa.
struct TimingPoint {
  int kappa = 0;
  int instances = 0;
  double solver_median_s = 0.0;
  double inference_median_s = 0.0;
  int solver_time_limited = 0;
};

struct TimingConfig {
  std::vector<int> kappas{50, 100, 200, 400};
  int bids_per_prosumer = 2;
  double ess_share = 0.5;
  int instances = 3;
  int repeats = 5;  // inference timing repeats per instance (median)
  GenConfig gen;
  BnbLimits solver;
  std::uint64_t seed = 1;
};

std::vector<TimingPoint> measure_timing(const ResourcePool& pool,
                                        const NeuralModel& model,
                                        const TimingConfig& config);

// ---- tables ----------------------------------------------------------------

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // throws when missing
  double number(size_t row, const std::string& name) const;
};

Table read_csv_table(const std::filesystem::path& path);
Table parse_csv_table(const std::string& text);

// results.csv excludes timing; timing.csv carries it keyed by the same
// (case, model, instance).
void write_results_csv(const std::vector<EvalRecord>& records, std::ostream& out);
void write_record_timing_csv(const std::vector<EvalRecord>& records,
                             std::ostream& out);
void write_aggregates_csv(const std::vector<CaseAggregate>& aggregates,
                          std::ostream& out);
void write_timing_csv(const std::vector<TimingPoint>& points, std::ostream& out);
void write_train_csv(const TrainReport& report, std::ostream& out);

// Shortest decimal that round-trips, used in every CSV.
std::string format_number(double value);

// ---- plots -------------------------------------------------------------------

// Static SVG charts built from the CSV tables above. Output is a pure
// function of the table contents.
std::string plot_f1_by_case(const Table& aggregates);
std::string plot_deltas_by_case(const Table& aggregates);
std::string plot_time_vs_kappa(const Table& timing);

}  // namespace lfm

#endif  // LFM_EVALUATION_HPP_
