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


#ifndef LFM_NEURAL_SOLVER_HPP_
#define LFM_NEURAL_SOLVER_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "lfm/autodiff.hpp"
#include "lfm/core_model.hpp"
#include "lfm/graph_repr.hpp"

namespace lfm {

enum class ModelKind { kGnn, kFnn };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& text);

struct ModelConfig {
  ModelKind kind = ModelKind::kGnn;
  int hidden = 64;
  int rounds = 2;
  std::string aggregation = "sum";  // "sum" or "mean" over incoming messages
  std::uint64_t seed = 1;

  void validate() const;
};

// Per-node states after message passing.
struct NodeStates {
  Eigen::MatrixXd bid;
  Eigen::MatrixXd flex;
  Eigen::MatrixXd mux;
};

// Message-passing network over the tri-partite graph, or a plain per-bid
// feed-forward network when kind is kFnn. Parameters live in a name-ordered
// map so serialization and initialization order are stable.
class NeuralModel {
 public:
  NeuralModel() = default;
  NeuralModel(const ModelConfig& config, int horizon, FeatureScale scale);

  const ModelConfig& config() const { return config_; }
  int horizon() const { return horizon_; }
  const FeatureScale& scale() const { return scale_; }
  const std::map<std::string, ad::Var>& parameters() const { return params_; }
  long parameter_count() const;

  // Bid logits, kappa x 1.
  ad::Var forward(ad::Tape& tape, const TriGraph& graph) const;
  NodeStates message_pass(const TriGraph& graph) const;
  // Sigmoid of the bid logits.
  std::vector<double> predict(const TriGraph& graph) const;

  nlohmann::json to_json() const;
  static NeuralModel from_json(const nlohmann::json& j);
  // Deep copy of the parameter values.
  NeuralModel clone() const;

 private:
  struct States {
    ad::Var all;  // rows: bids, flex, mux
  };
  States run_rounds(ad::Tape& tape, const TriGraph& graph) const;
  const ad::Var& param(const std::string& name) const;
  void add_linear(const std::string& name, int in, int out, std::uint64_t salt);
  ad::Var linear(ad::Tape& tape, const ad::Var& x, const std::string& name) const;

  ModelConfig config_;
  int horizon_ = 0;
  FeatureScale scale_;
  std::map<std::string, ad::Var> params_;
};

// Class weights of one instance: minority-class nodes weigh the majority
// proportion and majority-class nodes the minority proportion. Single-class
// label vectors get weight 1 everywhere.
std::vector<double> class_weights(const std::vector<int>& labels);

// Threshold at 0.5, then keep only the highest-probability bid of each
// prosumer (lowest index on ties). Coverage is not enforced.
std::vector<int> xor_repair(const std::vector<double>& p,
                            const std::vector<ProsumerId>& owner);
std::vector<int> xor_repair(const std::vector<double>& p,
                            const WdpInstance& instance);

struct LossTerms {
  double bce = 0.0;
  double value_term = 0.0;  // zeta * ((J - J*) / J)^2
  double total() const { return bce + value_term; }
};

// Weighted BCE plus the optimal-value term. expert_j is J of the expert
// allocation, model_j is J of the repaired prediction.
LossTerms loss(const std::vector<double>& p, const std::vector<int>& labels,
               const std::vector<double>& weights, double expert_j,
               double model_j, double zeta);

struct TrainSample {
  const TriGraph* graph = nullptr;  // must carry labels
  double expert_j = 0.0;
};

struct TrainConfig {
  int epochs = 500;
  double learning_rate = 1e-3;
  double zeta = 1e-3;
  std::string optimizer = "adam";  // or "sgd"
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 1;

  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  double bce = 0.0;
  double value_term = 0.0;
  double wall_time_s = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  double train_f1 = 0.0;
  double test_f1 = 0.0;
  bool aborted = false;
  std::string message;
};

// Per-sample updates over a seeded shuffle each epoch. On a non-finite loss
// the model is rolled back to the last finished epoch and the report is
// marked aborted.
TrainReport train(NeuralModel& model, const std::vector<TrainSample>& corpus,
                  const TrainConfig& config);

struct GradCheckResult {
  double max_relative_error = 0.0;
  int checked = 0;
  int skipped = 0;  // entries whose +h / -h passes crossed a kink
};

// Central differences with step h on up to max_entries randomly drawn
// parameter entries, against the analytic gradient of the weighted BCE.
// The relative error uses the floor |a| + |n| >= abs_floor.
GradCheckResult grad_check(const NeuralModel& model, const TriGraph& graph,
                           const std::vector<int>& labels, std::uint64_t seed,
                           int max_entries = 1000, double h = 1e-4,
                           double abs_floor = 1e-6);

}  // namespace lfm

#endif  // LFM_NEURAL_SOLVER_HPP_
