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


#include "lfm/neural_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "lfm/common.hpp"
#include "lfm/evaluation.hpp"

namespace lfm {

using nlohmann::json;
using ad::Matrix;
using ad::Tape;
using ad::Var;

std::string to_string(ModelKind kind) {
  return kind == ModelKind::kGnn ? "gnn" : "fnn";
}

ModelKind model_kind_from_string(const std::string& text) {
  if (text == "gnn") return ModelKind::kGnn;
  if (text == "fnn") return ModelKind::kFnn;
  throw ConfigError("unknown model kind '" + text + "' (gnn or fnn)");
}

void ModelConfig::validate() const {
  if (hidden < 1) throw ConfigError("hidden width must be >= 1");
  if (rounds < 0) throw ConfigError("rounds must be >= 0");
  if (aggregation != "sum" && aggregation != "mean") {
    throw ConfigError("aggregation must be 'sum' or 'mean'");
  }
}

namespace {

constexpr int kEdgeFeatures = 2;  // (scaled sigma, mux indicator)

// Directed message edges of a graph in global node ids.
struct MessageEdges {
  std::vector<int> src;
  std::vector<int> dst;
  Matrix features;  // one row per directed edge
};

MessageEdges message_edges(const TriGraph& g) {
  MessageEdges m;
  const size_t count = 2 * (g.flex_edges.size() + g.mux_edges.size());
  m.src.reserve(count);
  m.dst.reserve(count);
  m.features = Matrix::Zero(static_cast<Eigen::Index>(count), kEdgeFeatures);
  Eigen::Index row = 0;
  auto both_ways = [&](int a, int b, double sigma, double mux) {
    for (int k = 0; k < 2; ++k) {
      m.src.push_back(k == 0 ? a : b);
      m.dst.push_back(k == 0 ? b : a);
      m.features(row, 0) = sigma;
      m.features(row, 1) = mux;
      ++row;
    }
  };
  for (const BidEdge& e : g.flex_edges) {
    both_ways(e.bid, g.flex_id(e.other), e.feature / g.scale.units_max, 0.0);
  }
  for (const BidEdge& e : g.mux_edges) {
    both_ways(e.bid, g.mux_id(e.other), 0.0, e.feature);
  }
  return m;
}

Matrix uniform_matrix(Rng& rng, int rows, int cols, double bound) {
  Matrix m(rows, cols);
  // Column-major fill order is part of the checkpoint contract.
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = bound * (2.0 * uniform01(rng) - 1.0);
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  std::vector<double> data(m.data(), m.data() + m.size());
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Matrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw std::invalid_argument("parameter size mismatch in checkpoint");
  }
  Matrix m(rows, cols);
  std::copy(data.begin(), data.end(), m.data());
  return m;
}

}  // namespace

NeuralModel::NeuralModel(const ModelConfig& config, int horizon,
                         FeatureScale scale)
    : config_(config), horizon_(horizon), scale_(scale) {
  config_.validate();
  if (horizon < 1) throw std::invalid_argument("model horizon must be >= 1");
  const int h = config_.hidden;
  const int bid_in = 1 + 2 * horizon;
  if (config_.kind == ModelKind::kFnn) {
    add_linear("fnn1", bid_in, h, 1);
    add_linear("fnn2", h, 1, 2);
    return;
  }
  add_linear("in_bid", bid_in, h, 1);
  add_linear("in_flex", 1, h, 2);
  add_linear("in_mux", 1, h, 3);
  for (int r = 0; r < config_.rounds; ++r) {
    const std::string p = "round" + std::to_string(r) + ".";
    const auto salt = static_cast<std::uint64_t>(10 * (r + 1));
    // Message map on [h_r || edge features]; stored as a state block and an
    // edge block of one affine map.
    Rng rng(derive_seed(config_.seed, salt));
    const double bound = 1.0 / std::sqrt(static_cast<double>(h + kEdgeFeatures));
    params_[p + "msg.W"] = ad::parameter(uniform_matrix(rng, h, h, bound));
    params_[p + "msg.E"] = ad::parameter(uniform_matrix(rng, kEdgeFeatures, h, bound));
    params_[p + "msg.b"] = ad::parameter(uniform_matrix(rng, 1, h, bound));
    add_linear(p + "upd1", 2 * h, h, salt + 1);
    add_linear(p + "upd2", h, h, salt + 2);
  }
  add_linear("head1", h, h, 1000);
  add_linear("head2", h, 1, 1001);
}

void NeuralModel::add_linear(const std::string& name, int in, int out,
                             std::uint64_t salt) {
  Rng rng(derive_seed(config_.seed, salt));
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  params_[name + ".W"] = ad::parameter(uniform_matrix(rng, in, out, bound));
  params_[name + ".b"] = ad::parameter(uniform_matrix(rng, 1, out, bound));
}

const Var& NeuralModel::param(const std::string& name) const {
  const auto it = params_.find(name);
  if (it == params_.end()) {
    throw std::logic_error("model has no parameter '" + name + "'");
  }
  return it->second;
}

Var NeuralModel::linear(Tape& tape, const Var& x, const std::string& name) const {
  return ad::add_row(tape, ad::matmul(tape, x, param(name + ".W")),
                     param(name + ".b"));
}

long NeuralModel::parameter_count() const {
  long total = 0;
  for (const auto& [name, p] : params_) total += p->value.size();
  return total;
}

NeuralModel::States NeuralModel::run_rounds(Tape& tape,
                                            const TriGraph& graph) const {
  const int n = graph.node_count();
  std::vector<Var> parts;
  parts.push_back(ad::relu(tape, linear(tape, tape.constant(graph.bid_features), "in_bid")));
  if (graph.flex_count() > 0) {
    parts.push_back(ad::relu(tape, linear(tape, tape.constant(graph.flex_features), "in_flex")));
  }
  if (graph.mux_count() > 0) {
    parts.push_back(ad::relu(tape, linear(tape, tape.constant(graph.mux_features), "in_mux")));
  }
  Var h = ad::concat_rows(tape, parts);
  const MessageEdges edges = message_edges(graph);
  const Var edge_features = tape.constant(edges.features);
  for (int r = 0; r < config_.rounds; ++r) {
    const std::string p = "round" + std::to_string(r) + ".";
    const Var z = ad::matmul(tape, h, param(p + "msg.W"));
    // Self message: the same map with a zero edge feature.
    const Var self = ad::relu(tape, ad::add_row(tape, z, param(p + "msg.b")));
    Var agg;
    if (edges.src.empty()) {
      agg = tape.constant(Matrix::Zero(n, config_.hidden));
    } else {
      const Var from = ad::gather_rows(tape, z, edges.src);
      const Var with_edge =
          ad::add(tape, from, ad::matmul(tape, edge_features, param(p + "msg.E")));
      const Var msg = ad::relu(tape, ad::add_row(tape, with_edge, param(p + "msg.b")));
      agg = config_.aggregation == "sum" ? ad::segment_sum(tape, msg, edges.dst, n)
                                         : ad::segment_mean(tape, msg, edges.dst, n);
    }
    const Var joined = ad::concat_cols(tape, agg, self);
    h = ad::relu(tape, linear(tape, ad::relu(tape, linear(tape, joined, p + "upd1")),
                              p + "upd2"));
  }
  return {h};
}

Var NeuralModel::forward(Tape& tape, const TriGraph& graph) const {
  if (graph.horizon != horizon_) {
    throw std::invalid_argument("graph horizon " + std::to_string(graph.horizon) +
                                " does not match model horizon " +
                                std::to_string(horizon_));
  }
  if (config_.kind == ModelKind::kFnn) {
    const Var x = tape.constant(graph.bid_features);
    return linear(tape, ad::relu(tape, linear(tape, x, "fnn1")), "fnn2");
  }
  const States s = run_rounds(tape, graph);
  std::vector<int> bids(static_cast<size_t>(graph.bid_count()));
  std::iota(bids.begin(), bids.end(), 0);
  const Var hb = ad::gather_rows(tape, s.all, bids);
  return linear(tape, ad::relu(tape, linear(tape, hb, "head1")), "head2");
}

NodeStates NeuralModel::message_pass(const TriGraph& graph) const {
  if (config_.kind != ModelKind::kGnn) {
    throw std::logic_error("message passing needs a graph model");
  }
  Tape tape;
  const Matrix all = run_rounds(tape, graph).all->value;
  NodeStates out;
  out.bid = all.topRows(graph.bid_count());
  out.flex = all.middleRows(graph.bid_count(), graph.flex_count());
  out.mux = all.bottomRows(graph.mux_count());
  return out;
}

std::vector<double> NeuralModel::predict(const TriGraph& graph) const {
  Tape tape;
  const Var p = ad::sigmoid(tape, forward(tape, graph));
  return {p->value.data(), p->value.data() + p->value.size()};
}

json NeuralModel::to_json() const {
  json params = json::object();
  for (const auto& [name, p] : params_) params[name] = matrix_to_json(p->value);
  return json{{"format", "lfm-neural-model"},
              {"version", 1},
              {"kind", to_string(config_.kind)},
              {"hidden", config_.hidden},
              {"rounds", config_.rounds},
              {"aggregation", config_.aggregation},
              {"seed", config_.seed},
              {"horizon", horizon_},
              {"scale", scale_.to_json()},
              {"parameters", params}};
}

NeuralModel NeuralModel::from_json(const json& j) {
  if (j.value("format", "") != "lfm-neural-model") {
    throw std::invalid_argument("not a model checkpoint");
  }
  if (j.at("version").get<int>() != 1) {
    throw std::invalid_argument("unsupported checkpoint version");
  }
  ModelConfig c;
  c.kind = model_kind_from_string(j.at("kind").get<std::string>());
  c.hidden = j.at("hidden").get<int>();
  c.rounds = j.at("rounds").get<int>();
  c.aggregation = j.at("aggregation").get<std::string>();
  c.seed = j.at("seed").get<std::uint64_t>();
  NeuralModel m(c, j.at("horizon").get<int>(),
                FeatureScale::from_json(j.at("scale")));
  const json& params = j.at("parameters");
  for (auto& [name, p] : m.params_) {
    Matrix value = matrix_from_json(params.at(name));
    if (value.rows() != p->value.rows() || value.cols() != p->value.cols()) {
      throw std::invalid_argument("parameter '" + name + "' has the wrong shape");
    }
    p->value = std::move(value);
  }
  if (params.size() != m.params_.size()) {
    throw std::invalid_argument("checkpoint has unexpected parameters");
  }
  return m;
}

NeuralModel NeuralModel::clone() const {
  NeuralModel m = *this;
  for (auto& [name, p] : m.params_) p = ad::parameter(p->value);
  return m;
}

std::vector<double> class_weights(const std::vector<int>& labels) {
  const double n = static_cast<double>(labels.size());
  const double pos = static_cast<double>(std::count_if(
      labels.begin(), labels.end(), [](int y) { return y != 0; }));
  const double neg = n - pos;
  std::vector<double> w(labels.size(), 1.0);
  if (pos == 0.0 || neg == 0.0) return w;
  for (size_t i = 0; i < labels.size(); ++i) {
    w[i] = labels[i] != 0 ? neg / n : pos / n;
  }
  return w;
}

std::vector<int> xor_repair(const std::vector<double>& p,
                            const std::vector<ProsumerId>& owner) {
  if (p.size() != owner.size()) {
    throw std::invalid_argument("xor_repair: one owner per probability");
  }
  std::vector<int> x(p.size(), 0);
  std::map<ProsumerId, int> best;
  for (size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.5)) continue;
    auto [it, fresh] = best.try_emplace(owner[i], static_cast<int>(i));
    if (!fresh && p[i] > p[it->second]) it->second = static_cast<int>(i);
  }
  for (const auto& [owner_id, i] : best) x[i] = 1;
  return x;
}

std::vector<int> xor_repair(const std::vector<double>& p,
                            const WdpInstance& instance) {
  std::vector<ProsumerId> owner;
  owner.reserve(instance.bids.size());
  for (const Bid& b : instance.bids) owner.push_back(b.prosumer_id);
  return xor_repair(p, owner);
}

LossTerms loss(const std::vector<double>& p, const std::vector<int>& labels,
               const std::vector<double>& weights, double expert_j,
               double model_j, double zeta) {
  if (p.size() != labels.size() || p.size() != weights.size()) {
    throw std::invalid_argument("loss: kappa mismatch");
  }
  Tape tape;
  Matrix pm(static_cast<Eigen::Index>(p.size()), 1);
  for (size_t i = 0; i < p.size(); ++i) pm(static_cast<Eigen::Index>(i), 0) = p[i];
  LossTerms out;
  out.bce = ad::weighted_bce(tape, tape.constant(pm), labels, weights)->value(0, 0);
  if (zeta != 0.0) {
    const double rel = expert_j != 0.0 ? (expert_j - model_j) / expert_j
                                       : (model_j == 0.0 ? 0.0 : 1.0);
    out.value_term = zeta * rel * rel;
  }
  return out;
}

void TrainConfig::validate() const {
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (!(learning_rate >= 0.0)) throw ConfigError("learning rate must be >= 0");
  if (!(zeta >= 0.0)) throw ConfigError("zeta must be >= 0");
  if (optimizer != "adam" && optimizer != "sgd") {
    throw ConfigError("optimizer must be adam or sgd");
  }
}

namespace {

double hard_objective(const TriGraph& g, const std::vector<int>& x) {
  double j = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0) j += g.bid_values[i];
  }
  return j;
}

std::vector<double> to_vector(const Matrix& m) {
  return {m.data(), m.data() + m.size()};
}

}  // namespace

TrainReport train(NeuralModel& model, const std::vector<TrainSample>& corpus,
                  const TrainConfig& config) {
  config.validate();
  for (const TrainSample& s : corpus) {
    if (s.graph == nullptr || !s.graph->labels) {
      throw std::invalid_argument("training samples need labeled graphs");
    }
  }
  TrainReport report;
  const auto& params = model.parameters();
  std::map<std::string, Matrix> m1, m2;
  for (const auto& [name, p] : params) {
    m1[name] = Matrix::Zero(p->value.rows(), p->value.cols());
    m2[name] = m1[name];
  }
  std::vector<std::vector<double>> weights;
  for (const TrainSample& s : corpus) weights.push_back(class_weights(*s.graph->labels));

  NeuralModel last_good = model.clone();
  long step = 0;
  std::vector<int> order(corpus.size());
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(epoch)));
    for (size_t k = order.size(); k > 1; --k) {
      std::swap(order[k - 1], order[static_cast<size_t>(uniform_int(rng, 0, static_cast<long long>(k) - 1))]);
    }
    EpochStats stats;
    stats.epoch = epoch;
    for (int idx : order) {
      const TrainSample& s = corpus[static_cast<size_t>(idx)];
      const std::vector<int>& labels = *s.graph->labels;
      for (const auto& [name, p] : params) ad::zero_grad(p);
      Tape tape;
      const Var prob = ad::sigmoid(tape, model.forward(tape, *s.graph));
      const Var bce = ad::weighted_bce(tape, prob, labels, weights[idx]);
      const double bce_value = bce->value(0, 0);
      if (config.zeta != 0.0) {
        const auto x = xor_repair(to_vector(prob->value), s.graph->bid_owner);
        const LossTerms terms = loss(to_vector(prob->value), labels, weights[idx],
                                     s.expert_j, hard_objective(*s.graph, x),
                                     config.zeta);
        stats.value_term += terms.value_term;
      }
      stats.bce += bce_value;
      if (!std::isfinite(bce_value)) break;
      tape.backward(bce);
      ++step;
      for (const auto& [name, p] : params) {
        const Matrix& g = p->grad;
        if (config.optimizer == "sgd") {
          p->value -= config.learning_rate * g;
          continue;
        }
        Matrix& a = m1[name];
        Matrix& b = m2[name];
        a = config.adam_beta1 * a + (1.0 - config.adam_beta1) * g;
        b = config.adam_beta2 * b + (1.0 - config.adam_beta2) * g.cwiseProduct(g);
        const double c1 = 1.0 - std::pow(config.adam_beta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(config.adam_beta2, static_cast<double>(step));
        p->value.array() -= config.learning_rate * (a.array() / c1) /
                            ((b.array() / c2).sqrt() + config.adam_epsilon);
      }
    }
    const double count = corpus.empty() ? 1.0 : static_cast<double>(corpus.size());
    stats.bce /= count;
    stats.value_term /= count;
    stats.wall_time_s = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start).count();
    bool finite = std::isfinite(stats.bce) && std::isfinite(stats.value_term);
    for (const auto& [name, p] : params) finite = finite && p->value.allFinite();
    if (!finite) {
      report.aborted = true;
      report.message = "non-finite loss in epoch " + std::to_string(epoch) +
                       "; parameters rolled back to epoch " +
                       std::to_string(epoch - 1);
      spdlog::error("{}", report.message);
      for (const auto& [name, p] : params) {
        p->value = last_good.parameters().at(name)->value;
      }
      return report;
    }
    report.epochs.push_back(stats);
    for (const auto& [name, p] : params) {
      last_good.parameters().at(name)->value = p->value;
    }
    if (epoch == 1 || epoch % 10 == 0 || epoch == config.epochs) {
      spdlog::debug("epoch {}: bce {:.6f} value term {:.3e}", epoch, stats.bce,
                    stats.value_term);
    }
  }
  if (!corpus.empty()) {
    std::vector<int> pred, truth;
    for (const TrainSample& s : corpus) {
      const auto x = xor_repair(model.predict(*s.graph), s.graph->bid_owner);
      pred.insert(pred.end(), x.begin(), x.end());
      truth.insert(truth.end(), s.graph->labels->begin(), s.graph->labels->end());
    }
    report.train_f1 = macro_f1(pred, truth);
  }
  return report;
}

GradCheckResult grad_check(const NeuralModel& model, const TriGraph& graph,
                           const std::vector<int>& labels, std::uint64_t seed,
                           int max_entries, double h, double abs_floor) {
  const std::vector<double> weights = class_weights(labels);
  const auto& params = model.parameters();
  for (const auto& [name, p] : params) ad::zero_grad(p);
  std::uint64_t base_signature = 0;
  {
    Tape tape;
    const Var l = ad::weighted_bce(tape, ad::sigmoid(tape, model.forward(tape, graph)),
                                   labels, weights);
    tape.backward(l);
    base_signature = tape.kink_signature();
  }
  struct Entry {
    Var param;
    Eigen::Index index;
  };
  std::vector<Entry> entries;
  for (const auto& [name, p] : params) {
    for (Eigen::Index i = 0; i < p->value.size(); ++i) entries.push_back({p, i});
  }
  Rng rng(seed);
  const int take = std::min<int>(max_entries, static_cast<int>(entries.size()));
  for (int k = 0; k < take; ++k) {
    const auto pick = uniform_int(rng, k, static_cast<long long>(entries.size()) - 1);
    std::swap(entries[static_cast<size_t>(k)], entries[static_cast<size_t>(pick)]);
  }
  auto evaluate = [&](std::uint64_t& signature) {
    Tape tape;
    const Var l = ad::weighted_bce(tape, ad::sigmoid(tape, model.forward(tape, graph)),
                                   labels, weights);
    signature = tape.kink_signature();
    return l->value(0, 0);
  };
  GradCheckResult result;
  for (int k = 0; k < take; ++k) {
    const Entry& e = entries[static_cast<size_t>(k)];
    double& slot = e.param->value.data()[e.index];
    const double analytic = e.param->grad.data()[e.index];
    const double saved = slot;
    std::uint64_t sig_plus = 0, sig_minus = 0;
    slot = saved + h;
    const double plus = evaluate(sig_plus);
    slot = saved - h;
    const double minus = evaluate(sig_minus);
    slot = saved;
    if (sig_plus != base_signature || sig_minus != base_signature) {
      ++result.skipped;
      continue;
    }
    const double numeric = (plus - minus) / (2.0 * h);
    const double denom = std::max(std::abs(analytic) + std::abs(numeric), abs_floor);
    result.max_relative_error =
        std::max(result.max_relative_error, std::abs(analytic - numeric) / denom);
    ++result.checked;
  }
  return result;
}

}  // namespace lfm
