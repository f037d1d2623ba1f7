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


#include "lfm/graph_repr.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace lfm {

using nlohmann::json;

std::string to_string(NodeType type) {
  switch (type) {
    case NodeType::kBid:
      return "bid";
    case NodeType::kFlex:
      return "flex";
    case NodeType::kMux:
      return "mux";
  }
  return "unknown";
}

json FeatureScale::to_json() const {
  return json{{"value_max", value_max}, {"units_max", units_max}};
}

FeatureScale FeatureScale::from_json(const json& j) {
  FeatureScale s;
  s.value_max = j.at("value_max").get<double>();
  s.units_max = j.at("units_max").get<double>();
  return s;
}

FeatureScale corpus_scale(const std::vector<const WdpInstance*>& instances) {
  double value_max = 0.0;
  Units units_max = 0;
  for (const WdpInstance* inst : instances) {
    for (const Bid& b : inst->bids) {
      value_max = std::max(value_max, b.value);
      for (const auto& [j, s] : b.quantities) {
        units_max = std::max(units_max, s < 0 ? -s : s);
      }
    }
    for (Units u : inst->curve.values()) {
      units_max = std::max(units_max, u < 0 ? -u : u);
    }
  }
  FeatureScale scale;
  scale.value_max = value_max > 0.0 ? value_max : 1.0;
  scale.units_max = units_max > 0 ? static_cast<double>(units_max) : 1.0;
  return scale;
}

FeatureScale corpus_scale(const std::vector<WdpInstance>& instances) {
  std::vector<const WdpInstance*> ptrs;
  for (const auto& inst : instances) ptrs.push_back(&inst);
  return corpus_scale(ptrs);
}

NodeType TriGraph::type_of(int node) const {
  if (node < 0 || node >= node_count()) {
    throw std::out_of_range("node " + std::to_string(node) + " not in graph");
  }
  if (node < bid_count()) return NodeType::kBid;
  if (node < bid_count() + flex_count()) return NodeType::kFlex;
  return NodeType::kMux;
}

TriGraph build_graph(const WdpInstance& instance, const FeatureScale& scale,
                     const std::vector<int>* labels) {
  const int kappa = instance.kappa();
  const int horizon = instance.horizon();
  if (labels != nullptr && static_cast<int>(labels->size()) != kappa) {
    throw std::invalid_argument("label count " +
                                std::to_string(labels->size()) +
                                " differs from bid count " +
                                std::to_string(kappa));
  }
  TriGraph g;
  g.horizon = horizon;
  g.scale = scale;

  std::vector<int> flex_of(static_cast<size_t>(horizon), -1);
  for (Interval j = 0; j < horizon; ++j) {
    if (instance.curve[j] == 0) continue;
    flex_of[j] = static_cast<int>(g.flex_interval.size());
    g.flex_interval.push_back(j);
  }
  g.flex_features.resize(static_cast<Eigen::Index>(g.flex_interval.size()), 1);
  for (size_t f = 0; f < g.flex_interval.size(); ++f) {
    g.flex_features(static_cast<Eigen::Index>(f), 0) =
        static_cast<double>(instance.curve[g.flex_interval[f]]) /
        scale.units_max;
  }
  g.mux_features = Eigen::MatrixXd::Ones(instance.n, 1);

  g.bid_features = Eigen::MatrixXd::Zero(kappa, 1 + 2 * horizon);
  for (int i = 0; i < kappa; ++i) {
    const Bid& b = instance.bids[i];
    g.bid_values.push_back(b.value);
    g.bid_owner.push_back(b.prosumer_id);
    g.bid_features(i, 0) = b.value / scale.value_max;
    for (const auto& [j, s] : b.quantities) {
      if (s == 0) continue;
      const double mag = static_cast<double>(s < 0 ? -s : s) / scale.units_max;
      g.bid_features(i, 1 + (s > 0 ? j : horizon + j)) = mag;
      if (flex_of[j] >= 0) {
        g.flex_edges.push_back({i, flex_of[j], static_cast<double>(s)});
      }
    }
    g.mux_edges.push_back({i, b.prosumer_id, 1.0});
  }
  if (labels != nullptr) g.labels = *labels;
  return g;
}

TriGraph build_graph(const WdpInstance& instance) {
  return build_graph(instance, corpus_scale(std::vector<const WdpInstance*>{&instance}));
}

Eigen::MatrixXi adjacency(const TriGraph& graph) {
  const int n = graph.node_count();
  Eigen::MatrixXi a = Eigen::MatrixXi::Zero(n, n);
  for (const BidEdge& e : graph.flex_edges) {
    a(e.bid, graph.flex_id(e.other)) = 1;
    a(graph.flex_id(e.other), e.bid) = 1;
  }
  for (const BidEdge& e : graph.mux_edges) {
    a(e.bid, graph.mux_id(e.other)) = 1;
    a(graph.mux_id(e.other), e.bid) = 1;
  }
  return a;
}

namespace {

std::vector<std::vector<int>> neighbor_lists(const TriGraph& graph) {
  std::vector<std::vector<int>> out(static_cast<size_t>(graph.node_count()));
  auto link = [&](int a, int b) {
    out[a].push_back(b);
    out[b].push_back(a);
  };
  for (const BidEdge& e : graph.flex_edges) link(e.bid, graph.flex_id(e.other));
  for (const BidEdge& e : graph.mux_edges) link(e.bid, graph.mux_id(e.other));
  return out;
}

}  // namespace

std::vector<int> two_hop_neighbors(const TriGraph& graph, int node) {
  graph.type_of(node);  // range check
  const auto nbrs = neighbor_lists(graph);
  std::set<int> out;
  for (int mid : nbrs[node]) {
    for (int far : nbrs[mid]) {
      if (far != node) out.insert(far);
    }
  }
  return {out.begin(), out.end()};
}

std::vector<std::string> check_invariants(const TriGraph& graph) {
  std::vector<std::string> problems;
  const int kappa = graph.bid_count();
  std::vector<int> flex_degree(kappa, 0);
  std::vector<int> mux_degree(kappa, 0);
  std::set<std::pair<int, int>> seen;
  for (const BidEdge& e : graph.flex_edges) {
    if (e.bid < 0 || e.bid >= kappa || e.other < 0 ||
        e.other >= graph.flex_count()) {
      problems.push_back("flex edge out of range");
      continue;
    }
    if (e.feature == 0.0) problems.push_back("flex edge with zero feature");
    if (!seen.insert({e.bid, e.other}).second) {
      problems.push_back("duplicate flex edge");
    }
    ++flex_degree[e.bid];
  }
  for (const BidEdge& e : graph.mux_edges) {
    if (e.bid < 0 || e.bid >= kappa || e.other < 0 ||
        e.other >= graph.mux_count()) {
      problems.push_back("mux edge out of range");
      continue;
    }
    ++mux_degree[e.bid];
  }
  for (int i = 0; i < kappa; ++i) {
    if (flex_degree[i] < 1) {
      problems.push_back("bid " + std::to_string(i) + " has no flex edge");
    }
    if (mux_degree[i] != 1) {
      problems.push_back("bid " + std::to_string(i) + " has " +
                         std::to_string(mux_degree[i]) + " mux edges");
    }
  }
  if (graph.labels && static_cast<int>(graph.labels->size()) != kappa) {
    problems.push_back("label count differs from bid count");
  }
  return problems;
}

std::vector<UnitMap> decode_bid_quantities(const TriGraph& graph) {
  std::vector<UnitMap> out(static_cast<size_t>(graph.bid_count()));
  const int t = graph.horizon;
  for (int i = 0; i < graph.bid_count(); ++i) {
    for (int j = 0; j < t; ++j) {
      const double up = graph.bid_features(i, 1 + j) * graph.scale.units_max;
      const double down =
          graph.bid_features(i, 1 + t + j) * graph.scale.units_max;
      if (up != 0.0) out[i][j] = std::llround(up);
      if (down != 0.0) out[i][j] = -std::llround(down);
    }
  }
  return out;
}

namespace {

json matrix_rows(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(static_cast<size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[c] = m(r, c);
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd rows_matrix(const json& rows, Eigen::Index cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), cols);
  for (size_t r = 0; r < rows.size(); ++r) {
    const auto row = rows[r].get<std::vector<double>>();
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw std::invalid_argument("ragged feature rows in graph JSON");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), c) = row[c];
  }
  return m;
}

}  // namespace

json to_json(const TriGraph& g) {
  json nodes = json::array();
  const json bid_rows = matrix_rows(g.bid_features);
  for (int i = 0; i < g.bid_count(); ++i) {
    nodes.push_back({{"id", i},
                     {"type", "bid"},
                     {"features", bid_rows[i]},
                     {"value", g.bid_values[i]}});
  }
  for (int f = 0; f < g.flex_count(); ++f) {
    nodes.push_back({{"id", g.flex_id(f)},
                     {"type", "flex"},
                     {"features", {g.flex_features(f, 0)}},
                     {"interval", g.flex_interval[f] + 1}});
  }
  for (int m = 0; m < g.mux_count(); ++m) {
    nodes.push_back({{"id", g.mux_id(m)},
                     {"type", "mux"},
                     {"features", {g.mux_features(m, 0)}},
                     {"prosumer", m}});
  }
  json edges = json::array();
  for (const BidEdge& e : g.flex_edges) {
    edges.push_back({{"src", e.bid},
                     {"dst", g.flex_id(e.other)},
                     {"type", "bid-flex"},
                     {"feature", e.feature}});
  }
  for (const BidEdge& e : g.mux_edges) {
    edges.push_back({{"src", e.bid},
                     {"dst", g.mux_id(e.other)},
                     {"type", "bid-mux"},
                     {"feature", e.feature}});
  }
  json j{{"T", g.horizon},
         {"scale", g.scale.to_json()},
         {"nodes", nodes},
         {"edges", edges}};
  if (g.labels) j["labels"] = *g.labels;
  return j;
}

TriGraph graph_from_json(const json& j) {
  TriGraph g;
  g.horizon = j.at("T").get<int>();
  g.scale = FeatureScale::from_json(j.at("scale"));
  json bid_rows = json::array();
  std::vector<double> flex;
  int mux = 0;
  for (const json& node : j.at("nodes")) {
    const std::string type = node.at("type").get<std::string>();
    if (type == "bid") {
      bid_rows.push_back(node.at("features"));
      g.bid_values.push_back(node.at("value").get<double>());
    } else if (type == "flex") {
      flex.push_back(node.at("features").at(0).get<double>());
      g.flex_interval.push_back(node.at("interval").get<int>() - 1);
    } else if (type == "mux") {
      ++mux;
    } else {
      throw std::invalid_argument("unknown node type '" + type + "'");
    }
  }
  g.bid_features = rows_matrix(bid_rows, 1 + 2 * g.horizon);
  g.flex_features.resize(static_cast<Eigen::Index>(flex.size()), 1);
  for (size_t f = 0; f < flex.size(); ++f) {
    g.flex_features(static_cast<Eigen::Index>(f), 0) = flex[f];
  }
  g.mux_features = Eigen::MatrixXd::Ones(mux, 1);
  const int kappa = g.bid_count();
  const int flex_base = kappa;
  const int mux_base = kappa + g.flex_count();
  g.bid_owner.assign(static_cast<size_t>(kappa), -1);
  for (const json& e : j.at("edges")) {
    const std::string type = e.at("type").get<std::string>();
    const int src = e.at("src").get<int>();
    const int dst = e.at("dst").get<int>();
    const double feature = e.at("feature").get<double>();
    if (type == "bid-flex") {
      g.flex_edges.push_back({src, dst - flex_base, feature});
    } else {
      g.mux_edges.push_back({src, dst - mux_base, feature});
      g.bid_owner.at(static_cast<size_t>(src)) = dst - mux_base;
    }
  }
  if (j.contains("labels")) g.labels = j.at("labels").get<std::vector<int>>();
  return g;
}

void write_edge_csv(const TriGraph& g, std::ostream& out) {
  out << "src,dst,type,feature\n";
  for (const BidEdge& e : g.flex_edges) {
    out << e.bid << ',' << g.flex_id(e.other) << ",bid-flex," << e.feature
        << '\n';
  }
  for (const BidEdge& e : g.mux_edges) {
    out << e.bid << ',' << g.mux_id(e.other) << ",bid-mux," << e.feature
        << '\n';
  }
}

}  // namespace lfm
