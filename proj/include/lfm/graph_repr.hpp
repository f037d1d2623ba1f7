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


#ifndef LFM_GRAPH_REPR_HPP_
#define LFM_GRAPH_REPR_HPP_

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "lfm/core_model.hpp"

namespace lfm {

enum class NodeType { kBid, kFlex, kMux };

std::string to_string(NodeType type);

// Corpus-level maxima used to bring features into [0, 1] (signed
// quantities into [-1, 1]).
struct FeatureScale {
  double value_max = 1.0;
  double units_max = 1.0;

  nlohmann::json to_json() const;
  static FeatureScale from_json(const nlohmann::json& j);
  bool operator==(const FeatureScale&) const = default;
};

// Maxima over all bid values and all |sigma| / |u| in the instances.
FeatureScale corpus_scale(const std::vector<const WdpInstance*>& instances);
FeatureScale corpus_scale(const std::vector<WdpInstance>& instances);

// Edge between a bid node and a flex or mux node; indices are local to the
// node type.
struct BidEdge {
  int bid;
  int other;
  double feature;  // raw sigma for flex edges, 1 for mux edges
};

// Heterogeneous tri-partite graph of one instance. Global node ids are
// bids [0, kappa), flex nodes [kappa, kappa + T'), mux nodes after that.
struct TriGraph {
  int horizon = 0;
  FeatureScale scale;

  // Per bid: [value, up_1..up_T, down_1..down_T], scaled.
  Eigen::MatrixXd bid_features;
  // Per flex node: scaled signed request.
  Eigen::MatrixXd flex_features;
  // Per mux node: the constant 1.
  Eigen::MatrixXd mux_features;

  std::vector<double> bid_values;       // raw
  std::vector<Interval> flex_interval;  // interval of each flex node
  std::vector<ProsumerId> bid_owner;    // mux node of each bid
  std::vector<BidEdge> flex_edges;
  std::vector<BidEdge> mux_edges;
  std::optional<std::vector<int>> labels;

  int bid_count() const { return static_cast<int>(bid_values.size()); }
  int flex_count() const { return static_cast<int>(flex_interval.size()); }
  int mux_count() const { return static_cast<int>(mux_features.rows()); }
  int node_count() const { return bid_count() + flex_count() + mux_count(); }

  int flex_id(int local) const { return bid_count() + local; }
  int mux_id(int local) const { return bid_count() + flex_count() + local; }
  NodeType type_of(int node) const;
};

// Nodes: bids in instance order, flex nodes for intervals with a request in
// interval order, one mux node per prosumer. Throws when labels do not
// have one entry per bid.
TriGraph build_graph(const WdpInstance& instance, const FeatureScale& scale,
                     const std::vector<int>* labels = nullptr);
TriGraph build_graph(const WdpInstance& instance);

// Symmetric 0/1 adjacency over global node ids.
Eigen::MatrixXi adjacency(const TriGraph& graph);

// Neighbours of neighbours, excluding the node itself; sorted global ids.
// Throws std::out_of_range for an unknown node.
std::vector<int> two_hop_neighbors(const TriGraph& graph, int node);

// Structural problems (empty when the graph is well formed).
std::vector<std::string> check_invariants(const TriGraph& graph);

// Signed quantities of each bid recovered from the dense bid features.
std::vector<UnitMap> decode_bid_quantities(const TriGraph& graph);

nlohmann::json to_json(const TriGraph& graph);
TriGraph graph_from_json(const nlohmann::json& j);
// One line per undirected edge: src,dst,type,feature.
void write_edge_csv(const TriGraph& graph, std::ostream& out);

}  // namespace lfm

#endif  // LFM_GRAPH_REPR_HPP_
