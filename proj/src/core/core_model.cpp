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

#include "lfm/core_model.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "lfm/common.hpp"

namespace lfm {

using nlohmann::json;

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

FlexibilityCurve::FlexibilityCurve(std::vector<Units> values)
    : values_(std::move(values)) {
  if (values_.empty()) {
    throw std::invalid_argument("flexibility curve needs at least one interval");
  }
}

bool FlexibilityCurve::all_zero() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](Units u) { return u == 0; });
}

int FlexibilityCurve::active_count() const {
  return static_cast<int>(std::count_if(values_.begin(), values_.end(),
                                        [](Units u) { return u != 0; }));
}

void ProsumerResources::validate() const {
  if (pv_profile.size() != pv_capacity.size()) {
    throw std::invalid_argument("pv_profile and pv_capacity lengths differ");
  }
  for (size_t j = 0; j < pv_profile.size(); ++j) {
    if (pv_profile[j] < 0) {
      throw std::invalid_argument("negative PV production");
    }
    if (pv_profile[j] > pv_capacity[j]) {
      throw std::invalid_argument("PV production exceeds capacity at interval " +
                                  std::to_string(j + 1));
    }
  }
  if (!has_ess && ess_power_limit != 0) {
    throw std::invalid_argument("ess_power_limit must be 0 without storage");
  }
  if (ess_power_limit < 0) {
    throw std::invalid_argument("negative ess_power_limit");
  }
  if (!(eta_eff > 0.0 && eta_eff <= 1.0)) {
    throw std::invalid_argument("eta_eff must lie in (0, 1]");
  }
}

json to_json(const ProsumerResources& r) {
  return json{{"prosumer_id", r.prosumer_id},
              {"home_id", r.home_id},
              {"pv_profile", r.pv_profile},
              {"pv_capacity", r.pv_capacity},
              {"has_ess", r.has_ess},
              {"ess_power_limit", r.ess_power_limit},
              {"eta_eff", r.eta_eff}};
}

ProsumerResources resources_from_json(const json& j) {
  ProsumerResources r;
  r.prosumer_id = j.at("prosumer_id").get<int>();
  r.home_id = j.value("home_id", std::string());
  r.pv_profile = j.at("pv_profile").get<std::vector<Units>>();
  r.pv_capacity = j.at("pv_capacity").get<std::vector<Units>>();
  r.has_ess = j.at("has_ess").get<bool>();
  r.ess_power_limit = j.at("ess_power_limit").get<Units>();
  r.eta_eff = j.at("eta_eff").get<double>();
  r.validate();
  return r;
}

double CostModel::alpha_at(Interval j) const {
  const auto it = alpha.find(j);
  return it == alpha.end() ? alpha_default : it->second;
}

double CostModel::profit(const UnitMap& pv, const UnitMap& ess) const {
  if (gamma) return gamma(pv, ess);
  Units total = 0;
  for (const auto& [j, u] : pv) total += u;
  for (const auto& [j, u] : ess) total += u;
  return margin * static_cast<double>(total);
}

void CostModel::validate() const {
  if (alpha_default < 0.0) throw std::invalid_argument("alpha must be >= 0");
  for (const auto& [j, a] : alpha) {
    if (a < 0.0) throw std::invalid_argument("alpha must be >= 0");
  }
  if (!(eta_eff > 0.0 && eta_eff <= 1.0)) {
    throw std::invalid_argument("eta_eff must lie in (0, 1]");
  }
  if (margin < 0.0) throw std::invalid_argument("margin must be >= 0");
}

CostModel CostModel::for_efficiency(double eta_eff, double margin) {
  CostModel model;
  model.eta_eff = eta_eff;
  model.margin = margin;
  return model;
}

double valuation(const UnitMap& subset_pv, const UnitMap& subset_ess,
                 const CostModel& cost_model) {
  cost_model.validate();
  if (subset_pv.empty() && subset_ess.empty()) {
    throw std::invalid_argument("valuation of an empty subset");
  }
  double value = 0.0;
  for (const auto& [j, units] : subset_pv) {
    if (units <= 0) {
      throw std::invalid_argument("PV units must be positive magnitudes");
    }
    value += cost_model.alpha_at(j) * static_cast<double>(units);
  }
  const double beta = cost_model.beta();
  for (const auto& [j, units] : subset_ess) {
    if (units <= 0) {
      throw std::invalid_argument("ESS units must be positive magnitudes");
    }
    value += beta * static_cast<double>(units);
  }
  const double gamma = cost_model.profit(subset_pv, subset_ess);
  if (gamma < 0.0) throw std::invalid_argument("profit term must be >= 0");
  return value + gamma;
}

Units Bid::multiplicity() const {
  Units total = 0;
  for (const auto& [j, s] : quantities) total += s < 0 ? -s : s;
  return total;
}

Units Bid::up_supply(Interval j) const {
  const auto it = quantities.find(j);
  return it != quantities.end() && it->second > 0 ? it->second : 0;
}

Units Bid::down_supply(Interval j) const {
  const auto it = quantities.find(j);
  return it != quantities.end() && it->second < 0 ? -it->second : 0;
}

Bid make_bid(const ProsumerResources& prosumer, const UnitMap& intervals_pv,
             const UnitMap& intervals_ess, const CostModel& cost_model,
             int bid_id) {
  const int horizon = prosumer.horizon();
  Bid bid;
  bid.prosumer_id = prosumer.prosumer_id;
  bid.bid_id = bid_id;
  UnitMap ess_magnitudes;
  for (const auto& [j, units] : intervals_pv) {
    if (j < 0 || j >= horizon) {
      throw std::out_of_range("PV interval out of range");
    }
    if (units <= 0) throw std::invalid_argument("PV units must be positive");
    if (units > prosumer.pv_profile[j]) {
      throw std::invalid_argument("PV offer exceeds forecast production at "
                                  "interval " + std::to_string(j + 1));
    }
    bid.quantities[j] = units;
  }
  for (const auto& [j, units] : intervals_ess) {
    if (j < 0 || j >= horizon) {
      throw std::out_of_range("ESS interval out of range");
    }
    if (units == 0) continue;
    if (!prosumer.has_ess) {
      throw std::invalid_argument("prosumer has no storage");
    }
    const Units magnitude = units < 0 ? -units : units;
    if (magnitude > prosumer.ess_power_limit) {
      throw std::invalid_argument("ESS offer exceeds power limit at interval " +
                                  std::to_string(j + 1));
    }
    if (bid.quantities.count(j) != 0) {
      throw std::invalid_argument("interval offered by both PV and ESS");
    }
    bid.quantities[j] = units;
    ess_magnitudes[j] = magnitude;
  }
  bid.value = valuation(intervals_pv, ess_magnitudes, cost_model);
  return bid;
}

std::vector<std::vector<int>> WdpInstance::bids_by_prosumer() const {
  std::vector<std::vector<int>> groups(static_cast<size_t>(n));
  for (int i = 0; i < kappa(); ++i) {
    groups[static_cast<size_t>(bids[i].prosumer_id)].push_back(i);
  }
  return groups;
}

void WdpInstance::validate() const {
  if (curve.size() < 1) throw std::invalid_argument("empty flexibility curve");
  if (bids.empty()) throw std::invalid_argument("instance has no bids");
  for (const Bid& bid : bids) {
    if (bid.prosumer_id < 0 || bid.prosumer_id >= n) {
      throw std::invalid_argument("bid references unknown prosumer " +
                                  std::to_string(bid.prosumer_id));
    }
    if (bid.quantities.empty()) {
      throw std::invalid_argument("bid without quantities");
    }
    for (const auto& [j, s] : bid.quantities) {
      if (j < 0 || j >= curve.size()) {
        throw std::invalid_argument("bid interval outside the curve");
      }
      if (s == 0) throw std::invalid_argument("zero quantity stored in bid");
    }
    if (bid.value < 0.0) throw std::invalid_argument("negative bid value");
  }
}

json to_json(const WdpInstance& instance) {
  json bids = json::array();
  for (const Bid& bid : instance.bids) {
    json q = json::object();
    for (const auto& [j, s] : bid.quantities) q[std::to_string(j + 1)] = s;
    bids.push_back({{"prosumer", bid.prosumer_id},
                    {"bid_id", bid.bid_id},
                    {"quantities", q},
                    {"value", bid.value}});
  }
  return json{{"T", instance.horizon()},
              {"curve", instance.curve.values()},
              {"bids", bids},
              {"n", instance.n},
              {"seed", instance.seed},
              {"meta", instance.meta}};
}

WdpInstance instance_from_json(const json& j) {
  WdpInstance instance;
  const int horizon = j.at("T").get<int>();
  instance.curve = FlexibilityCurve(j.at("curve").get<std::vector<Units>>());
  if (instance.curve.size() != horizon) {
    throw std::invalid_argument("curve length does not match T");
  }
  for (const auto& jb : j.at("bids")) {
    Bid bid;
    bid.prosumer_id = jb.at("prosumer").get<int>();
    bid.bid_id = jb.at("bid_id").get<int>();
    for (const auto& [key, s] : jb.at("quantities").items()) {
      bid.quantities[std::stoi(key) - 1] = s.get<Units>();
    }
    bid.value = jb.at("value").get<double>();
    instance.bids.push_back(std::move(bid));
  }
  instance.n = j.at("n").get<int>();
  instance.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("meta")) {
    instance.meta = j.at("meta").get<std::map<std::string, std::string>>();
  }
  instance.validate();
  return instance;
}

std::string canonical_dump(const WdpInstance& instance) {
  return to_json(instance).dump();
}

std::uint64_t instance_hash(const WdpInstance& instance) {
  return fnv1a64(canonical_dump(instance));
}

Units CoverageResidual::requested(const FlexibilityCurve& curve,
                                  Interval j) const {
  if (curve[j] > 0) return up[j];
  if (curve[j] < 0) return down[j];
  return std::min(up[j], down[j]);
}

bool CoverageResidual::covered() const {
  return std::all_of(up.begin(), up.end(), [](Units r) { return r >= 0; }) &&
         std::all_of(down.begin(), down.end(), [](Units r) { return r >= 0; });
}

CoverageResidual coverage_residual(const WdpInstance& instance,
                                   const std::vector<int>& chosen) {
  const int horizon = instance.horizon();
  CoverageResidual residual;
  residual.up.resize(horizon);
  residual.down.resize(horizon);
  for (Interval j = 0; j < horizon; ++j) {
    residual.up[j] = -instance.curve.up_demand(j);
    residual.down[j] = -instance.curve.down_demand(j);
  }
  for (int i : chosen) {
    for (const auto& [j, s] : instance.bids.at(static_cast<size_t>(i)).quantities) {
      if (s > 0) {
        residual.up[j] += s;
      } else {
        residual.down[j] -= s;
      }
    }
  }
  return residual;
}

}  // namespace lfm
