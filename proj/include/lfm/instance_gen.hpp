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

#ifndef LFM_INSTANCE_GEN_HPP_
#define LFM_INSTANCE_GEN_HPP_

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "lfm/common.hpp"
#include "lfm/core_model.hpp"

namespace lfm {

struct GenConfig {
  // An interval is biddable from PV when production >= epsilon * capacity.
  double epsilon = 0.5;
  int bids_per_prosumer = 1;
  double ess_share = 0.5;
  // Curve = eta_prop * direction-wise bid sum.
  double eta_prop = 0.5;
  int max_bundle_size = 4;
  std::uint64_t seed = 1;

  double eta_eff = 0.97;
  double margin = 0.1;
  // Each prosumer's profit margin is drawn from margin * (1 +/- spread).
  double margin_spread = 0.2;
  // Storage power limit given to ESS prosumers; 0 picks half of the
  // prosumer's peak PV capacity (at least 1 unit).
  Units ess_power_limit = 0;

  // Feasibility repair: reseed this many times, then shrink eta_prop by
  // eta_backoff and start over, for at most max_backoffs rounds.
  int reseed_attempts = 5;
  double eta_backoff = 0.9;
  int max_backoffs = 20;
  long feasibility_node_limit = 20000;

  void validate() const;
  // Cost model of one prosumer; draws its margin from rng.
  CostModel cost_model(Rng& rng) const;
};

nlohmann::json to_json(const GenConfig& config);
GenConfig gen_config_from_json(const nlohmann::json& j);

std::vector<Interval> biddable_pv_set(const ProsumerResources& resources,
                                      double epsilon);
// Complement of the PV set within the horizon: intervals where production
// is not sufficient and only storage can serve.
std::vector<Interval> biddable_ess_set(const ProsumerResources& resources,
                                       double epsilon);

// All candidate ramp-up interval subsets before down-sampling. PV-only
// prosumers get non-empty subsets of the PV set; storage owners get subsets
// of PV and storage intervals with at most |PV set| members in total.
// Subset sizes are capped by max_bundle_size.
std::vector<std::vector<Interval>> candidate_bundles(
    const ProsumerResources& resources, const GenConfig& config);

// Samples bids_per_prosumer distinct candidates (all of them when fewer
// exist) and prices them. Storage owners add up to |S| ramp-down intervals
// drawn from storage intervals outside S. Bid ids are 0, 1, ...
std::vector<Bid> enumerate_bundles(const ProsumerResources& resources,
                                   const GenConfig& config, Rng& rng);

// Per interval and direction: round-half-up(eta_prop * sum of supply), then
// recombined as up - down.
FlexibilityCurve accumulate_curve(const std::vector<Bid>& bids,
                                  double eta_prop, int horizon);

// Bottom-up generation. Prosumer ids are reassigned to list positions.
// Storage is given to round(ess_share * n) prosumers chosen at random among
// those without one. Throws when no prosumer yields a bid or feasibility
// repair is exhausted.
WdpInstance generate_instance(const std::vector<ProsumerResources>& resources,
                              const GenConfig& config);

double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

// Pearson correlation between bid values and multiplicities; NaN when
// either side has zero variance.
double correlation_audit(const WdpInstance& instance);

}  // namespace lfm

#endif  // LFM_INSTANCE_GEN_HPP_
