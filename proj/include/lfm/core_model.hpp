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

#ifndef LFM_CORE_MODEL_HPP_
#define LFM_CORE_MODEL_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace lfm {

// Intervals are 0-based in memory. Serialized instances use 1-based interval
// keys, matching the usual j = 1..T notation of flexibility curves.
using Interval = int;
using ProsumerId = int;
using Units = long long;

// Interval -> units. Sparse; zero entries are never stored.
using UnitMap = std::map<Interval, Units>;

// Flexibility requested by the DSO. Positive values ask for ramp-up, negative
// values for ramp-down, zero means no request.
class FlexibilityCurve {
 public:
  FlexibilityCurve() = default;
  explicit FlexibilityCurve(std::vector<Units> values);

  int size() const { return static_cast<int>(values_.size()); }
  Units operator[](Interval j) const { return values_[j]; }
  const std::vector<Units>& values() const { return values_; }

  Units up_demand(Interval j) const { return values_[j] > 0 ? values_[j] : 0; }
  Units down_demand(Interval j) const {
    return values_[j] < 0 ? -values_[j] : 0;
  }
  bool all_zero() const;
  // Number of intervals with a non-zero request.
  int active_count() const;

  bool operator==(const FlexibilityCurve&) const = default;

 private:
  std::vector<Units> values_;
};

struct ProsumerResources {
  ProsumerId prosumer_id = 0;
  std::string home_id;
  std::vector<Units> pv_profile;
  std::vector<Units> pv_capacity;
  bool has_ess = false;
  Units ess_power_limit = 0;
  double eta_eff = 1.0;

  int horizon() const { return static_cast<int>(pv_profile.size()); }
  // Throws std::invalid_argument on a broken invariant.
  void validate() const;

  bool operator==(const ProsumerResources&) const = default;
};

nlohmann::json to_json(const ProsumerResources& r);
ProsumerResources resources_from_json(const nlohmann::json& j);

// Profit term of the valuation; receives the PV and ESS parts of a subset.
using ProfitFn = std::function<double(const UnitMap& pv, const UnitMap& ess)>;

struct CostModel {
  // PV cost per unit and interval. Missing intervals fall back to
  // alpha_default. Zero by default: PV generation has no marginal cost.
  std::map<Interval, double> alpha;
  double alpha_default = 0.0;
  double eta_eff = 1.0;
  // Fraction of delivered units charged as profit by the default gamma.
  double margin = 0.05;
  // Overrides the margin-based profit term when set.
  ProfitFn gamma;

  double alpha_at(Interval j) const;
  // ESS round-trip loss cost per unit: 2 (1 - eta_eff).
  double beta() const { return 2.0 * (1.0 - eta_eff); }
  double profit(const UnitMap& pv, const UnitMap& ess) const;
  void validate() const;

  static CostModel for_efficiency(double eta_eff, double margin = 0.05);
};

// Value a prosumer assigns to a subset: PV units weighted by alpha, ESS
// units by beta, plus the profit term. Both maps hold positive magnitudes;
// direction is carried by the bid itself.
double valuation(const UnitMap& subset_pv, const UnitMap& subset_ess,
                 const CostModel& cost_model);

struct Bid {
  ProsumerId prosumer_id = 0;
  int bid_id = 0;
  UnitMap quantities;  // signed: + ramp-up, - ramp-down
  double value = 0.0;

  // Sum of |sigma_j| over the bid.
  Units multiplicity() const;
  Units up_supply(Interval j) const;
  Units down_supply(Interval j) const;

  bool operator==(const Bid&) const = default;
};

// Builds a bid from a prosumer's PV offer (positive units, ramp-up) and ESS
// offer (signed units). PV units may not exceed the forecast production and
// each ESS entry may not exceed the storage power limit.
Bid make_bid(const ProsumerResources& prosumer, const UnitMap& intervals_pv,
             const UnitMap& intervals_ess, const CostModel& cost_model,
             int bid_id);

struct WdpInstance {
  FlexibilityCurve curve;
  std::vector<Bid> bids;
  int n = 0;  // prosumer registry is {0, .., n-1}
  std::uint64_t seed = 0;
  std::map<std::string, std::string> meta;

  int horizon() const { return curve.size(); }
  int kappa() const { return static_cast<int>(bids.size()); }
  // Bid indices grouped by prosumer; index p holds prosumer p's bids.
  std::vector<std::vector<int>> bids_by_prosumer() const;
  void validate() const;

  bool operator==(const WdpInstance&) const = default;
};

nlohmann::json to_json(const WdpInstance& instance);
WdpInstance instance_from_json(const nlohmann::json& j);
// Canonical key-sorted serialization; stable across runs.
std::string canonical_dump(const WdpInstance& instance);
std::uint64_t instance_hash(const WdpInstance& instance);

// Per-interval surplus of the chosen bids over the request, split by
// direction: up[j] = ramp-up supply - max(u_j, 0) and
// down[j] = ramp-down supply - max(-u_j, 0). Coverage holds iff every entry
// is non-negative.
struct CoverageResidual {
  std::vector<Units> up;
  std::vector<Units> down;

  // Residual in the direction the curve requests at j; for u_j == 0 the
  // smaller of the two (both are plain supply there).
  Units requested(const FlexibilityCurve& curve, Interval j) const;
  bool covered() const;
};

CoverageResidual coverage_residual(const WdpInstance& instance,
                                   const std::vector<int>& chosen);

}  // namespace lfm

#endif  // LFM_CORE_MODEL_HPP_
