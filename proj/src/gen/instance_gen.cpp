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

#include "lfm/instance_gen.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "lfm/exact_solver.hpp"

namespace lfm {

using nlohmann::json;

void GenConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ConfigError("epsilon must lie in (0, 1)");
  }
  if (bids_per_prosumer < 1) throw ConfigError("bids_per_prosumer must be >= 1");
  if (!(ess_share >= 0.0 && ess_share <= 1.0)) {
    throw ConfigError("ess_share must lie in [0, 1]");
  }
  if (!(eta_prop > 0.0 && eta_prop <= 1.0)) {
    throw ConfigError("eta_prop must lie in (0, 1]");
  }
  if (max_bundle_size < 1) throw ConfigError("max_bundle_size must be >= 1");
  if (!(eta_eff > 0.0 && eta_eff <= 1.0)) {
    throw ConfigError("eta_eff must lie in (0, 1]");
  }
  if (margin < 0.0) throw ConfigError("margin must be >= 0");
  if (!(margin_spread >= 0.0 && margin_spread < 1.0)) {
    throw ConfigError("margin_spread must lie in [0, 1)");
  }
  if (ess_power_limit < 0) throw ConfigError("ess_power_limit must be >= 0");
  if (reseed_attempts < 1 || max_backoffs < 0 ||
      !(eta_backoff > 0.0 && eta_backoff < 1.0)) {
    throw ConfigError("invalid feasibility repair settings");
  }
}

CostModel GenConfig::cost_model(Rng& rng) const {
  const double factor = 1.0 + margin_spread * (2.0 * uniform01(rng) - 1.0);
  return CostModel::for_efficiency(eta_eff, margin * factor);
}

json to_json(const GenConfig& c) {
  return json{{"epsilon", c.epsilon},
              {"bids_per_prosumer", c.bids_per_prosumer},
              {"ess_share", c.ess_share},
              {"eta_prop", c.eta_prop},
              {"max_bundle_size", c.max_bundle_size},
              {"seed", c.seed},
              {"eta_eff", c.eta_eff},
              {"margin", c.margin},
              {"margin_spread", c.margin_spread},
              {"ess_power_limit", c.ess_power_limit},
              {"reseed_attempts", c.reseed_attempts},
              {"eta_backoff", c.eta_backoff},
              {"max_backoffs", c.max_backoffs},
              {"feasibility_node_limit", c.feasibility_node_limit}};
}

GenConfig gen_config_from_json(const json& j) {
  GenConfig c;
  c.epsilon = j.value("epsilon", c.epsilon);
  c.bids_per_prosumer = j.value("bids_per_prosumer", c.bids_per_prosumer);
  c.ess_share = j.value("ess_share", c.ess_share);
  c.eta_prop = j.value("eta_prop", c.eta_prop);
  c.max_bundle_size = j.value("max_bundle_size", c.max_bundle_size);
  c.seed = j.value("seed", c.seed);
  c.eta_eff = j.value("eta_eff", c.eta_eff);
  c.margin = j.value("margin", c.margin);
  c.margin_spread = j.value("margin_spread", c.margin_spread);
  c.ess_power_limit = j.value("ess_power_limit", c.ess_power_limit);
  c.reseed_attempts = j.value("reseed_attempts", c.reseed_attempts);
  c.eta_backoff = j.value("eta_backoff", c.eta_backoff);
  c.max_backoffs = j.value("max_backoffs", c.max_backoffs);
  c.feasibility_node_limit =
      j.value("feasibility_node_limit", c.feasibility_node_limit);
  c.validate();
  return c;
}

std::vector<Interval> biddable_pv_set(const ProsumerResources& resources,
                                      double epsilon) {
  std::vector<Interval> out;
  for (Interval j = 0; j < resources.horizon(); ++j) {
    const double production = static_cast<double>(resources.pv_profile[j]);
    const double threshold =
        epsilon * static_cast<double>(resources.pv_capacity[j]);
    if (production > 0.0 && production >= threshold) out.push_back(j);
  }
  return out;
}

std::vector<Interval> biddable_ess_set(const ProsumerResources& resources,
                                       double epsilon) {
  const auto pv = biddable_pv_set(resources, epsilon);
  std::vector<Interval> out;
  for (Interval j = 0; j < resources.horizon(); ++j) {
    if (!std::binary_search(pv.begin(), pv.end(), j)) out.push_back(j);
  }
  return out;
}

namespace {

// Appends every subset of pool with 1..max_size members, in
// size-then-lexicographic order.
void append_subsets(const std::vector<Interval>& pool, int max_size,
                    std::vector<std::vector<Interval>>& out) {
  const int n = static_cast<int>(pool.size());
  std::vector<int> idx;
  for (int k = 1; k <= std::min(max_size, n); ++k) {
    idx.resize(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      std::vector<Interval> subset;
      subset.reserve(k);
      for (int i : idx) subset.push_back(pool[i]);
      out.push_back(std::move(subset));
      int pos = k - 1;
      while (pos >= 0 && idx[pos] == n - k + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int q = pos + 1; q < k; ++q) idx[q] = idx[q - 1] + 1;
    }
  }
}

Units storage_limit(const ProsumerResources& r, const GenConfig& config) {
  if (r.ess_power_limit > 0) return r.ess_power_limit;
  if (config.ess_power_limit > 0) return config.ess_power_limit;
  Units peak = 0;
  for (Units c : r.pv_capacity) peak = std::max(peak, c);
  return std::max<Units>(1, round_half_up(0.5 * static_cast<double>(peak)));
}

// Feasibility under XOR: an incumbent from a capped branch and bound run.
bool xor_feasible(const WdpInstance& instance, long node_limit) {
  BnbLimits limits;
  limits.stop_at_first_feasible = true;
  limits.node_limit = node_limit;
  limits.time_limit_s = 0.0;
  const Allocation a = solve_bnb(instance, limits);
  return a.has_solution();
}

}  // namespace

std::vector<std::vector<Interval>> candidate_bundles(
    const ProsumerResources& resources, const GenConfig& config) {
  const auto pv = biddable_pv_set(resources, config.epsilon);
  std::vector<std::vector<Interval>> out;
  if (pv.empty()) return out;
  if (!resources.has_ess) {
    append_subsets(pv, config.max_bundle_size, out);
    return out;
  }
  // Storage owners: any interval may carry ramp-up, but the bundle can hold
  // at most |I_pv| members because storage energy comes from own PV.
  std::vector<Interval> all(static_cast<size_t>(resources.horizon()));
  std::iota(all.begin(), all.end(), 0);
  append_subsets(all,
                 std::min(config.max_bundle_size, static_cast<int>(pv.size())),
                 out);
  return out;
}

std::vector<Bid> enumerate_bundles(const ProsumerResources& resources,
                                   const GenConfig& config, Rng& rng) {
  const auto candidates = candidate_bundles(resources, config);
  std::vector<Bid> bids;
  if (candidates.empty()) {
    spdlog::info("prosumer {} ({}) has an empty biddable set; no bids",
                 resources.prosumer_id, resources.home_id);
    return bids;
  }
  const auto pv = biddable_pv_set(resources, config.epsilon);
  const auto ess = biddable_ess_set(resources, config.epsilon);
  const CostModel cost = config.cost_model(rng);
  const Units limit = resources.has_ess ? storage_limit(resources, config) : 0;
  ProsumerResources priced = resources;
  if (priced.has_ess) priced.ess_power_limit = limit;

  // Partial Fisher-Yates over candidate indices.
  std::vector<int> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  const int take =
      std::min(config.bids_per_prosumer, static_cast<int>(order.size()));
  for (int k = 0; k < take; ++k) {
    const auto pick = uniform_int(rng, k, static_cast<long long>(order.size()) - 1);
    std::swap(order[k], order[static_cast<size_t>(pick)]);
  }

  for (int k = 0; k < take; ++k) {
    const auto& bundle = candidates[static_cast<size_t>(order[k])];
    UnitMap pv_part;
    UnitMap ess_part;
    for (Interval j : bundle) {
      if (std::binary_search(pv.begin(), pv.end(), j)) {
        pv_part[j] = resources.pv_profile[j];
      } else {
        ess_part[j] = uniform_int(rng, 1, limit);
      }
    }
    if (resources.has_ess) {
      std::vector<Interval> spare;
      for (Interval j : ess) {
        if (ess_part.count(j) == 0) spare.push_back(j);
      }
      const long long max_down =
          std::min<long long>(static_cast<long long>(bundle.size()),
                              static_cast<long long>(spare.size()));
      const long long downs = uniform_int(rng, 0, max_down);
      for (long long d = 0; d < downs; ++d) {
        const auto pick =
            uniform_int(rng, d, static_cast<long long>(spare.size()) - 1);
        std::swap(spare[static_cast<size_t>(d)], spare[static_cast<size_t>(pick)]);
        ess_part[spare[static_cast<size_t>(d)]] = -uniform_int(rng, 1, limit);
      }
    }
    bids.push_back(make_bid(priced, pv_part, ess_part, cost, k));
  }
  return bids;
}

FlexibilityCurve accumulate_curve(const std::vector<Bid>& bids,
                                  double eta_prop, int horizon) {
  std::vector<Units> up(static_cast<size_t>(horizon), 0);
  std::vector<Units> down(static_cast<size_t>(horizon), 0);
  for (const Bid& bid : bids) {
    for (const auto& [j, s] : bid.quantities) {
      if (s > 0) up[j] += s;
      if (s < 0) down[j] += -s;
    }
  }
  std::vector<Units> values(static_cast<size_t>(horizon));
  for (int j = 0; j < horizon; ++j) {
    values[j] = round_half_up(eta_prop * static_cast<double>(up[j])) -
                round_half_up(eta_prop * static_cast<double>(down[j]));
  }
  return FlexibilityCurve(std::move(values));
}

WdpInstance generate_instance(const std::vector<ProsumerResources>& resources,
                              const GenConfig& config) {
  config.validate();
  if (resources.empty()) throw std::invalid_argument("no prosumer resources");
  const int horizon = resources.front().horizon();
  for (const auto& r : resources) {
    r.validate();
    if (r.horizon() != horizon) {
      throw std::invalid_argument("prosumer horizons differ");
    }
  }
  const int n = static_cast<int>(resources.size());

  double eta = config.eta_prop;
  for (int backoff = 0; backoff <= config.max_backoffs; ++backoff) {
    for (int attempt = 0; attempt < config.reseed_attempts; ++attempt) {
      const std::uint64_t seed =
          backoff == 0 && attempt == 0
              ? config.seed
              : derive_seed(config.seed, static_cast<std::uint64_t>(backoff),
                            static_cast<std::uint64_t>(attempt) + 1);

      std::vector<ProsumerResources> equipped = resources;
      for (int p = 0; p < n; ++p) equipped[p].prosumer_id = p;
      std::vector<int> candidates;
      int already = 0;
      for (int p = 0; p < n; ++p) {
        if (equipped[p].has_ess) {
          ++already;
        } else {
          candidates.push_back(p);
        }
      }
      const int wanted = static_cast<int>(
          round_half_up(config.ess_share * static_cast<double>(n)));
      Rng ess_rng(derive_seed(seed, 0xE55ULL));
      const int grant = std::clamp(wanted - already, 0,
                                   static_cast<int>(candidates.size()));
      for (int k = 0; k < grant; ++k) {
        const auto pick = uniform_int(
            ess_rng, k, static_cast<long long>(candidates.size()) - 1);
        std::swap(candidates[k], candidates[static_cast<size_t>(pick)]);
        ProsumerResources& r = equipped[candidates[k]];
        r.has_ess = true;
        r.eta_eff = config.eta_eff;
        r.ess_power_limit = storage_limit(r, config);
      }

      WdpInstance instance;
      instance.n = n;
      instance.seed = config.seed;
      int empty = 0;
      for (int p = 0; p < n; ++p) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(p) + 1));
        auto bids = enumerate_bundles(equipped[p], config, rng);
        if (bids.empty()) ++empty;
        for (auto& b : bids) instance.bids.push_back(std::move(b));
      }
      if (instance.bids.empty()) {
        throw std::invalid_argument("every prosumer has an empty biddable set");
      }
      instance.curve = accumulate_curve(instance.bids, eta, horizon);
      instance.meta = {{"generator", "bottom-up"},
                       {"config", to_json(config).dump()},
                       {"eta_prop_effective", json(eta).dump()},
                       {"draw_seed", std::to_string(seed)},
                       {"empty_prosumers", std::to_string(empty)}};
      instance.validate();
      if (config.bids_per_prosumer == 1 ||
          xor_feasible(instance, config.feasibility_node_limit)) {
        return instance;
      }
      spdlog::debug("instance seed {} attempt {} infeasible under XOR",
                    config.seed, attempt);
    }
    eta *= config.eta_backoff;
    spdlog::warn("seed {}: lowering eta_prop to {:.4f} after failed reseeds",
                 config.seed, eta);
  }
  throw std::runtime_error("feasibility repair exhausted for seed " +
                           std::to_string(config.seed));
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.empty()) {
    throw std::invalid_argument("pearson needs equal non-empty samples");
  }
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return kNaN;
  return sxy / std::sqrt(sxx * syy);
}

double correlation_audit(const WdpInstance& instance) {
  if (instance.kappa() < 3) {
    throw std::invalid_argument("correlation audit needs at least 3 bids");
  }
  std::vector<double> values;
  std::vector<double> multiplicities;
  for (const Bid& bid : instance.bids) {
    values.push_back(bid.value);
    multiplicities.push_back(static_cast<double>(bid.multiplicity()));
  }
  const double r = pearson(values, multiplicities);
  if (std::isnan(r)) {
    spdlog::warn("correlation audit: zero variance, correlation undefined");
  }
  return r;
}

}  // namespace lfm
