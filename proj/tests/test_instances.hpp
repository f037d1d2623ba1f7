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


// Hand-built and random WDP instances shared by the tests.

#ifndef LFM_TESTS_TEST_INSTANCES_HPP_
#define LFM_TESTS_TEST_INSTANCES_HPP_

#include <algorithm>
#include <initializer_list>
#include <utility>
#include <vector>

#include "lfm/common.hpp"
#include "lfm/core_model.hpp"

namespace lfm::testing {

struct BidSpec {
  ProsumerId prosumer;
  UnitMap quantities;
  double value;
};

inline WdpInstance make_instance(std::vector<Units> curve,
                                 std::vector<BidSpec> bids, int n = -1) {
  WdpInstance inst;
  inst.curve = FlexibilityCurve(std::move(curve));
  int max_p = -1;
  std::vector<int> next_id;
  for (const BidSpec& spec : bids) {
    if (spec.prosumer >= static_cast<int>(next_id.size())) {
      next_id.resize(spec.prosumer + 1, 0);
    }
    Bid b;
    b.prosumer_id = spec.prosumer;
    b.bid_id = next_id[spec.prosumer]++;
    b.quantities = spec.quantities;
    b.value = spec.value;
    inst.bids.push_back(b);
    max_p = std::max(max_p, spec.prosumer);
  }
  inst.n = n >= 0 ? n : max_p + 1;
  return inst;
}

// Random instance with kappa bids spread over prosumers, integer-ish values
// roughly proportional to multiplicity and a curve drawn from a random
// subset of the bids, so most draws are feasible.
inline WdpInstance random_instance(std::uint64_t seed, int kappa, int horizon,
                                   int max_bids_per_prosumer) {
  Rng rng(seed);
  WdpInstance inst;
  std::vector<BidSpec> specs;
  ProsumerId p = 0;
  int left_in_group = static_cast<int>(uniform_int(rng, 1, max_bids_per_prosumer));
  for (int i = 0; i < kappa; ++i) {
    if (left_in_group == 0) {
      ++p;
      left_in_group = static_cast<int>(uniform_int(rng, 1, max_bids_per_prosumer));
    }
    --left_in_group;
    BidSpec spec{p, {}, 0.0};
    const int size = static_cast<int>(uniform_int(rng, 1, std::min(3, horizon)));
    Units mult = 0;
    for (int k = 0; k < size; ++k) {
      const Interval j = static_cast<Interval>(uniform_int(rng, 0, horizon - 1));
      const Units mag = uniform_int(rng, 1, 6);
      const Units sign = uniform01(rng) < 0.7 ? 1 : -1;
      spec.quantities[j] = sign * mag;
    }
    for (const auto& [j, s] : spec.quantities) mult += s > 0 ? s : -s;
    spec.value = static_cast<double>(mult) * 0.5 +
                 static_cast<double>(uniform_int(rng, 0, 8)) * 0.25;
    specs.push_back(spec);
  }
  std::vector<Units> up(horizon, 0), down(horizon, 0);
  for (const BidSpec& spec : specs) {
    if (uniform01(rng) < 0.5) continue;
    for (const auto& [j, s] : spec.quantities) (s > 0 ? up[j] : down[j]) += s > 0 ? s : -s;
  }
  std::vector<Units> curve(horizon, 0);
  for (int j = 0; j < horizon; ++j) curve[j] = (up[j] + 1) / 2 - (down[j] + 1) / 2;
  inst = make_instance(curve, specs);
  inst.seed = seed;
  return inst;
}

}  // namespace lfm::testing

#endif  // LFM_TESTS_TEST_INSTANCES_HPP_
