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

#ifndef LFM_EXACT_SOLVER_HPP_
#define LFM_EXACT_SOLVER_HPP_

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lfm/common.hpp"
#include "lfm/core_model.hpp"

namespace lfm {

enum class SolveStatus { kOptimal, kInfeasible, kTimeLimit };

std::string to_string(SolveStatus status);
SolveStatus solve_status_from_string(const std::string& text);

// Winning-bid decision over an instance's bids, in instance order.
struct Allocation {
  std::vector<int> x;
  double objective = 0.0;  // J; +inf when no feasible point is known
  SolveStatus status = SolveStatus::kInfeasible;
  long node_count = 0;
  double wall_time_s = 0.0;

  std::vector<int> chosen() const;
  bool has_solution() const { return std::isfinite(objective); }
};

// Timing lives in its own file in run directories, so it is opt-in here.
nlohmann::json to_json(const Allocation& allocation, bool with_timing = true);
Allocation allocation_from_json(const nlohmann::json& j);

// Sum of the chosen bids' values.
double objective_of(const WdpInstance& instance, const std::vector<int>& x);

// Exhaustive enumeration over {0,1}^kappa. Assignments that give one
// prosumer two winning bids are skipped as infeasible without being costed.
// Among optimal points the lexicographically smallest x is returned.
Allocation brute_force(const WdpInstance& instance);
inline constexpr int kBruteForceMaxBids = 25;

struct LpRelaxation {
  bool feasible = false;
  std::vector<double> x;
  double bound = kInf;
  // Per bid; zero for bids fixed by the caller.
  std::vector<double> reduced_cost;
};

// Relaxes x to [0, 1]; bound is a lower bound on every integral J.
LpRelaxation lp_relaxation(const WdpInstance& instance);

struct BnbLimits {
  double time_limit_s = 60.0;
  long node_limit = -1;  // unlimited when negative
  // Stop at the first feasible incumbent (used for generator feasibility
  // checks); status is then kTimeLimit unless optimality was proven.
  bool stop_at_first_feasible = false;
};

// Observer called once per processed node with the global lower bound (the
// best bound among open nodes) and the incumbent objective.
using BnbObserver = std::function<void(double lower, double incumbent)>;

// Best-first branch and bound with LP bounds from the dense simplex,
// most-fractional branching and XOR propagation on the up branch.
Allocation solve_bnb(const WdpInstance& instance, const BnbLimits& limits = {},
                     const BnbObserver& observer = {});

struct CoverageViolation {
  Interval interval;
  int direction;  // +1 ramp-up, -1 ramp-down
  Units shortfall;
};

struct FeasibilityReport {
  bool size_mismatch = false;
  std::vector<int> non_binary;           // bid indices
  std::vector<ProsumerId> xor_violations;
  std::vector<CoverageViolation> coverage_violations;
  bool objective_mismatch = false;

  bool xor_ok() const { return xor_violations.empty() && !size_mismatch; }
  bool ok() const {
    return !size_mismatch && non_binary.empty() && xor_violations.empty() &&
           coverage_violations.empty() && !objective_mismatch;
  }
  std::string describe() const;
};

// Independent constraint check of an allocation against its instance.
FeasibilityReport verify(const WdpInstance& instance,
                         const Allocation& allocation);

}  // namespace lfm

#endif  // LFM_EXACT_SOLVER_HPP_
