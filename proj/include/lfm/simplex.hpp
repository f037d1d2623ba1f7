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

#ifndef LFM_SIMPLEX_HPP_
#define LFM_SIMPLEX_HPP_

#include <utility>
#include <vector>

namespace lfm {

enum class RowSense { kGreaterEqual, kLessEqual, kEqual };

// min cost^T x  s.t.  rows,  0 <= x <= upper  (upper may be +inf).
struct LpProblem {
  struct Row {
    std::vector<std::pair<int, double>> coefs;
    RowSense sense = RowSense::kGreaterEqual;
    double rhs = 0.0;
  };

  int num_vars = 0;
  std::vector<double> cost;
  std::vector<double> upper;
  std::vector<Row> rows;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> x;
  // Reduced costs of the structural variables at the optimal basis.
  std::vector<double> reduced;
  int iterations = 0;
};

struct LpOptions {
  double tolerance = 1e-9;
  int max_iterations = 100000;
  // Consecutive degenerate pivots after which pricing switches from
  // Dantzig's rule to Bland's rule until progress resumes.
  int degenerate_switch = 30;
};

// Two-phase primal simplex on a dense tableau with implicit upper bounds.
// Pricing is Dantzig's largest reduced cost, falling back to Bland's
// smallest-index rule on stalling so the method cannot cycle.
LpResult solve_lp(const LpProblem& problem, const LpOptions& options = {});

}  // namespace lfm

#endif  // LFM_SIMPLEX_HPP_
