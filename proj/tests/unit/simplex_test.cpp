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


#include "lfm/simplex.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "lfm/common.hpp"

namespace lfm {
namespace {

LpProblem::Row row(std::vector<std::pair<int, double>> coefs, RowSense sense,
                   double rhs) {
  LpProblem::Row r;
  r.coefs = std::move(coefs);
  r.sense = sense;
  r.rhs = rhs;
  return r;
}

TEST(Simplex, TextbookMaximisationAsMinimisation) {
  // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
  LpProblem p;
  p.num_vars = 2;
  p.cost = {-3, -5};
  p.upper = {kInf, kInf};
  p.rows = {row({{0, 1}}, RowSense::kLessEqual, 4),
            row({{1, 2}}, RowSense::kLessEqual, 12),
            row({{0, 3}, {1, 2}}, RowSense::kLessEqual, 18)};
  const LpResult r = solve_lp(p);
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_NEAR(r.objective, -36, 1e-9);
  EXPECT_NEAR(r.x[0], 2, 1e-9);
  EXPECT_NEAR(r.x[1], 6, 1e-9);
}

TEST(Simplex, CoveringWithBoundsAndBoundFlips) {
  // min x0 + 2 x1 + 3 x2, 2 x0 + 2 x1 + 2 x2 >= 5, x in [0, 1]
  // -> x0 = 1, x1 = 1, x2 = 0.5, J = 4.5
  LpProblem p;
  p.num_vars = 3;
  p.cost = {1, 2, 3};
  p.upper = {1, 1, 1};
  p.rows = {row({{0, 2}, {1, 2}, {2, 2}}, RowSense::kGreaterEqual, 5)};
  const LpResult r = solve_lp(p);
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_NEAR(r.objective, 4.5, 1e-9);
  EXPECT_NEAR(r.x[2], 0.5, 1e-9);
  ASSERT_EQ(r.reduced.size(), 3u);
}

TEST(Simplex, EqualityAndNegativeRhs) {
  // min x + y, x - y = -2, x, y >= 0 -> (0, 2)
  LpProblem p;
  p.num_vars = 2;
  p.cost = {1, 1};
  p.upper = {kInf, kInf};
  p.rows = {row({{0, 1}, {1, -1}}, RowSense::kEqual, -2)};
  const LpResult r = solve_lp(p);
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_NEAR(r.objective, 2, 1e-9);
  EXPECT_NEAR(r.x[1], 2, 1e-9);
}

TEST(Simplex, DetectsInfeasibleAndUnbounded) {
  LpProblem p;
  p.num_vars = 1;
  p.cost = {1};
  p.upper = {1};
  p.rows = {row({{0, 1}}, RowSense::kGreaterEqual, 2)};
  EXPECT_EQ(solve_lp(p).status, LpStatus::kInfeasible);

  LpProblem q;
  q.num_vars = 1;
  q.cost = {-1};
  q.upper = {kInf};
  q.rows = {row({{0, 1}}, RowSense::kGreaterEqual, 1)};
  EXPECT_EQ(solve_lp(q).status, LpStatus::kUnbounded);
}

TEST(Simplex, DegenerateProblemTerminates) {
  // Many identical columns and redundant rows: heavy degeneracy.
  LpProblem p;
  p.num_vars = 12;
  p.cost.assign(12, 1.0);
  p.upper.assign(12, 1.0);
  for (int r = 0; r < 8; ++r) {
    std::vector<std::pair<int, double>> coefs;
    for (int c = 0; c < 12; ++c) {
      if ((c + r) % 3 != 0) coefs.emplace_back(c, 1.0);
    }
    p.rows.push_back(row(coefs, RowSense::kGreaterEqual, 4));
  }
  const LpResult r = solve_lp(p);
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_NEAR(r.objective, 6.0, 1e-9);
}

TEST(Simplex, ReducedCostsCertifyOptimality) {
  LpProblem p;
  p.num_vars = 3;
  p.cost = {4, 1, 3};
  p.upper = {1, 1, 1};
  p.rows = {row({{0, 3}, {1, 1}, {2, 2}}, RowSense::kGreaterEqual, 3)};
  const LpResult r = solve_lp(p);
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  for (int c = 0; c < 3; ++c) {
    if (r.x[c] < 1e-9) {
      EXPECT_GE(r.reduced[c], -1e-9);
    }
    if (r.x[c] > 1 - 1e-9) {
      EXPECT_LE(r.reduced[c], 1e-9);
    }
  }
}

}  // namespace
}  // namespace lfm
