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

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lfm {
namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

class Tableau {
 public:
  Tableau(int rows, int cols)
      : m_(rows), n_(cols), a_(static_cast<size_t>(rows) * cols, 0.0) {}

  double& at(int r, int c) { return a_[static_cast<size_t>(r) * n_ + c]; }
  double at(int r, int c) const { return a_[static_cast<size_t>(r) * n_ + c]; }
  double* row(int r) { return a_.data() + static_cast<size_t>(r) * n_; }

  int m_;
  int n_;

 private:
  std::vector<double> a_;
};

enum class Bound : char { kBasic, kLower, kUpper };

struct SimplexState {
  Tableau tab;
  std::vector<double> upper;
  std::vector<double> beta;    // values of basic variables, per row
  std::vector<int> basis;      // basic variable per row
  std::vector<Bound> status;   // per column
  std::vector<double> reduced;

  SimplexState(int m, int n) : tab(m, n) {}

  void price(const std::vector<double>& cost) {
    const int m = tab.m_;
    const int n = tab.n_;
    reduced = cost;
    for (int r = 0; r < m; ++r) {
      const double cb = cost[basis[r]];
      if (cb == 0.0) continue;
      const double* row = tab.row(r);
      for (int c = 0; c < n; ++c) reduced[c] -= cb * row[c];
    }
    for (int r = 0; r < m; ++r) reduced[basis[r]] = 0.0;
  }

  void pivot(int pr, int pc) {
    const int m = tab.m_;
    const int n = tab.n_;
    double* prow = tab.row(pr);
    const double inv = 1.0 / prow[pc];
    for (int c = 0; c < n; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    for (int r = 0; r < m; ++r) {
      if (r == pr) continue;
      double* row = tab.row(r);
      const double f = row[pc];
      if (f == 0.0) continue;
      for (int c = 0; c < n; ++c) row[c] -= f * prow[c];
      row[pc] = 0.0;
    }
    const double f = reduced[pc];
    if (f != 0.0) {
      for (int c = 0; c < n; ++c) reduced[c] -= f * prow[c];
      reduced[pc] = 0.0;
    }
  }

  double value_of(int col) const {
    switch (status[col]) {
      case Bound::kLower:
        return 0.0;
      case Bound::kUpper:
        return upper[col];
      case Bound::kBasic:
        break;
    }
    for (size_t r = 0; r < basis.size(); ++r) {
      if (basis[r] == col) return beta[r];
    }
    return 0.0;
  }

  // Returns false when the iteration limit is hit; sets unbounded on an
  // unbounded ray.
  bool optimize(const std::vector<double>& cost, const LpOptions& opt,
                int& iterations, bool& unbounded) {
    price(cost);
    const int m = tab.m_;
    const int n = tab.n_;
    const double tol = opt.tolerance;
    int degenerate = 0;
    unbounded = false;
    while (true) {
      if (iterations >= opt.max_iterations) return false;
      const bool bland = degenerate >= opt.degenerate_switch;
      int enter = -1;
      double best = 0.0;
      for (int c = 0; c < n; ++c) {
        double score = 0.0;
        if (status[c] == Bound::kLower && reduced[c] < -tol) {
          if (upper[c] <= 0.0) continue;  // fixed at zero
          score = -reduced[c];
        } else if (status[c] == Bound::kUpper && reduced[c] > tol) {
          score = reduced[c];
        } else {
          continue;
        }
        if (bland) {
          enter = c;
          break;
        }
        if (score > best) {
          best = score;
          enter = c;
        }
      }
      if (enter < 0) return true;
      ++iterations;

      const double dir = status[enter] == Bound::kLower ? 1.0 : -1.0;
      double step = upper[enter];
      int leave_row = -1;
      bool leave_to_upper = false;
      for (int r = 0; r < m; ++r) {
        const double alpha = dir * tab.at(r, enter);
        double limit;
        bool to_upper;
        if (alpha > tol) {
          limit = beta[r] / alpha;
          to_upper = false;
        } else if (alpha < -tol && upper[basis[r]] < kInfinity) {
          limit = (upper[basis[r]] - beta[r]) / -alpha;
          to_upper = true;
        } else {
          continue;
        }
        if (limit < 0.0) limit = 0.0;
        if (limit < step - tol ||
            (limit <= step + tol && leave_row >= 0 &&
             basis[r] < basis[leave_row])) {
          step = limit;
          leave_row = r;
          leave_to_upper = to_upper;
        }
      }
      if (step == kInfinity) {
        unbounded = true;
        return true;
      }
      degenerate = step <= tol ? degenerate + 1 : 0;

      for (int r = 0; r < m; ++r) beta[r] -= dir * step * tab.at(r, enter);
      if (leave_row < 0) {
        // Entering variable runs into its own bound.
        status[enter] =
            status[enter] == Bound::kLower ? Bound::kUpper : Bound::kLower;
        continue;
      }
      const double entering_value =
          status[enter] == Bound::kLower ? step : upper[enter] - step;
      const int leaving = basis[leave_row];
      status[leaving] = leave_to_upper ? Bound::kUpper : Bound::kLower;
      pivot(leave_row, enter);
      basis[leave_row] = enter;
      status[enter] = Bound::kBasic;
      beta[leave_row] = entering_value;
    }
  }
};

}  // namespace

LpResult solve_lp(const LpProblem& problem, const LpOptions& options) {
  const int nv = problem.num_vars;
  const int m = static_cast<int>(problem.rows.size());
  if (static_cast<int>(problem.cost.size()) != nv ||
      static_cast<int>(problem.upper.size()) != nv) {
    throw std::invalid_argument("LP cost/upper size mismatch");
  }
  LpResult result;
  result.x.assign(nv, 0.0);

  // Column layout: structural | one slack per inequality row | artificials.
  std::vector<int> slack_col(m, -1);
  int cols = nv;
  for (int r = 0; r < m; ++r) {
    if (problem.rows[r].sense != RowSense::kEqual) slack_col[r] = cols++;
  }
  // Row sign flips so every rhs is non-negative; decide artificials.
  std::vector<double> sign(m, 1.0);
  std::vector<int> art_col(m, -1);
  for (int r = 0; r < m; ++r) {
    const auto& row = problem.rows[r];
    if (row.rhs < 0.0) sign[r] = -1.0;
    double slack_coef = 0.0;
    if (row.sense == RowSense::kGreaterEqual) slack_coef = -1.0;
    if (row.sense == RowSense::kLessEqual) slack_coef = 1.0;
    if (slack_coef * sign[r] <= 0.0) art_col[r] = cols++;
  }

  SimplexState s(m, cols);
  s.upper.assign(cols, kInfinity);
  for (int c = 0; c < nv; ++c) s.upper[c] = problem.upper[c];
  s.status.assign(cols, Bound::kLower);
  s.basis.assign(m, -1);
  s.beta.assign(m, 0.0);
  for (int r = 0; r < m; ++r) {
    const auto& row = problem.rows[r];
    for (const auto& [c, v] : row.coefs) s.tab.at(r, c) += sign[r] * v;
    if (slack_col[r] >= 0) {
      const double coef = row.sense == RowSense::kGreaterEqual ? -1.0 : 1.0;
      s.tab.at(r, slack_col[r]) = sign[r] * coef;
    }
    s.beta[r] = sign[r] * row.rhs;
    const int basic = art_col[r] >= 0 ? art_col[r] : slack_col[r];
    s.tab.at(r, basic) = 1.0;
    s.basis[r] = basic;
    s.status[basic] = Bound::kBasic;
  }

  bool unbounded = false;
  bool has_artificials = false;
  for (int r = 0; r < m; ++r) has_artificials |= art_col[r] >= 0;
  if (has_artificials) {
    std::vector<double> phase1(cols, 0.0);
    for (int r = 0; r < m; ++r) {
      if (art_col[r] >= 0) phase1[art_col[r]] = 1.0;
    }
    if (!s.optimize(phase1, options, result.iterations, unbounded)) {
      result.status = LpStatus::kIterationLimit;
      return result;
    }
    double infeasibility = 0.0;
    for (int r = 0; r < m; ++r) {
      if (art_col[r] >= 0) infeasibility += s.value_of(art_col[r]);
    }
    if (infeasibility > 1e-7) {
      result.status = LpStatus::kInfeasible;
      return result;
    }
    for (int r = 0; r < m; ++r) {
      if (art_col[r] >= 0) s.upper[art_col[r]] = 0.0;
    }
  }

  std::vector<double> cost(cols, 0.0);
  for (int c = 0; c < nv; ++c) cost[c] = problem.cost[c];
  if (!s.optimize(cost, options, result.iterations, unbounded)) {
    result.status = LpStatus::kIterationLimit;
    return result;
  }
  if (unbounded) {
    result.status = LpStatus::kUnbounded;
    return result;
  }
  for (int c = 0; c < nv; ++c) result.x[c] = s.value_of(c);
  for (int r = 0; r < m; ++r) {
    if (s.basis[r] < nv) result.x[s.basis[r]] = s.beta[r];
  }
  result.reduced.assign(s.reduced.begin(), s.reduced.begin() + nv);
  result.objective = 0.0;
  for (int c = 0; c < nv; ++c) {
    result.x[c] = std::min(std::max(result.x[c], 0.0), problem.upper[c]);
    result.objective += problem.cost[c] * result.x[c];
  }
  result.status = LpStatus::kOptimal;
  return result;
}

}  // namespace lfm
