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

#include "lfm/exact_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "lfm/simplex.hpp"

namespace lfm {

using nlohmann::json;

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "Optimal";
    case SolveStatus::kInfeasible:
      return "Infeasible";
    case SolveStatus::kTimeLimit:
      return "TimeLimit";
  }
  return "Unknown";
}

SolveStatus solve_status_from_string(const std::string& text) {
  if (text == "Optimal") return SolveStatus::kOptimal;
  if (text == "Infeasible") return SolveStatus::kInfeasible;
  if (text == "TimeLimit") return SolveStatus::kTimeLimit;
  throw std::invalid_argument("unknown solve status '" + text + "'");
}

std::vector<int> Allocation::chosen() const {
  std::vector<int> out;
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0) out.push_back(static_cast<int>(i));
  }
  return out;
}

json to_json(const Allocation& allocation, bool with_timing) {
  json j{{"x", allocation.x},
         {"status", to_string(allocation.status)},
         {"nodes", allocation.node_count}};
  j["J"] = allocation.has_solution() ? json(allocation.objective) : json();
  if (with_timing) j["wall_time_s"] = allocation.wall_time_s;
  return j;
}

Allocation allocation_from_json(const json& j) {
  Allocation a;
  a.x = j.at("x").get<std::vector<int>>();
  a.objective = j.at("J").is_null() ? kInf : j.at("J").get<double>();
  a.status = solve_status_from_string(j.at("status").get<std::string>());
  a.node_count = j.value("nodes", 0L);
  a.wall_time_s = j.value("wall_time_s", 0.0);
  return a;
}

double objective_of(const WdpInstance& instance, const std::vector<int>& x) {
  double total = 0.0;
  for (size_t i = 0; i < x.size() && i < instance.bids.size(); ++i) {
    if (x[i] != 0) total += instance.bids[i].value;
  }
  return total;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Coverage rows of the integer program: one per interval with a request, in
// the direction of the request.
struct CoverRow {
  Interval interval;
  int direction;
  Units demand;
};

struct CoverModel {
  std::vector<CoverRow> rows;
  // Per bid, (row, units supplied in the row's direction).
  std::vector<std::vector<std::pair<int, Units>>> supply;
  std::vector<std::vector<int>> groups;  // bid indices by prosumer
  std::vector<double> values;

  explicit CoverModel(const WdpInstance& instance) {
    const FlexibilityCurve& curve = instance.curve;
    std::vector<int> row_of(curve.size(), -1);
    for (Interval j = 0; j < curve.size(); ++j) {
      if (curve[j] == 0) continue;
      row_of[j] = static_cast<int>(rows.size());
      rows.push_back({j, curve[j] > 0 ? 1 : -1, curve[j] > 0 ? curve[j] : -curve[j]});
    }
    supply.resize(instance.bids.size());
    values.resize(instance.bids.size());
    for (size_t i = 0; i < instance.bids.size(); ++i) {
      const Bid& bid = instance.bids[i];
      values[i] = bid.value;
      for (const auto& [j, s] : bid.quantities) {
        const int r = row_of[j];
        if (r < 0) continue;
        if ((s > 0) == (rows[r].direction > 0)) {
          supply[i].emplace_back(r, s > 0 ? s : -s);
        }
      }
    }
    groups = instance.bids_by_prosumer();
    granularity = value_granularity(values);
  }

  static double value_granularity(const std::vector<double>& values) {
    for (long long scale = 1; scale <= 1000000; scale *= 10) {
      long long g = 0;
      bool integral = true;
      for (double v : values) {
        const double scaled = v * static_cast<double>(scale);
        const double rounded = std::round(scaled);
        if (std::abs(scaled - rounded) > 1e-7 * std::max(1.0, std::abs(scaled))) {
          integral = false;
          break;
        }
        g = std::gcd(g, static_cast<long long>(rounded));
      }
      if (integral) {
        return g > 0 ? static_cast<double>(g) / static_cast<double>(scale) : 0.0;
      }
    }
    return 0.0;
  }

  int kappa() const { return static_cast<int>(values.size()); }

  // Objective step: every J is an integer multiple of it; 0 when the values
  // share no decimal granularity.
  double granularity = 0.0;

  // Smallest attainable objective that is >= bound.
  double lift(double bound) const {
    if (granularity <= 0.0 || !std::isfinite(bound)) return bound;
    return std::ceil(bound / granularity - 1e-6) * granularity;
  }

  // Necessary condition: taking each prosumer's best bid per row still has
  // to reach the demand.
  bool may_be_feasible() const {
    std::vector<Units> best(rows.size(), 0);
    for (const auto& group : groups) {
      std::vector<Units> local(rows.size(), 0);
      for (int i : group) {
        for (const auto& [r, u] : supply[i]) local[r] = std::max(local[r], u);
      }
      for (size_t r = 0; r < rows.size(); ++r) best[r] += local[r];
    }
    for (size_t r = 0; r < rows.size(); ++r) {
      if (best[r] < rows[r].demand) return false;
    }
    return true;
  }

  bool covers(const std::vector<int>& x) const {
    std::vector<Units> remaining(rows.size());
    for (size_t r = 0; r < rows.size(); ++r) remaining[r] = rows[r].demand;
    for (int i = 0; i < kappa(); ++i) {
      if (x[i] == 0) continue;
      for (const auto& [r, u] : supply[i]) remaining[r] -= u;
    }
    return std::all_of(remaining.begin(), remaining.end(),
                       [](Units v) { return v <= 0; });
  }

  double cost(const std::vector<int>& x) const {
    double total = 0.0;
    for (int i = 0; i < kappa(); ++i) {
      if (x[i] != 0) total += values[i];
    }
    return total;
  }
};

enum : std::int8_t { kFree = -1, kFixedZero = 0, kFixedOne = 1 };

LpRelaxation solve_node_lp(const CoverModel& model,
                           const std::vector<std::int8_t>& fix) {
  LpRelaxation out;
  const int kappa = model.kappa();
  out.x.assign(kappa, 0.0);
  out.reduced_cost.assign(kappa, 0.0);

  std::vector<Units> remaining(model.rows.size());
  for (size_t r = 0; r < model.rows.size(); ++r) {
    remaining[r] = model.rows[r].demand;
  }
  double constant = 0.0;
  std::vector<int> column_of(kappa, -1);
  std::vector<int> free_bids;
  for (int i = 0; i < kappa; ++i) {
    if (fix[i] == kFixedOne) {
      out.x[i] = 1.0;
      constant += model.values[i];
      for (const auto& [r, u] : model.supply[i]) remaining[r] -= u;
    } else if (fix[i] == kFree) {
      column_of[i] = static_cast<int>(free_bids.size());
      free_bids.push_back(i);
    }
  }

  LpProblem lp;
  lp.num_vars = static_cast<int>(free_bids.size());
  lp.cost.reserve(free_bids.size());
  for (int i : free_bids) lp.cost.push_back(model.values[i]);
  lp.upper.assign(free_bids.size(), 1.0);

  std::vector<int> lp_row(model.rows.size(), -1);
  for (size_t r = 0; r < model.rows.size(); ++r) {
    if (remaining[r] <= 0) continue;
    lp_row[r] = static_cast<int>(lp.rows.size());
    LpProblem::Row row;
    row.sense = RowSense::kGreaterEqual;
    row.rhs = static_cast<double>(remaining[r]);
    lp.rows.push_back(std::move(row));
  }
  std::vector<double> reach(lp.rows.size(), 0.0);
  for (int i : free_bids) {
    for (const auto& [r, u] : model.supply[i]) {
      if (lp_row[r] < 0) continue;
      lp.rows[lp_row[r]].coefs.emplace_back(column_of[i],
                                            static_cast<double>(u));
      reach[lp_row[r]] += static_cast<double>(u);
    }
  }
  for (size_t r = 0; r < lp.rows.size(); ++r) {
    if (reach[r] < lp.rows[r].rhs) return out;  // infeasible
  }
  for (const auto& group : model.groups) {
    int free_count = 0;
    bool decided = false;
    for (int i : group) {
      free_count += fix[i] == kFree;
      decided |= fix[i] == kFixedOne;
    }
    if (decided || free_count < 2) continue;
    LpProblem::Row row;
    row.sense = RowSense::kLessEqual;
    row.rhs = 1.0;
    for (int i : group) {
      if (fix[i] == kFree) row.coefs.emplace_back(column_of[i], 1.0);
    }
    lp.rows.push_back(std::move(row));
  }

  const LpResult result = solve_lp(lp);
  if (result.status != LpStatus::kOptimal) return out;
  out.feasible = true;
  out.bound = constant + result.objective;
  for (size_t c = 0; c < free_bids.size(); ++c) {
    out.x[free_bids[c]] = result.x[c];
    out.reduced_cost[free_bids[c]] = result.reduced[c];
  }
  return out;
}

constexpr double kIntegralityTol = 1e-6;

bool is_integral(const std::vector<double>& x) {
  return std::all_of(x.begin(), x.end(), [](double v) {
    return v < kIntegralityTol || v > 1.0 - kIntegralityTol;
  });
}

// LP-guided rounding: keep each prosumer's largest fractional bid, then drop
// expensive bids while coverage survives.
bool round_lp_solution(const CoverModel& model, const std::vector<double>& lp_x,
                       const std::vector<std::int8_t>& fix,
                       std::vector<int>& out) {
  const int kappa = model.kappa();
  out.assign(kappa, 0);
  for (const auto& group : model.groups) {
    int pick = -1;
    for (int i : group) {
      if (fix[i] == kFixedOne) {
        pick = i;
        break;
      }
      if (fix[i] == kFree && lp_x[i] > kIntegralityTol &&
          (pick < 0 || lp_x[i] > lp_x[pick])) {
        pick = i;
      }
    }
    if (pick >= 0) out[pick] = 1;
  }
  if (!model.covers(out)) return false;
  std::vector<int> order;
  for (int i = 0; i < kappa; ++i) {
    if (out[i] != 0 && fix[i] != kFixedOne) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return model.values[a] > model.values[b];
  });
  for (int i : order) {
    out[i] = 0;
    if (!model.covers(out)) out[i] = 1;
  }
  return true;
}

struct SearchNode {
  double bound;
  int depth;
  long id;
  std::vector<std::int8_t> fix;
};

struct NodeOrder {
  bool operator()(const SearchNode& a, const SearchNode& b) const {
    // priority_queue pops the "largest"; best bound first, then deepest,
    // then oldest.
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

}  // namespace

Allocation brute_force(const WdpInstance& instance) {
  const int kappa = instance.kappa();
  if (kappa > kBruteForceMaxBids) {
    throw std::invalid_argument("brute force refuses more than " +
                                std::to_string(kBruteForceMaxBids) + " bids");
  }
  const auto start = Clock::now();
  const CoverModel model(instance);
  const int num_rows = static_cast<int>(model.rows.size());

  std::vector<Units> remaining(num_rows);
  for (int r = 0; r < num_rows; ++r) remaining[r] = model.rows[r].demand;
  int unmet = num_rows;
  std::vector<char> used(static_cast<size_t>(instance.n), 0);
  std::vector<int> x(kappa, 0);
  std::vector<int> best_x;
  double best = kInf;
  long leaves = 0;

  auto dfs = [&](auto&& self, int i, double cost) -> void {
    if (i == kappa) {
      ++leaves;
      if (unmet == 0 && cost < best - kValueTol) {
        best = cost;
        best_x = x;
      }
      return;
    }
    self(self, i + 1, cost);
    const int p = instance.bids[i].prosumer_id;
    if (used[p] != 0) return;
    used[p] = 1;
    x[i] = 1;
    for (const auto& [r, u] : model.supply[i]) {
      const bool was_unmet = remaining[r] > 0;
      remaining[r] -= u;
      if (was_unmet && remaining[r] <= 0) --unmet;
    }
    self(self, i + 1, cost + model.values[i]);
    for (const auto& [r, u] : model.supply[i]) {
      const bool was_unmet = remaining[r] > 0;
      remaining[r] += u;
      if (!was_unmet && remaining[r] > 0) ++unmet;
    }
    x[i] = 0;
    used[p] = 0;
  };
  dfs(dfs, 0, 0.0);

  Allocation a;
  a.node_count = leaves;
  if (best_x.empty()) {
    a.x.assign(kappa, 0);
    a.objective = kInf;
    a.status = SolveStatus::kInfeasible;
  } else {
    a.x = best_x;
    a.objective = model.cost(best_x);
    a.status = SolveStatus::kOptimal;
  }
  a.wall_time_s = seconds_since(start);
  return a;
}

LpRelaxation lp_relaxation(const WdpInstance& instance) {
  const CoverModel model(instance);
  return solve_node_lp(model,
                       std::vector<std::int8_t>(instance.bids.size(), kFree));
}

Allocation solve_bnb(const WdpInstance& instance, const BnbLimits& limits,
                     const BnbObserver& observer) {
  const auto start = Clock::now();
  const CoverModel model(instance);
  const int kappa = model.kappa();

  Allocation result;
  result.x.assign(kappa, 0);
  result.objective = kInf;
  auto finish = [&](SolveStatus status) {
    result.status = status;
    result.wall_time_s = seconds_since(start);
    return result;
  };

  if (model.rows.empty()) {
    result.objective = 0.0;
    return finish(SolveStatus::kOptimal);
  }
  if (!model.may_be_feasible()) return finish(SolveStatus::kInfeasible);

  std::vector<int> incumbent;
  double incumbent_value = kInf;
  auto offer = [&](const std::vector<int>& x) {
    const double value = model.cost(x);
    if (value < incumbent_value - kValueTol) {
      incumbent_value = value;
      incumbent = x;
    }
  };
  auto prunable = [&](double bound) {
    return bound >= incumbent_value - kValueTol;
  };

  std::priority_queue<SearchNode, std::vector<SearchNode>, NodeOrder> open;
  long next_id = 0;
  open.push({-kInf, 0, next_id++, std::vector<std::int8_t>(kappa, kFree)});
  bool limit_hit = false;
  std::vector<int> rounded;

  while (!open.empty()) {
    if (limits.time_limit_s > 0.0 && seconds_since(start) > limits.time_limit_s) {
      limit_hit = true;
      break;
    }
    if (limits.node_limit >= 0 && result.node_count >= limits.node_limit) {
      limit_hit = true;
      break;
    }
    if (limits.stop_at_first_feasible && !incumbent.empty()) {
      limit_hit = true;
      break;
    }
    SearchNode node = open.top();
    open.pop();
    if (prunable(node.bound)) continue;

    ++result.node_count;
    LpRelaxation lp = solve_node_lp(model, node.fix);
    const double raw_bound = lp.bound;
    if (lp.feasible) lp.bound = model.lift(lp.bound);
    if (observer) {
      double lower = lp.feasible ? lp.bound : kInf;
      if (!open.empty()) lower = std::min(lower, open.top().bound);
      observer(std::min(lower, incumbent_value), incumbent_value);
    }
    if (!lp.feasible || prunable(lp.bound)) continue;

    if (is_integral(lp.x)) {
      std::vector<int> x(kappa);
      for (int i = 0; i < kappa; ++i) x[i] = lp.x[i] > 0.5 ? 1 : 0;
      if (model.covers(x)) {
        offer(x);
        continue;
      }
    }
    if (round_lp_solution(model, lp.x, node.fix, rounded)) offer(rounded);
    if (prunable(lp.bound)) continue;

    // Reduced-cost fixing: flipping a nonbasic bid costs at least |d|.
    if (!incumbent.empty()) {
      const double raw = raw_bound;
      for (int i = 0; i < kappa; ++i) {
        if (node.fix[i] != kFree) continue;
        const double d = lp.reduced_cost[i];
        if (lp.x[i] < kIntegralityTol && d > 0.0 && prunable(model.lift(raw + d))) {
          node.fix[i] = kFixedZero;
        } else if (lp.x[i] > 1.0 - kIntegralityTol && d < 0.0 &&
                   prunable(model.lift(raw - d))) {
          node.fix[i] = kFixedOne;
          for (int sibling : model.groups[instance.bids[i].prosumer_id]) {
            if (sibling != i && node.fix[sibling] == kFree) {
              node.fix[sibling] = kFixedZero;
            }
          }
        }
      }
    }

    int branch = -1;
    double best_gap = 2.0;
    for (int i = 0; i < kappa; ++i) {
      if (node.fix[i] != kFree) continue;
      const double v = lp.x[i];
      if (v < kIntegralityTol || v > 1.0 - kIntegralityTol) continue;
      const double gap = std::abs(v - 0.5);
      if (gap < best_gap) {
        best_gap = gap;
        branch = i;
      }
    }
    if (branch < 0) continue;  // numerically integral but rejected above

    SearchNode up{lp.bound, node.depth + 1, next_id++, node.fix};
    up.fix[branch] = kFixedOne;
    for (int sibling : model.groups[instance.bids[branch].prosumer_id]) {
      if (sibling != branch && up.fix[sibling] == kFree) {
        up.fix[sibling] = kFixedZero;
      }
    }
    SearchNode down{lp.bound, node.depth + 1, next_id++, std::move(node.fix)};
    down.fix[branch] = kFixedZero;
    open.push(std::move(up));
    open.push(std::move(down));
  }

  if (!incumbent.empty()) {
    result.x = incumbent;
    result.objective = incumbent_value;
  }
  if (limit_hit) return finish(SolveStatus::kTimeLimit);
  return finish(incumbent.empty() ? SolveStatus::kInfeasible
                                  : SolveStatus::kOptimal);
}

std::string FeasibilityReport::describe() const {
  std::ostringstream out;
  if (size_mismatch) out << "allocation size differs from bid count; ";
  for (int i : non_binary) out << "bid " << i << " not binary; ";
  for (ProsumerId p : xor_violations) {
    out << "prosumer " << p << " wins more than one bid; ";
  }
  for (const auto& v : coverage_violations) {
    out << "interval " << v.interval + 1 << (v.direction > 0 ? " up" : " down")
        << " short by " << v.shortfall << "; ";
  }
  if (objective_mismatch) out << "objective does not match chosen bids; ";
  return out.str();
}

FeasibilityReport verify(const WdpInstance& instance,
                         const Allocation& allocation) {
  FeasibilityReport report;
  const auto& x = allocation.x;
  if (x.size() != instance.bids.size()) {
    report.size_mismatch = true;
    return report;
  }
  const int horizon = instance.horizon();
  std::vector<Units> up(horizon, 0);
  std::vector<Units> down(horizon, 0);
  std::vector<int> wins(static_cast<size_t>(instance.n), 0);
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0 && x[i] != 1) {
      report.non_binary.push_back(static_cast<int>(i));
      continue;
    }
    if (x[i] == 0) continue;
    const Bid& bid = instance.bids[i];
    ++wins[bid.prosumer_id];
    for (const auto& [j, s] : bid.quantities) {
      if (s > 0) up[j] += s;
      if (s < 0) down[j] += -s;
    }
  }
  for (int p = 0; p < instance.n; ++p) {
    if (wins[p] > 1) report.xor_violations.push_back(p);
  }
  for (Interval j = 0; j < horizon; ++j) {
    const Units u = instance.curve[j];
    if (u > 0 && up[j] < u) {
      report.coverage_violations.push_back({j, 1, u - up[j]});
    } else if (u < 0 && down[j] < -u) {
      report.coverage_violations.push_back({j, -1, -u - down[j]});
    }
  }
  if (allocation.has_solution()) {
    double total = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 1) total += instance.bids[i].value;
    }
    const double tol = 1e-6 * std::max(1.0, std::abs(total));
    report.objective_mismatch = std::abs(total - allocation.objective) > tol;
  }
  return report;
}

}  // namespace lfm
