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


#include "lfm/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "lfm/common.hpp"
#include "lfm/parallel.hpp"

namespace lfm {

double macro_f1(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.empty() || pred.size() != truth.size()) {
    throw std::invalid_argument("macro_f1 needs equal non-empty vectors");
  }
  double total = 0.0;
  int classes = 0;
  for (int c = 0; c <= 1; ++c) {
    long tp = 0, fp = 0, fn = 0;
    for (size_t i = 0; i < pred.size(); ++i) {
      const bool p = (pred[i] != 0) == (c == 1);
      const bool t = (truth[i] != 0) == (c == 1);
      tp += p && t;
      fp += p && !t;
      fn += !p && t;
    }
    if (tp + fp + fn == 0) continue;  // class absent on both sides
    total += 2.0 * static_cast<double>(tp) /
             static_cast<double>(2 * tp + fp + fn);
    ++classes;
  }
  return classes == 0 ? 0.0 : total / classes;
}

double nrmsd(const WdpInstance& instance, const std::vector<int>& x,
             NrmsdMode mode) {
  if (static_cast<int>(x.size()) != instance.kappa()) {
    throw std::invalid_argument("nrmsd: allocation size differs from bid count");
  }
  const int horizon = instance.horizon();
  std::vector<Units> up(static_cast<size_t>(horizon), 0);
  std::vector<Units> down(static_cast<size_t>(horizon), 0);
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) continue;
    for (const auto& [j, s] : instance.bids[i].quantities) {
      if (s > 0) up[j] += s;
      if (s < 0) down[j] -= s;
    }
  }
  double total = 0.0;
  int count = 0;
  for (Interval j = 0; j < horizon; ++j) {
    const Units u = instance.curve[j];
    if (u == 0) continue;
    const double need = static_cast<double>(u > 0 ? u : -u);
    const double got = static_cast<double>(u > 0 ? up[j] : down[j]);
    const double rel = (got - need) / need;
    total += mode == NrmsdMode::kRms ? rel * rel : rel;
    ++count;
  }
  if (count == 0) return kNaN;
  const double mean = total / count;
  return mode == NrmsdMode::kRms ? std::sqrt(mean) : mean;
}

double delta_j(double expert_j, double model_j) {
  if (expert_j == 0.0) return model_j == 0.0 ? 0.0 : kNaN;
  return 100.0 * (model_j - expert_j) / expert_j;
}

double delta_nrmsd(double expert_nrmsd, double model_nrmsd) {
  return 100.0 * (model_nrmsd - expert_nrmsd);
}

double mean_of(const std::vector<double>& xs) {
  double total = 0.0;
  int n = 0;
  for (double v : xs) {
    if (std::isnan(v)) continue;
    total += v;
    ++n;
  }
  return n == 0 ? kNaN : total / n;
}

double std_of(const std::vector<double>& xs) {
  const double m = mean_of(xs);
  double total = 0.0;
  int n = 0;
  for (double v : xs) {
    if (std::isnan(v)) continue;
    total += (v - m) * (v - m);
    ++n;
  }
  return n == 0 ? kNaN : std::sqrt(total / n);
}

double median_of(std::vector<double> xs) {
  if (xs.empty()) return kNaN;
  std::sort(xs.begin(), xs.end());
  const size_t mid = xs.size() / 2;
  return xs.size() % 2 == 1 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
}

LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_linear needs at least two points");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  for (size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    f.rss += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - f.rss / syy : 1.0;
  return f;
}

ExponentialFit fit_exponential(const std::vector<double>& x,
                               const std::vector<double>& y) {
  std::vector<double> logs;
  for (double v : y) {
    if (!(v > 0.0)) throw std::invalid_argument("exponential fit needs y > 0");
    logs.push_back(std::log(v));
  }
  const LinearFit lf = fit_linear(x, logs);
  ExponentialFit f;
  f.scale = std::exp(lf.intercept);
  f.rate = lf.slope;
  for (size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.scale * std::exp(f.rate * x[i]);
    f.rss += r * r;
  }
  return f;
}

double gaussian_log_likelihood(double rss, int n) {
  const double var = std::max(rss / n, 1e-300);
  return -0.5 * n * (std::log(2.0 * M_PI * var) + 1.0);
}

std::string CaseSpec::id() const {
  return "n" + std::to_string(homes) + "_k" + std::to_string(bids_per_prosumer) +
         "_e" + format_number(ess_share);
}

std::vector<WdpInstance> generate_corpus(const ResourcePool& pool,
                                         const CaseSpec& spec, int count,
                                         const GenConfig& base,
                                         std::uint64_t seed, int jobs) {
  if (pool.empty()) throw ConfigError("resource pool is empty");
  for (const auto& day : pool) {
    if (static_cast<int>(day.size()) < spec.homes) {
      throw ConfigError("case " + spec.id() + " needs " +
                        std::to_string(spec.homes) + " homes but the pool has " +
                        std::to_string(day.size()));
    }
  }
  const std::uint64_t case_salt = fnv1a64(spec.id());
  std::vector<WdpInstance> out(static_cast<size_t>(count));
  parallel_for(count, jobs, [&](int k) {
    Rng rng(derive_seed(seed, case_salt, static_cast<std::uint64_t>(k)));
    const auto& day = pool[static_cast<size_t>(
        uniform_int(rng, 0, static_cast<long long>(pool.size()) - 1))];
    std::vector<int> homes(day.size());
    std::iota(homes.begin(), homes.end(), 0);
    for (int h = 0; h < spec.homes; ++h) {
      const auto pick = uniform_int(rng, h, static_cast<long long>(homes.size()) - 1);
      std::swap(homes[static_cast<size_t>(h)], homes[static_cast<size_t>(pick)]);
    }
    std::sort(homes.begin(), homes.begin() + spec.homes);
    std::vector<ProsumerResources> chosen;
    for (int h = 0; h < spec.homes; ++h) chosen.push_back(day[homes[h]]);
    GenConfig gen = base;
    gen.bids_per_prosumer = spec.bids_per_prosumer;
    gen.ess_share = spec.ess_share;
    gen.seed = rng() >> 1;
    out[static_cast<size_t>(k)] = generate_instance(chosen, gen);
  });
  return out;
}

std::vector<Allocation> solve_corpus(const std::vector<WdpInstance>& instances,
                                     const BnbLimits& limits, int jobs) {
  std::vector<Allocation> out(instances.size());
  parallel_for(static_cast<int>(instances.size()), jobs, [&](int i) {
    out[static_cast<size_t>(i)] = solve_bnb(instances[static_cast<size_t>(i)], limits);
  });
  return out;
}

std::pair<std::vector<int>, std::vector<int>> split_indices(int count,
                                                            int test_count,
                                                            std::uint64_t seed) {
  if (test_count < 0 || test_count > count) {
    throw ConfigError("test split larger than the corpus");
  }
  std::vector<int> order(static_cast<size_t>(count));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, 0x5b117ULL));
  for (int k = 0; k < test_count; ++k) {
    const auto pick = uniform_int(rng, k, static_cast<long long>(count) - 1);
    std::swap(order[static_cast<size_t>(k)], order[static_cast<size_t>(pick)]);
  }
  std::vector<int> test(order.begin(), order.begin() + test_count);
  std::vector<int> train(order.begin() + test_count, order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {train, test};
}

std::vector<EvalRecord> evaluate_model(
    const NeuralModel& model, const std::vector<const WdpInstance*>& instances,
    const std::vector<const Allocation*>& expert,
    const std::vector<const TriGraph*>& graphs, const std::string& case_id,
    const std::vector<int>& instance_ids, NrmsdMode mode) {
  std::vector<EvalRecord> out;
  for (size_t k = 0; k < instances.size(); ++k) {
    const WdpInstance& inst = *instances[k];
    const Allocation& ex = *expert[k];
    const auto start = std::chrono::steady_clock::now();
    const std::vector<double> p = model.predict(*graphs[k]);
    Allocation mine;
    mine.x = xor_repair(p, inst);
    const double inference = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - start).count();
    mine.objective = objective_of(inst, mine.x);
    const FeasibilityReport report = verify(inst, mine);

    EvalRecord r;
    r.case_id = case_id;
    r.model = to_string(model.config().kind);
    r.instance = instance_ids[k];
    r.kappa = inst.kappa();
    r.expert_status = to_string(ex.status);
    r.expert_j = ex.objective;
    r.model_j = mine.objective;
    r.f1 = macro_f1(mine.x, ex.x);
    r.nrmsd_expert = nrmsd(inst, ex.x, mode);
    r.nrmsd_model = nrmsd(inst, mine.x, mode);
    r.delta_j = delta_j(r.expert_j, r.model_j);
    r.delta_nrmsd = delta_nrmsd(r.nrmsd_expert, r.nrmsd_model);
    r.xor_ok = report.xor_ok();
    r.covered = report.coverage_violations.empty();
    r.solver_time_s = ex.wall_time_s;
    r.inference_time_s = inference;
    out.push_back(r);
  }
  return out;
}

std::vector<CaseAggregate> aggregate(const std::vector<EvalRecord>& records) {
  std::vector<std::pair<std::string, std::string>> keys;
  std::map<std::pair<std::string, std::string>, std::vector<const EvalRecord*>> groups;
  for (const EvalRecord& r : records) {
    const auto key = std::make_pair(r.case_id, r.model);
    if (groups.find(key) == groups.end()) keys.push_back(key);
    groups[key].push_back(&r);
  }
  std::vector<CaseAggregate> out;
  for (const auto& key : keys) {
    const auto& rows = groups[key];
    std::vector<double> f1, dj, adj, dn, adn, ne, nm, ok, cov, opt, st, it;
    for (const EvalRecord* r : rows) {
      f1.push_back(r->f1);
      dj.push_back(r->delta_j);
      adj.push_back(std::abs(r->delta_j));
      dn.push_back(r->delta_nrmsd);
      adn.push_back(std::abs(r->delta_nrmsd));
      ne.push_back(r->nrmsd_expert);
      nm.push_back(r->nrmsd_model);
      ok.push_back(r->xor_ok ? 1.0 : 0.0);
      cov.push_back(r->covered ? 1.0 : 0.0);
      opt.push_back(r->expert_status == "Optimal" ? 1.0 : 0.0);
      st.push_back(r->solver_time_s);
      it.push_back(r->inference_time_s);
    }
    CaseAggregate a;
    a.case_id = key.first;
    a.model = key.second;
    a.instances = static_cast<int>(rows.size());
    a.f1_mean = mean_of(f1);
    a.f1_std = std_of(f1);
    a.delta_j_mean = mean_of(dj);
    a.delta_j_std = std_of(dj);
    a.abs_delta_j_mean = mean_of(adj);
    a.delta_nrmsd_mean = mean_of(dn);
    a.delta_nrmsd_std = std_of(dn);
    a.abs_delta_nrmsd_mean = mean_of(adn);
    a.nrmsd_expert_mean = mean_of(ne);
    a.nrmsd_model_mean = mean_of(nm);
    a.xor_ok_rate = mean_of(ok);
    a.covered_rate = mean_of(cov);
    a.expert_optimal_rate = mean_of(opt);
    a.solver_time_mean_s = mean_of(st);
    a.inference_time_mean_s = mean_of(it);
    out.push_back(a);
  }
  return out;
}

namespace {

std::vector<TriGraph> labeled_graphs(const std::vector<WdpInstance>& instances,
                                     const std::vector<Allocation>& expert,
                                     const FeatureScale& scale) {
  std::vector<TriGraph> graphs;
  graphs.reserve(instances.size());
  for (size_t i = 0; i < instances.size(); ++i) {
    graphs.push_back(build_graph(instances[i], scale, &expert[i].x));
  }
  return graphs;
}

}  // namespace

MatrixResult run_matrix(const ResourcePool& pool, const MatrixConfig& config) {
  MatrixResult result;
  const int total = config.train_instances + config.test_instances;
  for (const CaseSpec& spec : config.cases) {
    const std::string id = spec.id();
    spdlog::info("case {}: generating {} instances", id, total);
    CaseRun run;
    run.spec = spec;
    run.instances = generate_corpus(pool, spec, total, config.gen, config.seed,
                                    config.jobs);
    spdlog::info("case {}: solving", id);
    run.expert = solve_corpus(run.instances, config.solver, config.jobs);
    std::vector<int> usable;
    for (int i = 0; i < total; ++i) {
      const Allocation& a = run.expert[static_cast<size_t>(i)];
      if (!a.has_solution()) {
        spdlog::warn("case {} instance {}: expert found no allocation ({}), skipped",
                     id, i, to_string(a.status));
        continue;
      }
      if (a.status == SolveStatus::kTimeLimit) ++run.time_limited;
      usable.push_back(i);
    }
    if (run.time_limited > 0) {
      spdlog::info("case {}: {} of {} expert runs hit the solver budget; their "
                   "incumbents are used as labels",
                   id, run.time_limited, total);
    }
    const int test_count = std::min<int>(config.test_instances,
                                         static_cast<int>(usable.size()) / 2);
    auto [train_pos, test_pos] = split_indices(
        static_cast<int>(usable.size()), test_count,
        derive_seed(config.seed, fnv1a64(id)));
    for (int p : train_pos) run.train_ids.push_back(usable[static_cast<size_t>(p)]);
    for (int p : test_pos) run.test_ids.push_back(usable[static_cast<size_t>(p)]);

    std::vector<const WdpInstance*> train_instances;
    for (int i : run.train_ids) train_instances.push_back(&run.instances[static_cast<size_t>(i)]);
    const FeatureScale scale = corpus_scale(train_instances);
    const std::vector<TriGraph> graphs = labeled_graphs(run.instances, run.expert, scale);

    std::vector<TrainSample> samples;
    for (int i : run.train_ids) {
      samples.push_back({&graphs[static_cast<size_t>(i)],
                         run.expert[static_cast<size_t>(i)].objective});
    }
    std::vector<const WdpInstance*> test_instances;
    std::vector<const Allocation*> test_expert;
    std::vector<const TriGraph*> test_graphs;
    for (int i : run.test_ids) {
      test_instances.push_back(&run.instances[static_cast<size_t>(i)]);
      test_expert.push_back(&run.expert[static_cast<size_t>(i)]);
      test_graphs.push_back(&graphs[static_cast<size_t>(i)]);
    }
    const int horizon = run.instances.front().horizon();

    ModelConfig gnn_config = config.model;
    gnn_config.kind = ModelKind::kGnn;
    gnn_config.seed = derive_seed(config.model.seed, fnv1a64(id), 1);
    run.gnn = NeuralModel(gnn_config, horizon, scale);
    TrainConfig train_config = config.train;
    train_config.seed = derive_seed(config.train.seed, fnv1a64(id), 1);
    spdlog::info("case {}: training gnn on {} instances", id, samples.size());
    run.gnn_report = train(run.gnn, samples, train_config);
    auto records = evaluate_model(run.gnn, test_instances, test_expert, test_graphs,
                                  id, run.test_ids, config.nrmsd_mode);
    run.gnn_report.test_f1 = mean_of([&] {
      std::vector<double> f;
      for (const auto& r : records) f.push_back(r.f1);
      return f;
    }());
    result.records.insert(result.records.end(), records.begin(), records.end());

    if (config.train_fnn) {
      ModelConfig fnn_config = config.model;
      fnn_config.kind = ModelKind::kFnn;
      fnn_config.seed = derive_seed(config.model.seed, fnv1a64(id), 2);
      run.fnn = NeuralModel(fnn_config, horizon, scale);
      train_config.seed = derive_seed(config.train.seed, fnv1a64(id), 2);
      spdlog::info("case {}: training fnn", id);
      run.fnn_report = train(run.fnn, samples, train_config);
      auto fnn_records = evaluate_model(run.fnn, test_instances, test_expert,
                                        test_graphs, id, run.test_ids,
                                        config.nrmsd_mode);
      run.fnn_report.test_f1 = mean_of([&] {
        std::vector<double> f;
        for (const auto& r : fnn_records) f.push_back(r.f1);
        return f;
      }());
      result.records.insert(result.records.end(), fnn_records.begin(),
                            fnn_records.end());
    }
    result.runs.push_back(std::move(run));
  }
  result.aggregates = aggregate(result.records);
  return result;
}

std::vector<TimingPoint> measure_timing(const ResourcePool& pool,
                                        const NeuralModel& model,
                                        const TimingConfig& config) {
  std::vector<TimingPoint> out;
  for (int kappa : config.kappas) {
    if (kappa % config.bids_per_prosumer != 0) {
      throw ConfigError("kappa " + std::to_string(kappa) +
                        " is not a multiple of bids_per_prosumer");
    }
    CaseSpec spec{kappa / config.bids_per_prosumer, config.bids_per_prosumer,
                  config.ess_share};
    const auto instances =
        generate_corpus(pool, spec, config.instances, config.gen, config.seed);
    TimingPoint point;
    point.kappa = kappa;
    point.instances = config.instances;
    std::vector<double> solver, inference;
    for (const WdpInstance& inst : instances) {
      const Allocation a = solve_bnb(inst, config.solver);
      if (a.status == SolveStatus::kTimeLimit) ++point.solver_time_limited;
      solver.push_back(a.wall_time_s);
      std::vector<double> reps;
      for (int r = 0; r < config.repeats; ++r) {
        const auto start = std::chrono::steady_clock::now();
        const TriGraph g = build_graph(inst, model.scale());
        const auto x = xor_repair(model.predict(g), inst);
        reps.push_back(std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start).count());
        if (x.size() != static_cast<size_t>(inst.kappa())) {
          throw std::logic_error("inference returned a wrong-sized allocation");
        }
      }
      inference.push_back(median_of(reps));
    }
    point.solver_median_s = median_of(solver);
    point.inference_median_s = median_of(inference);
    spdlog::info("timing kappa {}: solver {:.4f}s ({} limited), inference {:.6f}s",
                 kappa, point.solver_median_s, point.solver_time_limited,
                 point.inference_median_s);
    out.push_back(point);
  }
  return out;
}

int Table::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::invalid_argument("table has no column '" + name + "'");
  return static_cast<int>(it - header.begin());
}

double Table::number(size_t row, const std::string& name) const {
  const std::string& cell = rows.at(row).at(static_cast<size_t>(column(name)));
  if (cell == "nan" || cell.empty()) return kNaN;
  return std::stod(cell);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

Table parse_csv_table(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      t.header = split_line(line);
      first = false;
      continue;
    }
    auto row = split_line(line);
    if (row.size() != t.header.size()) {
      throw std::invalid_argument("CSV row has " + std::to_string(row.size()) +
                                  " fields, header has " +
                                  std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(row));
  }
  if (first) throw std::invalid_argument("CSV has no header");
  return t;
}

Table read_csv_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv_table(buf.str());
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_results_csv(const std::vector<EvalRecord>& records, std::ostream& out) {
  out << "case,model,instance,kappa,expert_status,expert_j,model_j,f1,"
         "nrmsd_expert,nrmsd_model,delta_j,delta_nrmsd,xor_ok,covered\n";
  for (const EvalRecord& r : records) {
    out << r.case_id << ',' << r.model << ',' << r.instance << ',' << r.kappa
        << ',' << r.expert_status << ',' << format_number(r.expert_j) << ','
        << format_number(r.model_j) << ',' << format_number(r.f1) << ','
        << format_number(r.nrmsd_expert) << ',' << format_number(r.nrmsd_model)
        << ',' << format_number(r.delta_j) << ',' << format_number(r.delta_nrmsd)
        << ',' << (r.xor_ok ? 1 : 0) << ',' << (r.covered ? 1 : 0) << '\n';
  }
}

void write_record_timing_csv(const std::vector<EvalRecord>& records,
                             std::ostream& out) {
  out << "case,model,instance,kappa,solver_time_s,inference_time_s\n";
  for (const EvalRecord& r : records) {
    out << r.case_id << ',' << r.model << ',' << r.instance << ',' << r.kappa
        << ',' << format_number(r.solver_time_s) << ','
        << format_number(r.inference_time_s) << '\n';
  }
}

void write_aggregates_csv(const std::vector<CaseAggregate>& aggregates,
                          std::ostream& out) {
  out << "case,model,instances,f1_mean,f1_std,delta_j_mean,delta_j_std,"
         "abs_delta_j_mean,delta_nrmsd_mean,delta_nrmsd_std,abs_delta_nrmsd_mean,"
         "nrmsd_expert_mean,nrmsd_model_mean,xor_ok_rate,covered_rate,"
         "expert_optimal_rate\n";
  for (const CaseAggregate& a : aggregates) {
    out << a.case_id << ',' << a.model << ',' << a.instances << ','
        << format_number(a.f1_mean) << ',' << format_number(a.f1_std) << ','
        << format_number(a.delta_j_mean) << ',' << format_number(a.delta_j_std)
        << ',' << format_number(a.abs_delta_j_mean) << ','
        << format_number(a.delta_nrmsd_mean) << ','
        << format_number(a.delta_nrmsd_std) << ','
        << format_number(a.abs_delta_nrmsd_mean) << ','
        << format_number(a.nrmsd_expert_mean) << ','
        << format_number(a.nrmsd_model_mean) << ','
        << format_number(a.xor_ok_rate) << ',' << format_number(a.covered_rate)
        << ',' << format_number(a.expert_optimal_rate) << '\n';
  }
}

void write_timing_csv(const std::vector<TimingPoint>& points, std::ostream& out) {
  out << "kappa,instances,solver_median_s,inference_median_s,solver_time_limited\n";
  for (const TimingPoint& p : points) {
    out << p.kappa << ',' << p.instances << ',' << format_number(p.solver_median_s)
        << ',' << format_number(p.inference_median_s) << ','
        << p.solver_time_limited << '\n';
  }
}

void write_train_csv(const TrainReport& report, std::ostream& out) {
  out << "epoch,bce,value_term,total\n";
  for (const EpochStats& e : report.epochs) {
    out << e.epoch << ',' << format_number(e.bce) << ','
        << format_number(e.value_term) << ','
        << format_number(e.bce + e.value_term) << '\n';
  }
}

}  // namespace lfm
