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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "lfm/data_ingest.hpp"
#include "test_instances.hpp"

namespace lfm {
namespace {

using testing::make_instance;

TEST(MacroF1, Example) {
  // Class 1: tp 2, fp 1, fn 1 -> 2/3. Class 0: tp 1, fp 1, fn 1 -> 1/2.
  const std::vector<int> pred = {1, 1, 0, 1, 0};
  const std::vector<int> truth = {1, 1, 1, 0, 0};
  EXPECT_DOUBLE_EQ(macro_f1(pred, truth), (2.0 / 3.0 + 0.5) / 2.0);
}

TEST(MacroF1, HandComputedConfusion) {
  // Class 1: F1 = 2/3. Class 0: tp 2, fn 1 -> 4/5.
  EXPECT_DOUBLE_EQ(macro_f1({1, 1, 0, 0}, {1, 0, 0, 0}), 11.0 / 15.0);
}

TEST(MacroF1, EdgeCases) {
  EXPECT_DOUBLE_EQ(macro_f1({1, 0, 1}, {1, 0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(macro_f1({0, 1}, {1, 0}), 0.0);
  // Only one class present anywhere: it is scored alone.
  EXPECT_DOUBLE_EQ(macro_f1({0, 0}, {0, 0}), 1.0);
  EXPECT_THROW(macro_f1({}, {}), std::invalid_argument);
  EXPECT_THROW(macro_f1({1}, {1, 0}), std::invalid_argument);
}

TEST(MacroF1, SymmetricUnderLabelFlip) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> p, t, fp, ft;
    for (int i = 0; i < 12; ++i) {
      p.push_back(uniform01(rng) < 0.4);
      t.push_back(uniform01(rng) < 0.3);
      fp.push_back(1 - p.back());
      ft.push_back(1 - t.back());
    }
    EXPECT_DOUBLE_EQ(macro_f1(p, t), macro_f1(fp, ft));
  }
}

TEST(Nrmsd, Examples) {
  const WdpInstance one = make_instance({10}, {{0, {{0, 12}}, 1.0}});
  EXPECT_DOUBLE_EQ(nrmsd(one, {1}), 0.2);
  const WdpInstance two = make_instance(
      {10, 10}, {{0, {{0, 12}}, 1.0}, {1, {{1, 10}}, 1.0}});
  EXPECT_DOUBLE_EQ(nrmsd(two, {1, 1}), 0.1);
  EXPECT_DOUBLE_EQ(nrmsd(two, {1, 1}, NrmsdMode::kRms), std::sqrt(0.02));
}

TEST(Nrmsd, DirectionSplitAndExactCover) {
  // Ramp-down request met by a ramp-down bid; the ramp-up part of the
  // second bid does not count against interval 0.
  const WdpInstance inst = make_instance(
      {-4, 3}, {{0, {{0, -4}}, 1.0}, {1, {{0, 2}, {1, 3}}, 1.0}});
  EXPECT_DOUBLE_EQ(nrmsd(inst, {1, 1}), 0.0);
  EXPECT_TRUE(std::isnan(nrmsd(make_instance({0, 0}, {{0, {{0, 1}}, 1.0}}), {1})));
  EXPECT_THROW(nrmsd(inst, {1}), std::invalid_argument);
}

TEST(DeltaJ, Examples) {
  EXPECT_NEAR(delta_j(100.0, 104.52), 4.52, 1e-12);
  EXPECT_EQ(delta_j(7.0, 7.0), 0.0);
  EXPECT_EQ(delta_j(0.0, 0.0), 0.0);
  EXPECT_TRUE(std::isnan(delta_j(0.0, 1.0)));
  EXPECT_DOUBLE_EQ(delta_nrmsd(0.1, 0.15), 5.0);
}

TEST(Stats, MeanStdMedianSkipNan) {
  EXPECT_DOUBLE_EQ(mean_of({1.0, kNaN, 3.0}), 2.0);
  EXPECT_DOUBLE_EQ(std_of({1.0, 3.0}), 1.0);
  EXPECT_TRUE(std::isnan(mean_of({})));
  EXPECT_DOUBLE_EQ(median_of({3.0, 1.0, 2.0}), 2.0);
  EXPECT_DOUBLE_EQ(median_of({4.0, 1.0, 2.0, 3.0}), 2.5);
}

TEST(Fits, LinearAndExponential) {
  const LinearFit lf = fit_linear({1, 2, 3, 4}, {3, 5, 7, 9});
  EXPECT_NEAR(lf.slope, 2.0, 1e-12);
  EXPECT_NEAR(lf.intercept, 1.0, 1e-12);
  EXPECT_NEAR(lf.r2, 1.0, 1e-12);
  EXPECT_NEAR(lf.rss, 0.0, 1e-20);
  std::vector<double> x = {50, 100, 200, 400}, y;
  for (double v : x) y.push_back(0.01 * std::exp(0.02 * v));
  const ExponentialFit ef = fit_exponential(x, y);
  EXPECT_NEAR(ef.rate, 0.02, 1e-12);
  EXPECT_NEAR(ef.scale, 0.01, 1e-12);
  EXPECT_GT(gaussian_log_likelihood(ef.rss + 1e-12, 4),
            gaussian_log_likelihood(fit_linear(x, y).rss, 4));
  EXPECT_THROW(fit_linear({1}, {1}), std::invalid_argument);
  EXPECT_THROW(fit_exponential({1, 2}, {1, 0}), std::invalid_argument);
}

TEST(Harness, SplitIsDisjointAndSeeded) {
  const auto [train, test] = split_indices(20, 5, 7);
  EXPECT_EQ(train.size(), 15u);
  EXPECT_EQ(test.size(), 5u);
  std::vector<int> all = train;
  all.insert(all.end(), test.begin(), test.end());
  std::sort(all.begin(), all.end());
  for (int i = 0; i < 20; ++i) EXPECT_EQ(all[i], i);
  EXPECT_EQ(split_indices(20, 5, 7).second, test);
  EXPECT_THROW(split_indices(3, 4, 1), ConfigError);
}

TEST(Harness, CaseId) {
  EXPECT_EQ((CaseSpec{20, 2, 0.5}).id(), "n20_k2_e0.5");
  EXPECT_EQ((CaseSpec{40, 1, 1.0}).id(), "n40_k1_e1");
}

ResourcePool small_pool() {
  SyntheticConfig sc;
  sc.homes = 12;
  sc.days = 3;
  sc.seed = 5;
  return daily_resources(synthetic_traces(sc), 0.25);
}

TEST(Harness, CorpusIsDeterministicAndJobsIndependent) {
  const ResourcePool pool = small_pool();
  const CaseSpec spec{6, 2, 0.5};
  const auto a = generate_corpus(pool, spec, 4, GenConfig{}, 9, 1);
  const auto b = generate_corpus(pool, spec, 4, GenConfig{}, 9, 3);
  ASSERT_EQ(a.size(), 4u);
  for (size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(to_json(a[k]).dump(), to_json(b[k]).dump());
    EXPECT_EQ(a[k].n, 6);
  }
  EXPECT_THROW(generate_corpus(pool, CaseSpec{13, 1, 0.5}, 1, GenConfig{}, 1),
               ConfigError);
}

TEST(Harness, SingleCaseMatrix) {
  const ResourcePool pool = small_pool();
  MatrixConfig mc;
  mc.cases = {CaseSpec{5, 1, 0.5}};
  mc.train_instances = 6;
  mc.test_instances = 3;
  mc.model.hidden = 8;
  mc.train.epochs = 3;
  mc.solver.node_limit = 2000;
  const MatrixResult r = run_matrix(pool, mc);
  ASSERT_EQ(r.runs.size(), 1u);
  EXPECT_EQ(r.runs[0].test_ids.size(), 3u);
  EXPECT_EQ(r.records.size(), 6u);  // gnn and fnn on three test instances
  ASSERT_EQ(r.aggregates.size(), 2u);
  std::vector<double> f1;
  for (const EvalRecord& rec : r.records) {
    EXPECT_TRUE(rec.xor_ok);
    if (rec.model == "gnn") f1.push_back(rec.f1);
    EXPECT_GE(rec.nrmsd_expert, 0.0);
  }
  EXPECT_NEAR(r.aggregates[0].f1_mean, mean_of(f1), 1e-9);
}

TEST(Harness, IdenticalAllocationGivesZeroDeltas) {
  const WdpInstance inst = make_instance({3}, {{0, {{0, 3}}, 1.0}, {1, {{0, 1}}, 5.0}});
  const TriGraph g = build_graph(inst);
  NeuralModel model(ModelConfig{}, 1, g.scale);
  // The expert agrees with whatever the model picks.
  Allocation expert;
  expert.x = xor_repair(model.predict(g), inst);
  expert.objective = objective_of(inst, expert.x);
  expert.status = SolveStatus::kOptimal;
  const auto recs = evaluate_model(model, {&inst}, {&expert}, {&g}, "c", {0},
                                   NrmsdMode::kMean);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].delta_j, 0.0);
  if (std::isfinite(recs[0].nrmsd_model)) {
    EXPECT_EQ(recs[0].delta_nrmsd, 0.0);
  }
}

TEST(Tables, FormatAndParse) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(format_number(kNaN), "nan");
  const Table t = parse_csv_table("a,b\n1,x\n2.5,nan\n");
  EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b"}));
  EXPECT_DOUBLE_EQ(t.number(1, "a"), 2.5);
  EXPECT_TRUE(std::isnan(t.number(1, "b")));
  EXPECT_THROW(t.column("c"), std::invalid_argument);
  EXPECT_THROW(parse_csv_table("a,b\n1\n"), std::invalid_argument);
}

TEST(Tables, AggregatesRoundTrip) {
  CaseAggregate a;
  a.case_id = "n20_k1_e0.5";
  a.model = "gnn";
  a.instances = 25;
  a.f1_mean = 0.7;
  a.delta_j_mean = 3.25;
  std::ostringstream out;
  write_aggregates_csv({a}, out);
  const Table t = parse_csv_table(out.str());
  EXPECT_EQ(t.rows.size(), 1u);
  EXPECT_DOUBLE_EQ(t.number(0, "f1_mean"), 0.7);
  EXPECT_DOUBLE_EQ(t.number(0, "delta_j_mean"), 3.25);
}

Table golden_aggregates() {
  return parse_csv_table(
      "case,model,f1_mean,delta_j_mean,delta_nrmsd_mean\n"
      "n20_k1_e0.5,gnn,0.7,3,5\n"
      "n20_k1_e0.5,fnn,0.6,-2,8\n"
      "n40_k2_e0.5,gnn,0.68,4.5,-1\n"
      "n40_k2_e0.5,fnn,0.55,6,2\n");
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

TEST(Plots, F1MatchesGoldenFile) {
  const std::string svg = plot_f1_by_case(golden_aggregates());
  const auto golden = std::filesystem::path(LFM_TEST_DATA_DIR) / "golden_f1.svg";
  if (std::getenv("LFM_UPDATE_GOLDEN") != nullptr) {
    std::ofstream(golden) << svg;
  }
  EXPECT_EQ(svg, read_file(golden));
  // Plot area spans y 40..320, so F1 0.7 is a 196 px bar starting at 124.
  EXPECT_NE(svg.find("y=\"124.00\" width=\"104.00\" height=\"196.00\""),
            std::string::npos);
}

TEST(Plots, WellFormedAndDeterministic) {
  const Table agg = golden_aggregates();
  const std::string deltas = plot_deltas_by_case(agg);
  EXPECT_EQ(deltas, plot_deltas_by_case(agg));
  EXPECT_EQ(deltas.rfind("<svg", 0), 0u);
  EXPECT_NE(deltas.find("gnn dJ"), std::string::npos);
  const Table timing = parse_csv_table(
      "kappa,instances,solver_median_s,inference_median_s,solver_time_limited\n"
      "50,3,0.01,0.0001,0\n100,3,0.1,0.0002,0\n200,3,2,0.0004,0\n");
  const std::string t = plot_time_vs_kappa(timing);
  EXPECT_NE(t.find("<polyline"), std::string::npos);
  EXPECT_NE(t.find("</svg>"), std::string::npos);
}

}  // namespace
}  // namespace lfm
