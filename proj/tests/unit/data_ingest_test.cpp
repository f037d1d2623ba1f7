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


#include "lfm/data_ingest.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include <unistd.h>

#include "lfm/common.hpp"

namespace lfm {
namespace {

namespace fs = std::filesystem;

class CsvFile {
 public:
  explicit CsvFile(const std::string& body) {
    path_ = fs::temp_directory_path() /
            ("lfm_ingest_" + std::to_string(counter_++) + "_" +
             std::to_string(::getpid()) + ".csv");
    std::ofstream(path_) << body;
  }
  ~CsvFile() { fs::remove(path_); }
  const fs::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

std::vector<std::string> half_hour_rows(const std::string& home, int count,
                                        double scale) {
  std::vector<std::string> rows;
  for (int i = 0; i < count; ++i) {
    const int minute = i * 30;
    char ts[32];
    std::snprintf(ts, sizeof ts, "2013-07-01 %02d:%02d", minute / 60,
                  minute % 60);
    rows.push_back(home + "," + ts + "," + std::to_string(scale * (i % 7)));
  }
  return rows;
}

std::string join(const std::vector<std::string>& rows) {
  std::string out = "id,timestamp,kW\n";
  for (const auto& r : rows) out += r + "\n";
  return out;
}

TEST(LoadCsv, TwoHomesOfHalfHourRows) {
  auto rows = half_hour_rows("A", 48, 0.5);
  auto more = half_hour_rows("B", 48, 0.25);
  rows.insert(rows.end(), more.begin(), more.end());
  const CsvFile f(join(rows));
  const LoadResult r = load_csv(f.path());
  ASSERT_EQ(r.traces.size(), 2u);
  EXPECT_EQ(r.traces[0].home_id, "A");
  EXPECT_EQ(r.traces[0].size(), 48);
  EXPECT_EQ(r.traces[1].size(), 48);
  EXPECT_EQ(r.traces[0].step_minutes(), 30);
  EXPECT_EQ(r.report.rows_read, 96);
}

TEST(LoadCsv, ShuffledRowsGiveIdenticalTraces) {
  auto rows = half_hour_rows("A", 48, 0.5);
  const CsvFile sorted(join(rows));
  std::mt19937 g(3);
  std::shuffle(rows.begin(), rows.end(), g);
  const CsvFile shuffled(join(rows));
  const LoadResult a = load_csv(sorted.path());
  const LoadResult b = load_csv(shuffled.path());
  ASSERT_EQ(a.traces.size(), 1u);
  EXPECT_EQ(a.traces[0].timestamps, b.traces[0].timestamps);
  EXPECT_EQ(a.traces[0].production, b.traces[0].production);
}

TEST(LoadCsv, MissingValueColumnIsAConfigError) {
  const CsvFile f(join(half_hour_rows("A", 4, 1.0)));
  ColumnMap cols;
  cols.value = "power";
  EXPECT_THROW(load_csv(f.path(), cols), ConfigError);
}

TEST(LoadCsv, MissingReadingsAreDroppedAndCounted) {
  const CsvFile f(
      "id,timestamp,kW\nA,0,1.0\nA,30,NA\nA,60,\nA,90,2.0\n");
  const LoadResult r = load_csv(f.path());
  EXPECT_EQ(r.report.missing_dropped, 2);
  ASSERT_EQ(r.traces.size(), 1u);
  EXPECT_EQ(r.traces[0].size(), 2);
}

TEST(LoadCsv, BadRowsBeyondThresholdListLineNumbers) {
  const CsvFile f("id,timestamp,kW\nA,0,1.0\nA,30,abc\nA,60,1\nA,yesterday,1\n");
  try {
    load_csv(f.path());
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find(" 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find(" 5"), std::string::npos) << msg;
  }
  LoadOptions lenient;
  lenient.max_bad_rows = 2;
  const LoadResult r = load_csv(f.path(), {}, lenient);
  EXPECT_EQ(r.report.bad_rows, (std::vector<int>{3, 5}));
  EXPECT_EQ(r.traces[0].size(), 2);
}

TEST(LoadCsv, CapacityColumnAndPeakFallback) {
  const CsvFile f("id,timestamp,kW,cap\nA,0,1.0,4.0\nA,30,2.5,4.0\n");
  ColumnMap cols;
  cols.capacity = "cap";
  EXPECT_DOUBLE_EQ(load_csv(f.path(), cols).traces[0].capacity, 4.0);
  EXPECT_DOUBLE_EQ(load_csv(f.path()).traces[0].capacity, 2.5);
}

TEST(ParseTimestamp, FormatsAgree) {
  EXPECT_EQ(parse_timestamp("1970-01-02 00:30"), 1440 + 30);
  EXPECT_EQ(parse_timestamp("1970-01-02T00:30"), 1470);
  EXPECT_EQ(parse_timestamp("1970-01-02 00:30:00"), 1470);
  EXPECT_EQ(parse_timestamp("1470"), 1470);
  EXPECT_THROW(parse_timestamp("noon"), std::invalid_argument);
}

PvTrace trace_of(std::vector<double> values, int step) {
  PvTrace t;
  t.home_id = "X";
  for (size_t i = 0; i < values.size(); ++i) {
    t.timestamps.push_back(static_cast<std::int64_t>(i) * step);
  }
  t.production = std::move(values);
  t.capacity = 10.0;
  return t;
}

TEST(Resample, MeanOfPairs) {
  const ResampleResult r = resample_to_hourly(trace_of({4, 6, 10, 10}, 30));
  EXPECT_EQ(r.trace.production, (std::vector<double>{5, 10}));
  EXPECT_EQ(r.trace.step_minutes(), 60);
  EXPECT_FALSE(r.already_hourly);
}

TEST(Resample, Zeros) {
  EXPECT_EQ(resample_to_hourly(trace_of({0, 0}, 30)).trace.production,
            (std::vector<double>{0}));
}

TEST(Resample, AlreadyHourlyIsReturnedWithFlag) {
  const PvTrace hourly = trace_of({1, 2, 3}, 60);
  const ResampleResult r = resample_to_hourly(hourly);
  EXPECT_TRUE(r.already_hourly);
  EXPECT_EQ(r.trace.production, hourly.production);
}

TEST(Resample, RejectsOddOrIrregularInput) {
  EXPECT_THROW(resample_to_hourly(trace_of({1, 2, 3}, 30)), std::invalid_argument);
  PvTrace irregular = trace_of({1, 2, 3, 4}, 30);
  irregular.timestamps[3] = 200;
  EXPECT_THROW(resample_to_hourly(irregular), std::invalid_argument);
}

TEST(Resample, ConservesMeanPower) {
  SyntheticConfig cfg;
  cfg.homes = 5;
  cfg.days = 2;
  for (const PvTrace& t : synthetic_traces(cfg)) {
    const PvTrace h = resample_to_hourly(t).trace;
    const double m1 = std::accumulate(t.production.begin(), t.production.end(), 0.0) / t.size();
    const double m2 = std::accumulate(h.production.begin(), h.production.end(), 0.0) / h.size();
    EXPECT_NEAR(m1, m2, 1e-9);
  }
}

TEST(ToResources, RoundsHalfUp) {
  const ProsumerResources r =
      to_resources(trace_of({5.0, 2.4, 2.5}, 60), 0, false, 0.9, 0, 1.0);
  EXPECT_EQ(r.pv_profile, (std::vector<Units>{5, 2, 3}));
  EXPECT_EQ(r.pv_capacity, (std::vector<Units>{10, 10, 10}));
}

TEST(ToResources, ZeroTraceAndBadScale) {
  const ProsumerResources r =
      to_resources(trace_of({0, 0, 0}, 60), 1, false, 0.9, 0, 0.5);
  EXPECT_EQ(r.pv_profile, (std::vector<Units>{0, 0, 0}));
  EXPECT_THROW(to_resources(trace_of({1}, 60), 0, false, 0.9, 0, 0.0),
               std::invalid_argument);
}

TEST(SplitDays, DropsPartialDay) {
  std::vector<double> v(50, 1.0);
  const auto days = split_days(trace_of(v, 60));
  ASSERT_EQ(days.size(), 2u);
  EXPECT_EQ(days[1].size(), 24);
  EXPECT_EQ(days[1].timestamps.front(), 24 * 60);
}

TEST(Synthetic, DeterministicBellShapedTraces) {
  SyntheticConfig cfg;
  cfg.homes = 3;
  cfg.seed = 7;
  const auto a = synthetic_traces(cfg);
  const auto b = synthetic_traces(cfg);
  ASSERT_EQ(a.size(), 3u);
  for (size_t h = 0; h < a.size(); ++h) {
    EXPECT_EQ(a[h].production, b[h].production);
    EXPECT_EQ(a[h].size(), 48);
    // Night readings are zero, midday carries the peak.
    EXPECT_EQ(a[h].production[0], 0.0);
    const auto peak = std::max_element(a[h].production.begin(), a[h].production.end());
    const int hour = static_cast<int>(peak - a[h].production.begin()) / 2;
    EXPECT_GE(hour, 8);
    EXPECT_LE(hour, 17);
  }
  cfg.seed = 8;
  EXPECT_NE(synthetic_traces(cfg)[0].production, a[0].production);
}

}  // namespace
}  // namespace lfm
