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

#ifndef LFM_DATA_INGEST_HPP_
#define LFM_DATA_INGEST_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lfm/core_model.hpp"

namespace lfm {

// Raw rooftop-PV readings of one home. Timestamps are minutes since the Unix
// epoch (UTC).
struct PvTrace {
  std::string home_id;
  std::vector<std::int64_t> timestamps;
  std::vector<double> production;
  double capacity = 0.0;

  int size() const { return static_cast<int>(production.size()); }
  // Uniform step in minutes, or 0 when the trace is not uniform (or has
  // fewer than two readings).
  std::int64_t step_minutes() const;
};

struct ColumnMap {
  std::string id = "id";
  std::string timestamp = "timestamp";
  std::string value = "kW";
  // Optional nominal capacity column; when empty the peak reading is used.
  std::string capacity;
};

struct LoadOptions {
  // Unparsable rows tolerated before the load is aborted.
  int max_bad_rows = 0;
};

struct LoadReport {
  int rows_read = 0;
  int missing_dropped = 0;
  std::vector<int> bad_rows;  // 1-based line numbers, header is line 1
};

struct LoadResult {
  std::vector<PvTrace> traces;  // sorted by home id
  LoadReport report;
};

// Accepts integer minutes or "YYYY-MM-DD HH:MM[:SS]" / "YYYY-MM-DDTHH:MM".
std::int64_t parse_timestamp(const std::string& text);

LoadResult load_csv(const std::filesystem::path& path,
                    const ColumnMap& columns = {},
                    const LoadOptions& options = {});

struct ResampleResult {
  PvTrace trace;
  bool already_hourly = false;
};

// 30-minute -> 60-minute by averaging power over each pair of readings.
ResampleResult resample_to_hourly(const PvTrace& trace);

// Splits an hourly trace into consecutive 24-reading days; a trailing
// partial day is dropped.
std::vector<PvTrace> split_days(const PvTrace& hourly, int hours_per_day = 24);

// Converts an hourly trace into integer flexibility units:
// round-half-up(production / unit_scale).
ProsumerResources to_resources(const PvTrace& trace, ProsumerId id,
                               bool has_ess, double eta_eff,
                               Units ess_power_limit, double unit_scale);

struct SyntheticConfig {
  int homes = 10;
  int days = 1;
  double peak_hour = 12.5;    // centre of the midday bell
  double width_hours = 2.5;   // standard deviation of the bell
  double capacity_kw = 5.0;   // mean nominal peak
  double capacity_spread = 0.4;  // capacity drawn in (1 +/- spread) * mean
  double peak_jitter_hours = 1.0;
  double noise_sigma = 0.08;  // multiplicative noise on each reading
  double cloud_probability = 0.15;  // chance a reading is dimmed by a cloud
  int step_minutes = 30;
  std::uint64_t seed = 1;
};

// Bell-shaped PV traces with per-home capacity, peak shift and noise. Each
// home owns a generator seeded from (seed, home index).
std::vector<PvTrace> synthetic_traces(const SyntheticConfig& config);

// Resamples each trace to hourly, splits it into days and converts every
// day to resources. Result is indexed [day][home]; homes keep trace order
// and get prosumer ids 0..n-1. Only days present in every trace are kept.
std::vector<std::vector<ProsumerResources>> daily_resources(
    const std::vector<PvTrace>& traces, double unit_scale);

}  // namespace lfm

#endif  // LFM_DATA_INGEST_HPP_
