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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "lfm/common.hpp"

namespace lfm {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(field);
  for (auto& f : fields) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return fields;
}

bool is_missing(const std::string& field) {
  return field.empty() || field == "NA" || field == "NaN" || field == "nan" ||
         field == "null";
}

bool parse_double(const std::string& text, double& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

int column_index(const std::vector<std::string>& header,
                 const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw ConfigError("column '" + name + "' not found in CSV header");
  }
  return static_cast<int>(it - header.begin());
}

}  // namespace

std::int64_t PvTrace::step_minutes() const {
  if (timestamps.size() < 2) return 0;
  const std::int64_t step = timestamps[1] - timestamps[0];
  for (size_t i = 2; i < timestamps.size(); ++i) {
    if (timestamps[i] - timestamps[i - 1] != step) return 0;
  }
  return step > 0 ? step : 0;
}

std::int64_t parse_timestamp(const std::string& text) {
  std::int64_t minutes = 0;
  {
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), last, minutes);
    if (ec == std::errc() && ptr == last) return minutes;
  }
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char sep = 0;
  const int got = std::sscanf(text.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d,
                              &sep, &h, &mi, &s);
  if (got < 6 || (sep != ' ' && sep != 'T') || mo < 1 || mo > 12 || d < 1 ||
      d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59) {
    throw std::invalid_argument("unparsable timestamp '" + text + "'");
  }
  return days_from_civil(y, static_cast<unsigned>(mo),
                         static_cast<unsigned>(d)) * 1440 + h * 60 + mi;
}

LoadResult load_csv(const std::filesystem::path& path,
                    const ColumnMap& columns, const LoadOptions& options) {
  if (columns.id.empty() || columns.timestamp.empty() ||
      columns.value.empty()) {
    throw ConfigError("column map needs id, timestamp and value columns");
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error(path.string() + ": empty file");
  }
  const auto header = split_csv_line(line);
  const int id_col = column_index(header, columns.id);
  const int ts_col = column_index(header, columns.timestamp);
  const int value_col = column_index(header, columns.value);
  const int cap_col =
      columns.capacity.empty() ? -1 : column_index(header, columns.capacity);

  struct Reading {
    std::int64_t ts;
    double value;
  };
  std::map<std::string, std::vector<Reading>> by_home;
  std::map<std::string, double> capacity;
  LoadResult result;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++result.report.rows_read;
    const auto fields = split_csv_line(line);
    const int needed = std::max({id_col, ts_col, value_col, cap_col}) + 1;
    if (static_cast<int>(fields.size()) < needed) {
      result.report.bad_rows.push_back(line_no);
      continue;
    }
    const std::string& id = fields[id_col];
    if (is_missing(fields[value_col]) || is_missing(id) ||
        is_missing(fields[ts_col])) {
      ++result.report.missing_dropped;
      continue;
    }
    double value = 0.0;
    std::int64_t ts = 0;
    bool ok = parse_double(fields[value_col], value) && value >= 0.0;
    if (ok) {
      try {
        ts = parse_timestamp(fields[ts_col]);
      } catch (const std::invalid_argument&) {
        ok = false;
      }
    }
    double cap = 0.0;
    if (ok && cap_col >= 0 && !is_missing(fields[cap_col])) {
      ok = parse_double(fields[cap_col], cap) && cap >= 0.0;
    }
    if (!ok) {
      result.report.bad_rows.push_back(line_no);
      continue;
    }
    by_home[id].push_back({ts, value});
    if (cap_col >= 0) capacity[id] = std::max(capacity[id], cap);
  }

  if (static_cast<int>(result.report.bad_rows.size()) > options.max_bad_rows) {
    std::ostringstream msg;
    msg << path.string() << ": " << result.report.bad_rows.size()
        << " unparsable rows (limit " << options.max_bad_rows << "), lines";
    for (size_t i = 0; i < result.report.bad_rows.size() && i < 20; ++i) {
      msg << ' ' << result.report.bad_rows[i];
    }
    throw std::runtime_error(msg.str());
  }

  for (auto& [id, readings] : by_home) {
    std::stable_sort(readings.begin(), readings.end(),
                     [](const Reading& a, const Reading& b) {
                       return a.ts < b.ts;
                     });
    PvTrace trace;
    trace.home_id = id;
    for (const Reading& r : readings) {
      if (!trace.timestamps.empty() && trace.timestamps.back() == r.ts) {
        throw std::runtime_error("home " + id + ": duplicate timestamp");
      }
      trace.timestamps.push_back(r.ts);
      trace.production.push_back(r.value);
    }
    const double peak =
        *std::max_element(trace.production.begin(), trace.production.end());
    trace.capacity = cap_col >= 0 ? std::max(capacity[id], peak) : peak;
    result.traces.push_back(std::move(trace));
  }
  return result;
}

ResampleResult resample_to_hourly(const PvTrace& trace) {
  const std::int64_t step = trace.step_minutes();
  if (step == 60) return {trace, true};
  if (step != 30) {
    throw std::invalid_argument("resampling needs a uniform 30-minute trace");
  }
  if (trace.size() % 2 != 0) {
    throw std::invalid_argument("resampling needs an even number of readings");
  }
  ResampleResult out;
  out.trace.home_id = trace.home_id;
  out.trace.capacity = trace.capacity;
  for (int i = 0; i < trace.size(); i += 2) {
    out.trace.timestamps.push_back(trace.timestamps[i]);
    out.trace.production.push_back(
        0.5 * (trace.production[i] + trace.production[i + 1]));
  }
  return out;
}

std::vector<PvTrace> split_days(const PvTrace& hourly, int hours_per_day) {
  if (hourly.size() >= 2 && hourly.step_minutes() != 60) {
    throw std::invalid_argument("split_days needs an hourly trace");
  }
  std::vector<PvTrace> days;
  for (int start = 0; start + hours_per_day <= hourly.size();
       start += hours_per_day) {
    PvTrace day;
    day.home_id = hourly.home_id;
    day.capacity = hourly.capacity;
    day.timestamps.assign(hourly.timestamps.begin() + start,
                          hourly.timestamps.begin() + start + hours_per_day);
    day.production.assign(hourly.production.begin() + start,
                          hourly.production.begin() + start + hours_per_day);
    days.push_back(std::move(day));
  }
  return days;
}

ProsumerResources to_resources(const PvTrace& trace, ProsumerId id,
                               bool has_ess, double eta_eff,
                               Units ess_power_limit, double unit_scale) {
  if (!(unit_scale > 0.0)) {
    throw std::invalid_argument("unit_scale must be positive");
  }
  ProsumerResources r;
  r.prosumer_id = id;
  r.home_id = trace.home_id;
  r.has_ess = has_ess;
  r.ess_power_limit = has_ess ? ess_power_limit : 0;
  r.eta_eff = eta_eff;
  const Units cap = round_half_up(trace.capacity / unit_scale);
  for (double p : trace.production) {
    const Units units = round_half_up(p / unit_scale);
    r.pv_profile.push_back(std::min(units, cap));
    r.pv_capacity.push_back(cap);
  }
  r.validate();
  return r;
}

std::vector<PvTrace> synthetic_traces(const SyntheticConfig& config) {
  if (config.homes < 1 || config.days < 1) {
    throw ConfigError("synthetic traces need homes >= 1 and days >= 1");
  }
  if (config.step_minutes != 30 && config.step_minutes != 60) {
    throw ConfigError("synthetic step must be 30 or 60 minutes");
  }
  if (!(config.width_hours > 0.0) || !(config.capacity_kw > 0.0)) {
    throw ConfigError("synthetic width and capacity must be positive");
  }
  const int per_day = 1440 / config.step_minutes;
  // 2026-01-01 00:00 UTC, arbitrary but fixed.
  const std::int64_t origin = days_from_civil(2026, 1, 1) * 1440;
  std::vector<PvTrace> traces;
  for (int h = 0; h < config.homes; ++h) {
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(h)));
    PvTrace trace;
    trace.home_id = "H" + std::to_string(h + 1);
    const double spread = config.capacity_spread * (2.0 * uniform01(rng) - 1.0);
    trace.capacity = config.capacity_kw * (1.0 + spread);
    const double home_peak =
        config.peak_hour + config.peak_jitter_hours * (2.0 * uniform01(rng) - 1.0);
    for (int d = 0; d < config.days; ++d) {
      const double day_peak = home_peak + 0.25 * normal(rng);
      const double clearness = 0.75 + 0.25 * uniform01(rng);
      for (int k = 0; k < per_day; ++k) {
        const double hour =
            (k + 0.5) * static_cast<double>(config.step_minutes) / 60.0;
        const double z = (hour - day_peak) / config.width_hours;
        double p = trace.capacity * clearness * std::exp(-0.5 * z * z);
        p *= 1.0 + config.noise_sigma * normal(rng);
        if (uniform01(rng) < config.cloud_probability) {
          p *= 0.3 + 0.5 * uniform01(rng);
        }
        p = std::clamp(p, 0.0, trace.capacity);
        if (p < 1e-3 * trace.capacity) p = 0.0;
        trace.timestamps.push_back(origin + (static_cast<std::int64_t>(d) *
                                                 per_day + k) *
                                                config.step_minutes);
        trace.production.push_back(p);
      }
    }
    traces.push_back(std::move(trace));
  }
  return traces;
}

std::vector<std::vector<ProsumerResources>> daily_resources(
    const std::vector<PvTrace>& traces, double unit_scale) {
  std::vector<std::vector<PvTrace>> per_home;
  size_t days = std::numeric_limits<size_t>::max();
  for (const PvTrace& t : traces) {
    per_home.push_back(split_days(resample_to_hourly(t).trace));
    days = std::min(days, per_home.back().size());
  }
  std::vector<std::vector<ProsumerResources>> out;
  if (per_home.empty()) return out;
  for (size_t d = 0; d < days; ++d) {
    std::vector<ProsumerResources> day;
    for (size_t h = 0; h < per_home.size(); ++h) {
      day.push_back(to_resources(per_home[h][d], static_cast<ProsumerId>(h),
                                 false, 1.0, 0, unit_scale));
    }
    out.push_back(std::move(day));
  }
  return out;
}

}  // namespace lfm
