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


#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lfm/evaluation.hpp"

namespace lfm {
namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 400;
constexpr int kLeft = 70;
constexpr int kRight = 130;
constexpr int kTop = 40;
constexpr int kBottom = 80;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                               "#ff7f0e", "#8c564b"};

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

void open_svg(std::ostringstream& svg, const std::string& title) {
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
         "font-size=\"15\">"
      << escape(title) << "</text>\n";
}

// Nice tick step for a span covering roughly five ticks.
double tick_step(double span) {
  if (!(span > 0)) return 1.0;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  const double nice = norm < 1.5 ? 1.0 : norm < 3.0 ? 2.0 : norm < 7.0 ? 5.0 : 10.0;
  return nice * mag;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  double to_y(double v) const {
    const double plot_h = kHeight - kTop - kBottom;
    return kTop + plot_h * (1.0 - (v - lo) / (hi - lo));
  }
};

void draw_y_axis(std::ostringstream& svg, const Axis& axis, const std::string& label) {
  const double step = tick_step(axis.hi - axis.lo);
  for (double t = std::ceil(axis.lo / step) * step; t <= axis.hi + 1e-9; t += step) {
    const double y = axis.to_y(t);
    svg << "<line x1=\"" << kLeft << "\" x2=\"" << kWidth - kRight << "\" y1=\""
        << fixed(y) << "\" y2=\"" << fixed(y)
        << "\" stroke=\"#dddddd\"/>\n<text x=\"" << kLeft - 6 << "\" y=\""
        << fixed(y + 4) << "\" text-anchor=\"end\">" << fixed(t, step < 1 ? 2 : 0)
        << "</text>\n";
  }
  svg << "<text x=\"16\" y=\"" << (kTop + kHeight - kBottom) / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << (kTop + kHeight - kBottom) / 2 << ")\">" << escape(label) << "</text>\n"
      << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft << "\" y1=\"" << kTop
      << "\" y2=\"" << kHeight - kBottom << "\" stroke=\"black\"/>\n";
}

void draw_legend(std::ostringstream& svg, const std::vector<std::string>& names) {
  for (size_t s = 0; s < names.size(); ++s) {
    const int y = kTop + 10 + static_cast<int>(s) * 20;
    svg << "<rect x=\"" << kWidth - kRight + 15 << "\" y=\"" << y - 9
        << "\" width=\"12\" height=\"12\" fill=\"" << kColors[s % 6]
        << "\"/>\n<text x=\"" << kWidth - kRight + 32 << "\" y=\"" << y + 1
        << "\">" << escape(names[s]) << "</text>\n";
  }
}

// Grouped bars: one group per case, one bar per (series) in each group.
std::string grouped_bars(const std::string& title, const std::string& y_label,
                         const std::vector<std::string>& groups,
                         const std::vector<std::string>& series,
                         const std::map<std::pair<std::string, std::string>, double>& values,
                         Axis axis) {
  std::ostringstream svg;
  open_svg(svg, title);
  draw_y_axis(svg, axis, y_label);
  const double plot_w = kWidth - kLeft - kRight;
  const double group_w = groups.empty() ? plot_w : plot_w / groups.size();
  const double bar_w = group_w * 0.8 / std::max<size_t>(series.size(), 1);
  const double zero_y = axis.to_y(std::clamp(0.0, axis.lo, axis.hi));
  for (size_t g = 0; g < groups.size(); ++g) {
    const double gx = kLeft + g * group_w;
    for (size_t s = 0; s < series.size(); ++s) {
      const auto it = values.find({groups[g], series[s]});
      if (it == values.end() || !std::isfinite(it->second)) continue;
      const double y = axis.to_y(std::clamp(it->second, axis.lo, axis.hi));
      svg << "<rect x=\"" << fixed(gx + group_w * 0.1 + s * bar_w) << "\" y=\""
          << fixed(std::min(y, zero_y)) << "\" width=\"" << fixed(bar_w)
          << "\" height=\"" << fixed(std::abs(zero_y - y)) << "\" fill=\""
          << kColors[s % 6] << "\"><title>" << escape(series[s]) << ' '
          << escape(groups[g]) << ": " << fixed(it->second, 4)
          << "</title></rect>\n";
    }
    const double cx = gx + group_w / 2;
    const double ty = kHeight - kBottom + 14;
    svg << "<text x=\"" << fixed(cx) << "\" y=\"" << fixed(ty)
        << "\" text-anchor=\"end\" font-size=\"10\" transform=\"rotate(-35 "
        << fixed(cx) << ' ' << fixed(ty) << ")\">" << escape(groups[g])
        << "</text>\n";
  }
  svg << "<line x1=\"" << kLeft << "\" x2=\"" << kWidth - kRight << "\" y1=\""
      << fixed(zero_y) << "\" y2=\"" << fixed(zero_y) << "\" stroke=\"black\"/>\n";
  draw_legend(svg, series);
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::string> unique_in_order(const Table& t, const std::string& col) {
  std::vector<std::string> out;
  const int c = t.column(col);
  for (const auto& row : t.rows) {
    if (std::find(out.begin(), out.end(), row[c]) == out.end()) out.push_back(row[c]);
  }
  return out;
}

Axis padded(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) return {0.0, 1.0};
  if (hi - lo < 1e-12) hi = lo + 1.0;
  const double step = tick_step(hi - lo);
  return {std::floor(lo / step) * step, std::ceil(hi / step) * step};
}

}  // namespace

std::string plot_f1_by_case(const Table& aggregates) {
  const auto groups = unique_in_order(aggregates, "case");
  const auto models = unique_in_order(aggregates, "model");
  std::map<std::pair<std::string, std::string>, double> values;
  const int cc = aggregates.column("case");
  const int mc = aggregates.column("model");
  for (size_t r = 0; r < aggregates.rows.size(); ++r) {
    values[{aggregates.rows[r][cc], aggregates.rows[r][mc]}] =
        aggregates.number(r, "f1_mean");
  }
  return grouped_bars("Macro F1 by case", "mean macro F1", groups, models, values,
                      {0.0, 1.0});
}

std::string plot_deltas_by_case(const Table& aggregates) {
  const auto groups = unique_in_order(aggregates, "case");
  const auto models = unique_in_order(aggregates, "model");
  std::vector<std::string> series;
  for (const auto& m : models) {
    series.push_back(m + " dJ");
    series.push_back(m + " dNRMSD");
  }
  std::map<std::pair<std::string, std::string>, double> values;
  const int cc = aggregates.column("case");
  const int mc = aggregates.column("model");
  double lo = 0.0, hi = 0.0;
  for (size_t r = 0; r < aggregates.rows.size(); ++r) {
    const std::string& c = aggregates.rows[r][cc];
    const std::string& m = aggregates.rows[r][mc];
    const double dj = aggregates.number(r, "delta_j_mean");
    const double dn = aggregates.number(r, "delta_nrmsd_mean");
    values[{c, m + " dJ"}] = dj;
    values[{c, m + " dNRMSD"}] = dn;
    for (double v : {dj, dn}) {
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return grouped_bars("Mean deviation from expert (%)", "percent", groups, series,
                      values, padded(lo, hi));
}

std::string plot_time_vs_kappa(const Table& timing) {
  std::vector<double> kappa, solver, inference;
  for (size_t r = 0; r < timing.rows.size(); ++r) {
    kappa.push_back(timing.number(r, "kappa"));
    solver.push_back(timing.number(r, "solver_median_s"));
    inference.push_back(timing.number(r, "inference_median_s"));
  }
  double lo = kInf, hi = -kInf;
  for (const auto* ys : {&solver, &inference}) {
    for (double v : *ys) {
      if (v > 0 && std::isfinite(v)) {
        lo = std::min(lo, std::log10(v));
        hi = std::max(hi, std::log10(v));
      }
    }
  }
  Axis axis{std::isfinite(lo) ? std::floor(lo) : -6.0,
            std::isfinite(hi) ? std::ceil(hi) : 0.0};
  if (axis.hi <= axis.lo) axis.hi = axis.lo + 1.0;
  double kmax = 1.0;
  for (double k : kappa) kmax = std::max(kmax, k);
  const double plot_w = kWidth - kLeft - kRight;
  auto to_x = [&](double k) { return kLeft + plot_w * k / kmax; };

  std::ostringstream svg;
  open_svg(svg, "Allocation time vs number of bids");
  for (double e = axis.lo; e <= axis.hi + 1e-9; e += 1.0) {
    const double y = axis.to_y(e);
    svg << "<line x1=\"" << kLeft << "\" x2=\"" << kWidth - kRight << "\" y1=\""
        << fixed(y) << "\" y2=\"" << fixed(y) << "\" stroke=\"#dddddd\"/>\n"
        << "<text x=\"" << kLeft - 6 << "\" y=\"" << fixed(y + 4)
        << "\" text-anchor=\"end\">1e" << static_cast<int>(e) << "</text>\n";
  }
  svg << "<text x=\"16\" y=\"" << (kTop + kHeight - kBottom) / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << (kTop + kHeight - kBottom) / 2 << ")\">median seconds (log)</text>\n"
      << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft << "\" y1=\"" << kTop
      << "\" y2=\"" << kHeight - kBottom << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kLeft << "\" x2=\"" << kWidth - kRight << "\" y1=\""
      << kHeight - kBottom << "\" y2=\"" << kHeight - kBottom
      << "\" stroke=\"black\"/>\n";
  for (double k : kappa) {
    svg << "<text x=\"" << fixed(to_x(k)) << "\" y=\"" << kHeight - kBottom + 16
        << "\" text-anchor=\"middle\">" << static_cast<long long>(k) << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - kBottom + 40
      << "\" text-anchor=\"middle\">number of bids</text>\n";
  const std::vector<std::string> names = {"exact solver", "gnn inference"};
  const std::vector<const std::vector<double>*> series = {&solver, &inference};
  for (size_t s = 0; s < series.size(); ++s) {
    std::string points;
    for (size_t i = 0; i < kappa.size(); ++i) {
      const double v = (*series[s])[i];
      if (!(v > 0) || !std::isfinite(v)) continue;
      const double x = to_x(kappa[i]);
      const double y = axis.to_y(std::log10(v));
      if (!points.empty()) points += ' ';
      points += fixed(x) + "," + fixed(y);
      svg << "<circle cx=\"" << fixed(x) << "\" cy=\"" << fixed(y)
          << "\" r=\"3.5\" fill=\"" << kColors[s] << "\"/>\n";
    }
    svg << "<polyline points=\"" << points << "\" fill=\"none\" stroke=\""
        << kColors[s] << "\" stroke-width=\"2\"/>\n";
  }
  draw_legend(svg, names);
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace lfm
