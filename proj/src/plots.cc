// Copyright 2026 The provshift Authors.
//
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

#include "provshift/plots.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "provshift/errors.h"

namespace provshift {

CurveSet BuildCurves(std::span<const AggregateRow> rows,
                     const CurveOptions& options) {
  CurveSet set;
  double min_positive = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    if (r.alpha_test > 0.0) min_positive = std::min(min_positive, r.alpha_test);
    if (r.alpha_test == 0.0) set.has_zero = true;
  }
  if (options.zero_floor) {
    set.zero_floor = *options.zero_floor;
  } else {
    set.zero_floor = std::isfinite(min_positive) ? min_positive / 2.0 : 0.025;
  }
  if (!(set.zero_floor > 0.0)) throw ConfigError("zero floor must be positive");

  std::map<double, std::map<int, std::vector<CurvePoint>>> grouped;
  for (const auto& r : rows) {
    CurvePoint p;
    p.alpha_test = r.alpha_test;
    p.x = r.alpha_test > 0.0 ? r.alpha_test : set.zero_floor;
    p.mean = r.mean;
    const double half =
        r.n > 0 ? options.z_value * r.std / std::sqrt(static_cast<double>(r.n))
                : 0.0;
    p.lower = r.mean - half;
    p.upper = r.mean + half;
    p.n = r.n;
    grouped[r.q][static_cast<int>(r.mode)].push_back(p);
  }
  for (auto& [q, by_mode] : grouped) {
    CurvePanel panel;
    panel.q = q;
    for (auto& [mode, points] : by_mode) {
      std::sort(points.begin(), points.end(),
                [](const CurvePoint& a, const CurvePoint& b) {
                  return a.alpha_test < b.alpha_test;
                });
      panel.series.push_back({static_cast<ModelMode>(mode), std::move(points)});
    }
    set.panels.push_back(std::move(panel));
  }
  return set;
}

namespace {

std::string Num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

const char* SeriesColor(ModelMode mode) {
  return mode == ModelMode::kBackdoor ? "#1f5fbf" : "#e07b00";
}

const char* SeriesLabel(ModelMode mode) {
  return mode == ModelMode::kBackdoor ? "BA" : "vanilla";
}

}  // namespace

std::string RenderPanelSvg(const CurvePanel& panel, const CurveSet& set,
                           const CurveOptions& options) {
  const double left = 60, right = 20, top = 40, bottom = 50;
  const double w = options.width, h = options.height;
  const double plot_w = w - left - right, plot_h = h - top - bottom;

  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const auto& s : panel.series) {
    for (const auto& p : s.points) {
      x_min = std::min(x_min, std::log10(p.x));
      x_max = std::max(x_max, std::log10(p.x));
      y_min = std::min(y_min, p.lower);
      y_max = std::max(y_max, p.upper);
    }
  }
  const double marker = std::log10(options.alpha_train);
  x_min = std::min(x_min, marker);
  x_max = std::max(x_max, marker);
  if (!(x_max > x_min)) {
    x_min -= 0.5;
    x_max += 0.5;
  }
  if (!(y_max > y_min)) {
    y_min -= 0.05;
    y_max += 0.05;
  }
  const double pad = 0.05 * (y_max - y_min);
  y_min -= pad;
  y_max += pad;
  auto px = [&](double alpha) {
    return left + (std::log10(alpha) - x_min) / (x_max - x_min) * plot_w;
  };
  auto py = [&](double y) {
    return top + (y_max - y) / (y_max - y_min) * plot_h;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h
      << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">P(z=MIMIC) = "
      << Num(panel.q) << "</text>\n";
  svg << "<rect class=\"frame\" x=\"" << left << "\" y=\"" << top
      << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"#444\"/>\n";

  // Decade ticks on x, five ticks on y.
  for (int e = static_cast<int>(std::ceil(x_min));
       e <= static_cast<int>(std::floor(x_max)); ++e) {
    const double x = px(std::pow(10.0, e));
    svg << "<line x1=\"" << Num(x) << "\" y1=\"" << top + plot_h << "\" x2=\""
        << Num(x) << "\" y2=\"" << top + plot_h + 5
        << "\" stroke=\"#444\"/>\n<text x=\"" << Num(x) << "\" y=\""
        << top + plot_h + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << (e >= 0 ? std::to_string(static_cast<int>(std::pow(10.0, e)))
                   : Num(std::pow(10.0, e)))
        << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double y = y_min + (y_max - y_min) * k / 4.0;
    svg << "<text x=\"" << left - 6 << "\" y=\"" << Num(py(y) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << Num(y) << "</text>\n";
  }
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << h - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">alpha_test (log10 scale)</text>\n";
  svg << "<text x=\"16\" y=\"" << top + plot_h / 2
      << "\" transform=\"rotate(-90 16 " << top + plot_h / 2
      << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">AUPRC</text>\n";

  svg << "<line class=\"alpha-train\" x1=\"" << Num(px(options.alpha_train))
      << "\" y1=\"" << top << "\" x2=\"" << Num(px(options.alpha_train))
      << "\" y2=\"" << top + plot_h
      << "\" stroke=\"red\" stroke-dasharray=\"6,4\"/>\n";

  for (const auto& s : panel.series) {
    if (s.points.empty()) continue;
    std::ostringstream band, line;
    for (const auto& p : s.points) {
      band << Num(px(p.x)) << ',' << Num(py(p.upper)) << ' ';
    }
    for (auto it = s.points.rbegin(); it != s.points.rend(); ++it) {
      band << Num(px(it->x)) << ',' << Num(py(it->lower)) << ' ';
    }
    for (const auto& p : s.points) {
      line << Num(px(p.x)) << ',' << Num(py(p.mean)) << ' ';
    }
    svg << "<polygon class=\"band\" points=\"" << band.str() << "\" fill=\""
        << SeriesColor(s.mode) << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    svg << "<polyline class=\"series\" data-mode=\"" << ModelModeName(s.mode)
        << "\" points=\"" << line.str() << "\" fill=\"none\" stroke=\""
        << SeriesColor(s.mode) << "\" stroke-width=\"2\"/>\n";
  }

  double legend_y = top + 14;
  for (const auto& s : panel.series) {
    svg << "<line x1=\"" << left + plot_w - 90 << "\" y1=\"" << legend_y
        << "\" x2=\"" << left + plot_w - 70 << "\" y2=\"" << legend_y
        << "\" stroke=\"" << SeriesColor(s.mode)
        << "\" stroke-width=\"2\"/>\n<text x=\"" << left + plot_w - 64
        << "\" y=\"" << legend_y + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << SeriesLabel(s.mode) << "</text>\n";
    legend_y += 16;
  }
  if (set.has_zero) {
    svg << "<text class=\"zero-note\" x=\"" << left + 4 << "\" y=\""
        << top + plot_h - 6
        << "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#666\">"
           "alpha_test = 0 drawn at "
        << set.zero_floor << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::filesystem::path> EmitCurves(
    std::span<const AggregateRow> rows, const std::filesystem::path& out_dir,
    const CurveOptions& options) {
  const CurveSet set = BuildCurves(rows, options);
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (const auto& panel : set.panels) {
    const std::string stem = "curve_q" + FormatDouble(panel.q);
    const auto csv_path = out_dir / (stem + ".csv");
    {
      std::ofstream csv(csv_path, std::ios::binary);
      if (!csv) throw Error("cannot write " + csv_path.string());
      csv << "mode,alpha_test,x,mean,lower,upper,n\n";
      for (const auto& s : panel.series) {
        for (const auto& p : s.points) {
          csv << ModelModeName(s.mode) << ',' << FormatDouble(p.alpha_test)
              << ',' << FormatDouble(p.x) << ',' << FormatDouble(p.mean) << ','
              << FormatDouble(p.lower) << ',' << FormatDouble(p.upper) << ','
              << p.n << '\n';
        }
      }
    }
    const auto svg_path = out_dir / (stem + ".svg");
    {
      std::ofstream svg(svg_path, std::ios::binary);
      if (!svg) throw Error("cannot write " + svg_path.string());
      svg << RenderPanelSvg(panel, set, options);
    }
    written.push_back(csv_path);
    written.push_back(svg_path);
  }
  return written;
}

}  // namespace provshift
