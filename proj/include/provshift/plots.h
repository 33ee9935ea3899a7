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

#ifndef PROVSHIFT_PLOTS_H_
#define PROVSHIFT_PLOTS_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "provshift/metrics.h"

namespace provshift {

struct CurveOptions {
  double alpha_train = 0.4;  // position of the vertical marker
  // x position used for alpha_test = 0 on the log axis. Defaults to half
  // the smallest positive alpha_test present.
  std::optional<double> zero_floor;
  double z_value = 1.96;  // band = mean +- z * std / sqrt(n)
  int width = 640;
  int height = 420;
};

struct CurvePoint {
  double alpha_test = 0.0;
  double x = 0.0;  // alpha value placed on the log axis
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t n = 0;
};

struct CurveSeries {
  ModelMode mode = ModelMode::kBackdoor;
  std::vector<CurvePoint> points;  // ascending alpha_test
};

struct CurvePanel {
  double q = 0.0;
  std::vector<CurveSeries> series;
};

struct CurveSet {
  std::vector<CurvePanel> panels;  // ascending q
  double zero_floor = 0.0;
  bool has_zero = false;
};

CurveSet BuildCurves(std::span<const AggregateRow> rows,
                     const CurveOptions& options);

std::string RenderPanelSvg(const CurvePanel& panel, const CurveSet& set,
                           const CurveOptions& options);

// Writes curve_q<q>.csv and curve_q<q>.svg per panel; returns the paths.
std::vector<std::filesystem::path> EmitCurves(
    std::span<const AggregateRow> rows, const std::filesystem::path& out_dir,
    const CurveOptions& options = {});

}  // namespace provshift

#endif  // PROVSHIFT_PLOTS_H_
