// Copyright 2026 The lsw Authors. All rights reserved.
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

#pragma once

#include <string>
#include <vector>

#include "lsw/experiments.hpp"
#include "lsw/kernel.hpp"
#include "lsw/orbits.hpp"
#include "lsw/weights.hpp"

namespace lsw {

struct Series {
  std::string label;
  std::vector<double> x, y;
  std::vector<double> lo, hi;  // optional band, same length as x
  bool markers_only = false;
};

struct Chart {
  std::string title, x_label, y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;
};

/// Static SVG rendering.  Non-positive values are dropped on log axes.
std::string render_svg(const Chart& chart);
void write_svg(const Chart& chart, const std::string& path);

Chart theta_scan_chart(const ThetaScan& scan);
/// Median E_max (with IQR band) against N, one series per method and kind,
/// at the largest P present.
Chart error_vs_n_chart(const std::vector<SummaryRow>& summary);
/// Median E_max against P at the largest N present.
Chart error_vs_p_chart(const std::vector<SummaryRow>& summary);
Chart weight_vs_lambda_chart(const WeightVector& w, const OrbitLibrary& lib);

}  // namespace lsw
