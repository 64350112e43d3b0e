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

#include "lsw/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "lsw/error.hpp"

namespace lsw {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 80, kRight = 190, kTop = 40, kBottom = 60;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
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

struct Axis {
  bool log = false;
  double lo = 0.0, hi = 1.0;
  double px0 = 0.0, px1 = 1.0;

  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
  double t(double v) const { return log ? std::log10(v) : v; }
  double map(double v) const { return px0 + (t(v) - lo) / (hi - lo) * (px1 - px0); }

  void fit(const std::vector<double>& values) {
    double a = std::numeric_limits<double>::infinity(), b = -a;
    for (double v : values) {
      if (!usable(v)) continue;
      a = std::min(a, t(v));
      b = std::max(b, t(v));
    }
    if (!std::isfinite(a)) a = 0.0, b = 1.0;
    if (b - a < 1e-12) a -= 0.5, b += 0.5;
    if (log) {
      a = std::floor(a);
      b = std::ceil(b);
    } else {
      const double pad = 0.05 * (b - a);
      a -= pad;
      b += pad;
    }
    lo = a;
    hi = b;
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      const int step = std::max(1, static_cast<int>(std::ceil((hi - lo) / 8.0)));
      for (int e = static_cast<int>(lo); e <= static_cast<int>(hi); e += step) out.push_back(std::pow(10.0, e));
      return out;
    }
    const double raw = (hi - lo) / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) out.push_back(v);
    return out;
  }
};

}  // namespace

std::string render_svg(const Chart& chart) {
  Axis ax{chart.log_x, 0, 1, kLeft, kWidth - kRight};
  Axis ay{chart.log_y, 0, 1, kHeight - kBottom, kTop};
  std::vector<double> xs, ys;
  for (const Series& s : chart.series) {
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    ys.insert(ys.end(), s.y.begin(), s.y.end());
    ys.insert(ys.end(), s.lo.begin(), s.lo.end());
    ys.insert(ys.end(), s.hi.begin(), s.hi.end());
  }
  ax.fit(xs);
  ay.fit(ys);

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(chart.title) << "</text>\n";

  for (double v : ax.ticks()) {
    const double x = ax.map(v);
    o << "<line x1=\"" << num(x) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(x) << "\" y2=\""
      << num(kHeight - kBottom) << "\" stroke=\"#e0e0e0\"/>\n";
    o << "<text x=\"" << num(x) << "\" y=\"" << num(kHeight - kBottom + 16)
      << "\" text-anchor=\"middle\">" << tick_label(v) << "</text>\n";
  }
  for (double v : ay.ticks()) {
    const double y = ay.map(v);
    o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kWidth - kRight)
      << "\" y2=\"" << num(y) << "\" stroke=\"#e0e0e0\"/>\n";
    o << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
      << tick_label(v) << "</text>\n";
  }
  o << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(kWidth - kLeft - kRight)
    << "\" height=\"" << num(kHeight - kTop - kBottom) << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"" << num(kHeight - 18)
    << "\" text-anchor=\"middle\">" << escape(chart.x_label) << "</text>\n";
  o << "<text transform=\"translate(20," << num((kTop + kHeight - kBottom) / 2)
    << ") rotate(-90)\" text-anchor=\"middle\">" << escape(chart.y_label) << "</text>\n";

  for (std::size_t k = 0; k < chart.series.size(); ++k) {
    const Series& s = chart.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    if (!s.lo.empty() && s.lo.size() == s.x.size() && s.hi.size() == s.x.size()) {
      std::string upper, lower;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!ax.usable(s.x[i]) || !ay.usable(s.lo[i]) || !ay.usable(s.hi[i])) continue;
        upper += num(ax.map(s.x[i])) + "," + num(ay.map(s.hi[i])) + " ";
        lower = num(ax.map(s.x[i])) + "," + num(ay.map(s.lo[i])) + " " + lower;
      }
      if (!upper.empty()) {
        o << "<polygon points=\"" << upper << lower << "\" fill=\"" << color
          << "\" fill-opacity=\"0.18\" stroke=\"none\"/>\n";
      }
    }
    std::string pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!ax.usable(s.x[i]) || !ay.usable(s.y[i])) continue;
      const std::string p = num(ax.map(s.x[i])) + "," + num(ay.map(s.y[i]));
      pts += p + " ";
      o << "<circle cx=\"" << num(ax.map(s.x[i])) << "\" cy=\"" << num(ay.map(s.y[i]))
        << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    if (!s.markers_only && !pts.empty()) {
      o << "<polyline points=\"" << pts << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.8\"/>\n";
    }
    const double ly = kTop + 14 + 18 * static_cast<double>(k);
    o << "<rect x=\"" << num(kWidth - kRight + 14) << "\" y=\"" << num(ly - 9) << "\" width=\"12\" height=\"12\" fill=\""
      << color << "\"/>\n";
    o << "<text x=\"" << num(kWidth - kRight + 32) << "\" y=\"" << num(ly + 1) << "\">" << escape(s.label)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_svg(const Chart& chart, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot open " + path + " for writing");
  out << render_svg(chart);
}

Chart theta_scan_chart(const ThetaScan& scan) {
  Chart c;
  c.title = "Frobenius distance of A(theta) to J and I";
  c.x_label = "theta";
  c.y_label = "Frobenius distance";
  c.log_x = true;
  c.log_y = true;
  Series ones{"|A - J|_F", {}, {}, {}, {}, false};
  Series ident{"|A - I|_F", {}, {}, {}, {}, false};
  for (const ThetaScanPoint& p : scan.points) {
    ones.x.push_back(p.theta);
    ones.y.push_back(p.distance_ones);
    ident.x.push_back(p.theta);
    ident.y.push_back(p.distance_identity);
  }
  c.series = {ones, ident};
  return c;
}

namespace {

std::string series_label(const SummaryRow& r) {
  return std::string(method_name(r.method)) + " (" + std::string(kind_name(r.kind)) + ")";
}

Chart emax_chart(const std::vector<SummaryRow>& summary, bool against_n) {
  long long fixed = 0;
  for (const SummaryRow& r : summary) {
    if (r.observable == "Emax") fixed = std::max(fixed, against_n ? r.P : r.N);
  }
  std::map<std::string, Series> by_label;
  std::vector<std::string> order;
  for (const SummaryRow& r : summary) {
    if (r.observable != "Emax" || (against_n ? r.P : r.N) != fixed) continue;
    const std::string label = series_label(r);
    auto it = by_label.find(label);
    if (it == by_label.end()) {
      order.push_back(label);
      it = by_label.emplace(label, Series{label, {}, {}, {}, {}, false}).first;
    }
    it->second.x.push_back(static_cast<double>(against_n ? r.N : r.P));
    it->second.y.push_back(r.median);
    it->second.lo.push_back(r.q25);
    it->second.hi.push_back(r.q75);
  }
  Chart c;
  c.log_x = true;
  c.log_y = true;
  c.y_label = "median E_max (IQR shaded)";
  if (against_n) {
    c.title = "E_max against N at P=" + std::to_string(fixed);
    c.x_label = "N";
  } else {
    c.title = "E_max against P at N=" + std::to_string(fixed);
    c.x_label = "P";
  }
  for (const std::string& l : order) c.series.push_back(by_label[l]);
  return c;
}

}  // namespace

Chart error_vs_n_chart(const std::vector<SummaryRow>& summary) { return emax_chart(summary, true); }
Chart error_vs_p_chart(const std::vector<SummaryRow>& summary) { return emax_chart(summary, false); }

Chart weight_vs_lambda_chart(const WeightVector& w, const OrbitLibrary& lib) {
  require(w.size() == lib.orbits.size(), "weight count differs from the library size");
  Chart c;
  c.title = std::string(method_name(w.method)) + " weights against Floquet exponent";
  c.x_label = "lambda_p";
  c.y_label = "w_p";
  Series s{"w_p", {}, {}, {}, {}, true};
  for (std::size_t p = 0; p < lib.orbits.size(); ++p) {
    s.x.push_back(lib.orbits[p].floquet_exponent);
    s.y.push_back(w.w[static_cast<Eigen::Index>(p)]);
  }
  c.series = {s};
  return c;
}

}  // namespace lsw
