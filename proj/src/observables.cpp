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

#include "lsw/observables.hpp"

#include "lsw/error.hpp"
#include "lsw/textio.hpp"

namespace lsw {

const std::vector<Observable>& basis() {
  static const std::vector<Observable> set = {
      {"1", [](const State&) { return 1.0; }},
      {"x", [](const State& s) { return s.x(); }},
      {"y", [](const State& s) { return s.y(); }},
      {"z", [](const State& s) { return s.z(); }},
      {"x2", [](const State& s) { return s.x() * s.x(); }},
      {"xy", [](const State& s) { return s.x() * s.y(); }},
      {"xz", [](const State& s) { return s.x() * s.z(); }},
      {"y2", [](const State& s) { return s.y() * s.y(); }},
      {"yz", [](const State& s) { return s.y() * s.z(); }},
      {"z2", [](const State& s) { return s.z() * s.z(); }},
  };
  return set;
}

const Observable& basis_observable(const std::string& tag) {
  for (const Observable& o : basis()) {
    if (o.tag == tag) return o;
  }
  fail(ErrorCode::kPrecondition, "unknown observable '" + tag + "'");
}

std::vector<Observable> parse_observables(const std::string& spec) {
  if (spec == "all") return basis();
  std::vector<Observable> out;
  for (const std::string& tag : textio::split(spec, ',')) out.push_back(basis_observable(tag));
  require(!out.empty(), "empty observable list");
  return out;
}

Observable kernel_observable_of(const ReferenceMeasure& m, const KernelConfig& cfg) {
  cfg.validate();
  return {"kernel(" + m.id + "," + textio::fmt17(cfg.theta) + ")",
          [m, cfg](const State& x) { return kernel_observable(m, x, cfg); }};
}

bool is_odd_under_mirror(const std::string& tag) {
  return tag == "x" || tag == "y" || tag == "xz" || tag == "yz";
}

double estimate_average(const Eigen::VectorXd& w, const std::vector<double>& per_measure) {
  if (static_cast<std::size_t>(w.size()) != per_measure.size()) {
    fail(ErrorCode::kLengthMismatch, "weight count " + std::to_string(w.size()) +
                                         " differs from measure count " +
                                         std::to_string(per_measure.size()));
  }
  double s = 0.0;
  for (std::size_t p = 0; p < per_measure.size(); ++p) {
    s += w[static_cast<Eigen::Index>(p)] * per_measure[p];
  }
  return s;
}

double estimate_average(const WeightVector& w, const std::vector<double>& per_measure) {
  return estimate_average(w.w, per_measure);
}

double lyapunov_estimate(const WeightVector& w, const std::vector<double>& exponents) {
  if (w.kind == MeasureKind::kSnippet) {
    fail(ErrorCode::kUnsupported, "Lyapunov estimates need orbit weights, not snippet weights");
  }
  return estimate_average(w.w, exponents);
}

std::vector<double> measure_averages(const std::vector<ReferenceMeasure>& measures,
                                     const ObservableFn& a) {
  std::vector<double> out;
  out.reserve(measures.size());
  for (const ReferenceMeasure& m : measures) out.push_back(measure_average(m, a));
  return out;
}

}  // namespace lsw
