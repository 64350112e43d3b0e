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

#include <Eigen/Core>
#include <string>
#include <vector>

#include "lsw/kernel.hpp"
#include "lsw/measures.hpp"
#include "lsw/weights.hpp"

namespace lsw {

struct Observable {
  std::string tag;
  ObservableFn fn;

  double operator()(const State& x) const { return fn(x); }
};

/// The monomial set {1, x, y, z, x2, xy, xz, y2, yz, z2}, in that order.
const std::vector<Observable>& basis();

/// A basis member by tag; throws kPrecondition for unknown tags.
const Observable& basis_observable(const std::string& tag);

/// "all" or a comma-separated list of basis tags.
std::vector<Observable> parse_observables(const std::string& spec);

/// a_p(x), tagged "kernel(<id>,<theta>)".
Observable kernel_observable_of(const ReferenceMeasure& m, const KernelConfig& cfg);

/// Odd under (x, y, z) -> (-x, -y, z).
bool is_odd_under_mirror(const std::string& tag);

/// sum_p w_p E_p[a] in index order.
double estimate_average(const Eigen::VectorXd& w, const std::vector<double>& per_measure);
double estimate_average(const WeightVector& w, const std::vector<double>& per_measure);

/// sum_p w_p lambda_p; snippet-based weights are rejected with kUnsupported.
double lyapunov_estimate(const WeightVector& w, const std::vector<double>& exponents);

/// E_p[a] for every measure.
std::vector<double> measure_averages(const std::vector<ReferenceMeasure>& measures,
                                     const ObservableFn& a);

}  // namespace lsw
