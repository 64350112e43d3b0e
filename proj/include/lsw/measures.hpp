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

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "lsw/dynamics.hpp"
#include "lsw/orbits.hpp"

namespace lsw {

/// Finite chaotic trajectory segment used as a reference measure.
struct Snippet {
  std::string id;
  double duration = 0.0;
  Trajectory samples;  // uniform spacing, both endpoints included
};

enum class MeasureKind { kOrbit, kSnippet, kDiscrete };

std::string_view kind_name(MeasureKind k);
MeasureKind parse_kind(std::string_view name);

/// A normalized reference measure discretized as weighted points.  Orbits use
/// the periodic trapezoid rule, snippets the ordinary trapezoid rule, and
/// discrete measures carry explicit atom masses.
struct ReferenceMeasure {
  MeasureKind kind = MeasureKind::kOrbit;
  std::string id;
  double duration = 0.0;
  std::vector<State> points;
  std::vector<double> weights;  // sums to one

  std::size_t size() const { return points.size(); }
};

using ObservableFn = std::function<double(const State&)>;

/// Orbit sampled at spacing T / ceil(T / max_spacing).
ReferenceMeasure orbit_measure(const PeriodicOrbit& orbit, const Params& p,
                               double max_spacing = 0.01);
ReferenceMeasure snippet_measure(const Snippet& snippet);
ReferenceMeasure discrete_measure(std::string id, std::vector<State> atoms,
                                  std::vector<double> masses);
ReferenceMeasure point_measure(std::string id, const State& x);

std::vector<ReferenceMeasure> orbit_measures(const OrbitLibrary& lib,
                                             const Params& p,
                                             double max_spacing = 0.01);
std::vector<ReferenceMeasure> snippet_measures(const std::vector<Snippet>& snippets);

/// One chaotic run of `total_duration` after the 25-unit transient, cut into
/// `count` contiguous snippets of equal duration that share boundary samples.
std::vector<Snippet> sample_snippets(const Params& p, double total_duration,
                                     int count, std::uint64_t seed,
                                     double max_spacing = 0.01);

/// Chaotic samples x(n dt), n = 1..count, from an attractor point at t = 0.
Trajectory chaotic_samples(const Params& p, std::size_t count, double dt,
                           std::uint64_t seed, const IntegratorOptions& opt = {});

double measure_average(const ReferenceMeasure& m, const ObservableFn& a);

/// Mean of `a` over the first `n` samples (all samples when n == 0).
double ergodic_average(const Trajectory& traj, const ObservableFn& a,
                       std::size_t n = 0);

void save_snippets(const std::vector<Snippet>& snippets, std::ostream& out);
void save_snippets(const std::vector<Snippet>& snippets, const std::string& path);
std::vector<Snippet> load_snippets(std::istream& in);
std::vector<Snippet> load_snippets(const std::string& path);

}  // namespace lsw
