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

#include "lsw/measures.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "lsw/error.hpp"
#include "lsw/textio.hpp"

namespace lsw {

std::string_view kind_name(MeasureKind k) {
  switch (k) {
    case MeasureKind::kOrbit: return "orbit";
    case MeasureKind::kSnippet: return "snippet";
    case MeasureKind::kDiscrete: return "discrete";
  }
  return "unknown";
}

MeasureKind parse_kind(std::string_view name) {
  for (MeasureKind k : {MeasureKind::kOrbit, MeasureKind::kSnippet, MeasureKind::kDiscrete}) {
    if (kind_name(k) == name) return k;
  }
  fail(ErrorCode::kPrecondition, "unknown reference kind '" + std::string(name) + "'");
}

ReferenceMeasure orbit_measure(const PeriodicOrbit& orbit, const Params& p,
                               double max_spacing) {
  require(max_spacing > 0.0, "sample spacing must be positive");
  ReferenceMeasure m;
  m.kind = MeasureKind::kOrbit;
  m.id = orbit.id;
  m.duration = orbit.period;
  m.points = sample_orbit(orbit, p, max_spacing);
  m.weights.assign(m.points.size(), 1.0 / static_cast<double>(m.points.size()));
  return m;
}

ReferenceMeasure snippet_measure(const Snippet& snippet) {
  const std::size_t n = snippet.samples.size();
  require(n >= 1, "snippet has no samples");
  ReferenceMeasure m;
  m.kind = MeasureKind::kSnippet;
  m.id = snippet.id;
  m.duration = snippet.duration;
  m.points = snippet.samples.samples;
  if (n == 1) {
    m.weights = {1.0};
    return m;
  }
  const double inner = 1.0 / static_cast<double>(n - 1);
  m.weights.assign(n, inner);
  m.weights.front() = 0.5 * inner;
  m.weights.back() = 0.5 * inner;
  return m;
}

ReferenceMeasure discrete_measure(std::string id, std::vector<State> atoms,
                                  std::vector<double> masses) {
  require(!atoms.empty() && atoms.size() == masses.size(),
          "discrete measure needs one mass per atom");
  double total = 0.0;
  for (double w : masses) {
    require(w >= 0.0, "atom masses must be non-negative");
    total += w;
  }
  require(total > 0.0, "discrete measure has zero mass");
  ReferenceMeasure m;
  m.kind = MeasureKind::kDiscrete;
  m.id = std::move(id);
  m.points = std::move(atoms);
  m.weights = std::move(masses);
  for (double& w : m.weights) w /= total;
  return m;
}

ReferenceMeasure point_measure(std::string id, const State& x) {
  return discrete_measure(std::move(id), {x}, {1.0});
}

std::vector<ReferenceMeasure> orbit_measures(const OrbitLibrary& lib,
                                             const Params& p, double max_spacing) {
  std::vector<ReferenceMeasure> out;
  out.reserve(lib.size());
  for (const PeriodicOrbit& o : lib.orbits) out.push_back(orbit_measure(o, p, max_spacing));
  return out;
}

std::vector<ReferenceMeasure> snippet_measures(const std::vector<Snippet>& snippets) {
  std::vector<ReferenceMeasure> out;
  out.reserve(snippets.size());
  for (const Snippet& s : snippets) out.push_back(snippet_measure(s));
  return out;
}

std::vector<Snippet> sample_snippets(const Params& p, double total_duration,
                                     int count, std::uint64_t seed,
                                     double max_spacing) {
  require(total_duration > 0.0, "total duration must be positive");
  require(count >= 1, "snippet count must be at least 1");
  const double each = total_duration / count;
  const auto per = static_cast<std::size_t>(std::ceil(each / max_spacing - 1e-9));
  const double dt = each / static_cast<double>(per);
  const State start = attractor_state(p, seed);
  const Trajectory run = integrate(start, p, dt * static_cast<double>(per * static_cast<std::size_t>(count)), dt);
  require(run.size() == per * static_cast<std::size_t>(count) + 1,
          "snippet run has an unexpected sample count");

  std::vector<Snippet> out;
  for (int j = 0; j < count; ++j) {
    Snippet s;
    s.id = "snip" + std::to_string(j + 1);
    s.duration = each;
    s.samples.dt = dt;
    const std::size_t first = per * static_cast<std::size_t>(j);
    s.samples.t0 = run.time(first);
    s.samples.samples.assign(run.samples.begin() + static_cast<std::ptrdiff_t>(first),
                             run.samples.begin() + static_cast<std::ptrdiff_t>(first + per + 1));
    out.push_back(std::move(s));
  }
  return out;
}

Trajectory chaotic_samples(const Params& p, std::size_t count, double dt,
                           std::uint64_t seed, const IntegratorOptions& opt) {
  require(count >= 1, "need at least one chaotic sample");
  const State start = attractor_state(p, seed, 25.0, opt);
  Trajectory full = integrate(start, p, dt * static_cast<double>(count), dt, opt);
  full.samples.erase(full.samples.begin());
  full.samples.resize(count, full.samples.back());
  full.t0 = dt;
  return full;
}

// Dividing by the weight total (same summation order) makes the average of a
// constant reproduce it exactly.
double measure_average(const ReferenceMeasure& m, const ObservableFn& a) {
  double sum = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    sum += m.weights[i] * a(m.points[i]);
    mass += m.weights[i];
  }
  return sum / mass;
}

double ergodic_average(const Trajectory& traj, const ObservableFn& a, std::size_t n) {
  require(traj.size() >= 1, "trajectory is empty");
  if (n == 0) n = traj.size();
  require(n <= traj.size(), "fewer samples than requested");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a(traj.samples[i]);
  return sum / static_cast<double>(n);
}

// -- persistence ------------------------------------------------------------

void save_snippets(const std::vector<Snippet>& snippets, std::ostream& out) {
  using textio::fmt17;
  out << "SNIPLIB v1 count=" << snippets.size() << '\n';
  for (const Snippet& s : snippets) {
    out << "# id=" << s.id << " T=" << fmt17(s.duration) << '\n';
    for (std::size_t i = 0; i < s.samples.size(); ++i) {
      const State& x = s.samples.samples[i];
      out << fmt17(s.samples.time(i)) << ' ' << fmt17(x.x()) << ' ' << fmt17(x.y())
          << ' ' << fmt17(x.z()) << '\n';
    }
  }
}

void save_snippets(const std::vector<Snippet>& snippets, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot open " + path + " for writing");
  save_snippets(snippets, out);
  if (!out) fail(ErrorCode::kIo, "write to " + path + " failed");
}

std::vector<Snippet> load_snippets(std::istream& in) {
  using namespace textio;
  std::string line;
  int line_no = 0;
  long long expected = -1;
  std::vector<Snippet> out;
  std::vector<std::vector<double>> times;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (expected < 0) {
      expect_header(tokens, "SNIPLIB", "v1", line_no);
      const auto f = parse_fields(tokens, 2, line_no);
      expected = f.count("count") ? parse_int(f.at("count"), line_no) : -2;
      continue;
    }
    if (tokens[0] == "#") {
      const auto f = parse_fields(tokens, 1, line_no);
      Snippet s;
      s.id = field(f, "id", line_no);
      s.duration = parse_double(field(f, "T", line_no), line_no);
      out.push_back(std::move(s));
      times.emplace_back();
      continue;
    }
    if (out.empty()) parse_error(line_no, "sample line before any snippet header");
    if (tokens.size() != 4) parse_error(line_no, "sample line needs 't x y z'");
    times.back().push_back(parse_double(tokens[0], line_no));
    out.back().samples.samples.emplace_back(parse_double(tokens[1], line_no),
                                            parse_double(tokens[2], line_no),
                                            parse_double(tokens[3], line_no));
  }
  if (expected == -1) parse_error(line_no + 1, "missing SNIPLIB header");
  if (expected >= 0 && static_cast<long long>(out.size()) != expected) {
    parse_error(line_no, "expected " + std::to_string(expected) + " snippets, found " +
                             std::to_string(out.size()));
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto& t = times[k];
    if (t.empty()) parse_error(line_no, "snippet " + out[k].id + " has no samples");
    out[k].samples.t0 = t.front();
    out[k].samples.dt = t.size() > 1 ? (t.back() - t.front()) / static_cast<double>(t.size() - 1) : 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) {
      const double expect_t = out[k].samples.time(i);
      if (std::abs(t[i] - expect_t) > 1e-9 * std::max(1.0, std::abs(expect_t))) {
        parse_error(line_no, "snippet " + out[k].id + " is not uniformly sampled");
      }
    }
  }
  return out;
}

std::vector<Snippet> load_snippets(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path);
  return load_snippets(in);
}

}  // namespace lsw
