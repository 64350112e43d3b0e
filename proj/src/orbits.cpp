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

#include "lsw/orbits.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "lsw/error.hpp"
#include "lsw/random.hpp"
#include "lsw/textio.hpp"

namespace lsw {

// -- words ------------------------------------------------------------------

std::string canonical_rotation(const std::string& word) {
  std::string best = word;
  for (std::size_t k = 1; k < word.size(); ++k) {
    std::string rot = word.substr(k) + word.substr(0, k);
    if (rot < best) best = std::move(rot);
  }
  return best;
}

bool is_primitive(const std::string& word) {
  if (word.empty()) return false;
  return (word + word).find(word, 1) == word.size();
}

std::string swap_symbols(const std::string& word) {
  std::string out = word;
  for (char& c : out) c = (c == 'A') ? 'B' : (c == 'B' ? 'A' : c);
  return out;
}

std::string mirror_word(const std::string& word) {
  return canonical_rotation(swap_symbols(word));
}

std::vector<std::string> enumerate_primitive_words(int l_max) {
  require(l_max >= 2, "l_max must be at least 2");
  require(l_max <= 24, "l_max too large to enumerate");
  std::vector<std::string> out;
  for (int n = 2; n <= l_max; ++n) {
    for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
      std::string w(static_cast<std::size_t>(n), 'A');
      for (int i = 0; i < n; ++i) {
        if (mask & (1UL << (n - 1 - i))) w[static_cast<std::size_t>(i)] = 'B';
      }
      if (is_primitive(w) && canonical_rotation(w) == w) out.push_back(w);
    }
  }
  return out;
}

namespace {

int moebius(int n) {
  int result = 1;
  for (int f = 2; f * f <= n; ++f) {
    if (n % f == 0) {
      n /= f;
      if (n % f == 0) return 0;
      result = -result;
    }
  }
  if (n > 1) result = -result;
  return result;
}

}  // namespace

long long primitive_necklace_count(int n) {
  require(n >= 1 && n <= 60, "necklace length out of range");
  long long sum = 0;
  for (int d = 1; d <= n; ++d) {
    if (n % d == 0) sum += moebius(d) * (1LL << (n / d));
  }
  return sum / n;
}

std::vector<long long> complete_library_sizes(int l_max) {
  require(l_max >= 2, "l_max must be at least 2");
  std::vector<long long> out;
  long long total = 0;
  for (int n = 2; n <= l_max; ++n) {
    total += primitive_necklace_count(n);
    out.push_back(total);
  }
  return out;
}

// -- helpers ----------------------------------------------------------------

namespace {

double zdot(const State& s, const Params& p) { return s.x() * s.y() - p.beta * s.z(); }

struct ZMax {
  std::size_t index;  // sample index just before the maximum
  double frac;        // linear position of the maximum in [index, index+1]
  double x;           // x interpolated at the maximum
};

// Local maxima of z along uniformly spaced samples.  With `cyclic` the last
// sample wraps onto the first.
std::vector<ZMax> find_zmax(const std::vector<State>& samples, const Params& p,
                            bool cyclic) {
  std::vector<ZMax> out;
  const std::size_t n = samples.size();
  if (n < 2) return out;
  const std::size_t last = cyclic ? n : n - 1;
  for (std::size_t i = 0; i < last; ++i) {
    const State& a = samples[i];
    const State& b = samples[(i + 1) % n];
    const double da = zdot(a, p);
    const double db = zdot(b, p);
    if (da > 0.0 && db <= 0.0) {
      const double frac = da / (da - db);
      out.push_back({i, frac, a.x() + frac * (b.x() - a.x())});
    }
  }
  return out;
}

}  // namespace

// Each shooting segment is integrated from its own node.
std::vector<State> sample_orbit(const PeriodicOrbit& orbit, const Params& p,
                                double target_dt, const IntegratorOptions& opt) {
  const std::size_t m = orbit.nodes.size();
  require(m >= 1 && orbit.node_times.size() == m, "orbit has no nodes");
  const auto count = static_cast<std::size_t>(std::ceil(orbit.period / target_dt));
  const double dt = orbit.period / static_cast<double>(count);
  std::vector<State> out;
  out.reserve(count);
  for (std::size_t seg = 0; seg < m; ++seg) {
    const double t_begin = orbit.node_times[seg];
    const double t_end = seg + 1 < m ? orbit.node_times[seg + 1] : orbit.period;
    auto k0 = static_cast<std::size_t>(std::ceil(t_begin / dt - 1e-9));
    if (k0 >= count) continue;
    const double offset = static_cast<double>(k0) * dt - t_begin;
    const State start = flow(orbit.nodes[seg], p, std::max(offset, 0.0), opt);
    const Trajectory piece = integrate(start, p, std::max(t_end - t_begin - offset, 0.0), dt, opt);
    for (std::size_t j = 0; j < piece.size(); ++j) {
      const std::size_t k = k0 + j;
      if (k >= count || static_cast<double>(k) * dt >= t_end - 1e-12 * orbit.period) break;
      if (out.size() == k) out.push_back(piece.samples[j]);
    }
  }
  require(out.size() == count, "orbit sampling produced an inconsistent grid");
  return out;
}

namespace {

int count_zmax_along(const State& s0, const Params& p, double period) {
  const Trajectory t = integrate(s0, p, period, std::min(0.005, period / 200.0));
  return static_cast<int>(find_zmax(t.samples, p, false).size());
}

struct ShootingResidual {
  Eigen::VectorXd r;
  double norm = 0.0;
};

ShootingResidual shooting_residual(const std::vector<State>& x, double period,
                                   const std::vector<double>& fractions,
                                   const Params& p, const IntegratorOptions& opt) {
  const std::size_t m = x.size();
  ShootingResidual out;
  out.r.resize(static_cast<Eigen::Index>(3 * m));
  for (std::size_t i = 0; i < m; ++i) {
    const State end = flow(x[i], p, period * fractions[i], opt);
    out.r.segment<3>(static_cast<Eigen::Index>(3 * i)) = end - x[(i + 1) % m];
  }
  out.norm = out.r.norm();
  return out;
}

double max_speed(const std::vector<State>& x, const Params& p) {
  double v = 0.0;
  for (const State& s : x) v = std::max(v, vector_field(s, p).norm());
  return v;
}

}  // namespace

// -- recurrences ------------------------------------------------------------

std::vector<OrbitGuess> scan_recurrences(const Trajectory& traj, double eps,
                                         double t_min, double t_max) {
  require(t_min > 0.0 && t_max >= t_min, "need 0 < t_min <= t_max");
  require(eps > 0.0, "eps must be positive");
  require(traj.dt > 0.0, "trajectory spacing must be positive");
  const auto lag_min = static_cast<std::size_t>(std::ceil(t_min / traj.dt));
  const auto lag_max = static_cast<std::size_t>(std::floor(t_max / traj.dt));
  require(traj.size() > lag_max + 1, "trajectory shorter than t_max");

  struct Event {
    std::size_t i, lag;
    double dist;
  };
  std::vector<Event> events;
  const std::size_t n = traj.size();
  const double eps2 = eps * eps;
  auto dist2 = [&](std::size_t i, std::size_t lag) {
    return (traj.samples[i + lag] - traj.samples[i]).squaredNorm();
  };
  for (std::size_t i = 0; i + lag_max + 1 < n; ++i) {
    for (std::size_t lag = std::max<std::size_t>(lag_min, 1); lag <= lag_max; ++lag) {
      const double d = dist2(i, lag);
      if (d >= eps2) continue;
      if (d <= dist2(i, lag - 1) && d <= dist2(i, lag + 1)) {
        events.push_back({i, lag, std::sqrt(d)});
      }
    }
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    return a.dist < b.dist || (a.dist == b.dist && a.i < b.i);
  });
  std::vector<Event> kept;
  for (const Event& e : events) {
    const double T = static_cast<double>(e.lag) * traj.dt;
    bool duplicate = false;
    for (const Event& k : kept) {
      const double Tk = static_cast<double>(k.lag) * traj.dt;
      const double gap = std::abs(static_cast<double>(e.i) - static_cast<double>(k.i)) * traj.dt;
      if (std::abs(T - Tk) < 0.05 * Tk && gap < std::max(T, Tk)) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) kept.push_back(e);
  }
  std::vector<OrbitGuess> out;
  out.reserve(kept.size());
  for (const Event& e : kept) {
    out.push_back({traj.samples[e.i], static_cast<double>(e.lag) * traj.dt, {}});
  }
  return out;
}

// -- refinement -------------------------------------------------------------

PeriodicOrbit refine_orbit(const OrbitGuess& guess, const Params& p,
                           const RefineOptions& opt) {
  p.validate();
  require(guess.period > 0.0, "guess period must be positive");
  require(guess.state.allFinite(), "guess state must be finite");
  const IntegratorOptions& iopt = opt.integrator;

  if (vector_field(guess.state, p).norm() < 1e-6) {
    fail(ErrorCode::kDegenerateSolution, "guess sits on an equilibrium");
  }

  std::vector<State> x;
  std::vector<double> fractions;
  double period = guess.period;
  if (!guess.nodes.empty()) {
    x = guess.nodes;
    fractions.assign(x.size(), 1.0 / static_cast<double>(x.size()));
  } else {
    int m = opt.nodes;
    if (m <= 0) m = std::max(8, 4 * count_zmax_along(guess.state, p, period));
    x.resize(static_cast<std::size_t>(m));
    fractions.assign(x.size(), 1.0 / m);
    x[0] = guess.state;
    for (int i = 1; i < m; ++i) {
      x[static_cast<std::size_t>(i)] = flow(x[static_cast<std::size_t>(i - 1)], p, period / m, iopt);
    }
  }
  const std::size_t m = x.size();
  const auto dim = static_cast<Eigen::Index>(3 * m + 1);

  ShootingResidual res = shooting_residual(x, period, fractions, p, iopt);
  int iter = 0;
  for (; iter < opt.max_iterations && res.norm > opt.newton_tol; ++iter) {
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t i = 0; i < m; ++i) {
      const auto row = static_cast<Eigen::Index>(3 * i);
      const auto next = static_cast<Eigen::Index>(3 * ((i + 1) % m));
      const TangentBundle tb = integrate_with_tangent(x[i], p, period * fractions[i], iopt);
      jac.block<3, 3>(row, row) += tb.deviation;
      jac.block<3, 3>(row, next) -= Matrix3::Identity();
      jac.block<3, 1>(row, dim - 1) = fractions[i] * vector_field(tb.state, p);
    }
    jac.block<1, 3>(dim - 1, 0) = vector_field(x[0], p).transpose();
    Eigen::VectorXd rhs(dim);
    rhs.head(dim - 1) = -res.r;
    rhs[dim - 1] = 0.0;
    const Eigen::VectorXd delta = jac.fullPivLu().solve(rhs);
    if (!delta.allFinite()) {
      fail(ErrorCode::kRefinementFailure, "singular shooting Jacobian");
    }

    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opt.max_halvings; ++h, step *= 0.5) {
      const double trial_period = period + step * delta[dim - 1];
      if (!(trial_period > 0.0)) continue;
      std::vector<State> trial = x;
      for (std::size_t i = 0; i < m; ++i) {
        trial[i] += step * delta.segment<3>(static_cast<Eigen::Index>(3 * i));
      }
      ShootingResidual tr;
      try {
        tr = shooting_residual(trial, trial_period, fractions, p, iopt);
      } catch (const Error&) {
        continue;
      }
      if (tr.norm < res.norm) {
        x = std::move(trial);
        period = trial_period;
        res = std::move(tr);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (res.norm > opt.newton_tol * 100.0) {
    fail(ErrorCode::kRefinementFailure,
         "multiple shooting did not converge (residual " + textio::fmt17(res.norm) +
             " after " + std::to_string(iter) + " iterations)");
  }
  if (max_speed(x, p) < 1e-6 || period < 1e-6) {
    fail(ErrorCode::kDegenerateSolution, "refinement collapsed onto an equilibrium");
  }

  PeriodicOrbit orbit;
  orbit.period = period;
  orbit.nodes = x;
  orbit.node_times.resize(m);
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    orbit.node_times[i] = acc;
    acc += period * fractions[i];
  }
  const double closure = closure_residual(orbit, p, iopt);
  if (!(closure < opt.closure_tol)) {
    fail(ErrorCode::kRefinementFailure,
         "closure residual " + textio::fmt17(closure) + " above tolerance");
  }
  const FloquetData fd = floquet(orbit, p, iopt);
  orbit.floquet_exponent = fd.exponent;
  orbit.multipliers = fd.multipliers;
  orbit.symbol = symbol_sequence(orbit, p, iopt);
  orbit.id = orbit.symbol;
  return orbit;
}

FloquetData floquet(const PeriodicOrbit& orbit, const Params& p,
                    const IntegratorOptions& opt) {
  require(!orbit.nodes.empty() && orbit.period > 0.0, "orbit has no nodes");
  const std::size_t m = orbit.nodes.size();
  Matrix3 mono = Matrix3::Identity();
  for (std::size_t i = 0; i < m; ++i) {
    const double t_end = i + 1 < m ? orbit.node_times[i + 1] : orbit.period;
    const TangentBundle tb = integrate_with_tangent(orbit.nodes[i], p, t_end - orbit.node_times[i], opt);
    mono = tb.deviation * mono;
  }
  Eigen::EigenSolver<Matrix3> es(mono, false);
  if (es.info() != Eigen::Success) fail(ErrorCode::kNumeric, "monodromy eigen-solve failed");
  std::array<double, 3> mags{};
  for (int i = 0; i < 3; ++i) mags[static_cast<std::size_t>(i)] = std::abs(es.eigenvalues()[i]);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  if (!(mags[0] > 0.0) || !std::isfinite(mags[0])) {
    fail(ErrorCode::kNumeric, "monodromy has no finite leading multiplier");
  }
  return {std::log(mags[0]) / orbit.period, mags};
}

std::string symbol_sequence(const PeriodicOrbit& orbit, const Params& p,
                            const IntegratorOptions& opt) {
  const std::vector<State> samples = sample_orbit(orbit, p, 0.002, opt);
  const std::vector<ZMax> peaks = find_zmax(samples, p, true);
  if (peaks.empty()) fail(ErrorCode::kAmbiguousSymbol, "orbit has no z maximum");
  std::string word;
  for (const ZMax& z : peaks) {
    if (std::abs(z.x) < 1e-6) {
      fail(ErrorCode::kAmbiguousSymbol, "z maximum with |x| < 1e-6");
    }
    word.push_back(z.x > 0.0 ? 'A' : 'B');
  }
  if (!is_primitive(word)) {
    fail(ErrorCode::kNonPrimitive, "orbit word " + word + " is a repetition");
  }
  return canonical_rotation(word);
}

double closure_residual(const PeriodicOrbit& orbit, const Params& p,
                        const IntegratorOptions& opt) {
  require(!orbit.nodes.empty(), "orbit has no nodes");
  return (flow(orbit.start(), p, orbit.period, opt) - orbit.start()).norm();
}

PeriodicOrbit mirror_orbit(const PeriodicOrbit& orbit) {
  PeriodicOrbit out = orbit;
  for (State& s : out.nodes) s = mirror(s);
  out.symbol = mirror_word(orbit.symbol);
  out.id = out.symbol;
  return out;
}

// -- library search ---------------------------------------------------------

namespace {

struct SearchRun {
  Trajectory traj;
  std::vector<ZMax> peaks;
  std::string symbols;
};

SearchRun make_search_run(const Params& p, const SearchBudget& budget, int run) {
  SearchRun sr;
  const State s0 = attractor_state(p, derive_seed(budget.seed, "orbit-search",
                                                  static_cast<std::uint64_t>(run)));
  sr.traj = integrate(s0, p, budget.search_time, 0.01, {Tolerance{1e-10, 1e-10}});
  sr.peaks = find_zmax(sr.traj.samples, p, false);
  for (const ZMax& z : sr.peaks) sr.symbols.push_back(z.x > 0.0 ? 'A' : 'B');
  return sr;
}

std::size_t peak_sample(const ZMax& z) { return z.index + (z.frac > 0.5 ? 1 : 0); }

OrbitGuess guess_from_run(const SearchRun& sr, std::size_t k, int n) {
  const std::size_t i0 = peak_sample(sr.peaks[k]);
  const std::size_t i1 = peak_sample(sr.peaks[k + static_cast<std::size_t>(n)]);
  const std::size_t span = i1 - i0;
  const auto m = static_cast<std::size_t>(std::max(8, 4 * n));
  OrbitGuess g;
  g.state = sr.traj.samples[i0];
  g.period = static_cast<double>(span) * sr.traj.dt;
  // nodes at equal fractions of the observed span, linearly interpolated
  for (std::size_t j = 0; j < m; ++j) {
    const double pos = static_cast<double>(span) * static_cast<double>(j) / static_cast<double>(m);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const double w = pos - static_cast<double>(lo);
    const State& a = sr.traj.samples[i0 + lo];
    const State& b = sr.traj.samples[i0 + lo + 1];
    g.nodes.push_back((1.0 - w) * a + w * b);
  }
  return g;
}

}  // namespace

OrbitLibrary build_complete_library(int l_max, const Params& p,
                                    const SearchBudget& budget) {
  p.validate();
  const std::vector<std::string> targets = enumerate_primitive_words(l_max);
  std::map<std::string, PeriodicOrbit> found;
  auto missing = [&] {
    std::vector<std::string> out;
    for (const auto& w : targets) {
      if (!found.count(w)) out.push_back(w);
    }
    return out;
  };
  auto accept = [&](const PeriodicOrbit& orbit, const std::string& word) {
    if (found.count(orbit.symbol) || orbit.symbol.size() > static_cast<std::size_t>(l_max)) return;
    found.emplace(orbit.symbol, orbit);
    const std::string partner = mirror_word(word);
    if (found.count(partner)) return;
    // the partner is refined on its own rather than copied, which gives an
    // independent check on the pair's period and exponent
    const PeriodicOrbit image = mirror_orbit(orbit);
    OrbitGuess g{image.start(), image.period, image.nodes};
    try {
      PeriodicOrbit refined = refine_orbit(g, p, budget.refine);
      if (refined.symbol == partner) found.emplace(partner, std::move(refined));
    } catch (const Error&) {
    }
  };

  for (int run = 0; run < budget.max_runs && !missing().empty(); ++run) {
    const SearchRun sr = make_search_run(p, budget, run);
    for (const std::string& word : missing()) {
      if (found.count(word)) continue;
      const int n = static_cast<int>(word.size());
      struct Candidate {
        double dist;
        std::size_t k;
      };
      std::vector<Candidate> cands;
      for (std::size_t k = 0; k + static_cast<std::size_t>(n) < sr.peaks.size(); ++k) {
        if (canonical_rotation(sr.symbols.substr(k, static_cast<std::size_t>(n))) != word) continue;
        const State& a = sr.traj.samples[peak_sample(sr.peaks[k])];
        const State& b = sr.traj.samples[peak_sample(sr.peaks[k + static_cast<std::size_t>(n)])];
        cands.push_back({(b - a).norm(), k});
      }
      std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        return a.dist < b.dist || (a.dist == b.dist && a.k < b.k);
      });
      int tried = 0;
      std::set<std::size_t> used;
      for (const Candidate& c : cands) {
        if (tried >= budget.candidates_per_word || found.count(word)) break;
        // skip windows overlapping one already tried: same shadowing episode
        bool overlap = false;
        for (std::size_t u : used) {
          if ((c.k > u ? c.k - u : u - c.k) < static_cast<std::size_t>(n)) overlap = true;
        }
        if (overlap) continue;
        used.insert(c.k);
        ++tried;
        try {
          const PeriodicOrbit orbit = refine_orbit(guess_from_run(sr, c.k, n), p, budget.refine);
          accept(orbit, orbit.symbol);
        } catch (const Error&) {
        }
      }
    }
  }

  const std::vector<std::string> still_missing = missing();
  if (!still_missing.empty()) {
    std::string list;
    for (const auto& w : still_missing) list += (list.empty() ? "" : ",") + w;
    fail(ErrorCode::kIncompleteLibrary, "search budget exhausted; missing words: " + list);
  }
  OrbitLibrary lib;
  for (const std::string& w : targets) lib.orbits.push_back(found.at(w));
  return lib;
}

// -- persistence ------------------------------------------------------------

void save_library(const OrbitLibrary& lib, std::ostream& out) {
  using textio::fmt17;
  out << "ORBITLIB v1 count=" << lib.size() << '\n';
  for (const PeriodicOrbit& o : lib.orbits) {
    out << "# id=" << o.id << " T=" << fmt17(o.period) << " sym=" << o.symbol
        << " lam=" << fmt17(o.floquet_exponent) << " mult=" << fmt17(o.multipliers[0])
        << ',' << fmt17(o.multipliers[1]) << ',' << fmt17(o.multipliers[2]) << '\n';
    for (std::size_t i = 0; i < o.nodes.size(); ++i) {
      out << fmt17(o.node_times[i]) << ' ' << fmt17(o.nodes[i].x()) << ' '
          << fmt17(o.nodes[i].y()) << ' ' << fmt17(o.nodes[i].z()) << '\n';
    }
  }
}

void save_library(const OrbitLibrary& lib, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot open " + path + " for writing");
  save_library(lib, out);
  if (!out) fail(ErrorCode::kIo, "write to " + path + " failed");
}

OrbitLibrary load_library(std::istream& in) {
  using namespace textio;
  std::string line;
  int line_no = 0;
  long long expected = -1;
  OrbitLibrary lib;
  PeriodicOrbit* current = nullptr;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (expected < 0) {
      expect_header(tokens, "ORBITLIB", "v1", line_no);
      expected = parse_int(field(parse_fields(tokens, 2, line_no), "count", line_no), line_no);
      if (expected < 0) parse_error(line_no, "negative count");
      continue;
    }
    if (tokens[0] == "#") {
      const auto f = parse_fields(tokens, 1, line_no);
      PeriodicOrbit o;
      o.id = field(f, "id", line_no);
      o.period = parse_double(field(f, "T", line_no), line_no);
      o.symbol = field(f, "sym", line_no);
      o.floquet_exponent = parse_double(field(f, "lam", line_no), line_no);
      const auto mult = split(field(f, "mult", line_no), ',');
      if (mult.size() != 3) parse_error(line_no, "mult needs three values");
      for (std::size_t i = 0; i < 3; ++i) o.multipliers[i] = parse_double(mult[i], line_no);
      if (!(o.period > 0.0)) parse_error(line_no, "period must be positive");
      lib.orbits.push_back(std::move(o));
      current = &lib.orbits.back();
      continue;
    }
    if (current == nullptr) parse_error(line_no, "node line before any orbit header");
    if (tokens.size() != 4) parse_error(line_no, "node line needs 't x y z'");
    current->node_times.push_back(parse_double(tokens[0], line_no));
    current->nodes.emplace_back(parse_double(tokens[1], line_no), parse_double(tokens[2], line_no),
                                parse_double(tokens[3], line_no));
  }
  if (expected < 0) parse_error(line_no + 1, "missing ORBITLIB header");
  if (static_cast<long long>(lib.size()) != expected) {
    parse_error(line_no, "expected " + std::to_string(expected) + " orbits, found " +
                             std::to_string(lib.size()) + " (truncated file?)");
  }
  for (const PeriodicOrbit& o : lib.orbits) {
    if (o.nodes.empty()) parse_error(line_no, "orbit " + o.id + " has no nodes");
  }
  return lib;
}

OrbitLibrary load_library(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path);
  return load_library(in);
}

}  // namespace lsw
