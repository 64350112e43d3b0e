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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lsw/dynamics.hpp"

namespace lsw {

/// Refined unstable periodic orbit, stored as multiple-shooting nodes.
struct PeriodicOrbit {
  std::string id;
  std::string symbol;  // canonical primitive word over {A, B}
  double period = 0.0;
  double floquet_exponent = 0.0;
  std::array<double, 3> multipliers{};  // |eigenvalues| of the monodromy, descending
  std::vector<double> node_times;       // offsets in [0, period)
  std::vector<State> nodes;

  const State& start() const { return nodes.front(); }
};

struct OrbitLibrary {
  std::vector<PeriodicOrbit> orbits;
  std::string ordering = "symbol-length";

  std::size_t size() const { return orbits.size(); }
};

// -- symbol words -----------------------------------------------------------

/// Lexicographically minimal rotation.
std::string canonical_rotation(const std::string& word);
bool is_primitive(const std::string& word);
/// A <-> B.
std::string swap_symbols(const std::string& word);
/// Canonical word of the mirror-image orbit.
std::string mirror_word(const std::string& word);
/// All canonical primitive words of length 2..l_max, ordered by length then
/// lexicographically.
std::vector<std::string> enumerate_primitive_words(int l_max);

/// Number of primitive binary necklaces of length n (Moebius formula).
long long primitive_necklace_count(int n);
/// Cumulative counts of orbits with symbol length 2..l_max.
std::vector<long long> complete_library_sizes(int l_max);

// -- search and refinement --------------------------------------------------

struct OrbitGuess {
  State state;
  double period = 0.0;
  /// Optional trajectory states at equally spaced times k*period/m used to
  /// seed the shooting nodes; when empty the nodes come from integrating
  /// `state`.
  std::vector<State> nodes;
};

std::vector<OrbitGuess> scan_recurrences(const Trajectory& traj, double eps,
                                         double t_min, double t_max);

struct RefineOptions {
  int nodes = 0;  // 0: max(8, 4 * number of z-maxima in the guess)
  int max_iterations = 60;
  int max_halvings = 10;
  double newton_tol = 1e-11;
  double closure_tol = 1e-8;
  IntegratorOptions integrator{Tolerance{1e-12, 1e-12}};
};

PeriodicOrbit refine_orbit(const OrbitGuess& guess, const Params& p,
                           const RefineOptions& opt = {});

struct FloquetData {
  double exponent = 0.0;
  std::array<double, 3> multipliers{};
};

FloquetData floquet(const PeriodicOrbit& orbit, const Params& p,
                    const IntegratorOptions& opt = {Tolerance{1e-12, 1e-12}});

/// One symbol per local maximum of z over a period: A when x > 0, B when x < 0.
std::string symbol_sequence(const PeriodicOrbit& orbit, const Params& p,
                            const IntegratorOptions& opt = {Tolerance{1e-12, 1e-12}});

/// ||Phi_T(node0) - node0|| by a single integration over the whole period.
double closure_residual(const PeriodicOrbit& orbit, const Params& p,
                        const IntegratorOptions& opt = {Tolerance{1e-12, 1e-12}});

/// One period on the grid t_k = k T / ceil(T / target_dt), k = 0..count-1.
std::vector<State> sample_orbit(const PeriodicOrbit& orbit, const Params& p,
                                double target_dt,
                                const IntegratorOptions& opt = {Tolerance{1e-12, 1e-12}});

/// Mirror image under (x, y, z) -> (-x, -y, z).
PeriodicOrbit mirror_orbit(const PeriodicOrbit& orbit);

struct SearchBudget {
  double search_time = 4000.0;  // length of each chaotic search run
  int max_runs = 6;
  int candidates_per_word = 40;
  std::uint64_t seed = 1;
  RefineOptions refine{};
};

/// All primitive orbits with symbol length 2..l_max, ordered by symbol length
/// then word.  Throws kIncompleteLibrary listing missing words.
OrbitLibrary build_complete_library(int l_max, const Params& p,
                                    const SearchBudget& budget = {});

// -- persistence ------------------------------------------------------------

void save_library(const OrbitLibrary& lib, std::ostream& out);
void save_library(const OrbitLibrary& lib, const std::string& path);
OrbitLibrary load_library(std::istream& in);
OrbitLibrary load_library(const std::string& path);

}  // namespace lsw
