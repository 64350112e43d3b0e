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
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lsw/dynamics.hpp"
#include "lsw/orbits.hpp"

namespace lsw::test {

/// Hand-rolled generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  State state(double scale = 20.0) {
    return State(uniform(-scale, scale), uniform(-scale, scale), uniform(0.0, 2.0 * scale));
  }
  Eigen::VectorXd vector(int n, double lo = -1.0, double hi = 1.0) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }
  Eigen::MatrixXd matrix(int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) m(i, j) = uniform(-1.0, 1.0);
    }
    return m;
  }
  /// Symmetric positive definite with condition number about `cond`.
  Eigen::MatrixXd spd(int n, double cond = 100.0);
  Eigen::VectorXd simplex_point(int n);
  std::string word(int length) {
    std::string w;
    for (int i = 0; i < length; ++i) w.push_back(integer(0, 1) ? 'A' : 'B');
    return w;
  }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Complete library up to symbol length 7 (39 orbits), built once per process.
const OrbitLibrary& library7();
/// First P orbits of library7().
OrbitLibrary library_prefix(std::size_t P);

/// Fixed-step classical RK4, independent of the adaptive integrator.
State rk4_flow(const State& s0, const Params& p, double t, double h = 1e-4);

}  // namespace lsw::test
