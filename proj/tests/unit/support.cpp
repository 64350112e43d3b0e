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

#include "support.hpp"

#include <Eigen/QR>

namespace lsw::test {

Eigen::MatrixXd Gen::spd(int n, double cond) {
  const Eigen::MatrixXd q = matrix(n, n).householderQr().householderQ();
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d[i] = std::pow(cond, -static_cast<double>(i) / std::max(n - 1, 1));
  return q * d.asDiagonal() * q.transpose();
}

Eigen::VectorXd Gen::simplex_point(int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = -std::log(uniform(1e-12, 1.0));
  return v / v.sum();
}

const OrbitLibrary& library7() {
  static const OrbitLibrary lib = build_complete_library(7, Params{});
  return lib;
}

OrbitLibrary library_prefix(std::size_t P) {
  OrbitLibrary out;
  out.orbits.assign(library7().orbits.begin(), library7().orbits.begin() + static_cast<long>(P));
  return out;
}

State rk4_flow(const State& s0, const Params& p, double t, double h) {
  const auto steps = static_cast<long>(std::ceil(t / h));
  const double dt = t / static_cast<double>(steps);
  auto f = [&](const State& s) {
    return State(p.sigma * (s.y() - s.x()), s.x() * (p.rho - s.z()) - s.y(), s.x() * s.y() - p.beta * s.z());
  };
  State s = s0;
  for (long i = 0; i < steps; ++i) {
    const State k1 = f(s);
    const State k2 = f(s + 0.5 * dt * k1);
    const State k3 = f(s + 0.5 * dt * k2);
    const State k4 = f(s + dt * k3);
    s += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return s;
}

}  // namespace lsw::test
