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
#include <array>
#include <cstdint>
#include <vector>

#include "lsw/dopri5.hpp"

namespace lsw {

using State = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

/// Lorenz-1963 parameters.
struct Params {
  double sigma = 10.0;
  double rho = 28.0;
  double beta = 8.0 / 3.0;

  void validate() const;
  /// Constant phase-space divergence, tr J = -(sigma + 1 + beta).
  double divergence() const { return -(sigma + 1.0 + beta); }

  friend bool operator==(const Params&, const Params&) = default;
};

State vector_field(const State& s, const Params& p);
Matrix3 jacobian(const State& s, const Params& p);

/// The discrete symmetry (x, y, z) -> (-x, -y, z) of the Lorenz equations.
inline State mirror(const State& s) { return {-s.x(), -s.y(), s.z()}; }

/// Uniformly sampled trajectory segment.
struct Trajectory {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<State> samples;

  std::size_t size() const { return samples.size(); }
  double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
};

/// State together with the linearized flow map accumulated from identity.
struct TangentBundle {
  State state;
  Matrix3 deviation = Matrix3::Identity();
};

struct IntegratorOptions {
  Tolerance tol{};
};

/// Integrate from `s0` over `t_span`, sampled every `dt_out` by dense output.
/// The returned trajectory has floor(t_span/dt_out + 1e-9) + 1 samples.
Trajectory integrate(const State& s0, const Params& p, double t_span,
                     double dt_out, const IntegratorOptions& opt = {});

/// Endpoint of the flow after exactly `t_span` (no dense output).
State flow(const State& s0, const Params& p, double t_span,
           const IntegratorOptions& opt = {});

/// Flow jointly with the 3x3 deviation matrix as one 12-dimensional system.
TangentBundle integrate_with_tangent(const State& s0, const Params& p,
                                     double t_span,
                                     const IntegratorOptions& opt = {});

/// Point on the attractor: (1,1,1) plus seeded uniform noise in [-5,5]^3,
/// then `transient` time units of integration.
State attractor_state(const Params& p, std::uint64_t seed,
                      double transient = 25.0,
                      const IntegratorOptions& opt = {});

/// Benettin estimate of the Lyapunov spectrum, sorted descending.  The
/// tangent frame is re-orthonormalized by QR every `t_renorm` time units after
/// a 25-unit transient.
std::array<double, 3> lyapunov_benettin(const Params& p, double t_total,
                                        double t_renorm, std::uint64_t seed,
                                        const IntegratorOptions& opt = {});

}  // namespace lsw
