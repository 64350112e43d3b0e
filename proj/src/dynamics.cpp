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

#include "lsw/dynamics.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "lsw/error.hpp"

namespace lsw {

namespace {

using Vec3 = Eigen::Matrix<double, 3, 1>;
using Vec12 = Eigen::Matrix<double, 12, 1>;

struct LorenzRhs {
  Params p;
  void operator()(const Vec3& y, Vec3& dy) const {
    dy[0] = p.sigma * (y[1] - y[0]);
    dy[1] = y[0] * (p.rho - y[2]) - y[1];
    dy[2] = y[0] * y[1] - p.beta * y[2];
  }
};

// State in the first three slots, deviation matrix column-major in the rest.
struct TangentRhs {
  Params p;
  void operator()(const Vec12& y, Vec12& dy) const {
    const double x = y[0], yy = y[1], z = y[2];
    dy[0] = p.sigma * (yy - x);
    dy[1] = x * (p.rho - z) - yy;
    dy[2] = x * yy - p.beta * z;
    for (int c = 0; c < 3; ++c) {
      const double m0 = y[3 + 3 * c], m1 = y[4 + 3 * c], m2 = y[5 + 3 * c];
      dy[3 + 3 * c] = p.sigma * (m1 - m0);
      dy[4 + 3 * c] = (p.rho - z) * m0 - m1 - x * m2;
      dy[5 + 3 * c] = yy * m0 + x * m1 - p.beta * m2;
    }
  }
};

void check_finite(const State& s) {
  require(s.allFinite(), "state must be finite");
}

Vec12 pack(const State& s, const Matrix3& m) {
  Vec12 y;
  y.head<3>() = s;
  y.tail<9>() = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(m.data());
  return y;
}

TangentBundle unpack(const Vec12& y) {
  TangentBundle out;
  out.state = y.head<3>();
  out.deviation = Eigen::Map<const Matrix3>(y.data() + 3);
  return out;
}

}  // namespace

void Params::validate() const {
  require(sigma > 0.0 && rho > 0.0 && beta > 0.0,
          "Lorenz parameters must be strictly positive");
}

State vector_field(const State& s, const Params& p) {
  State d;
  LorenzRhs{p}(s, d);
  return d;
}

Matrix3 jacobian(const State& s, const Params& p) {
  Matrix3 j;
  j << -p.sigma, p.sigma, 0.0,
       p.rho - s.z(), -1.0, -s.x(),
       s.y(), s.x(), -p.beta;
  return j;
}

Trajectory integrate(const State& s0, const Params& p, double t_span,
                     double dt_out, const IntegratorOptions& opt) {
  check_finite(s0);
  require(t_span >= 0.0, "t_span must be non-negative");
  require(dt_out > 0.0, "dt_out must be positive");
  const auto count = static_cast<std::size_t>(std::floor(t_span / dt_out + 1e-9)) + 1;

  Trajectory traj;
  traj.t0 = 0.0;
  traj.dt = dt_out;
  traj.samples.reserve(count);
  traj.samples.push_back(s0);
  if (count == 1) return traj;

  DormandPrince5<3, LorenzRhs> stepper(LorenzRhs{p}, opt.tol);
  stepper.reset(0.0, s0);
  const double t_end = dt_out * static_cast<double>(count - 1);
  std::size_t next = 1;
  while (next < count) {
    stepper.step(t_end);
    while (next < count && dt_out * static_cast<double>(next) <= stepper.t()) {
      const double tn = dt_out * static_cast<double>(next);
      traj.samples.push_back(tn == stepper.t() ? State(stepper.y())
                                               : State(stepper.dense(tn)));
      ++next;
    }
  }
  return traj;
}

State flow(const State& s0, const Params& p, double t_span,
           const IntegratorOptions& opt) {
  check_finite(s0);
  require(t_span >= 0.0, "t_span must be non-negative");
  if (t_span == 0.0) return s0;
  DormandPrince5<3, LorenzRhs> stepper(LorenzRhs{p}, opt.tol);
  stepper.reset(0.0, s0);
  stepper.advance_to(t_span);
  return stepper.y();
}

TangentBundle integrate_with_tangent(const State& s0, const Params& p,
                                     double t_span,
                                     const IntegratorOptions& opt) {
  check_finite(s0);
  require(t_span >= 0.0, "t_span must be non-negative");
  if (t_span == 0.0) return TangentBundle{s0, Matrix3::Identity()};
  DormandPrince5<12, TangentRhs> stepper(TangentRhs{p}, opt.tol);
  stepper.reset(0.0, pack(s0, Matrix3::Identity()));
  stepper.advance_to(t_span);
  return unpack(stepper.y());
}

State attractor_state(const Params& p, std::uint64_t seed, double transient,
                      const IntegratorOptions& opt) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(-5.0, 5.0);
  State s0(1.0, 1.0, 1.0);
  for (int i = 0; i < 3; ++i) s0[i] += noise(rng);
  return flow(s0, p, transient, opt);
}

std::array<double, 3> lyapunov_benettin(const Params& p, double t_total,
                                        double t_renorm, std::uint64_t seed,
                                        const IntegratorOptions& opt) {
  p.validate();
  require(t_renorm > 0.0 && t_total >= t_renorm,
          "need t_total >= t_renorm > 0");
  const State start = attractor_state(p, seed, 25.0, opt);

  DormandPrince5<12, TangentRhs> stepper(TangentRhs{p}, opt.tol);
  stepper.reset(0.0, pack(start, Matrix3::Identity()));
  const auto blocks = static_cast<long>(std::floor(t_total / t_renorm + 1e-9));
  Eigen::Vector3d log_sum = Eigen::Vector3d::Zero();
  for (long k = 1; k <= blocks; ++k) {
    stepper.advance_to(t_renorm * static_cast<double>(k));
    TangentBundle tb = unpack(stepper.y());
    Eigen::HouseholderQR<Matrix3> qr(tb.deviation);
    Matrix3 q = qr.householderQ();
    const Matrix3 r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < 3; ++i) {
      log_sum[i] += std::log(std::abs(r(i, i)));
      if (r(i, i) < 0.0) q.col(i) = -q.col(i);
    }
    stepper.reset(stepper.t(), pack(tb.state, q));
  }
  const double elapsed = t_renorm * static_cast<double>(blocks);
  std::array<double, 3> out{log_sum[0] / elapsed, log_sum[1] / elapsed,
                            log_sum[2] / elapsed};
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

}  // namespace lsw
