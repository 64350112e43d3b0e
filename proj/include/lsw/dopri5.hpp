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
#include <algorithm>
#include <cmath>
#include <string>

#include "lsw/error.hpp"

namespace lsw {

struct Tolerance {
  double absolute = 1e-10;
  double relative = 1e-10;
};

/// Embedded Runge-Kutta 5(4) of Dormand and Prince with the standard
/// 4th-order continuous extension over the last accepted step.
///
/// `Rhs` is any callable `void(const Vec& y, Vec& dydt)`.  The stepper is
/// FSAL: the stage-7 derivative of an accepted step is reused as stage 1
/// of the next.
template <int Dim, class Rhs>
class DormandPrince5 {
 public:
  using Vec = Eigen::Matrix<double, Dim, 1>;

  DormandPrince5(Rhs rhs, Tolerance tol) : rhs_(std::move(rhs)), tol_(tol) {}

  void reset(double t, const Vec& y) {
    t_ = t;
    y_ = y;
    rhs_(y_, k1_);
    if (h_ <= 0.0) h_ = initial_step();
    t_old_ = t_;
    y_old_ = y_;
    h_last_ = 0.0;
  }

  double t() const { return t_; }
  const Vec& y() const { return y_; }
  const Vec& dydt() const { return k1_; }
  double t_previous() const { return t_old_; }
  long steps() const { return accepted_; }

  /// Advance by one accepted step, never past `t_limit`.
  void step(double t_limit) {
    bool rejected_before = false;
    for (;;) {
      double h = std::min(h_, t_limit - t_);
      const bool hits_limit = (h >= t_limit - t_);
      if (!(h > 0.0) || (!hits_limit && h < 1e-14 * std::max(1.0, std::abs(t_)))) {
        fail(ErrorCode::kIntegrationFailure,
             "step size underflow at t=" + std::to_string(t_));
      }
      attempt(h);
      const double err = error_norm();
      if (!std::isfinite(err)) {
        h_ = 0.2 * h;
        rejected_before = true;
        continue;
      }
      if (err <= 1.0) {
        double fac = err == 0.0 ? kFacMax : 0.9 * std::pow(err, -0.2);
        fac = std::clamp(fac, kFacMin, rejected_before ? 1.0 : kFacMax);
        t_old_ = t_;
        y_old_ = y_;
        k1_old_ = k1_;
        y_ = y_new_;
        t_ = hits_limit ? t_limit : t_ + h;
        h_last_ = h;
        build_dense(h);
        k1_ = k7_;
        // a step truncated to land on t_limit says little about the natural
        // step size, so keep the previous proposal in that case
        if (!hits_limit || h * fac < h_) h_ = h * fac;
        ++accepted_;
        if (accepted_ > kMaxSteps) {
          fail(ErrorCode::kIntegrationFailure, "step budget exhausted");
        }
        return;
      }
      rejected_before = true;
      h_ = h * std::max(kFacMin, 0.9 * std::pow(err, -0.2));
    }
  }

  /// Step until exactly `t_end`.
  void advance_to(double t_end) {
    while (t_ < t_end) step(t_end);
  }

  /// Continuous extension over [t_previous(), t()].
  Vec dense(double t) const {
    if (h_last_ == 0.0) return y_;
    const double s = (t - t_old_) / h_last_;
    const double s1 = 1.0 - s;
    return r1_ + s * (r2_ + s1 * (r3_ + s * (r4_ + s1 * r5_)));
  }

 private:
  static constexpr double kFacMin = 0.2;
  static constexpr double kFacMax = 5.0;
  static constexpr long kMaxSteps = 4'000'000'000L;

  double initial_step() const {
    const double scale = tol_.absolute + tol_.relative * y_.cwiseAbs().maxCoeff();
    const double d0 = y_.cwiseAbs().maxCoeff() + 1e-300;
    const double d1 = k1_.cwiseAbs().maxCoeff() + 1e-300;
    double h = 0.01 * d0 / d1;
    h *= std::pow(scale / (d0 + scale), 0.2);
    return std::clamp(h, 1e-8, 1e-2);
  }

  void attempt(double h) {
    Vec tmp = y_ + h * (0.2 * k1_);
    rhs_(tmp, k2_);
    tmp = y_ + h * (3.0 / 40.0 * k1_ + 9.0 / 40.0 * k2_);
    rhs_(tmp, k3_);
    tmp = y_ + h * (44.0 / 45.0 * k1_ - 56.0 / 15.0 * k2_ + 32.0 / 9.0 * k3_);
    rhs_(tmp, k4_);
    tmp = y_ + h * (19372.0 / 6561.0 * k1_ - 25360.0 / 2187.0 * k2_ +
                    64448.0 / 6561.0 * k3_ - 212.0 / 729.0 * k4_);
    rhs_(tmp, k5_);
    tmp = y_ + h * (9017.0 / 3168.0 * k1_ - 355.0 / 33.0 * k2_ +
                    46732.0 / 5247.0 * k3_ + 49.0 / 176.0 * k4_ -
                    5103.0 / 18656.0 * k5_);
    rhs_(tmp, k6_);
    y_new_ = y_ + h * (35.0 / 384.0 * k1_ + 500.0 / 1113.0 * k3_ +
                       125.0 / 192.0 * k4_ - 2187.0 / 6784.0 * k5_ +
                       11.0 / 84.0 * k6_);
    rhs_(y_new_, k7_);
    err_ = h * (71.0 / 57600.0 * k1_ - 71.0 / 16695.0 * k3_ +
                71.0 / 1920.0 * k4_ - 17253.0 / 339200.0 * k5_ +
                22.0 / 525.0 * k6_ - 1.0 / 40.0 * k7_);
  }

  double error_norm() const {
    double sum = 0.0;
    for (int i = 0; i < y_.size(); ++i) {
      const double sc = tol_.absolute +
                        tol_.relative * std::max(std::abs(y_[i]), std::abs(y_new_[i]));
      const double r = err_[i] / sc;
      sum += r * r;
    }
    return std::sqrt(sum / static_cast<double>(y_.size()));
  }

  void build_dense(double h) {
    constexpr double d1 = -12715105075.0 / 11282082432.0;
    constexpr double d3 = 87487479700.0 / 32700410799.0;
    constexpr double d4 = -10690763975.0 / 1880347072.0;
    constexpr double d5 = 701980252875.0 / 199316789632.0;
    constexpr double d6 = -1453857185.0 / 822651844.0;
    constexpr double d7 = 69997945.0 / 29380423.0;
    const Vec diff = y_ - y_old_;
    const Vec bspl = h * k1_old_ - diff;
    r1_ = y_old_;
    r2_ = diff;
    r3_ = bspl;
    r4_ = diff - h * k7_ - bspl;
    r5_ = h * (d1 * k1_old_ + d3 * k3_ + d4 * k4_ + d5 * k5_ + d6 * k6_ + d7 * k7_);
  }

  Rhs rhs_;
  Tolerance tol_;
  double t_ = 0.0;
  double t_old_ = 0.0;
  double h_ = 0.0;
  double h_last_ = 0.0;
  long accepted_ = 0;
  Vec y_, y_old_, y_new_, err_;
  Vec k1_, k1_old_, k2_, k3_, k4_, k5_, k6_, k7_;
  Vec r1_, r2_, r3_, r4_, r5_;
};

}  // namespace lsw
