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
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lsw/measures.hpp"

namespace lsw {

enum class KernelMode {
  kGaussian,     // base kernel exp(-|x-y|^2 / 2 theta), induced exp(-|x-y|^2 / 4 theta)
  kAtomOverlap,  // theta -> 0 limit on discrete measures: induced kernel [x == y]
};

/// Kernel width and convention.  The (pi theta)^{d/2} prefactor of the exact
/// Gaussian convolution is dropped for both A and b.
struct KernelConfig {
  double theta = 100.0;
  KernelMode mode = KernelMode::kGaussian;

  void validate() const;
};

double gaussian_kernel(const State& x, const State& y, double theta);
/// k^2, the self-convolution of the base kernel.
double induced_kernel(const State& x, const State& y, const KernelConfig& cfg);

/// A_pq: double average of the induced kernel over both measures.
double correlation_entry(const ReferenceMeasure& mp, const ReferenceMeasure& mq,
                         const KernelConfig& cfg);
/// a_p(x): average of the induced kernel over measure p.
double kernel_observable(const ReferenceMeasure& mp, const State& x,
                         const KernelConfig& cfg);

Eigen::MatrixXd correlation_matrix(const std::vector<ReferenceMeasure>& measures,
                                   const KernelConfig& cfg);

/// All reference points of a measure list in one structure-of-arrays buffer,
/// so a chaotic sample can be scored against every measure in one pass.
class MeasureCloud {
 public:
  explicit MeasureCloud(const std::vector<ReferenceMeasure>& measures);

  std::size_t measure_count() const { return offsets_.size() - 1; }
  std::size_t point_count() const { return x_.size(); }

  /// Per measure: the kernel observable a_p(x) (if `kernel` non-null) and the
  /// squared distance from x to the nearest stored point (if `nearest_d2`
  /// non-null).
  void evaluate(const State& x, const KernelConfig& cfg, double* kernel,
                double* nearest_d2) const;

 private:
  std::vector<double> x_, y_, z_, w_;
  std::vector<std::size_t> offsets_;
};

/// Kernel-weighted correlation system A w = b.
struct CorrelationSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  double theta = 0.0;
  long long N = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> ids;

  std::size_t size() const { return static_cast<std::size_t>(b.size()); }
  /// Sub-system restricted to `indices`, in that order.
  CorrelationSystem subset(const std::vector<std::size_t>& indices) const;
};

/// b_q = (1/N) sum_{n<N} a_q(x_n) over the first N chaotic samples.
Eigen::VectorXd kernel_averages(const std::vector<ReferenceMeasure>& measures,
                                const Trajectory& chaotic, const KernelConfig& cfg,
                                std::size_t N);

CorrelationSystem build_system(const std::vector<ReferenceMeasure>& measures,
                               const Trajectory& chaotic, const KernelConfig& cfg,
                               std::size_t N, std::uint64_t seed = 0);

/// Symmetry, (0,1] bounds, Cauchy-Schwarz and PSD checks; returns an empty
/// string when all hold, otherwise a description of the first violation.
std::string check_correlation_matrix(const Eigen::MatrixXd& A);

struct ThetaScanPoint {
  double theta = 0.0;
  double distance_ones = 0.0;      // ||A - J||_F
  double distance_identity = 0.0;  // ||A - I||_F
};

struct ThetaScan {
  std::vector<ThetaScanPoint> points;
  double theta_star = 0.0;  // smallest grid theta minimizing the gap
};

ThetaScan theta_scan(const std::vector<ReferenceMeasure>& measures,
                     const std::vector<double>& theta_grid);

/// "lo:hi:logK" (K log-spaced values) or a comma-separated list.
std::vector<double> parse_theta_grid(const std::string& spec);

void save_system(const CorrelationSystem& sys, std::ostream& out);
void save_system(const CorrelationSystem& sys, const std::string& path);
CorrelationSystem load_system(std::istream& in);
CorrelationSystem load_system(const std::string& path);

}  // namespace lsw
