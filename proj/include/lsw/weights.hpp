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
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "lsw/kernel.hpp"

namespace lsw {

enum class WeightMethod { kLsw, kNnls, kConstrained, kMarkov, kUniform, kPot };

std::string_view method_name(WeightMethod m);
WeightMethod parse_method(std::string_view name);

struct Provenance {
  long long P = 0;
  long long r = 0;
  long long s = 0;
  long long N = 0;
  double theta = std::numeric_limits<double>::quiet_NaN();
  double alpha = std::numeric_limits<double>::quiet_NaN();
};

struct WeightVector {
  Eigen::VectorXd w;
  WeightMethod method = WeightMethod::kUniform;
  MeasureKind kind = MeasureKind::kOrbit;  // what the weights refer to
  Provenance provenance;

  // diagnostics, not persisted
  Eigen::VectorXd raw;  // solver output before normalization (nnls)
  long long support = 0;
  bool converged = true;
  long long iterations = 0;

  std::size_t size() const { return static_cast<std::size_t>(w.size()); }
  /// Sum in index order.
  double total() const;
};

/// Rescale to unit sum, then nudge the largest entry until the index-order
/// floating-point sum is exactly 1.
void normalize_exact(Eigen::VectorXd& w);

/// (A + alpha I) w = b by Cholesky with one refinement sweep.
WeightVector solve_tikhonov(const CorrelationSystem& sys, double alpha = 1e-10);

struct NnlsResult {
  Eigen::VectorXd x;
  Eigen::VectorXd dual;  // A^T (b - A x); half the negative gradient of |Ax-b|^2
  int iterations = 0;
};

/// Lawson-Hanson active-set non-negative least squares, min |Ax - b| s.t. x >= 0.
NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                int max_iterations = 0, double tol = -1.0);

/// Lawson-Hanson on |Aw - b|^2 followed by division by the sum.
WeightVector solve_nnls_normalized(const CorrelationSystem& sys);

/// Euclidean projection onto the probability simplex.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

struct ConstrainedOptions {
  long long max_iterations = 100000;
  double tol = 1e-10;  // projected-gradient norm
  bool record_objective = false;
};

struct ConstrainedResult {
  WeightVector weights;
  std::vector<double> objective;  // per iteration, when recorded
};

/// Projected gradient descent of |Aw - b|^2 over the probability simplex
/// from `w0`.  The result depends on the starting point.
ConstrainedResult solve_constrained(const CorrelationSystem& sys,
                                    const Eigen::VectorXd& w0,
                                    const ConstrainedOptions& opt = {});

/// Fraction of the first N chaotic samples whose nearest stored reference
/// point belongs to measure p.
WeightVector markov_weights(const std::vector<ReferenceMeasure>& measures,
                            const Trajectory& chaotic, std::size_t N);

/// Markov weights from precomputed per-sample nearest-measure labels.
WeightVector markov_from_labels(const std::vector<int>& labels, std::size_t P);
/// Markov weights from per-measure visit counts.
WeightVector markov_from_counts(const std::vector<long long>& counts);

WeightVector uniform_weights(std::size_t P);

void save_weights(const WeightVector& w, std::ostream& out);
void save_weights(const WeightVector& w, const std::string& path);
WeightVector load_weights(std::istream& in);
WeightVector load_weights(const std::string& path);

}  // namespace lsw
