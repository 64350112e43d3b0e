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
#include <string>
#include <vector>

#include "lsw/orbits.hpp"
#include "lsw/weights.hpp"

namespace lsw {

/// How |det(1 - M_p^r)| is evaluated.
enum class DeterminantMode {
  kLeadingExponent,  // |1 - exp(r T_p lambda_p)|
  kMultipliers,      // |1 - L_u^r| |1 - L_s^r| from stored multiplier magnitudes
};

struct Cycle {
  std::string id;
  int length = 0;  // symbol length n_p
  double period = 0.0;
  double exponent = 0.0;   // leading Floquet exponent lambda_p
  double expanding = 0.0;  // multiplier magnitudes, used in kMultipliers mode
  double contracting = 0.0;
};

struct CycleData {
  std::vector<Cycle> cycles;

  std::size_t size() const { return cycles.size(); }
  static CycleData from_library(const OrbitLibrary& lib);
  void validate() const;
};

struct PotOptions {
  DeterminantMode determinant = DeterminantMode::kLeadingExponent;
  double root_tol = 1e-8;
  int max_iterations = 100;
  double min_derivative = 1e-14;
};

/// C_1..C_n (index 0 holds C_1).  `a` holds the per-cycle averages <a>_p and
/// may be empty when beta == 0.
std::vector<double> trace_coefficients(const CycleData& cycles, int n, double s,
                                       double beta, const std::vector<double>& a,
                                       const PotOptions& opt = {});

struct SpectralState {
  int n = 0;
  double s = 0.0;
  double beta = 0.0;
  std::vector<double> C, Q;
  double F = 1.0;
  double dF_ds = 0.0;
  double dF_dbeta = 0.0;
  Eigen::VectorXd d2F_dmu_dbeta;  // per cycle
};

SpectralState spectral_determinant(const CycleData& cycles, int n, double s,
                                   double beta, const std::vector<double>& a,
                                   const PotOptions& opt = {});

struct RootResult {
  double s0 = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

/// Newton iteration on F_n(s, 0) from s = 0.
RootResult newton_root(const CycleData& cycles, int n, const PotOptions& opt = {});

/// w_p = -d_mu_p d_beta F_n / d_s F_n at (s0, 0).
WeightVector pot_weights(const CycleData& cycles, int n, const PotOptions& opt = {});

/// -d_beta F_n / d_s F_n at (s0, 0).
double pot_average(const CycleData& cycles, int n, const std::vector<double>& a,
                   const PotOptions& opt = {});

/// If the first `P` orbits of `lib` are exactly the primitive words up to some
/// length l, returns l; otherwise throws kIncompleteLibrary with
/// "not a complete library size".
int complete_truncation(const OrbitLibrary& lib, std::size_t P);

}  // namespace lsw
