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

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "lsw/measures.hpp"
#include "lsw/orbits.hpp"
#include "lsw/weights.hpp"

namespace lsw {

/// Sweep configuration.  Text form is flat `key = value` lines; `#` starts a
/// comment.  Lists are comma separated.
struct ExperimentConfig {
  std::vector<WeightMethod> methods{WeightMethod::kPot, WeightMethod::kUniform,
                                    WeightMethod::kMarkov, WeightMethod::kLsw,
                                    WeightMethod::kNnls};
  std::vector<MeasureKind> kinds{MeasureKind::kOrbit, MeasureKind::kSnippet};
  std::vector<std::size_t> P;  // empty: complete-library sizes up to the library size
  int R = 32;                  // permutations, r = 1 is the unpermuted order
  int S = 16;                  // chaotic seeds
  std::vector<std::size_t> N{100, 1000, 10000, 100000};
  double dt = 2.0;
  double theta = 100.0;
  double alpha = 1e-10;
  int truth_seeds = 0;          // 0: same as S
  std::size_t truth_samples = 0;  // 0: largest N
  double lyapunov_time = 20000.0;
  double lyapunov_renorm = 1.0;
  bool symmetric_truth = true;  // odd monomials have exact mean 0, E[1] = 1
  double tol = 1e-10;           // integrator tolerance for chaotic runs
  std::string library;
  std::string snippets;
  std::string output = "sweep-out";
  std::uint64_t seed = 1;
  int jobs = 0;  // 0: hardware concurrency
  Params params;

  static ExperimentConfig desk();
  static ExperimentConfig paper_scale();

  /// Sets one key; throws kPrecondition for unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  void load(std::istream& in);
  void load(const std::string& path);
  /// Canonical text form, stable across runs.
  std::string to_text() const;
  void validate() const;

  int effective_truth_seeds() const { return truth_seeds > 0 ? truth_seeds : S; }
  std::size_t effective_truth_samples() const;
  int effective_jobs() const;
};

struct ObservableTruth {
  std::string tag;
  double mean = 0.0;
  double variance = 0.0;
  double standard_error = 0.0;  // spread of per-seed means
};

struct GroundTruth {
  std::vector<ObservableTruth> observables;  // basis order
  std::vector<std::vector<double>> seed_means;  // [seed][observable]
  double lyapunov = 0.0;
  std::vector<double> lyapunov_spectrum;
  long long samples_per_seed = 0;

  const ObservableTruth& at(const std::string& tag) const;
  /// Standard error of sum_k c_k E[a_k] from the spread of per-seed means.
  double combined_standard_error(const std::map<std::string, double>& coefficients) const;
};

/// Running mean / M2 over one chaotic run, per basis observable.
struct MomentAccumulator {
  long long n = 0;
  std::vector<double> mean, m2;

  MomentAccumulator();
  void add(const State& x);
  void merge(const MomentAccumulator& other);
};

/// Pooled basis averages over S independent runs of N samples at spacing dt,
/// plus a Benettin exponent.  Seeds come from the "truth-seeds" sub-stream.
GroundTruth reference_truth(const Params& p, int S, std::size_t N, double dt,
                            std::uint64_t master_seed, double lyapunov_time = 20000.0,
                            double lyapunov_renorm = 1.0, int jobs = 1,
                            const IntegratorOptions& opt = {});

/// |E_true - E_hat| / sqrt(var), with var == 0 treated as 1.
double relative_error(double e_true, double e_hat, double variance);

struct ResultRow {
  WeightMethod method = WeightMethod::kLsw;
  MeasureKind kind = MeasureKind::kOrbit;
  long long P = 0, r = 0, s = 0, N = 0;
  std::string observable;
  double E_true = 0.0, E_hat = 0.0, E_rel = 0.0;
};

/// max over the ten basis observables; kPrecondition if any is missing.
double max_error(const std::vector<ResultRow>& rows);

/// Index order of the library under permutation r: identity for r = 1,
/// otherwise a seeded Fisher-Yates shuffle.
std::vector<std::size_t> permutation(std::size_t P, int r, std::uint64_t master_seed);
OrbitLibrary permuted_library(const OrbitLibrary& lib, int r, std::uint64_t master_seed);

struct SummaryRow {
  WeightMethod method = WeightMethod::kLsw;
  MeasureKind kind = MeasureKind::kOrbit;
  long long P = 0, N = 0;
  std::string observable;  // basis tag, "lyapunov" or "Emax"
  double median = 0.0, q25 = 0.0, q75 = 0.0, mean = 0.0;
  std::size_t count = 0;
};

/// One weighting computed during a sweep.
struct CellRecord {
  WeightMethod method = WeightMethod::kLsw;
  MeasureKind kind = MeasureKind::kOrbit;
  long long P = 0, r = 0, s = 0, N = 0;
  double weight_sum = 0.0;
  long long support = 0;
  bool converged = true;
  std::string skipped;  // reason, empty when computed
};

struct SweepResult {
  std::vector<ResultRow> rows;
  std::vector<SummaryRow> summary;
  std::vector<CellRecord> cells;
  GroundTruth truth;
};

/// Linear-interpolation quantile of unsorted values.
double quantile(std::vector<double> values, double q);

/// Median / IQR over (r, s) per (method, kind, P, N, observable), plus Emax.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);

using ProgressFn = std::function<void(const std::string&)>;

/// Full factorial sweep.  Expensive chaotic passes are stored as fragments
/// under cfg.output/fragments with a completion log, so an interrupted sweep
/// resumes where it stopped and produces identical tables.  Writes
/// results.csv, summary.csv, cells.csv and truth.csv into cfg.output.
SweepResult run_sweep(const ExperimentConfig& cfg, const OrbitLibrary& lib,
                      const std::vector<Snippet>* snippets = nullptr,
                      const ProgressFn& progress = {});

void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& out);
void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out);
std::vector<ResultRow> read_results_csv(std::istream& in);
std::vector<SummaryRow> read_summary_csv(std::istream& in);

}  // namespace lsw
