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

#include "lsw/pot.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "lsw/error.hpp"

namespace lsw {

CycleData CycleData::from_library(const OrbitLibrary& lib) {
  CycleData out;
  for (const PeriodicOrbit& o : lib.orbits) {
    Cycle c;
    c.id = o.id;
    c.length = static_cast<int>(o.symbol.size());
    c.period = o.period;
    c.exponent = o.floquet_exponent;
    c.expanding = o.multipliers[0];
    c.contracting = o.multipliers[2];
    out.cycles.push_back(std::move(c));
  }
  out.validate();
  return out;
}

void CycleData::validate() const {
  for (const Cycle& c : cycles) {
    require(c.length >= 1, "cycle " + c.id + ": symbol length must be positive");
    require(c.period > 0.0 && std::isfinite(c.period), "cycle " + c.id + ": period must be positive");
    require(c.exponent > 0.0 && std::isfinite(c.exponent),
            "cycle " + c.id + ": Floquet exponent must be positive");
  }
}

namespace {

// log(-expm1(-x)) for x > 0, i.e. log(1 - e^{-x}).
double log1m_exp_neg(double x) { return std::log(-std::expm1(-x)); }

// log |det(1 - M^r)|.
double log_det(const Cycle& c, int r, DeterminantMode mode) {
  if (mode == DeterminantMode::kLeadingExponent) {
    const double x = r * c.period * c.exponent;
    return x + log1m_exp_neg(x);
  }
  require(c.expanding > 1.0 && c.contracting > 0.0 && c.contracting < 1.0,
          "cycle " + c.id + ": multiplier magnitudes unavailable for the exact determinant");
  const double lu = r * std::log(c.expanding);
  const double ls = r * std::log(c.contracting);
  return lu + log1m_exp_neg(lu) + std::log(-std::expm1(ls));
}

// One (p, r) term of C_j and its partial derivatives.
struct Term {
  double t;
  double ds;     // d/ds
  double db;     // d/dbeta
  double dmu;    // d/d<a>_p
  double dmudb;  // d/d<a>_p d/dbeta
};

Term make_term(const Cycle& c, int r, double s, double beta, double a, DeterminantMode mode) {
  const double rt = r * c.period;
  const double t = -std::exp(-rt * (s - beta * a) - log_det(c, r, mode)) / r;
  Term out{};
  out.t = t;
  out.ds = -rt * t;
  out.db = rt * a * t;
  out.dmu = rt * beta * t;
  out.dmudb = rt * t * (1.0 + rt * a * beta);
  return out;
}

void check_args(const CycleData& cycles, int n, double s, double beta,
                const std::vector<double>& a) {
  require(n >= 1, "truncation must be at least 1");
  require(std::isfinite(s) && std::isfinite(beta), "s and beta must be finite");
  require(a.empty() || a.size() == cycles.size(),
          "per-cycle averages must match the cycle count");
  require(!a.empty() || beta == 0.0, "per-cycle averages are required when beta != 0");
}

}  // namespace

std::vector<double> trace_coefficients(const CycleData& cycles, int n, double s,
                                       double beta, const std::vector<double>& a,
                                       const PotOptions& opt) {
  check_args(cycles, n, s, beta, a);
  std::vector<double> C(static_cast<std::size_t>(n), 0.0);
  for (std::size_t p = 0; p < cycles.size(); ++p) {
    const Cycle& c = cycles.cycles[p];
    const double ap = a.empty() ? 0.0 : a[p];
    for (int r = 1; r * c.length <= n; ++r) {
      C[static_cast<std::size_t>(r * c.length - 1)] += make_term(c, r, s, beta, ap, opt.determinant).t;
    }
  }
  return C;
}

SpectralState spectral_determinant(const CycleData& cycles, int n, double s,
                                   double beta, const std::vector<double>& a,
                                   const PotOptions& opt) {
  check_args(cycles, n, s, beta, a);
  const auto N = static_cast<std::size_t>(n);
  const std::size_t P = cycles.size();

  // Coefficients and their derivatives, index j-1.
  std::vector<double> C(N, 0.0), Cs(N, 0.0), Cb(N, 0.0);
  // Per cycle: only repeats of that cycle contribute.
  std::vector<std::vector<double>> Cm(P, std::vector<double>(N, 0.0));
  std::vector<std::vector<double>> Cmb(P, std::vector<double>(N, 0.0));
  for (std::size_t p = 0; p < P; ++p) {
    const Cycle& c = cycles.cycles[p];
    const double ap = a.empty() ? 0.0 : a[p];
    for (int r = 1; r * c.length <= n; ++r) {
      const auto j = static_cast<std::size_t>(r * c.length - 1);
      const Term t = make_term(c, r, s, beta, ap, opt.determinant);
      C[j] += t.t;
      Cs[j] += t.ds;
      Cb[j] += t.db;
      Cm[p][j] += t.dmu;
      Cmb[p][j] += t.dmudb;
    }
  }

  // Q_j = C_j + sum_{i<j} ((j-i)/j) C_{j-i} Q_i, differentiated term by term.
  std::vector<double> Q(N, 0.0), Qs(N, 0.0), Qb(N, 0.0);
  for (std::size_t j = 1; j <= N; ++j) {
    double q = C[j - 1], qs = Cs[j - 1], qb = Cb[j - 1];
    for (std::size_t i = 1; i < j; ++i) {
      const double f = static_cast<double>(j - i) / static_cast<double>(j);
      const std::size_t k = j - i - 1;
      q += f * C[k] * Q[i - 1];
      qs += f * (Cs[k] * Q[i - 1] + C[k] * Qs[i - 1]);
      qb += f * (Cb[k] * Q[i - 1] + C[k] * Qb[i - 1]);
    }
    Q[j - 1] = q;
    Qs[j - 1] = qs;
    Qb[j - 1] = qb;
  }

  SpectralState st;
  st.n = n;
  st.s = s;
  st.beta = beta;
  st.C = C;
  st.Q = Q;
  for (std::size_t j = 0; j < N; ++j) {
    st.F += Q[j];
    st.dF_ds += Qs[j];
    st.dF_dbeta += Qb[j];
  }

  st.d2F_dmu_dbeta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(P));
  std::vector<double> Qm(N), Qmb(N);
  for (std::size_t p = 0; p < P; ++p) {
    if (cycles.cycles[p].length > n) continue;
    const std::vector<double>& cm = Cm[p];
    const std::vector<double>& cmb = Cmb[p];
    double total = 0.0;
    for (std::size_t j = 1; j <= N; ++j) {
      double qm = cm[j - 1], qmb = cmb[j - 1];
      for (std::size_t i = 1; i < j; ++i) {
        const double f = static_cast<double>(j - i) / static_cast<double>(j);
        const std::size_t k = j - i - 1;
        qm += f * (cm[k] * Q[i - 1] + C[k] * Qm[i - 1]);
        qmb += f * (cmb[k] * Q[i - 1] + Cb[k] * Qm[i - 1] + cm[k] * Qb[i - 1] +
                    C[k] * Qmb[i - 1]);
      }
      Qm[j - 1] = qm;
      Qmb[j - 1] = qmb;
      total += qmb;
    }
    st.d2F_dmu_dbeta[static_cast<Eigen::Index>(p)] = total;
  }
  return st;
}

RootResult newton_root(const CycleData& cycles, int n, const PotOptions& opt) {
  cycles.validate();
  const std::vector<double> none;
  RootResult out;
  double s = 0.0;
  for (int it = 0;; ++it) {
    const SpectralState st = spectral_determinant(cycles, n, s, 0.0, none, opt);
    if (!std::isfinite(st.F)) fail(ErrorCode::kDivergence, "spectral determinant is not finite");
    if (std::abs(st.F) < opt.root_tol) {
      out.s0 = s;
      out.iterations = it;
      out.residual = std::abs(st.F);
      return out;
    }
    if (it >= opt.max_iterations) {
      fail(ErrorCode::kNoConvergence, "Newton iteration for the spectral determinant root did not converge");
    }
    if (!(std::abs(st.dF_ds) >= opt.min_derivative)) {
      fail(ErrorCode::kDivergence, "vanishing derivative of the spectral determinant");
    }
    s -= st.F / st.dF_ds;
  }
}

WeightVector pot_weights(const CycleData& cycles, int n, const PotOptions& opt) {
  require(!cycles.cycles.empty(), "need at least one cycle");
  const RootResult root = newton_root(cycles, n, opt);
  const std::vector<double> zeros(cycles.size(), 0.0);
  const SpectralState st = spectral_determinant(cycles, n, root.s0, 0.0, zeros, opt);
  WeightVector out;
  out.method = WeightMethod::kPot;
  out.w = -st.d2F_dmu_dbeta / st.dF_ds;
  out.iterations = root.iterations;
  out.support = (out.w.array() != 0.0).count();
  out.provenance.P = static_cast<long long>(cycles.size());
  return out;
}

double pot_average(const CycleData& cycles, int n, const std::vector<double>& a,
                   const PotOptions& opt) {
  require(a.size() == cycles.size(), "per-cycle averages must match the cycle count");
  const RootResult root = newton_root(cycles, n, opt);
  const SpectralState st = spectral_determinant(cycles, n, root.s0, 0.0, a, opt);
  return -st.dF_dbeta / st.dF_ds;
}

int complete_truncation(const OrbitLibrary& lib, std::size_t P) {
  require(P >= 1 && P <= lib.orbits.size(), "library prefix size out of range");
  std::size_t longest = 0;
  std::set<std::string> have;
  for (std::size_t i = 0; i < P; ++i) {
    const std::string& sym = lib.orbits[i].symbol;
    longest = std::max(longest, sym.size());
    have.insert(canonical_rotation(sym));
  }
  const auto l = static_cast<int>(longest);
  bool ok = l >= 2 && have.size() == P;
  if (ok) {
    const std::vector<std::string> words = enumerate_primitive_words(l);
    ok = words.size() == P;
    for (std::size_t i = 0; ok && i < words.size(); ++i) ok = have.count(words[i]) == 1;
  }
  if (!ok) {
    fail(ErrorCode::kIncompleteLibrary,
         "not a complete library size (P=" + std::to_string(P) + ")");
  }
  return l;
}

}  // namespace lsw
