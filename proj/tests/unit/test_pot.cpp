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

#include <doctest.h>

#include <cmath>
#include <map>

#include "lsw/error.hpp"
#include "lsw/measures.hpp"
#include "lsw/observables.hpp"
#include "lsw/orbits.hpp"
#include "lsw/pot.hpp"
#include "support.hpp"

using namespace lsw;

namespace {

const OrbitLibrary& library9() {
  static const OrbitLibrary lib = build_complete_library(9, Params{});
  return lib;
}

OrbitLibrary prefix9(std::size_t P) {
  OrbitLibrary out;
  out.orbits.assign(library9().orbits.begin(), library9().orbits.begin() + static_cast<long>(P));
  return out;
}

Cycle make_cycle(const std::string& id, int length, double T, double lambda) {
  Cycle c;
  c.id = id;
  c.length = length;
  c.period = T;
  c.exponent = lambda;
  c.expanding = std::exp(T * lambda);
  c.contracting = 1e-12;
  return c;
}

// Direct evaluation over every (cycle, repeat) pair with r * n_p == j.
std::vector<double> brute_force_trace(const CycleData& cd, int n, double s, double beta,
                                      const std::vector<double>& a, bool skip_repeats = false) {
  std::vector<double> C(static_cast<std::size_t>(n), 0.0);
  for (int j = 1; j <= n; ++j) {
    for (std::size_t p = 0; p < cd.size(); ++p) {
      const Cycle& c = cd.cycles[p];
      for (int r = 1; r * c.length <= j; ++r) {
        if (r * c.length != j) continue;
        if (skip_repeats && r >= 2) continue;
        const double ap = a.empty() ? 0.0 : a[p];
        C[static_cast<std::size_t>(j - 1)] -=
            std::exp(-r * c.period * (s - beta * ap)) / std::abs(1.0 - std::exp(r * c.period * c.exponent)) / r;
      }
    }
  }
  return C;
}

std::vector<double> orbit_averages(const OrbitLibrary& lib, const std::string& tag) {
  return measure_averages(orbit_measures(lib, Params{}), basis_observable(tag).fn);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an lsw::Error");
  return ErrorCode::kPrecondition;
}

}  // namespace

TEST_SUITE("pot") {

TEST_CASE("single cycle trace coefficients") {
  const double T = 1.5586522, lam = 0.9755;
  CycleData cd{{make_cycle("AB", 2, T, lam)}};
  const double s = 0.3;
  const auto C2 = trace_coefficients(cd, 2, s, 0.0, {});
  REQUIRE(C2.size() == 2);
  CHECK(C2[0] == 0.0);
  CHECK(C2[1] == doctest::Approx(-std::exp(-T * s) / std::abs(1.0 - std::exp(T * lam))).epsilon(1e-14));
  const auto C4 = trace_coefficients(cd, 4, s, 0.0, {});
  CHECK(C4[2] == 0.0);
  CHECK(C4[3] == doctest::Approx(-0.5 * std::exp(-2 * T * s) / std::abs(1.0 - std::exp(2 * T * lam))).epsilon(1e-14));
}

TEST_CASE("trace coefficients against brute-force enumeration") {
  const CycleData cd = CycleData::from_library(test::library_prefix(6));
  const std::vector<double> a = orbit_averages(test::library_prefix(6), "z");
  for (double s : {-0.5, 0.0, 0.7}) {
    for (double beta : {0.0, 0.01, -0.02}) {
      const auto C = trace_coefficients(cd, 8, s, beta, a);
      const auto oracle = brute_force_trace(cd, 8, s, beta, a);
      for (int j = 0; j < 8; ++j) CHECK(C[j] == doctest::Approx(oracle[j]).epsilon(1e-13));
    }
  }
}

TEST_CASE("repeat terms only touch lengths with a divisor cycle") {
  const CycleData cd = CycleData::from_library(test::library_prefix(6));
  const auto with = brute_force_trace(cd, 8, 0.1, 0.0, {});
  const auto without = brute_force_trace(cd, 8, 0.1, 0.0, {}, true);
  const auto C = trace_coefficients(cd, 8, 0.1, 0.0, {});
  for (int j = 1; j <= 8; ++j) {
    bool has_divisor_cycle = false;
    for (const Cycle& c : cd.cycles) {
      if (j % c.length == 0 && j / c.length >= 2) has_divisor_cycle = true;
    }
    CHECK((with[j - 1] != without[j - 1]) == has_divisor_cycle);
    CHECK(C[j - 1] == doctest::Approx(with[j - 1]).epsilon(1e-13));
  }
}

TEST_CASE("large exponents stay finite") {
  // exp(T lambda) = exp(1200) overflows; with s = -2.9 the ratio is exp(-40)
  CycleData cd{{make_cycle("AB", 2, 400.0, 3.0)}};
  const auto C = trace_coefficients(cd, 4, -2.9, 0.0, {});
  CHECK(std::log(-C[1]) == doctest::Approx(-40.0).epsilon(1e-12));
  CHECK(std::log(-C[3]) == doctest::Approx(-80.0 - std::log(2.0)).epsilon(1e-12));
  const auto tiny = trace_coefficients(cd, 4, 0.0, 0.0, {});
  CHECK(tiny[1] == 0.0);
}

TEST_CASE("Q recurrence and determinant") {
  const CycleData cd = CycleData::from_library(test::library_prefix(6));
  const SpectralState st = spectral_determinant(cd, 4, -0.2, 0.0, {});
  REQUIRE(st.C.size() == 4);
  CHECK(st.Q[0] == st.C[0]);
  CHECK(st.Q[1] == doctest::Approx(st.C[1] + 0.5 * st.C[0] * st.C[0]).epsilon(1e-15));
  double F = 1.0;
  for (double q : st.Q) F += q;
  CHECK(st.F == doctest::Approx(F).epsilon(1e-15));

  const CycleData empty;
  const SpectralState zero = spectral_determinant(empty, 5, 0.3, 0.0, {});
  CHECK(zero.F == 1.0);
  CHECK(zero.dF_ds == 0.0);
  CHECK(zero.dF_dbeta == 0.0);

  const double T = 1.5586522, lam = 0.9755;
  CycleData one{{make_cycle("AB", 2, T, lam)}};
  const SpectralState ab = spectral_determinant(one, 2, 0.4, 0.0, {});
  CHECK(ab.F == doctest::Approx(1.0 - std::exp(-T * 0.4) / std::abs(1.0 - std::exp(T * lam))).epsilon(1e-14));
}

TEST_CASE("determinant derivatives against finite differences") {
  const OrbitLibrary lib = test::library_prefix(12);
  const CycleData cd = CycleData::from_library(lib);
  std::vector<double> a = orbit_averages(lib, "z");
  const int n = 5;
  const double s = -0.1, beta = 0.002, h = 1e-6;
  const SpectralState st = spectral_determinant(cd, n, s, beta, a);
  const double dFds = (spectral_determinant(cd, n, s + h, beta, a).F - spectral_determinant(cd, n, s - h, beta, a).F) / (2 * h);
  const double dFdb = (spectral_determinant(cd, n, s, beta + h, a).F - spectral_determinant(cd, n, s, beta - h, a).F) / (2 * h);
  CHECK(st.dF_ds == doctest::Approx(dFds).epsilon(1e-7));
  CHECK(st.dF_dbeta == doctest::Approx(dFdb).epsilon(1e-7));
  // mixed derivative: differentiate the analytic d_beta F in each <a>_p
  const SpectralState at0 = spectral_determinant(cd, n, s, 0.0, a);
  for (std::size_t p = 0; p < cd.size(); ++p) {
    std::vector<double> up = a, down = a;
    up[p] += 1e-3;
    down[p] -= 1e-3;
    const double fd = (spectral_determinant(cd, n, s, 0.0, up).dF_dbeta -
                       spectral_determinant(cd, n, s, 0.0, down).dF_dbeta) / 2e-3;
    CHECK(at0.d2F_dmu_dbeta[static_cast<Eigen::Index>(p)] == doctest::Approx(fd).epsilon(1e-8).scale(1e-12));
  }
}

TEST_CASE("Newton root of a single cycle") {
  const double T = 1.5586522, lam = 0.9755;
  CycleData one{{make_cycle("AB", 2, T, lam)}};
  const RootResult r = newton_root(one, 2);
  CHECK(r.s0 == doctest::Approx(-std::log(std::abs(1.0 - std::exp(T * lam))) / T).epsilon(1e-8));
  CHECK(std::abs(r.residual) < 1e-8);
  const WeightVector w = pot_weights(one, 2);
  CHECK(w.w.size() == 1);
  CHECK(w.w[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w.method == WeightMethod::kPot);
}

TEST_CASE("Newton failures") {
  CycleData one{{make_cycle("AB", 2, 1.5, 1.0)}};
  PotOptions opt;
  opt.max_iterations = 1;
  CHECK(code_of([&] { newton_root(one, 2, opt); }) == ErrorCode::kNoConvergence);
  PotOptions flat;
  flat.min_derivative = 1e10;
  CHECK(code_of([&] { newton_root(one, 2, flat); }) == ErrorCode::kDivergence);
  const CycleData empty;
  CHECK(code_of([&] { newton_root(empty, 2); }) == ErrorCode::kDivergence);
}

TEST_CASE("leading eigenvalue converges toward zero with truncation") {
  const CycleData cd = CycleData::from_library(library9());
  double previous = std::numeric_limits<double>::infinity();
  for (int n = 2; n <= 9; ++n) {
    const RootResult r = newton_root(cd, n);
    INFO("n=" << n << " s0=" << r.s0);
    CHECK(std::abs(r.residual) < 1e-8);
    CHECK(std::abs(r.s0) < previous);
    previous = std::abs(r.s0);
  }
  CHECK(previous < 0.05);
}

TEST_CASE("weights on complete libraries") {
  const std::vector<long long> sizes = complete_library_sizes(9);
  for (int l = 2; l <= 9; ++l) {
    const OrbitLibrary lib = prefix9(static_cast<std::size_t>(sizes[l - 2]));
    CHECK(complete_truncation(lib, lib.size()) == l);
    const CycleData cd = CycleData::from_library(lib);
    const WeightVector w = pot_weights(cd, l);
    INFO("l=" << l);
    CHECK(std::abs(w.total() - 1.0) < 1e-6);
    CHECK(w.w.minCoeff() >= -1e-10);
    for (std::size_t p = 0; p < lib.size(); ++p) {
      for (std::size_t q = 0; q < lib.size(); ++q) {
        if (lib.orbits[q].symbol == mirror_word(lib.orbits[p].symbol)) {
          CHECK(std::abs(w.w[static_cast<Eigen::Index>(p)] - w.w[static_cast<Eigen::Index>(q)]) < 1e-8);
        }
      }
    }
    for (const std::string tag : {"x", "y", "xz", "yz"}) {
      const std::vector<double> a = orbit_averages(lib, tag);
      const ObservableFn f = basis_observable(tag).fn;
      double scale = 0.0;
      for (double v : measure_averages(orbit_measures(lib, Params{}), [&](const State& x) { return std::abs(f(x)); })) {
        scale = std::max(scale, v);
      }
      CHECK(std::abs(pot_average(cd, l, a)) <= 1e-10 * scale);
      CHECK(std::abs(estimate_average(w, a)) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("averages: normalization, linearity and the z mean") {
  const OrbitLibrary& lib = library9();
  const CycleData cd = CycleData::from_library(lib);
  const WeightVector w = pot_weights(cd, 9);
  CHECK(pot_average(cd, 9, std::vector<double>(lib.size(), 1.0)) == doctest::Approx(1.0).epsilon(1e-6));
  for (const std::string tag : {"z", "x2", "z2", "xy"}) {
    const std::vector<double> a = orbit_averages(lib, tag);
    const double direct = pot_average(cd, 9, a);
    CHECK(std::abs(direct - estimate_average(w, a)) < 1e-10 * std::abs(direct));
  }
  // E[z] = 23.55 with standard deviation 8.6 on the attractor; allow 10^-1.2
  // standard deviations, half a decade above the expected accuracy
  const double ez = pot_average(cd, 9, orbit_averages(lib, "z"));
  CHECK(std::abs(ez - 23.55) / 8.6 < std::pow(10.0, -1.2));
}

TEST_CASE("orbits beyond the truncation get zero weight") {
  const OrbitLibrary lib = prefix9(12);
  const WeightVector w = pot_weights(CycleData::from_library(lib), 4);
  for (std::size_t p = 0; p < lib.size(); ++p) {
    if (lib.orbits[p].symbol.size() > 4) CHECK(w.w[static_cast<Eigen::Index>(p)] == 0.0);
  }
  CHECK(std::abs(w.total() - 1.0) < 1e-6);
}

TEST_CASE("multiplier determinant mode") {
  const OrbitLibrary lib = prefix9(12);
  const CycleData cd = CycleData::from_library(lib);
  PotOptions exact;
  exact.determinant = DeterminantMode::kMultipliers;
  const WeightVector a = pot_weights(cd, 5), b = pot_weights(cd, 5, exact);
  CHECK(std::abs(b.total() - 1.0) < 1e-6);
  // the contracting multiplier is tiny, so both conventions nearly agree
  CHECK((a.w - b.w).cwiseAbs().maxCoeff() < 1e-2);
}

TEST_CASE("complete truncation") {
  const OrbitLibrary& lib = test::library7();
  CHECK(complete_truncation(lib, 1) == 2);
  CHECK(complete_truncation(lib, 12) == 5);
  CHECK(complete_truncation(lib, 39) == 7);
  try {
    complete_truncation(lib, 5);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIncompleteLibrary);
    CHECK(std::string(e.what()).find("not a complete library size") != std::string::npos);
  }
  OrbitLibrary shuffled = test::library_prefix(3);
  std::swap(shuffled.orbits[0], shuffled.orbits[2]);
  CHECK(complete_truncation(shuffled, 3) == 3);
  CHECK(code_of([&] { complete_truncation(shuffled, 1); }) == ErrorCode::kIncompleteLibrary);
}

TEST_CASE("cycle validation") {
  CycleData bad{{make_cycle("AB", 2, 1.5, -1.0)}};
  CHECK_THROWS_AS(bad.validate(), Error);
}

}  // TEST_SUITE
