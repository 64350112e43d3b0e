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

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "lsw/error.hpp"
#include "lsw/kdtree.hpp"
#include "lsw/weights.hpp"
#include "support.hpp"

using namespace lsw;
using lsw::test::Gen;

namespace {

CorrelationSystem make_system(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  CorrelationSystem sys;
  sys.A = A;
  sys.b = b;
  sys.theta = 100.0;
  sys.N = 1;
  return sys;
}

// Minimum of |Ax - b| over x >= 0 by trying every support set.
Eigen::VectorXd nnls_brute_force(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(A.cols());
  Eigen::VectorXd best = Eigen::VectorXd::Zero(n);
  double best_obj = b.squaredNorm();
  for (unsigned mask = 1; mask < (1U << n); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i) {
      if (mask & (1U << i)) idx.push_back(i);
    }
    Eigen::MatrixXd As(A.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) As.col(static_cast<Eigen::Index>(k)) = A.col(idx[k]);
    const Eigen::VectorXd xs = As.colPivHouseholderQr().solve(b);
    if ((xs.array() < 0.0).any()) continue;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < idx.size(); ++k) x[idx[k]] = xs[static_cast<Eigen::Index>(k)];
    const double obj = (A * x - b).squaredNorm();
    if (obj < best_obj) {
      best_obj = obj;
      best = x;
    }
  }
  return best;
}

// Simplex projection by bisection on the threshold tau.
Eigen::VectorXd simplex_bisection(const Eigen::VectorXd& v) {
  double lo = v.minCoeff() - 1.0, hi = v.maxCoeff();
  for (int it = 0; it < 200; ++it) {
    const double tau = 0.5 * (lo + hi);
    if ((v.array() - tau).max(0.0).sum() > 1.0) {
      lo = tau;
    } else {
      hi = tau;
    }
  }
  return (v.array() - 0.5 * (lo + hi)).max(0.0).matrix();
}

double objective(const CorrelationSystem& sys, const Eigen::VectorXd& w) {
  return (sys.A * w - sys.b).squaredNorm();
}

const CorrelationSystem& orbit_system(std::size_t P) {
  static std::map<std::size_t, CorrelationSystem> cache;
  auto it = cache.find(P);
  if (it == cache.end()) {
    const auto ms = orbit_measures(test::library_prefix(P), Params{});
    const Trajectory t = chaotic_samples(Params{}, 2000, 2.0, 42);
    it = cache.emplace(P, build_system(ms, t, KernelConfig{100.0}, 2000, 42)).first;
  }
  return it->second;
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

TEST_SUITE("weights") {

TEST_CASE("method names round trip") {
  for (auto m : {WeightMethod::kLsw, WeightMethod::kNnls, WeightMethod::kConstrained, WeightMethod::kMarkov,
                 WeightMethod::kUniform, WeightMethod::kPot}) {
    CHECK(parse_method(method_name(m)) == m);
  }
  CHECK_THROWS_AS(parse_method("median"), Error);
}

TEST_CASE("exact normalization") {
  Gen g(31);
  for (int trial = 0; trial < 500; ++trial) {
    Eigen::VectorXd w = g.vector(g.integer(1, 130), 0.0, 1.0);
    w[0] += 1e-3;
    normalize_exact(w);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) sum += w[i];
    CHECK(sum == 1.0);
  }
}

TEST_CASE("tikhonov examples") {
  const Eigen::Vector3d b(0.3, -2.0, 5.0);
  CHECK((solve_tikhonov(make_system(Eigen::Matrix3d::Identity(), b), 0.0).w - b).norm() == 0.0);

  const double alpha = 1e-10;
  const WeightVector ones = solve_tikhonov(make_system(Eigen::MatrixXd::Ones(4, 4), Eigen::VectorXd::Ones(4)), alpha);
  // cond(A + alpha I) = 4e10, so agreement is limited to about 1e-11
  for (int i = 0; i < 4; ++i) CHECK(std::abs(ones.w[i] - 1.0 / (4.0 + alpha)) < 1e-10);
  CHECK(ones.method == WeightMethod::kLsw);
  CHECK(ones.provenance.alpha == alpha);

  Eigen::Matrix3d A;
  A << 1.0 / 3, 2.0 / 9, 1.0 / 3, 2.0 / 9, 1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0 / 2;
  const WeightVector w = solve_tikhonov(make_system(A, Eigen::Vector3d::Constant(0.25)), 0.0);
  CHECK(std::abs(w.w[0] - 0.75) < 1e-10);
  CHECK(std::abs(w.w[1] - 0.75) < 1e-10);
  CHECK(std::abs(w.w[2] + 0.5) < 1e-10);
}

TEST_CASE("tikhonov errors") {
  CHECK(code_of([] { solve_tikhonov(make_system(Eigen::MatrixXd::Zero(3, 3), Eigen::VectorXd::Ones(3)), 0.0); }) ==
        ErrorCode::kSingularSystem);
  CHECK(code_of([] { solve_tikhonov(make_system(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Ones(2)), -1.0); }) ==
        ErrorCode::kPrecondition);
}

TEST_CASE("tikhonov residual and permutation invariance on random systems") {
  Gen g(32);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = g.integer(1, 25);
    const CorrelationSystem sys = make_system(g.spd(n, 1e4), g.vector(n));
    const double alpha = 1e-10;
    const Eigen::VectorXd w = solve_tikhonov(sys, alpha).w;
    const Eigen::MatrixXd M = sys.A + alpha * Eigen::MatrixXd::Identity(n, n);
    CHECK((M * w - sys.b).norm() <= 1e-10 * sys.b.norm());

    std::vector<std::size_t> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), g.engine());
    const Eigen::VectorXd wp = solve_tikhonov(sys.subset(perm), alpha).w;
    for (int i = 0; i < n; ++i) CHECK(std::abs(wp[i] - w[static_cast<Eigen::Index>(perm[i])]) < 1e-10 * std::max(1.0, w.norm()));
  }
}

TEST_CASE("tikhonov on an orbit system") {
  const CorrelationSystem& sys = orbit_system(12);
  const WeightVector w = solve_tikhonov(sys);
  const Eigen::MatrixXd M = sys.A + 1e-10 * Eigen::MatrixXd::Identity(12, 12);
  CHECK((M * w.w - sys.b).norm() <= 1e-10 * sys.b.norm());
  CHECK(w.total() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("tikhonov on non-overlapping point measures is non-negative") {
  // points far apart compared with the kernel width, so A is nearly diagonal
  Gen g(33);
  std::vector<ReferenceMeasure> ms;
  for (int i = 0; i < 8; ++i) ms.push_back(point_measure("p" + std::to_string(i), State(10.0 * i, 0.0, 25.0)));
  const KernelConfig cfg{1.0};
  Trajectory t;
  t.dt = 1.0;
  for (int n = 0; n < 500; ++n) t.samples.push_back(State(g.uniform(-5, 75), g.uniform(-3, 3), g.uniform(22, 28)));
  const CorrelationSystem sys = build_system(ms, t, cfg, 500);
  const WeightVector w = solve_tikhonov(sys, 0.0);
  CHECK(w.w.minCoeff() >= 0.0);
}

TEST_CASE("nnls examples") {
  const WeightVector a = solve_nnls_normalized(make_system(Eigen::Matrix2d::Identity(), Eigen::Vector2d(0.2, 0.8)));
  CHECK(a.w[0] == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(a.w[1] == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(a.support == 2);
  const WeightVector b = solve_nnls_normalized(make_system(Eigen::Matrix2d::Identity(), Eigen::Vector2d(-0.5, 1.0)));
  CHECK(b.w[0] == 0.0);
  CHECK(b.w[1] == 1.0);
  CHECK(b.support == 1);
  CHECK(b.raw[1] == doctest::Approx(1.0));
  CHECK(code_of([] { solve_nnls_normalized(make_system(Eigen::Matrix2d::Identity(), Eigen::Vector2d(-1, -2))); }) ==
        ErrorCode::kDegenerateSolution);
}

TEST_CASE("nnls against brute-force support enumeration") {
  Gen g(34);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = g.integer(1, 7);
    const int m = g.integer(n, n + 4);
    const Eigen::MatrixXd A = g.matrix(m, n);
    const Eigen::VectorXd b = g.vector(m);
    const NnlsResult r = nnls(A, b);
    const Eigen::VectorXd oracle = nnls_brute_force(A, b);
    CHECK((r.x.array() >= 0.0).all());
    CHECK((A * r.x - b).squaredNorm() <= (A * oracle - b).squaredNorm() + 1e-12);
    CHECK((r.x - oracle).norm() < 1e-8 * std::max(1.0, oracle.norm()));
  }
}

TEST_CASE("nnls KKT conditions on random and orbit systems") {
  Gen g(35);
  auto check_kkt = [](const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    const NnlsResult r = nnls(A, b);
    const Eigen::VectorXd grad = 2.0 * A.transpose() * (A * r.x - b);
    for (Eigen::Index i = 0; i < r.x.size(); ++i) {
      CHECK(r.x[i] >= 0.0);
      if (r.x[i] > 0.0) {
        CHECK(std::abs(grad[i]) < 1e-8);
      } else {
        CHECK(grad[i] >= -1e-8);
      }
    }
    CHECK((r.dual + 0.5 * grad).norm() < 1e-12);
  };
  for (int trial = 0; trial < 100; ++trial) {
    const int n = g.integer(1, 30);
    check_kkt(g.spd(n, 1e6), g.vector(n, 0.0, 1.0));
  }
  for (std::size_t P : {3, 6, 12, 21}) check_kkt(orbit_system(P).A, orbit_system(P).b);
  const WeightVector w = solve_nnls_normalized(orbit_system(21));
  CHECK(w.total() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((w.w.array() >= 0.0).all());
  CHECK(w.support <= 8);
}

TEST_CASE("simplex projection against bisection") {
  Gen g(36);
  for (int trial = 0; trial < 300; ++trial) {
    const Eigen::VectorXd v = g.vector(g.integer(1, 40), -3.0, 3.0);
    const Eigen::VectorXd p = project_to_simplex(v);
    CHECK((p - simplex_bisection(v)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.minCoeff() >= 0.0);
  }
  const Eigen::Vector3d inside(0.2, 0.3, 0.5);
  CHECK((project_to_simplex(inside) - inside).norm() < 1e-15);
}

TEST_CASE("constrained solver") {
  SUBCASE("feasible optimum is recovered from any start") {
    Gen g(37);
    for (int trial = 0; trial < 10; ++trial) {
      const int n = g.integer(2, 8);
      const Eigen::VectorXd b = g.simplex_point(n);
      const ConstrainedResult r =
          solve_constrained(make_system(Eigen::MatrixXd::Identity(n, n), b), g.simplex_point(n));
      CHECK((r.weights.w - b).norm() < 1e-9);
      CHECK(r.weights.converged);
    }
  }
  SUBCASE("objective never increases and beats the uniform start") {
    const CorrelationSystem& sys = orbit_system(39);
    const Eigen::VectorXd w0 = Eigen::VectorXd::Constant(39, 1.0 / 39);
    ConstrainedOptions opt;
    opt.max_iterations = 3000;
    opt.record_objective = true;
    const ConstrainedResult r = solve_constrained(sys, w0, opt);
    REQUIRE(r.objective.size() > 1);
    for (std::size_t i = 1; i < r.objective.size(); ++i) CHECK(r.objective[i] <= r.objective[i - 1]);
    CHECK(objective(sys, r.weights.w) <= objective(sys, w0));
    CHECK(r.weights.w.minCoeff() >= 0.0);
    CHECK(r.weights.total() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(r.weights.converged);
    CHECK(r.weights.iterations == 3000);
  }
  SUBCASE("start must lie on the simplex") {
    CHECK_THROWS_AS(solve_constrained(make_system(Eigen::Matrix2d::Identity(), Eigen::Vector2d(0.5, 0.5)),
                                      Eigen::Vector2d(0.9, 0.9)),
                    Error);
  }
}

TEST_CASE("markov weights") {
  const Params p;
  SUBCASE("single measure") {
    const Trajectory t = chaotic_samples(p, 10, 2.0, 1);
    const WeightVector w = markov_weights({point_measure("a", State(0, 0, 20))}, t, 10);
    CHECK(w.w.size() == 1);
    CHECK(w.w[0] == 1.0);
  }
  SUBCASE("ties go to the lowest index") {
    std::vector<ReferenceMeasure> ms;
    for (int i = 0; i < 6; ++i) ms.push_back(point_measure("m" + std::to_string(i), State(100.0 * i, 0, 0)));
    ms[1] = point_measure("m1", State(0, 1, 0));
    ms[4] = point_measure("m4", State(0, -1, 0));
    Trajectory t;
    t.dt = 1.0;
    t.samples = {State(0, 0, 0.5)};
    const WeightVector w = markov_weights(ms, t, 1);
    CHECK(w.w[0] == 1.0);
    ms[0] = point_measure("m0", State(0, 0, 50));
    const WeightVector w2 = markov_weights(ms, t, 1);
    CHECK(w2.w[1] == 1.0);
    CHECK(w2.w[4] == 0.0);
  }
  SUBCASE("mirror-symmetric pair splits the run evenly") {
    const double c = std::sqrt(72.0);
    const std::vector<ReferenceMeasure> ms{point_measure("plus", State(c, c, 27)),
                                           point_measure("minus", State(-c, -c, 27))};
    const std::size_t N = 20000;
    const Trajectory t = chaotic_samples(p, N, 2.0, 11);
    const WeightVector w = markov_weights(ms, t, N);
    const double se = std::sqrt(0.25 / static_cast<double>(N));
    CHECK(std::abs(w.w[0] - 0.5) <= 3.0 * se);
    CHECK(w.total() == 1.0);
  }
  SUBCASE("counts and labels") {
    const WeightVector w = markov_from_counts({3, 0, 7});
    CHECK(w.w[0] == doctest::Approx(0.3));
    CHECK(w.w[1] == 0.0);
    CHECK(w.total() == 1.0);
    CHECK(markov_from_labels({2, 2, 0, 1}, 3).w[2] == 0.5);
    CHECK_THROWS_AS(markov_weights({}, Trajectory{}, 1), Error);
  }
}

TEST_CASE("kd-tree agrees with brute force") {
  Gen g(38);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = g.integer(1, 400);
    std::vector<State> pts;
    std::vector<int> labels;
    for (int i = 0; i < n; ++i) {
      // coarse grid coordinates produce many exact distance ties
      pts.push_back(State(g.integer(-5, 5), g.integer(-5, 5), g.integer(0, 10)));
      labels.push_back(g.integer(0, 9));
    }
    const KdTree3 tree(pts, labels);
    for (int q = 0; q < 200; ++q) {
      const State x(g.integer(-6, 6) * 0.5, g.integer(-6, 6) * 0.5, g.integer(0, 20) * 0.5);
      double best = std::numeric_limits<double>::infinity();
      int label = -1;
      for (int i = 0; i < n; ++i) {
        const double d = (pts[i] - x).squaredNorm();
        if (d < best || (d == best && labels[i] < label)) {
          best = d;
          label = labels[i];
        }
      }
      const auto hit = tree.nearest(x);
      CHECK(hit.d2 == best);
      CHECK(hit.label == label);
    }
  }
}

TEST_CASE("uniform weights") {
  CHECK(uniform_weights(1).w[0] == 1.0);
  const WeightVector four = uniform_weights(4);
  for (int i = 0; i < 4; ++i) CHECK(four.w[i] == 0.25);
  for (std::size_t P = 1; P <= 125; ++P) CHECK(uniform_weights(P).total() == 1.0);
  CHECK_THROWS_AS(uniform_weights(0), Error);
}

TEST_CASE("weight file round trip") {
  WeightVector w = solve_nnls_normalized(orbit_system(6));
  w.provenance.r = 3;
  w.provenance.s = 2;
  w.kind = MeasureKind::kSnippet;
  std::stringstream ss;
  save_weights(w, ss);
  const WeightVector back = load_weights(ss);
  CHECK(back.w == w.w);
  CHECK(back.method == WeightMethod::kNnls);
  CHECK(back.kind == MeasureKind::kSnippet);
  CHECK(back.provenance.r == 3);
  CHECK(back.provenance.s == 2);
  CHECK(back.provenance.N == w.provenance.N);
  CHECK(back.provenance.theta == w.provenance.theta);

  std::stringstream legacy("WEIGHTS v1 method=uniform P=2 r=1 s=1 N=0 theta=nan alpha=nan\n0.5\n0.5\n");
  const WeightVector l = load_weights(legacy);
  CHECK(l.kind == MeasureKind::kOrbit);
  CHECK(l.w.size() == 2);
  std::stringstream short_file("WEIGHTS v1 method=uniform P=3 r=1 s=1 N=0 theta=nan alpha=nan\n0.5\n0.5\n");
  CHECK(code_of([&] { load_weights(short_file); }) == ErrorCode::kParse);
}

}  // TEST_SUITE
