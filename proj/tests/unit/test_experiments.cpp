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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "lsw/error.hpp"
#include "lsw/experiments.hpp"
#include "lsw/observables.hpp"
#include "support.hpp"

using namespace lsw;
using lsw::test::Gen;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(LSW_TEST_SCRATCH) / name;
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig tiny_config(const fs::path& out) {
  ExperimentConfig c;
  c.methods = {WeightMethod::kUniform};
  c.kinds = {MeasureKind::kOrbit};
  c.P = {4};
  c.R = 1;
  c.S = 1;
  c.N = {10};
  c.truth_seeds = 2;
  c.truth_samples = 50;
  c.lyapunov_time = 50.0;
  c.output = out.string();
  c.jobs = 1;
  return c;
}

ResultRow row(const std::string& tag, double e_rel) {
  ResultRow r;
  r.observable = tag;
  r.E_rel = e_rel;
  return r;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("relative error") {
  CHECK(relative_error(3.0, 3.0, 2.0) == 0.0);
  CHECK(relative_error(1.0, 1.2, 4.0) == doctest::Approx(0.1));
  CHECK(relative_error(1.0, 1.5, 0.0) == 0.5);
  CHECK_THROWS_AS(relative_error(1.0, 1.0, -1.0), Error);
}

TEST_CASE("max error") {
  std::vector<ResultRow> rows;
  for (const Observable& o : basis()) rows.push_back(row(o.tag, 0.25));
  CHECK(max_error(rows) == 0.25);
  rows[6].E_rel = 3.0;
  CHECK(max_error(rows) == 3.0);
  rows.push_back(row("lyapunov", 100.0));
  CHECK(max_error(rows) == 3.0);
  rows.erase(rows.begin() + 2);
  CHECK_THROWS_AS(max_error(rows), Error);
}

TEST_CASE("permutations") {
  const auto id = permutation(125, 1, 9);
  for (std::size_t i = 0; i < id.size(); ++i) CHECK(id[i] == i);
  CHECK(permutation(125, 7, 9) == permutation(125, 7, 9));
  CHECK(permutation(125, 7, 9) != permutation(125, 7, 10));
  std::set<std::vector<std::size_t>> seen;
  for (int r = 2; r <= 256; ++r) {
    auto p = permutation(125, r, 1);
    auto sorted = p;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == id);
    seen.insert(std::move(p));
  }
  CHECK(seen.size() == 255);
  CHECK_THROWS_AS(permutation(5, 0, 1), Error);

  const OrbitLibrary lib = test::library_prefix(12);
  const OrbitLibrary shuffled = permuted_library(lib, 3, 1);
  const auto p3 = permutation(12, 3, 1);
  for (std::size_t i = 0; i < 12; ++i) CHECK(shuffled.orbits[i].id == lib.orbits[p3[i]].id);
}

TEST_CASE("quantiles") {
  CHECK(quantile({3, 1, 2}, 0.5) == 2.0);
  CHECK(quantile({4, 1, 2, 3}, 0.5) == 2.5);
  CHECK(quantile({1, 2, 3, 4, 5}, 0.25) == 2.0);
  CHECK(quantile({10, 0}, 0.75) == 7.5);
  CHECK(quantile({7}, 0.3) == 7.0);
  CHECK_THROWS_AS(quantile({}, 0.5), Error);
  CHECK_THROWS_AS(quantile({1}, 1.5), Error);
  Gen g(51);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v;
    for (int i = g.integer(1, 50); i > 0; --i) v.push_back(g.uniform(-5, 5));
    const double a = quantile(v, 0.25), b = quantile(v, 0.5), c = quantile(v, 0.75);
    CHECK(a <= b);
    CHECK(b <= c);
    CHECK(quantile(v, 0.0) == *std::min_element(v.begin(), v.end()));
    CHECK(quantile(v, 1.0) == *std::max_element(v.begin(), v.end()));
  }
}

TEST_CASE("summary over seeds and permutations") {
  std::vector<ResultRow> rows;
  for (int s = 1; s <= 4; ++s) {
    for (const Observable& o : basis()) {
      ResultRow r = row(o.tag, o.tag == "z" ? s * 0.1 : 0.01);
      r.method = WeightMethod::kLsw;
      r.P = 6;
      r.r = 1;
      r.s = s;
      r.N = 100;
      rows.push_back(r);
    }
  }
  const auto summary = summarize(rows);
  REQUIRE(summary.size() == 11);
  const auto emax = std::find_if(summary.begin(), summary.end(), [](const SummaryRow& r) { return r.observable == "Emax"; });
  REQUIRE(emax != summary.end());
  CHECK(emax->median == doctest::Approx(0.25));
  CHECK(emax->q25 == doctest::Approx(0.175));
  CHECK(emax->q75 == doctest::Approx(0.325));
  CHECK(emax->mean == doctest::Approx(0.25));
  CHECK(emax->count == 4);
}

TEST_CASE("config text form") {
  ExperimentConfig c = ExperimentConfig::desk();
  CHECK(c.S == 16);
  CHECK(c.R == 32);
  CHECK(c.N == std::vector<std::size_t>{100, 1000, 10000, 100000});
  CHECK(c.theta == 100.0);
  CHECK(c.alpha == 1e-10);
  const ExperimentConfig big = ExperimentConfig::paper_scale();
  CHECK(big.S == 256);
  CHECK(big.R == 256);
  CHECK(big.N.back() == 1000000);

  std::istringstream in(
      "# comment\nmethods = lsw, markov\nkinds = orbit\nP = 3,6\nN = 10, 100\nS = 4\n"
      "theta = 50\nseed = 9\n\nsymmetric_truth = false\n");
  c.load(in);
  CHECK(c.methods == std::vector<WeightMethod>{WeightMethod::kLsw, WeightMethod::kMarkov});
  CHECK(c.P == std::vector<std::size_t>{3, 6});
  CHECK(c.S == 4);
  CHECK(c.theta == 50.0);
  CHECK(c.seed == 9);
  CHECK_FALSE(c.symmetric_truth);
  ExperimentConfig again;
  std::istringstream text(c.to_text());
  again.load(text);
  CHECK(again.to_text() == c.to_text());

  CHECK_THROWS_AS(c.set("colour", "blue"), Error);
  CHECK_THROWS_AS(c.set("S", "many"), Error);
  c.N = {100, 10};
  CHECK_THROWS_AS(c.validate(), Error);
  c = ExperimentConfig::desk();
  c.kinds = {MeasureKind::kDiscrete};
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("moment accumulator merge equals a single pass") {
  Gen g(52);
  for (int trial = 0; trial < 20; ++trial) {
    MomentAccumulator all, a, b;
    const int n = g.integer(2, 300), cut = g.integer(0, n);
    for (int i = 0; i < n; ++i) {
      const State x = g.state();
      all.add(x);
      (i < cut ? a : b).add(x);
    }
    a.merge(b);
    CHECK(a.n == all.n);
    for (std::size_t k = 0; k < all.mean.size(); ++k) {
      CHECK(a.mean[k] == doctest::Approx(all.mean[k]).epsilon(1e-12).scale(1.0));
      CHECK(a.m2[k] == doctest::Approx(all.m2[k]).epsilon(1e-10));
    }
  }
}

TEST_CASE("reference truth") {
  const Params p;
  const GroundTruth t = reference_truth(p, 8, 5000, 2.0, 3, 300.0, 1.0, 1);
  CHECK(t.at("1").mean == 1.0);
  CHECK(t.at("1").variance == 0.0);
  for (const char* tag : {"x", "y", "xz", "yz"}) {
    INFO(tag);
    CHECK(std::abs(t.at(tag).mean) <= 3.0 * t.at(tag).standard_error);
  }
  const double ident = t.at("xy").mean - p.beta * t.at("z").mean;
  CHECK(std::abs(ident) <= 3.0 * t.combined_standard_error({{"xy", 1.0}, {"z", -p.beta}}));
  const double ident2 = t.at("x2").mean - t.at("xy").mean;
  CHECK(std::abs(ident2) <= 3.0 * t.combined_standard_error({{"x2", 1.0}, {"xy", -1.0}}));
  CHECK(t.samples_per_seed == 5000);
  CHECK(t.seed_means.size() == 8);
  CHECK(t.lyapunov == doctest::Approx(0.9).epsilon(0.2));
  CHECK_THROWS_AS(t.at("w"), Error);
}

TEST_CASE("single uniform cell") {
  const fs::path dir = scratch("single-cell");
  const SweepResult res = run_sweep(tiny_config(dir), test::library_prefix(6));
  std::size_t basis_rows = 0, lyap_rows = 0;
  for (const ResultRow& r : res.rows) {
    if (r.observable == "lyapunov") {
      ++lyap_rows;
    } else {
      ++basis_rows;
    }
    if (r.observable == "1") CHECK(r.E_rel == 0.0);
    CHECK(r.method == WeightMethod::kUniform);
    CHECK(r.P == 4);
  }
  CHECK(basis_rows == 10);
  CHECK(lyap_rows == 1);
  REQUIRE(res.cells.size() == 1);
  CHECK(res.cells[0].weight_sum == 1.0);
  for (const char* f : {"results.csv", "summary.csv", "cells.csv", "truth.csv", "progress.log", "config.txt"}) {
    CHECK(fs::exists(dir / f));
  }
  std::ifstream in(dir / "results.csv");
  const auto back = read_results_csv(in);
  REQUIRE(back.size() == res.rows.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].observable == res.rows[i].observable);
    CHECK(back[i].E_hat == res.rows[i].E_hat);
    CHECK(back[i].E_rel == res.rows[i].E_rel);
  }
  std::ifstream sin(dir / "summary.csv");
  CHECK(read_summary_csv(sin).size() == res.summary.size());
}

TEST_CASE("POT at an incomplete size is skipped with a reason") {
  const fs::path dir = scratch("pot-skip");
  ExperimentConfig c = tiny_config(dir);
  c.methods = {WeightMethod::kPot};
  c.P = {3, 5};
  const SweepResult res = run_sweep(c, test::library_prefix(6));
  bool saw_skip = false;
  for (const CellRecord& cell : res.cells) {
    if (cell.P == 5) {
      saw_skip = true;
      CHECK(cell.skipped.find("not a complete library size") != std::string::npos);
    } else {
      CHECK(cell.skipped.empty());
      CHECK(std::abs(cell.weight_sum - 1.0) < 1e-6);
    }
  }
  CHECK(saw_skip);
  for (const ResultRow& r : res.rows) CHECK(r.P == 3);
  // odd monomials vanish exactly under POT on the complete P=3 library
  for (const ResultRow& r : res.rows) {
    if (is_odd_under_mirror(r.observable)) CHECK(r.E_rel < 1e-10);
  }
}

TEST_CASE("sweeps are deterministic and resumable") {
  const fs::path a = scratch("resume-a"), b = scratch("resume-b");
  ExperimentConfig c = tiny_config(a);
  c.methods = {WeightMethod::kLsw, WeightMethod::kNnls, WeightMethod::kMarkov, WeightMethod::kUniform,
               WeightMethod::kPot};
  c.kinds = {MeasureKind::kOrbit, MeasureKind::kSnippet};
  c.P = {3, 6};
  c.R = 3;
  c.S = 2;
  c.N = {10, 40};
  c.jobs = 2;
  const OrbitLibrary lib = test::library_prefix(6);
  run_sweep(c, lib);
  const std::string first = slurp(a / "results.csv");
  const std::string summary = slurp(a / "summary.csv");
  REQUIRE_FALSE(first.empty());

  SUBCASE("rerun of a completed sweep") {
    run_sweep(c, lib);
    CHECK(slurp(a / "results.csv") == first);
    CHECK(slurp(a / "summary.csv") == summary);
  }
  SUBCASE("resume after losing a unit") {
    fs::remove(a / "fragments" / "seed-2.txt");
    fs::remove(a / "results.csv");
    run_sweep(c, lib);
    CHECK(slurp(a / "results.csv") == first);
  }
  SUBCASE("fresh directory, different worker count") {
    ExperimentConfig d = c;
    d.output = b.string();
    d.jobs = 1;
    run_sweep(d, lib);
    CHECK(slurp(b / "results.csv") == first);
    CHECK(slurp(b / "cells.csv") == slurp(a / "cells.csv"));
  }
  SUBCASE("a different sweep may not reuse the directory") {
    ExperimentConfig d = c;
    d.theta = 50.0;
    CHECK_THROWS_AS(run_sweep(d, lib), Error);
  }
}

TEST_CASE("sweep preconditions") {
  ExperimentConfig c = tiny_config(scratch("pre"));
  c.P = {40};
  CHECK_THROWS_AS(run_sweep(c, test::library_prefix(6)), Error);
  CHECK_THROWS_AS(run_sweep(tiny_config(scratch("pre2")), OrbitLibrary{}), Error);
}

}  // TEST_SUITE
