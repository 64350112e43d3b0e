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
#include <set>
#include <sstream>

#include "lsw/error.hpp"
#include "lsw/orbits.hpp"
#include "support.hpp"

using namespace lsw;

namespace {

// Canonical primitive necklaces of length n by exhaustive enumeration.
std::set<std::string> brute_force_necklaces(int n) {
  std::set<std::string> out;
  for (unsigned long bits = 0; bits < (1UL << n); ++bits) {
    std::string w;
    for (int i = 0; i < n; ++i) w.push_back((bits >> i) & 1UL ? 'B' : 'A');
    bool primitive = true;
    for (int d = 1; d < n && primitive; ++d) {
      if (n % d == 0 && w == w.substr(d) + w.substr(0, d)) primitive = false;
    }
    if (!primitive) continue;
    std::string best = w;
    for (int k = 1; k < n; ++k) best = std::min(best, w.substr(k) + w.substr(0, k));
    out.insert(best);
  }
  return out;
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

TEST_SUITE("orbits") {

TEST_CASE("word utilities") {
  CHECK(canonical_rotation("BAB") == "ABB");
  CHECK(canonical_rotation("ABAAB") == "AABAB");
  CHECK(is_primitive("AB"));
  CHECK_FALSE(is_primitive("ABAB"));
  CHECK_FALSE(is_primitive("AAA"));
  CHECK(swap_symbols("AAB") == "BBA");
  CHECK(mirror_word("AAB") == "ABB");
  CHECK(mirror_word("AB") == "AB");
}

TEST_CASE("necklace counts against brute-force enumeration") {
  const std::vector<long long> per_length{1, 2, 3, 6, 9, 18, 30, 56};
  for (int n = 2; n <= 14; ++n) {
    const auto brute = brute_force_necklaces(n);
    CHECK(primitive_necklace_count(n) == static_cast<long long>(brute.size()));
    if (n <= 9) CHECK(primitive_necklace_count(n) == per_length[n - 2]);
  }
}

TEST_CASE("complete library sizes") {
  CHECK(complete_library_sizes(9) == std::vector<long long>{1, 3, 6, 12, 21, 39, 69, 125});
  CHECK(complete_library_sizes(2) == std::vector<long long>{1});
}

TEST_CASE("enumerated words match the brute-force necklaces") {
  const auto words = enumerate_primitive_words(8);
  std::vector<std::string> expected;
  for (int n = 2; n <= 8; ++n) {
    const auto b = brute_force_necklaces(n);
    expected.insert(expected.end(), b.begin(), b.end());
  }
  CHECK(words == expected);
  const auto four = enumerate_primitive_words(4);
  CHECK(four == std::vector<std::string>{"AB", "AAB", "ABB", "AAAB", "AABB", "ABBB"});
}

TEST_CASE("shortest orbit") {
  const PeriodicOrbit& ab = test::library7().orbits.front();
  const Params p;
  CHECK(ab.symbol == "AB");
  CHECK(ab.period == doctest::Approx(1.559).epsilon(1e-3));
  CHECK(closure_residual(ab, p) < 1e-9);
  CHECK(symbol_sequence(ab, p) == "AB");
  const FloquetData fd = floquet(ab, p);
  CHECK(fd.exponent > 0.0);
  CHECK(fd.exponent == doctest::Approx(ab.floquet_exponent).epsilon(1e-8));
  // independent single-shooting check of the period with fixed-step RK4
  CHECK((test::rk4_flow(ab.start(), p, ab.period, 5e-5) - ab.start()).norm() < 1e-7);
}

TEST_CASE("Floquet multipliers: marginal direction and Liouville product") {
  const Params p;
  for (const PeriodicOrbit& o : test::library7().orbits) {
    if (o.symbol.size() > 4) continue;
    const FloquetData fd = floquet(o, p);
    CHECK(fd.multipliers[0] >= fd.multipliers[1]);
    CHECK(fd.multipliers[1] >= fd.multipliers[2]);
    CHECK(std::abs(fd.multipliers[1] - 1.0) < 1e-4);
    const double product = fd.multipliers[0] * fd.multipliers[1] * fd.multipliers[2];
    // the contracting multiplier is near exp(-14.5 T), below integration
    // accuracy once T > 2, so only AB can resolve the product
    if (o.period < 2.0) {
      CHECK(std::abs(product / std::exp(p.divergence() * o.period) - 1.0) < 1e-4);
    }
  }
}

TEST_CASE("recurrence scan") {
  const Params p;
  const PeriodicOrbit& ab = test::library7().orbits.front();
  const Trajectory on_orbit = integrate(ab.start(), p, 4.0 * ab.period, ab.period / 1000.0);
  const auto guesses = scan_recurrences(on_orbit, 1e-3, 1.0, 2.0);
  REQUIRE_FALSE(guesses.empty());
  CHECK(guesses.front().period == doctest::Approx(ab.period).epsilon(2e-3));

  CHECK(code_of([&] { scan_recurrences(on_orbit, 1e-3, 2.0, 1.0); }) == ErrorCode::kPrecondition);

  const Trajectory chaotic = integrate(attractor_state(p, 9), p, 1e4, 0.01);
  const auto many = scan_recurrences(chaotic, 0.5, 0.5, 2.0);
  CHECK(std::any_of(many.begin(), many.end(),
                    [](const OrbitGuess& g) { return g.period >= 1.0 && g.period <= 2.0; }));
}

TEST_CASE("refinement from a perturbed guess and from a mirror image") {
  const Params p;
  const PeriodicOrbit& aab = test::library7().orbits[1];
  REQUIRE(aab.symbol == "AAB");
  OrbitGuess guess{aab.start() + State(1e-3, -2e-3, 1e-3), aab.period * 1.001, {}};
  const PeriodicOrbit again = refine_orbit(guess, p);
  CHECK(again.symbol == "AAB");
  CHECK(again.period == doctest::Approx(aab.period).epsilon(1e-8));
  CHECK(closure_residual(again, p) < 1e-8);

  const PeriodicOrbit image = refine_orbit(OrbitGuess{mirror(aab.start()), aab.period, {}}, p);
  CHECK(image.symbol == "ABB");
  CHECK(image.period == doctest::Approx(aab.period).epsilon(1e-9));
  CHECK(image.floquet_exponent == doctest::Approx(aab.floquet_exponent).epsilon(1e-6));
  CHECK(symbol_sequence(mirror_orbit(aab), p) == "ABB");
}

TEST_CASE("refinement onto an equilibrium is degenerate") {
  const double c = std::sqrt(72.0);
  CHECK(code_of([] {
          refine_orbit(OrbitGuess{State(std::sqrt(72.0), std::sqrt(72.0), 27.0), 1.3, {}}, Params{});
        }) == ErrorCode::kDegenerateSolution);
  CHECK(c > 0);
  CHECK(code_of([] { refine_orbit(OrbitGuess{State(1, 1, 1), -1.0, {}}, Params{}); }) ==
        ErrorCode::kPrecondition);
}

TEST_CASE("doubled orbit is rejected as non-primitive") {
  PeriodicOrbit twice = test::library7().orbits.front();
  twice.period *= 2.0;
  CHECK(code_of([&] { symbol_sequence(twice, Params{}); }) == ErrorCode::kNonPrimitive);
}

TEST_CASE("library up to length 7 is complete, closed and symmetric") {
  const Params p;
  const OrbitLibrary& lib = test::library7();
  CHECK(lib.size() == 39);
  std::vector<std::string> words;
  std::set<std::string> ids;
  for (const PeriodicOrbit& o : lib.orbits) {
    words.push_back(o.symbol);
    ids.insert(o.id);
    CHECK(o.period > 0.0);
    CHECK(o.floquet_exponent > 0.0);
    CHECK(closure_residual(o, p) < 1e-7);
  }
  CHECK(ids.size() == lib.size());
  CHECK(words == enumerate_primitive_words(7));
  const std::set<std::string> set(words.begin(), words.end());
  for (const PeriodicOrbit& o : lib.orbits) {
    const std::string m = mirror_word(o.symbol);
    REQUIRE(set.count(m) == 1);
    const auto it = std::find_if(lib.orbits.begin(), lib.orbits.end(),
                                 [&](const PeriodicOrbit& q) { return q.symbol == m; });
    CHECK(it->period == doctest::Approx(o.period).epsilon(1e-8));
    CHECK(it->floquet_exponent == doctest::Approx(o.floquet_exponent).epsilon(1e-6));
  }
}

TEST_CASE("number of z maxima equals the symbol length") {
  const Params p;
  for (const PeriodicOrbit& o : test::library7().orbits) {
    const auto s = sample_orbit(o, p, 0.001);
    int maxima = 0;
    const std::size_t n = s.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double prev = s[(i + n - 1) % n].z(), cur = s[i].z(), next = s[(i + 1) % n].z();
      if (cur > prev && cur >= next) ++maxima;
    }
    CHECK(maxima == static_cast<int>(o.symbol.size()));
  }
}

TEST_CASE("small libraries") {
  const OrbitLibrary two = build_complete_library(2, Params{});
  REQUIRE(two.size() == 1);
  CHECK(two.orbits[0].symbol == "AB");
  CHECK_THROWS_AS(build_complete_library(1, Params{}), Error);
}

TEST_CASE("library file round trip") {
  const OrbitLibrary lib = test::library_prefix(6);
  std::stringstream ss;
  save_library(lib, ss);
  const std::string text = ss.str();
  const OrbitLibrary back = load_library(ss);
  REQUIRE(back.size() == lib.size());
  for (std::size_t i = 0; i < lib.size(); ++i) {
    const PeriodicOrbit &a = lib.orbits[i], &b = back.orbits[i];
    CHECK(a.id == b.id);
    CHECK(a.symbol == b.symbol);
    CHECK(a.period == b.period);
    CHECK(a.floquet_exponent == b.floquet_exponent);
    CHECK(a.multipliers == b.multipliers);
    CHECK(a.node_times == b.node_times);
    CHECK(a.nodes == b.nodes);
  }
  std::stringstream again;
  save_library(back, again);
  CHECK(again.str() == text);

  SUBCASE("truncated file") {
    std::stringstream cut(text.substr(0, text.size() / 2));
    CHECK(code_of([&] { load_library(cut); }) == ErrorCode::kParse);
  }
  SUBCASE("version mismatch") {
    std::string v2 = text;
    v2.replace(v2.find("v1"), 2, "v2");
    std::stringstream in(v2);
    CHECK(code_of([&] { load_library(in); }) == ErrorCode::kVersionMismatch);
  }
  SUBCASE("garbage number reports a line") {
    std::string bad = text;
    const auto pos = bad.find('\n', bad.find("# id=")) + 1;
    bad.replace(pos, 3, "xyz");
    std::stringstream in(bad);
    try {
      load_library(in);
      FAIL("expected a parse error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kParse);
      CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
  }
}

}  // TEST_SUITE
