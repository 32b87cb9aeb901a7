// Copyright 2026 The Lacuna Authors
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

#include <random>

#include "doctest.h"
#include "lacuna/errors.hpp"
#include "lacuna/measure.hpp"

using namespace lacuna;

namespace {
Norm exact(long v) { return Norm::exact(Rational(v)); }
}  // namespace

TEST_CASE("lemma 2 bound") {
  auto b1 = lemma2_bound(exact(2), Rational(1, 8), 1, NormSelector::inf());
  CHECK(*b1.exact == Rational(3, 8));
  auto b2 = lemma2_bound(exact(10), Rational(1, 10), 4, NormSelector::two());
  CHECK(*b2.exact == Rational(6, 25));
  auto b3 = lemma2_bound(exact(1), Rational(3, 5), 1, NormSelector::inf());
  CHECK(*b3.exact >= 1);
  auto b4 = lemma2_bound(exact(10), Rational(1, 10), 2, NormSelector::two());
  CHECK_FALSE(b4.exact);
  CHECK(abs(b4.enclosure.lo_rational() - parse_rational("0.2282842712474619009760337744")) < Rational(1, 1000000000) * Rational(1, 1000000000));
  CHECK_THROWS_AS(lemma2_bound(exact(0), Rational(1, 8), 1, NormSelector::inf()), DomainError);
}

TEST_CASE("corollary 1 bound") {
  CHECK(*corollary1_bound(exact(4), Rational(1, 8), 1, NormSelector::inf(), Rational(1, 2)).exact ==
        Rational(3, 8));
  CHECK(*corollary1_bound(exact(16), Rational(1, 16), 2, NormSelector::inf(), Rational(1, 4))
             .exact == Rational(5, 32));
  for (long R = 1; R < 20; ++R)
    CHECK(*corollary1_bound(exact(R), Rational(1, 7), 3, NormSelector::one(), 1).exact ==
          *lemma2_bound(exact(R), Rational(1, 7), 3, NormSelector::one()).exact);
  CHECK_THROWS_AS(corollary1_bound(exact(4), Rational(1, 8), 1, NormSelector::inf(), 0),
                  DomainError);
}

TEST_CASE("exact measure in one dimension") {
  CHECK(exact_bad_measure_1d(1, 0, Rational(1, 4), 0, 1) == Rational(1, 2));
  CHECK(exact_bad_measure_1d(3, 0, Rational(1, 8), 0, 1) == Rational(1, 4));
  CHECK(exact_bad_measure_1d(7, 0, Rational(1, 2), 0, 1) == 1);
  // Interval of length 1/R gives exactly 2 eps / R.
  for (long R = 1; R < 30; ++R)
    for (long s = 0; s < 5; ++s) {
      Rational u(s, 7 * R);
      CHECK(exact_bad_measure_1d(R, Rational(1, 3), Rational(1, 5), u, u + Rational(1, R)) ==
            Rational(2, 5) / R);
    }
  CHECK_THROWS_AS(exact_bad_measure_1d(0, 0, Rational(1, 4), 0, 1), DomainError);
}

TEST_CASE("exact measure against hand oracle") {
  // Oracle: explicit interval union for a = 3, eps = 1/8, centers k/3.
  Rational total = 0;
  for (int k = 0; k <= 3; ++k) {
    Rational lo = Rational(k, 3) - Rational(1, 24), hi = Rational(k, 3) + Rational(1, 24);
    if (lo < 0) lo = 0;
    if (hi > 1) hi = 1;
    if (hi > lo) total += hi - lo;
  }
  CHECK(total == Rational(1, 4));
}

TEST_CASE("exact measure invariants") {
  std::mt19937_64 gen(7);
  auto rq = [&](long lo, long hi, long den) {
    std::uniform_int_distribution<long> u(lo * den, hi * den);
    return Rational(u(gen), den);
  };
  for (int i = 0; i < 300; ++i) {
    Rational a = rq(-40, 40, 7);
    if (a == 0) continue;
    Rational b = rq(-3, 3, 11), eps = rq(0, 1, 50) / 2, u = rq(-2, 2, 13);
    Rational m = exact_bad_measure_1d(a, b, eps, u, u + 1);
    auto bound = lemma2_bound(Norm::exact(abs(a)), eps, 1, NormSelector::inf());
    CHECK(m <= *bound.exact);
    CHECK(m == exact_bad_measure_1d(a, b + 1, eps, u, u + 1));
    CHECK(m == exact_bad_measure_1d(-a, -b, eps, u, u + 1));
  }
}

TEST_CASE("monte carlo") {
  BadSetSpec s{LinearForm({1}, 0), Rational(1, 4), {}, {}};
  auto e = mc_bad_measure(s, 1000000, 0);
  CHECK(std::abs(e.estimate - 0.5) <= 4 * e.stderr_);
  auto again = mc_bad_measure(s, 1000000, 0);
  CHECK(again.hits == e.hits);
  auto par = mc_bad_measure(s, 1000000, 0, 4);
  CHECK(par.hits == e.hits);
  CHECK(par.estimate == e.estimate);

  BadSetSpec all{LinearForm({1}, 0), Rational(1, 2), {}, {}};
  CHECK(mc_bad_measure(all, 10000, 3).estimate == 1.0);

  BadSetSpec two{LinearForm({5, 7}, Rational(1, 3)), Rational(1, 20), {}, {}};
  auto t = mc_bad_measure(two, 1000000, 0);
  auto bound = lemma2_bound(norm(two.form, NormSelector::inf()), two.epsilon, 2,
                            NormSelector::inf());
  CHECK(bound.dominates(t.estimate - 4 * t.stderr_));
  CHECK_THROWS_AS(mc_bad_measure(s, 10, 0), DomainError);
}

TEST_CASE("cube meets bad") {
  CHECK(cube_meets_bad(LinearForm({4}, 0), DyadicCube(2, {Integer(0)}), Rational(1, 4)));
  CHECK_FALSE(cube_meets_bad(LinearForm({1}, 0), DyadicCube(2, {Integer(1)}), Rational(1, 8)));
  CHECK(cube_meets_bad(LinearForm({3}, Rational(1, 2)), DyadicCube(2, {Integer(0)}),
                       Rational(1, 100)));
  // Strict comparison: ||theta|| on [1/4, 1/2] is at least exactly 1/4.
  CHECK_FALSE(cube_meets_bad(LinearForm({1}, 0), DyadicCube(2, {Integer(1)}), Rational(1, 4)));
  CHECK(cube_meets_bad(LinearForm({1}, 0), DyadicCube(2, {Integer(1)}), Rational(1, 4) + Rational(1, 1000)));
}

TEST_CASE("cube predicate properties") {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<long> coef(-30, 30), den(1, 9), cc(0, 15), num(0, 1000);
  for (int i = 0; i < 400; ++i) {
    LinearForm f({Rational(coef(gen), den(gen)), Rational(coef(gen), den(gen))},
                 Rational(coef(gen), den(gen)));
    DyadicCube cube(4, {Integer(cc(gen)), Integer(cc(gen))});
    Rational delta(num(gen), 2000);
    bool bad = cube_meets_bad(f, cube, delta);
    if (bad) CHECK(cube_meets_bad(f, cube, delta + Rational(1, 97)));
    if (!bad) {
      for (int v = 0; v < 4; ++v) {
        std::vector<Rational> pt{(v & 1) ? cube.upper(0) : cube.lower(0),
                                 (v & 2) ? cube.upper(1) : cube.lower(1)};
        CHECK(nearest_int_dist(f.evaluate(pt)) >= delta);
      }
      for (int s = 0; s < 5; ++s) {
        std::vector<Rational> pt{cube.lower(0) + cube.side() * Rational(num(gen), 1000),
                                 cube.lower(1) + cube.side() * Rational(num(gen), 1000)};
        CHECK(nearest_int_dist(f.evaluate(pt)) >= delta);
      }
    }
  }
}
