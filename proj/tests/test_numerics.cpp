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

#include "doctest.h"
#include "lacuna/dyadic.hpp"
#include "lacuna/errors.hpp"
#include "lacuna/numerics.hpp"

using namespace lacuna;

namespace {
RealInterval iv(const char* lo, const char* hi) {
  return RealInterval::hull(RealInterval::from_rational(parse_rational(lo)),
                            RealInterval::from_rational(parse_rational(hi)));
}
// Within 1e-27 of a truncated decimal oracle.
bool near(const RealInterval& v, const char* oracle) {
  Rational q = parse_rational(oracle), tol = Rational(1, 1000000000) * Rational(1, 1000000000) * Rational(1, 1000000000);
  return v.hi_rational() >= q - tol && v.lo_rational() <= q + tol;
}
}  // namespace

TEST_CASE("nearest integer distance") {
  CHECK(nearest_int_dist(Rational(7, 3)) == Rational(1, 3));
  CHECK(nearest_int_dist(Rational(1, 2)) == Rational(1, 2));
  CHECK(nearest_int_dist(Rational(-9, 4)) == Rational(1, 4));
  CHECK(nearest_int_dist(Rational(5)) == 0);
  for (int p = -40; p <= 40; ++p) {
    Rational x(p, 7);
    CHECK(nearest_int_dist(x) == nearest_int_dist(-x));
    CHECK(nearest_int_dist(x) == nearest_int_dist(x + 3));
    CHECK(nearest_int_dist(x) <= Rational(1, 2));
  }
}

TEST_CASE("parse rationals") {
  CHECK(parse_rational("3/6") == Rational(1, 2));
  CHECK(parse_rational("-0.25") == Rational(-1, 4));
  CHECK(parse_rational("12") == 12);
  CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
  CHECK_THROWS_AS(parse_rational("abc"), ParseError);
}

TEST_CASE("guarded ceil log2") {
  CHECK(guarded_ceil_log2(RealInterval::from_int(16)) == 4);
  CHECK(guarded_ceil_log2(iv("15.9", "16.1")) == 5);
  CHECK(guarded_ceil_log2(RealInterval::from_int(1)) == 0);
  CHECK(guarded_ceil_log2(RealInterval::from_rational(Rational(3, 8))) == -1);
  CHECK_THROWS_AS(guarded_ceil_log2(iv("-1", "2")), DomainError);
  // 2^l always covers the upper endpoint.
  for (int k = 1; k < 200; ++k) {
    RealInterval v = RealInterval::from_rational(Rational(k * 37, 11));
    long l = guarded_ceil_log2(v);
    CHECK(pow2(l) >= Rational(k * 37, 11));
    CHECK(pow2(l - 1) < Rational(k * 37, 11));
  }
}

TEST_CASE("constant expressions") {
  auto l30 = eval_constant(log2(ConstExpr::constant(30)), 256);
  CHECK(near(l30, "4.906890595608518529324058373"));
  CHECK(l30.width() <= Rational(1, 1000000000));
  auto two_e = eval_constant(ConstExpr::constant(2) * ConstExpr::e(), 256);
  CHECK(near(two_e, "5.436563656918090470720574942"));
  auto l2 = eval_constant(ln(ConstExpr::constant(2)), 256);
  CHECK(near(l2, "0.6931471805599453094172321214"));
  CHECK(l2.width() < Rational(1, Integer("1000000000000000000000000000000000000000000000000000000000000000000000")));
  CHECK_THROWS_AS(eval_constant(log2(ConstExpr::constant(0)), 64), DomainError);
  CHECK_THROWS_AS(eval_constant(ln(ConstExpr::constant(-3)), 64), DomainError);
}

TEST_CASE("interval arithmetic encloses exact results") {
  for (int i = 1; i < 50; ++i) {
    Rational a(i, 13), b(i + 3, 7);
    auto A = RealInterval::from_rational(a), B = RealInterval::from_rational(b);
    CHECK((A + B).contains(a + b));
    CHECK((A - B).contains(a - b));
    CHECK((A * B).contains(a * b));
    CHECK((A / B).contains(a / b));
  }
  CHECK_THROWS_AS(RealInterval::from_int(1) / iv("-1", "1"), DomainError);
  CHECK(certainly_lt(RealInterval::from_int(1), RealInterval::from_int(2)));
  CHECK_FALSE(certainly_lt(iv("1", "3"), iv("2", "4")));
  CHECK_THROWS_AS(certain_ceil(iv("0.9", "1.1")), PrecisionExhausted);
  CHECK(certain_ceil(iv("1.1", "1.2")) == 2);
}

TEST_CASE("dyadic cubes") {
  DyadicCube c(2, {Integer(1), Integer(3)});
  CHECK(c.lower(0) == Rational(1, 4));
  CHECK(c.upper(1) == 1);
  CHECK(c.center() == std::vector<Rational>{Rational(3, 8), Rational(7, 8)});
  CHECK(c.child(0b10) == DyadicCube(3, {Integer(3), Integer(6)}));
  CHECK(c.child(0b10).ancestor(2) == c);
  CHECK(c.contains(c.child(3)));
  CHECK_THROWS_AS(DyadicCube(1, {Integer(2)}), DomainError);
  CHECK(dyadic_string(Rational(3, 8)) == "3/2^3");
  CHECK(dyadic_string(Rational(1, 3)) == "1/3");
  CHECK(parse_dyadic_or_rational("5/2^4") == Rational(5, 16));
  CHECK(parse_dyadic_or_rational(dyadic_string(Rational(-7, 1024))) == Rational(-7, 1024));
}
