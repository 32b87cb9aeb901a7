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
#include "lacuna/errors.hpp"
#include "lacuna/forms.hpp"

using namespace lacuna;

namespace {
LinearForm F(std::vector<Rational> a, Rational b = 0) { return LinearForm(std::move(a), b); }
}  // namespace

TEST_CASE("norms") {
  auto n2 = norm(F({3, 4}), NormSelector::two());
  REQUIRE(n2.exact_value());
  CHECK(*n2.exact_value() == 5);
  CHECK(*n2.exact_square() == 25);
  CHECK(*norm(F({3, -4}), NormSelector::one()).exact_value() == 7);
  CHECK(*norm(F({3, -4}), NormSelector::inf()).exact_value() == 4);
  auto irr = norm(F({1, 1}), NormSelector::two());
  CHECK_FALSE(irr.exact_value());
  CHECK(abs(irr.interval().lo_rational() - parse_rational("1.41421356237309504880168872")) < Rational(1, 1000000000) * Rational(1, 1000000000));
  auto p3 = norm(F({1, 1}), NormSelector::general(3));
  CHECK(abs(p3.interval().lo_rational() - parse_rational("1.25992104989487316476721060")) < Rational(1, 1000000000) * Rational(1, 1000000000));
  CHECK(NormSelector::parse("inf") == NormSelector::inf());
  CHECK(NormSelector::parse("2") == NormSelector::two());
  CHECK_THROWS(NormSelector::general(Rational(1, 2)));
}

TEST_CASE("dimension roots") {
  auto r = NormSelector::two().dim_root(4);
  REQUIRE(r.exact);
  CHECK(*r.exact == 2);
  CHECK(*NormSelector::inf().dim_root(7).exact == 1);
  CHECK(*NormSelector::inf().dual_dim_root(7).exact == 7);
  CHECK(*NormSelector::one().dual_dim_root(7).exact == 1);
  CHECK_FALSE(NormSelector::two().dim_root(2).exact);
}

TEST_CASE("evaluate") {
  std::vector<Rational> t1{Rational(1, 3)};
  CHECK(F({2}).evaluate(t1) == Rational(2, 3));
  std::vector<Rational> t2{Rational(1, 4), Rational(1, 4)};
  CHECK(F({1, 1}, Rational(1, 2)).evaluate(t2) == 1);
  CHECK(F({0, 0}, Rational(7, 5)).evaluate(t2) == Rational(7, 5));
  CHECK_THROWS_AS(F({1, 1}).evaluate(t1), DomainError);
}

TEST_CASE("affine range") {
  auto r1 = F({4}).affine_range(DyadicCube(2, {Integer(0)}));
  CHECK(r1.first == 0);
  CHECK(r1.second == 1);
  auto r2 = F({1, -1}).affine_range(DyadicCube(1, {Integer(0), Integer(0)}));
  CHECK(r2.first == Rational(-1, 2));
  CHECK(r2.second == Rational(1, 2));
  auto r3 = F({3}, Rational(1, 2)).affine_range(DyadicCube(2, {Integer(1)}));
  CHECK(r3.first == Rational(5, 4));
  CHECK(r3.second == 2);
  CHECK(min_nearest_int_dist(Rational(5, 4), 2) == 0);
  CHECK(min_nearest_int_dist(Rational(1, 4), Rational(1, 2)) == Rational(1, 4));
  CHECK(min_nearest_int_dist(Rational(3, 5), Rational(7, 10)) == Rational(3, 10));
}

TEST_CASE("rescale") {
  FormSequence s({F({2})}, NormSelector::inf());
  std::vector<Rational> v{1};
  auto t = rescale(s, v, Rational(1, 2));
  CHECK(t.form(1) == F({1}, 2));
  std::vector<Rational> z{0};
  CHECK(rescale(s, z, 1).form(1) == s.form(1));
  FormSequence s2({F({3, -1})}, NormSelector::two());
  std::vector<Rational> v2{Rational(1, 2), 0};
  auto t2 = rescale(s2, v2, 2);
  CHECK(t2.form(1) == F({6, -2}, Rational(3, 2)));
  CHECK(*t2.norm(1).exact_square() == 40);
  CHECK_THROWS_AS(rescale(s, v, 0), DomainError);
}

TEST_CASE("generators") {
  GeneratorParams p;
  p.count = 10;
  auto lac = generate(GeneratorFamily::kLacunary, p);
  for (size_t n = 1; n <= 10; ++n) CHECK(lac.seq.form(n) == F({pow2(static_cast<long>(n))}));
  CHECK(*lac.min_ratio_exact == 2);

  GeneratorParams c;
  c.d = 2;
  c.p = NormSelector::two();
  c.count = 5;
  c.k = 3;
  auto cas = generate(GeneratorFamily::kCassels, c);
  Rational k = 1;
  for (size_t r = 1; r <= 5; ++r) {
    k *= 3;
    CHECK(cas.seq.form(r) == F({k, 2 * k}));
  }
  CHECK(*cas.min_ratio_squared == 9);

  GeneratorParams s;
  s.count = 100;
  auto sub = generate(GeneratorFamily::kSublacunary, s);
  CHECK(sub.seq.form(37) == F({37}));
  CHECK(*sub.statistic_exact == 1);

  GeneratorParams q;
  q.count = 6;
  q.t = 2;
  auto lac2 = generate(GeneratorFamily::kLacunary, q);
  CHECK(*lac2.seq.norm(3).exact_value() / *lac2.seq.norm(1).exact_value() == 2);
}

TEST_CASE("validate sequence") {
  GeneratorParams p;
  p.count = 20;
  auto rep = validate_sequence(generate(GeneratorFamily::kLacunary, p).seq, 1);
  CHECK(rep.ok());
  CHECK(*rep.min_ratio_exact == 2);

  auto sub = validate_sequence(generate(GeneratorFamily::kSublacunary, p).seq, 1);
  CHECK(sub.monotone);
  CHECK_FALSE(sub.doubling);
  REQUIRE(sub.first_violation);
  CHECK(*sub.first_violation == 2);

  GeneratorParams f;
  f.count = 40;
  auto fib = generate(GeneratorFamily::kFibonacci, f);
  auto fr = validate_sequence(fib.seq, 2);
  CHECK(fr.ok());
  // Oracle: F_{n+2}/F_n computed directly.
  Integer a = 1, b = 1;
  Rational best = 100;
  for (int n = 1; n + 2 <= 40; ++n) {
    Integer c = a + b;
    best = std::min(best, Rational(c, a));
    a = b;
    b = c;
  }
  CHECK(*fr.min_ratio_exact == best);
  CHECK(best == 2);

  FormSequence dec({F({4}), F({2})}, NormSelector::inf());
  auto d = validate_sequence(dec, 1);
  CHECK_FALSE(d.monotone);
  CHECK(*d.first_nonmonotone == 1);
}

TEST_CASE("sequence construction rejects bad input") {
  CHECK_THROWS_AS(FormSequence({F({0})}, NormSelector::inf()), DomainError);
  CHECK_THROWS_AS(FormSequence({F({1}), F({1, 2})}, NormSelector::inf()), DomainError);
}
