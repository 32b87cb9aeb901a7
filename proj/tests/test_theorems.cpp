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
#include "lacuna/engine.hpp"
#include "lacuna/errors.hpp"
#include "lacuna/theorems.hpp"

using namespace lacuna;

namespace {

// 256-bit mpmath evaluations of the closed forms, frozen here.
const char* kThm1Delta11 = "0.0093715010046453986998939228875295740703886573";
const char* kThm2Delta11 = "0.00604457511303971229484759591355970119476784155";

Rational decimal(const std::string& s) {
  auto dot = s.find('.');
  std::string digits = s.substr(0, dot) + s.substr(dot + 1);
  Integer den = 1;
  for (size_t i = dot + 1; i < s.size(); ++i) den *= 10;
  Rational r(Integer(digits, 10), den);
  r.canonicalize();
  return r;
}

bool rel_close(const RealInterval& v, const char* oracle, const Rational& tol) {
  Rational o = decimal(oracle);
  Rational lo = v.lo_rational(), hi = v.hi_rational();
  return abs(lo - o) <= tol * o && abs(hi - o) <= tol * o;
}

Rational tenth_power(long e) {
  Rational r = 1;
  for (long i = 0; i < e; ++i) r /= 10;
  return r;
}

FormSequence blocks(long N, long d, long count) {
  GeneratorParams gp;
  gp.d = d;
  gp.t = N;
  gp.count = count;
  return generate(GeneratorFamily::kLacunary, gp).seq;
}

}  // namespace

TEST_CASE("theorem 1 delta against the frozen oracle") {
  auto t = theorem1_schedule(1, 1);
  CHECK(rel_close(t.params.delta, kThm1Delta11, tenth_power(30)));
  CHECK(t.params.delta_exact == t.params.delta.lo_rational());
  CHECK(t.params.h == 16);
  CHECK(t.params.x == Rational(1, 16));
  REQUIRE(t.params.chain.size() == 2);
  for (const auto& c : t.params.chain) CHECK(c.verified);
  CHECK(t.params.chain[0].name == "h <= t - 2.9");
  CHECK(abs(t.params.t.lo_rational() - decimal("19.6275623824340741172962334937")) < tenth_power(25));
}

TEST_CASE("theorem 2 delta against the frozen oracle") {
  auto t = theorem2_schedule(1, 1);
  CHECK(rel_close(t.params.delta, kThm2Delta11, tenth_power(30)));
  CHECK(t.params.h == 17);
  REQUIRE(t.params.chain.size() == 4);
  for (const auto& c : t.params.chain) CHECK(c.verified);
  CHECK(t.p2.n[1] == 17);
  CHECK(t.p2.n[3] == 51);
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(theorem1_schedule(0, 1), DomainError);
  CHECK_THROWS_AS(theorem2_schedule(1, 0), DomainError);
  try {
    theorem1_schedule(0, 1);
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()) == "N must be ≥ 1");
  }
}

TEST_CASE("delta decreases in N and theorem 2 sits below theorem 1") {
  for (long d : {1, 2, 3, 5}) {
    for (long N : {1, 2, 3, 7, 16}) {
      CAPTURE(N);
      CAPTURE(d);
      auto a = theorem1_delta(N, d), b = theorem1_delta(2 * N, d);
      CHECK(certainly_lt(b, a));
      CHECK(certainly_lt(theorem2_schedule(N, d, 3).params.delta, theorem1_schedule(N, d).params.delta));
    }
  }
}

TEST_CASE("sigma identity for theorem 2 schedules") {
  Rational tol = tenth_power(25);
  for (long N : {1, 2, 4}) {
    for (long d : {1, 2, 3}) {
      auto t = theorem2_schedule(N, d, 4);
      RealInterval s0 = prop2_sigma(t.schedule, t.p2, 0), s1 = prop2_sigma(t.schedule, t.p2, 1);
      CHECK(abs(s0.lo_rational() - t.params.sigma0_closed.lo_rational()) <= tol);
      CHECK(abs(s0.hi_rational() - t.params.sigma0_closed.hi_rational()) <= tol);
      CHECK(abs(s1.lo_rational() - t.params.sigma_closed.lo_rational()) <= tol);
      CHECK(abs(s1.hi_rational() - t.params.sigma_closed.hi_rational()) <= tol);
    }
  }
}

TEST_CASE("emitted schedules pass condition_report on their sequence family") {
  for (long N : {1, 2, 4, 8}) {
    for (long d : {1, 2, 4, 8}) {
      CAPTURE(N);
      CAPTURE(d);
      auto t1 = theorem1_schedule(N, d);
      long n1 = 3 * N * t1.params.h;
      CHECK(condition_report(blocks(N, d, n1), t1.schedule, static_cast<size_t>(n1)).failures() == 0);
      auto t2 = theorem2_schedule(N, d, 4);
      Schedule s = t2.schedule;
      s.x = nullptr;
      size_t top = t2.p2.n[3];
      CHECK(condition_report(blocks(N, d, static_cast<long>(top) + 1), s, top, &t2.p2, 1).failures() == 0);
    }
  }
}

TEST_CASE("corollary families") {
  auto c1 = corollary_family("cor1", CorollaryParams{Rational(1, 2), 1, 0, 1});
  CHECK(c1.h.k == 2);
  RealInterval four = RealInterval::from_int(4);
  RealInterval ln5 = ln(RealInterval::from_int(5));
  RealInterval f4 = c1.f(four), h4 = c1.h(four, c1.f);
  RealInterval f4_ref = RealInterval::from_int(2) * ln5, h4_ref = four + RealInterval::from_int(4) * ln5;
  CHECK(abs(f4.lo_rational() - f4_ref.lo_rational()) < tenth_power(60));
  CHECK(abs(h4.lo_rational() - h4_ref.lo_rational()) < tenth_power(60));

  auto c2 = corollary_family("cor2", CorollaryParams{Rational(1, 2), 1, 0, 1});
  CHECK(c2.h.C == 4);
  CHECK(c2.h(RealInterval::from_int(10), c2.f).contains(Rational(10000)));
  CHECK(c2.h(RealInterval::from_int(10), c2.f).width() == 0);

  auto c3 = corollary_family("cor3", CorollaryParams{Rational(1, 2), 1, 0, 1});
  CHECK(c3.f.alpha == Rational(1, 2));
  CHECK(c3.f.kappa == 1);
  auto c3b = corollary_family("cor3", CorollaryParams{Rational(3, 4), 1, Rational(1, 4), 1});
  CHECK(c3b.f.kappa == 0);
  CHECK(c3b.f.alpha == Rational(1, 2));
  CHECK(c3b.h.k == Rational(2, 1) / (Rational(3, 4)) * 5 + 1);

  CHECK_THROWS_AS(corollary_family("cor1", CorollaryParams{Rational(1), 1, 0, 1}), DomainError);
  CHECK_THROWS_AS(corollary_family("cor3", CorollaryParams{Rational(1, 2), 1, Rational(1, 2), 1}), DomainError);
  CHECK_THROWS_AS(corollary_family("cor9", {}), DomainError);

  // monotone handles, h(x) >= x, on a sampled grid
  for (const auto* fam : {&c1, &c2, &c3, &c3b}) {
    RealInterval prev_f = fam->f(RealInterval::from_int(1)), prev_h = fam->h(RealInterval::from_int(1), fam->f);
    for (long x = 2; x < 5000; x = x * 5 / 4 + 1) {
      RealInterval X = RealInterval::from_int(x);
      RealInterval f = fam->f(X), h = fam->h(X, fam->f);
      CHECK(certainly_le(prev_f, f));
      CHECK(certainly_le(prev_h, h));
      CHECK(certainly_le(X, h));
      prev_f = f;
      prev_h = h;
    }
  }
}

TEST_CASE("corollary growth checkers report window statistics") {
  GeneratorParams gp;
  gp.count = 50;
  auto seq = generate(GeneratorFamily::kSublacunary, gp).seq;
  auto c2 = corollary_family("cor2", {});
  auto g = c2.check(seq, 1, 49);
  // (R_{n+1}/R_n - 1) n = 1 exactly for a_n = n
  CHECK(g.value.contains(Rational(1)));
  CHECK(g.window_to == 49);
}

TEST_CASE("quadrature bound for the corollary 2 family") {
  auto c2 = corollary_family("cor2", {});
  RealInterval C = quadrature_C(c2.f, c2.h, 1e4);
  // mpmath values of the integral of du/(u ln(u+1)) from x to x^4:
  // x = 2: 1.16664735368733856941, x = 10^4: 1.38629337894414236358; sup tends to ln 4
  CHECK(mpfr_cmp_d(C.lo(), 1.3862933789) > 0);
  CHECK(mpfr_cmp_d(C.hi(), 1.3862943611 + 0.01) < 0);
}

TEST_CASE("theorem 3 schedule for a_n = n") {
  GeneratorParams gp;
  gp.count = 200;
  auto seq = generate(GeneratorFamily::kSublacunary, gp).seq;
  Thm3Config cfg;
  cfg.family = corollary_family("cor2", {});
  cfg.x_max = 1e4;
  cfg.prop1_n_max = 120;
  auto r = theorem3_schedule(cfg, seq);
  CHECK(r.n1 >= 2);
  CHECK(r.A >= 9);
  CHECK(r.schedule.delta(1) == Rational(1) / (r.A * r.n1));
  CHECK(r.schedule.delta(r.n1 + 1) < r.schedule.delta(r.n1));
  CHECK(r.p2.n[2] == r.n1 * r.n1 * r.n1 * r.n1);
  CHECK(r.prop1_limit == 120);
  // sigma chain <= 1/5 by construction of A
  RealInterval chain = RealInterval::from_int(8) * RealInterval::from_rational(r.C) *
                       cfg.family.f(RealInterval::from_int(static_cast<long>(r.n1))) /
                       RealInterval::from_rational(r.A * r.n1);
  CHECK(certainly_le(chain, RealInterval::from_rational(Rational(1, 5))));

  // small C: the max picks 9
  cfg.C = Rational(1, 100);
  auto small = theorem3_schedule(cfg, seq);
  CHECK(small.A == 9);
  CHECK_FALSE(small.C_from_quadrature);
}
