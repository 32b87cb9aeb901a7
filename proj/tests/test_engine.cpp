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
#include "lacuna/certificate.hpp"
#include "lacuna/engine.hpp"
#include "lacuna/errors.hpp"
#include "lacuna/theorems.hpp"
#include "oracle.hpp"

using namespace lacuna;
using nlohmann::json;

namespace {

FormSequence lacunary(long count) {
  GeneratorParams gp;
  gp.count = count;
  return generate(GeneratorFamily::kLacunary, gp).seq;
}

FormSequence explicit_seq(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  std::vector<LinearForm> forms;
  for (size_t i = 0; i < a.size(); ++i) forms.emplace_back(std::vector<Rational>{a[i]}, b[i]);
  return FormSequence(std::move(forms), NormSelector::inf());
}

Schedule constant(const Rational& delta, const Rational& x) {
  Schedule s;
  s.delta = [delta](size_t) { return delta; };
  s.x = [x](size_t) { return x; };
  s.lambda = RealInterval::from_int(0);
  return s;
}

std::vector<Integer> cells_of(const SurvivorSet& s) {
  std::vector<Integer> out;
  for (const auto& c : s.cubes()) out.push_back(c[0]);
  return out;
}

const ConditionCheck* find(const ConditionReport& r, const std::string& name, long index) {
  for (const auto& c : r.checks)
    if (c.name == name && c.index == index) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("level_for examples") {
  auto p = NormSelector::inf();
  CHECK(level_for(1, Norm::exact(4), Rational(1, 4), RealInterval::from_int(0), 1, p) == 4);
  CHECK(level_for(1, Norm::exact(3), Rational(1, 4), RealInterval::from_int(0), 1, p) == 4);
  CHECK(level_for(1, Norm::exact(4), Rational(1, 4), RealInterval::from_int(1), 1, p) == 5);
}

TEST_CASE("refine keeps the measure") {
  auto full = refine(SurvivorSet::full(1), 2);
  CHECK(full.size() == 4);
  CHECK(full.measure() == 1);
  CHECK(refine(SurvivorSet(1, 3, {}), 5).empty());
  SurvivorSet one(2, 1, {{Integer(1), Integer(0)}});
  auto r = refine(one, 2);
  CHECK(r.size() == 4);
  CHECK(r.measure() == Rational(1, 4));
  CHECK(r.level() == 2);
}

TEST_CASE("eliminate_step matches interval subtraction") {
  auto set = refine(SurvivorSet::full(1), 3);
  LinearForm f({Rational(2)}, Rational(0));
  auto [out, removed] = eliminate_step(set, f, Rational(1, 4));
  oracle::Survivors o;
  o.refine(3);
  o.remove(2, 0, Rational(1, 4));
  CHECK(cells_of(out) == o.cells());
  CHECK(removed == 8 - out.size());
  // cubes around 0, 1/2 and 1 are gone
  for (long c : {0, 3, 4, 7}) CHECK(std::find(o.cells().begin(), o.cells().end(), Integer(c)) == o.cells().end());

  auto [all_gone, k] = eliminate_step(set, f, Rational(3, 5));
  CHECK(all_gone.empty());
  CHECK(k == 8);
  // tiny delta: only cubes whose range touches an integer go
  auto [tiny, k2] = eliminate_step(set, f, Rational(1, 1000000));
  CHECK(cells_of(tiny) == std::vector<Integer>{1, 2, 5, 6});
}

TEST_CASE("run_prop1 with n_max = 0") {
  Prop1Options o;
  o.keep_survivor_sets = true;
  auto r = run_prop1(lacunary(4), constant(Rational(1, 10), Rational(1, 2)), 0, o);
  CHECK(r.trace.empty());
  REQUIRE(r.survivor_sets.size() == 1);
  CHECK(r.survivor_sets[0] == SurvivorSet::full(1));
  CHECK(r.survivor_sets[0].measure() == 1);
}

TEST_CASE("oversized delta is reported, never silently empty") {
  auto seq = lacunary(8);
  auto s = constant(Rational(2, 5), Rational(1, 2));
  try {
    run_prop1(seq, s, 8);
    FAIL("expected ConditionViolated");
  } catch (const SurvivorsEmpty&) {
    FAIL("preconditions should be caught first");
  } catch (const ConditionViolated& e) {
    CHECK(e.condition() == "prop1.cond2");
    CHECK(e.index() == 1);
  }
  Prop1Options o;
  o.check_preconditions = false;
  try {
    run_prop1(seq, s, 8, o);
    FAIL("expected SurvivorsEmpty");
  } catch (const SurvivorsEmpty& e) {
    CHECK(e.index() <= 3);
    CHECK_FALSE(e.condition().empty());
  }
  o.strict = false;
  auto r = run_prop1(seq, s, 8, o);
  CHECK(r.empty);
  CHECK_FALSE(r.violations.empty());
}

TEST_CASE("survivor sets equal the interval-subtraction reference") {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    CAPTURE(seed);
    auto c = oracle::random_case(seed);
    auto seq = explicit_seq(c.a, c.b);
    Schedule s;
    s.delta = [c](size_t n) { return c.delta.at(n - 1); };
    s.x = [c](size_t n) { return c.x.at(n - 1); };
    s.lambda = RealInterval::from_int(0);
    Prop1Options o;
    o.strict = false;
    o.check_preconditions = false;
    o.keep_survivor_sets = true;
    auto r = run_prop1(seq, s, 10, o);
    REQUIRE(r.scale == 1);
    oracle::Survivors ref;
    long level = 0;
    for (size_t n = 1; n <= 10; ++n) {
      level = oracle::level_of(c.a[n - 1], c.delta[n - 1], level);
      ref.refine(level);
      ref.remove(c.a[n - 1], c.b[n - 1], c.delta[n - 1]);
      if (n < r.survivor_sets.size()) {
        CHECK(r.survivor_sets[n].level() == level);
        CHECK(cells_of(r.survivor_sets[n]) == ref.cells());
      } else {
        CHECK(r.empty);
        CHECK(ref.cells().empty());
        break;
      }
    }
  }
}

TEST_CASE("theorem 1 run on 2^n theta: certificate round trip") {
  auto seq = lacunary(14);
  auto th = theorem1_schedule(1, 1);
  Prop1Options o;
  auto r = run_prop1(seq, th.schedule, 14, o);
  REQUIRE(r.extraction);
  for (const auto& st : r.trace) {
    CHECK(st.hypothesis);
    CHECK(st.conclusion);
    CHECK(st.lower);
  }
  CHECK(r.extraction->min_margin >= 0);
  CHECK(verify_certificate(r.certificate, seq).ok);

  // the extracted cube is the lexicographically smallest survivor
  Prop1Options keep;
  keep.keep_survivor_sets = true;
  auto small = run_prop1(seq, th.schedule, 3, keep);
  REQUIRE(small.extraction);
  CHECK(small.extraction->cube.coords() == small.survivor_sets.back().cubes().front());
  CHECK(small.extraction->theta[0] == small.scale * small.extraction->cube.center()[0]);
  keep.cube_budget = 1000;
  CHECK_THROWS_AS(run_prop1(seq, th.schedule, 3, keep), BudgetExceeded);

  // determinism, also across thread counts
  Prop1Options o4;
  o4.threads = 4;
  auto r2 = run_prop1(seq, th.schedule, 14, o4);
  CHECK(canonical_dump(r2.certificate) == canonical_dump(r.certificate));

  SUBCASE("corrupted margin is caught") {
    json bad = r.certificate;
    bad["margins"][5]["margin"] = "-1/1000";
    finalize_certificate(bad);
    auto v = verify_certificate(bad, seq);
    CHECK_FALSE(v.ok);
    CHECK(v.failure.find("n = 6") != std::string::npos);
  }
  SUBCASE("unsealed edit is caught by the digest") {
    json bad = r.certificate;
    bad["min_margin"] = "1/2";
    CHECK_FALSE(verify_certificate(bad, seq).ok);
  }
  SUBCASE("theta moved inside its final cube still verifies") {
    json moved = r.certificate;
    DyadicCube c = r.extraction->cube;
    Rational t = r.extraction->theta[0] + pow2(-(c.level() + 1)) / 2;
    moved["theta"][0] = dyadic_string(t);
    finalize_certificate(moved);
    CHECK(verify_certificate(moved, seq).ok);
  }
  SUBCASE("another sequence is rejected") {
    GeneratorParams gp;
    gp.count = 14;
    gp.base = 3;
    auto other = generate(GeneratorFamily::kLacunary, gp).seq;
    auto v = verify_certificate(r.certificate, other);
    CHECK_FALSE(v.ok);
    CHECK(v.failure.find("digest") != std::string::npos);
  }
}

TEST_CASE("one third stays away from the integers under doubling") {
  Rational third(1, 3);
  for (long n = 1; n < 64; ++n) CHECK(nearest_int_dist(pow2(n) * third) == third);
}

TEST_CASE("rescaled run inside a target cube") {
  auto seq = lacunary(16);
  auto th = theorem1_schedule(1, 1);
  Prop1Options o;
  o.within = Within{{Rational(1, 4)}, Rational(1, 4)};
  auto r = run_prop1(seq, th.schedule, 16, o);
  REQUIRE(r.extraction);
  CHECK(r.extraction->theta[0] >= Rational(1, 4));
  CHECK(r.extraction->theta[0] <= Rational(1, 2));
  CHECK(r.offset > 0);
  CHECK(r.extraction->margins.front().first == r.offset + 1);
  CHECK(verify_certificate(r.certificate, seq).ok);
}

TEST_CASE("two-dimensional run with restriction") {
  GeneratorParams gp;
  gp.d = 2;
  gp.p = NormSelector::two();
  gp.count = 5;
  auto seq = generate(GeneratorFamily::kCassels, gp).seq;
  auto th = theorem1_schedule(1, 2);
  Prop1Options o;
  o.cube_budget = 1 << 16;
  auto r = run_prop1(seq, th.schedule, 5, o);
  REQUIRE(r.extraction);
  CHECK(r.extraction->theta.size() == 2);
  CHECK(verify_certificate(r.certificate, seq).ok);
}

TEST_CASE("condition_report examples") {
  auto seq = lacunary(30);
  auto th = theorem1_schedule(1, 1);
  CHECK(condition_report(seq, th.schedule, 30).failures() == 0);

  auto half = condition_report(seq, constant(Rational(1, 2), Rational(1, 2)), 4);
  auto* c2 = find(half, "prop1.cond2", 1);
  REQUIRE(c2);
  CHECK(c2->pass == std::optional<bool>(false));

  // Q_nu = 1: equal norms, equal deltas
  std::vector<Rational> ones(12, Rational(1)), zeros(12, Rational(0));
  auto flat = explicit_seq(ones, zeros);
  Schedule s = constant(Rational(1, 1000), Rational(1, 2));
  s.x = nullptr;
  Prop2Schedule p2{{0, 2, 4, 6, 8}, std::vector<Rational>(5, Rational(1, 2))};
  auto rep = condition_report(flat, s, 8, &p2, 1);
  auto* c4 = find(rep, "prop2.cond4", 1);
  REQUIRE(c4);
  CHECK(c4->pass == std::optional<bool>(false));

  // eta = 1/2, sigma = 1/5, lambda = 0: condition 3 holds
  Schedule s5 = constant(Rational(1, 40), Rational(1, 2));
  s5.x = nullptr;
  Prop2Schedule p5{{0, 1, 2, 3, 4}, std::vector<Rational>(5, Rational(1, 2))};
  CHECK(prop2_sigma(s5, p5, 1).contains(Rational(1, 5)));
  auto rep5 = condition_report(lacunary(8), s5, 4, &p5, 1);
  auto* c3 = find(rep5, "prop2.cond3", 1);
  REQUIRE(c3);
  CHECK(c3->pass == std::optional<bool>(true));
}

TEST_CASE("proposition 2 tree on 2^n theta") {
  auto th = theorem2_schedule(1, 1, 4);
  auto seq = lacunary(static_cast<long>(th.p2.n[3]) + 2);
  Prop2Options o;
  o.extract_leaves = {0, 1};
  auto r = run_prop2(seq, th.schedule, th.p2, 1, o);
  REQUIRE(r.leaves.size() == 2);
  const TreeNode& root = r.nodes[0];
  CHECK(Rational(root.alive) > (1 - th.p2.eta[0]) * Rational(root.cells));
  for (const auto& node : r.nodes) {
    if (!node.good) continue;
    CHECK(mpfr_cmp_q(node.bound_factor.hi(), Rational(Rational(*node.good) / Rational(node.alive)).get_mpq_t()) < 0);
    if (node.branching_required) CHECK(node.children.size() >= 2);
  }
  REQUIRE(r.extracted.size() == 2);
  for (const auto& e : r.extracted) CHECK(e.min_margin >= 0);
  CHECK(verify_certificate(r.certificate, seq).ok);
  json bad = r.certificate;
  bad["tree"][1]["alive"] = "1";
  finalize_certificate(bad);
  CHECK_FALSE(verify_certificate(bad, seq).ok);
}
