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

#include <algorithm>
#include <set>

#include "engine_internal.hpp"
#include "lacuna/errors.hpp"
#include "lacuna/measure.hpp"

namespace lacuna {

using detail::Quantity;

namespace detail {

std::string Quantity::str() const { return exact ? lacuna::to_string(*exact) : iv.to_string(20); }

std::optional<bool> le(const Quantity& a, const Quantity& b) {
  if (a.exact && b.exact) return *a.exact <= *b.exact;
  if (certainly_le(a.iv, b.iv)) return true;
  if (certainly_lt(b.iv, a.iv)) return false;
  return std::nullopt;
}

std::optional<bool> lt(const Quantity& a, const Quantity& b) {
  if (a.exact && b.exact) return *a.exact < *b.exact;
  if (certainly_lt(a.iv, b.iv)) return true;
  if (certainly_le(b.iv, a.iv)) return false;
  return std::nullopt;
}

Quantity norm_quantity(const Norm& R) {
  if (auto v = R.exact_value()) return Quantity::of(*v);
  return Quantity::of(R.interval());
}

Quantity ratio_threshold(const RealInterval& lambda, long d, const Rational& delta) {
  if (auto l = exact_lambda(lambda)) return Quantity::of(pow2(2 * *l + 1) * d / delta);
  RealInterval two = RealInterval::from_int(2);
  return Quantity::of(exp2(two * lambda + RealInterval::from_int(1)) *
                      RealInterval::from_rational(Rational(d) / delta));
}

std::optional<bool> ratio_ge(const Norm& num, const Norm& den, const Quantity& threshold) {
  if (threshold.exact) {
    if (ratio_at_least(num, den, *threshold.exact)) return true;
    auto a = num.exact_square(), b = den.exact_square();
    if (a && b) return false;
  }
  RealInterval r = ratio_interval(num, den);
  if (certainly_le(threshold.iv, r)) return true;
  if (certainly_lt(r, threshold.iv)) return false;
  return std::nullopt;
}

Quantity cond2_lhs(const RealInterval& lambda, const Rational& delta) {
  if (auto l = exact_lambda(lambda)) {
    Rational f = 1 + pow2(-*l);
    return Quantity::of(2 * f * f * delta);
  }
  RealInterval f = RealInterval::from_int(1) + RealInterval::from_int(1) / exp2(lambda);
  return Quantity::of(RealInterval::from_rational(2 * delta) * f * f);
}

Quantity start_threshold(const RealInterval& lambda, long d, const NormSelector& p) {
  auto root = p.dim_root(d);
  auto l = exact_lambda(lambda);
  if (l && root.exact) return Quantity::of(pow2(std::labs(*l)) * *root.exact);
  return Quantity::of(exp2(abs(lambda)) * root.enclosure);
}

size_t default_m(const FormSequence& seq, const Schedule& sched, size_t n) {
  const long d = static_cast<long>(seq.dim());
  for (size_t m = n - 1; m >= 1; --m) {
    auto thr = ratio_threshold(sched.lambda, d, sched.delta(m));
    if (ratio_ge(seq.norm(n), seq.norm(m), thr).value_or(false)) return m;
  }
  return 0;
}

size_t resolve_m(const FormSequence& seq, const Schedule& sched, size_t n) {
  size_t m = sched.m ? sched.m(n) : default_m(seq, sched, n);
  if (m >= n) throw DomainError("m(n) must be < n (n = " + std::to_string(n) + ")");
  return m;
}

Integer pow2_int(long e) {
  Integer v = 1;
  mpz_mul_2exp(v.get_mpz_t(), v.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
  return v;
}

long ceil_log2(const Rational& v) {
  if (v <= 0) throw DomainError("log of non-positive value");
  long l = static_cast<long>(mpz_sizeinbase(v.get_num_mpz_t(), 2)) -
           static_cast<long>(mpz_sizeinbase(v.get_den_mpz_t(), 2));
  while (pow2(l) < v) ++l;
  while (pow2(l - 1) >= v) --l;
  return l;
}

}  // namespace detail

std::optional<long> exact_lambda(const RealInterval& lambda) {
  if (!mpfr_equal_p(lambda.lo(), lambda.hi())) return std::nullopt;
  if (!mpfr_integer_p(lambda.lo())) return std::nullopt;
  return mpfr_get_si(lambda.lo(), MPFR_RNDN);
}

RealInterval pow2_interval(const RealInterval& lambda) {
  if (auto l = exact_lambda(lambda)) return RealInterval::from_rational(pow2(*l));
  return exp2(lambda);
}

RealInterval prop2_sigma(const Schedule& sched, const Prop2Schedule& p2, size_t nu) {
  if (nu + 1 > p2.max_nu()) throw DomainError("sigma_nu needs n_{nu+1}");
  RealInterval f = RealInterval::from_int(1) + RealInterval::from_int(1) / pow2_interval(sched.lambda);
  Rational sum = 0;
  size_t lo = nu == 0 ? 0 : p2.n[nu];
  for (size_t n = lo + 1; n <= p2.n[nu + 1]; ++n) sum += sched.delta(n);
  RealInterval s = RealInterval::from_rational(2 * sum) * f;
  return nu == 0 ? s : s * f;
}

RealInterval prop2_Q(const FormSequence& seq, const Schedule& sched, const Prop2Schedule& p2,
                     size_t nu) {
  size_t a = p2.n.at(nu), b = p2.n.at(nu + 1);
  return ratio_interval(seq.norm(b), seq.norm(a)) *
         RealInterval::from_rational(sched.delta(a) / sched.delta(b));
}

long level_for(size_t n, const Norm& R, const Rational& delta, const RealInterval& lambda, long d,
               const NormSelector& p) {
  if (delta <= 0) throw DomainError("delta_n must be > 0");
  if (!R.positive()) throw DomainError("R_n must be > 0");
  auto root = p.dual_dim_root(d);
  auto lam = exact_lambda(lambda);
  auto Rv = R.exact_value();
  long l;
  bool ok;
  if (root.exact && Rv && lam) {
    Rational v = *root.exact * *Rv * pow2(*lam) / delta;
    l = std::max(0L, detail::ceil_log2(v));
    ok = v <= pow2(l);
  } else {
    RealInterval v = root.enclosure * R.interval() * pow2_interval(lambda) /
                     RealInterval::from_rational(delta);
    l = std::max(0L, guarded_ceil_log2(v));
    ok = mpfr_cmp_q(v.hi(), pow2(l).get_mpq_t()) <= 0;
  }
  if (!ok)
    throw ConditionViolated("level", static_cast<long>(n),
                            "level check R d^{1/q} 2^-l <= 2^-lambda delta failed at n = " +
                                std::to_string(n));
  return l;
}

// --- SurvivorSet --------------------------------------------------------------

SurvivorSet::SurvivorSet(size_t dim, long level, std::vector<std::vector<Integer>> cubes)
    : dim_(dim), level_(level), cubes_(std::move(cubes)) {
  if (level < 0) throw DomainError("negative level");
  Integer side = detail::pow2_int(level);
  for (const auto& c : cubes_) {
    if (c.size() != dim) throw DomainError("cube dimension mismatch");
    for (const auto& x : c)
      if (x < 0 || x >= side) throw DomainError("cube coordinate out of range");
  }
  std::sort(cubes_.begin(), cubes_.end());
  cubes_.erase(std::unique(cubes_.begin(), cubes_.end()), cubes_.end());
}

Rational SurvivorSet::measure() const {
  return Rational(Integer(static_cast<unsigned long>(cubes_.size()))) *
         pow2(-static_cast<long>(dim_) * level_);
}

SurvivorSet refine(const SurvivorSet& set, long to_level) {
  if (to_level < set.level()) throw DomainError("refine to a coarser level");
  const long delta = to_level - set.level();
  const size_t d = set.dim();
  if (delta * static_cast<long>(d) > 30) throw BudgetExceeded("refinement too large for a cube list");
  const unsigned long per = 1ul << delta;
  std::vector<std::vector<Integer>> out;
  for (const auto& c : set.cubes()) {
    std::vector<unsigned long> idx(d, 0);
    while (true) {
      std::vector<Integer> child(d);
      for (size_t i = 0; i < d; ++i) child[i] = c[i] * Integer(per) + Integer(idx[i]);
      out.push_back(std::move(child));
      size_t i = d;
      while (i > 0 && ++idx[i - 1] == per) idx[--i] = 0;
      if (i == 0) break;
    }
  }
  return SurvivorSet(d, to_level, std::move(out));
}

std::pair<SurvivorSet, size_t> eliminate_step(const SurvivorSet& set, const LinearForm& form,
                                              const Rational& delta) {
  if (form.dim() != set.dim()) throw DomainError("form dimension mismatch");
  std::vector<std::vector<Integer>> keep;
  for (const auto& c : set.cubes())
    if (!cube_meets_bad(form, DyadicCube(set.level(), c), delta)) keep.push_back(c);
  size_t removed = set.size() - keep.size();
  return {SurvivorSet(set.dim(), set.level(), std::move(keep)), removed};
}

// --- Condition report ---------------------------------------------------------

size_t ConditionReport::failures() const {
  size_t f = 0;
  for (const auto& c : checks)
    if (c.pass && !*c.pass) ++f;
  return f;
}

nlohmann::json ConditionReport::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json j = {{"name", c.name}, {"index", c.index}, {"lhs", c.lhs}, {"rhs", c.rhs}};
    j["pass"] = c.pass ? nlohmann::json(*c.pass) : nlohmann::json("undecided");
    if (!c.note.empty()) j["note"] = c.note;
    out.push_back(std::move(j));
  }
  return out;
}

ConditionReport condition_report(const FormSequence& seq, const Schedule& sched, size_t n_max,
                                 const Prop2Schedule* p2, size_t nu_max) {
  using detail::le;
  ConditionReport rep;
  const long d = static_cast<long>(seq.dim());
  auto add = [&](std::string name, long idx, std::optional<bool> pass, std::string lhs,
                 std::string rhs, std::string note = {}) {
    rep.checks.push_back({std::move(name), idx, pass, std::move(lhs), std::move(rhs), std::move(note)});
  };
  try {
    const size_t upto = std::min(n_max, seq.size());
    if (upto < n_max)
      add("sequence.length", static_cast<long>(n_max), false, std::to_string(seq.size()),
          std::to_string(n_max), "sequence shorter than n_max");
    auto val = validate_sequence(seq.prefix(std::max<size_t>(upto, 1)), 1);
    add("sequence.monotone", val.first_nonmonotone ? static_cast<long>(*val.first_nonmonotone) : 0,
        val.monotone, "R_{n+1}", "R_n");
    std::optional<size_t> bad_delta, bad_x;
    for (size_t n = 1; n <= upto; ++n) {
      if (sched.delta(n) <= 0 || (n > 1 && sched.delta(n) > sched.delta(n - 1)))
        if (!bad_delta) bad_delta = n;
      if (sched.x) {
        Rational x = sched.x(n);
        if (x <= 0 || x >= 1)
          if (!bad_x) bad_x = n;
      }
    }
    add("schedule.delta", bad_delta ? static_cast<long>(*bad_delta) : 0, !bad_delta,
        "delta_n", "0 < delta_n <= delta_{n-1}");
    if (sched.x)
      add("schedule.x", bad_x ? static_cast<long>(*bad_x) : 0, !bad_x, "x_n", "0 < x_n < 1");
    if (upto >= 1) {
      auto thr = detail::start_threshold(sched.lambda, d, seq.p());
      auto r1 = detail::norm_quantity(seq.norm(1));
      auto pass = le(thr, r1);
      add("prop1.start", 1, true, r1.str(), thr.str(),
          pass.value_or(false) ? "" : "R_1 below 2^{|lambda|} d^{1/p}; the engine rescales");
    }
    if (sched.x) {
      for (size_t n = 1; n <= upto; ++n) {
        size_t m = detail::resolve_m(seq, sched, n);
        if (m > 0) {
          auto thr = detail::ratio_threshold(sched.lambda, d, sched.delta(m));
          auto r = ratio_interval(seq.norm(n), seq.norm(m));
          add("prop1.cond1", static_cast<long>(n), detail::ratio_ge(seq.norm(n), seq.norm(m), thr),
              r.to_string(20), thr.str(), "m = " + std::to_string(m));
        }
        Rational window = 1;
        for (size_t k = m + 1; k < n; ++k) window *= 1 - sched.x(k);
        auto lhs = detail::cond2_lhs(sched.lambda, sched.delta(n));
        auto rhs = Quantity::of(sched.x(n) * window);
        add("prop1.cond2", static_cast<long>(n), le(lhs, rhs), lhs.str(), rhs.str(),
            "m = " + std::to_string(m));
      }
    }
    if (p2) {
      const size_t top = p2->max_nu();
      if (top < nu_max + 2 || p2->eta.size() < nu_max + 3)
        add("prop2.schedule", static_cast<long>(nu_max), false, std::to_string(top),
            std::to_string(nu_max + 2), "n_nu and eta_nu must extend to nu_max + 2");
      for (size_t nu = 1; nu <= nu_max && nu + 1 <= top; ++nu) {
        size_t idx = p2->n[nu + 1] + 1;
        auto thr = detail::ratio_threshold(sched.lambda, d, sched.delta(p2->n[nu]));
        if (idx > seq.size()) {
          add("prop2.cond1", static_cast<long>(nu), std::nullopt, "R_" + std::to_string(idx),
              thr.str(), "outside the sequence window");
        } else {
          auto r = ratio_interval(seq.norm(idx), seq.norm(p2->n[nu]));
          add("prop2.cond1", static_cast<long>(nu),
              detail::ratio_ge(seq.norm(idx), seq.norm(p2->n[nu]), thr), r.to_string(20), thr.str());
        }
      }
      if (top >= 1 && !p2->eta.empty()) {
        auto s0 = prop2_sigma(sched, *p2, 0);
        add("prop2.cond2", 0, detail::lt(Quantity::of(s0), Quantity::of(p2->eta[0])),
            s0.to_string(20), to_string(p2->eta[0]));
      }
      for (size_t nu = 1; nu <= nu_max + 1 && nu + 1 <= top && nu < p2->eta.size(); ++nu) {
        auto s = prop2_sigma(sched, *p2, nu);
        Rational rhs = p2->eta[nu] * (1 - p2->eta[nu - 1]);
        add("prop2.cond3", static_cast<long>(nu), le(Quantity::of(s), Quantity::of(rhs)),
            s.to_string(20), to_string(rhs));
      }
      for (size_t nu = 1; nu <= nu_max && nu + 2 <= top && nu + 1 < p2->eta.size(); ++nu) {
        auto s = prop2_sigma(sched, *p2, nu + 1);
        auto Q = prop2_Q(seq, sched, *p2, nu);
        RealInterval factor = RealInterval::from_rational(1 - p2->eta[nu]) -
                              s / RealInterval::from_rational(p2->eta[nu + 1]);
        long fl = guarded_floor_log2(Q);
        long cl = guarded_ceil_log2(Q);
        RealInterval lhs = factor * RealInterval::from_rational(pow2(d * fl));
        RealInterval lhs_ceil = factor * RealInterval::from_rational(pow2(d * cl));
        add("prop2.cond4", static_cast<long>(nu),
            detail::le(Quantity::of(Rational(1)), Quantity::of(lhs)), lhs.to_string(20), "1",
            "floor(log2 Q) = " + std::to_string(fl) + "; ceil variant " + lhs_ceil.to_string(12));
      }
    }
  } catch (const Error& e) {
    add("report.error", 0, false, e.what(), "", "evaluation stopped");
  }
  return rep;
}

}  // namespace lacuna
