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
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "engine_internal.hpp"
#include "lacuna/errors.hpp"
#include "lacuna/theorems.hpp"

namespace lacuna {

using nlohmann::json;

namespace {

RealInterval Qv(const Rational& v) { return RealInterval::from_rational(v); }

// Smallest multiple of 2^-bits that is >= v.hi.
Rational dyadic_ceil(const RealInterval& v, long bits) {
  Rational s = v.hi_rational() * pow2(bits);
  Integer c = s.get_num() / s.get_den();
  if (Rational(c) < s) c += 1;
  return Rational(c) / pow2(bits);
}

std::string rat_text(const Rational& q) { return to_string(q); }

json check_json(const std::string& name, long nu, std::optional<bool> pass, const std::string& lhs,
                const std::string& rhs, const std::string& note = "") {
  json j = {{"name", name}, {"nu", nu}, {"pass", pass ? json(*pass) : json(nullptr)}, {"lhs", lhs}, {"rhs", rhs}};
  if (!note.empty()) j["note"] = note;
  return j;
}

}  // namespace

RealInterval PowerLog::operator()(const RealInterval& x) const {
  RealInterval v = Qv(coef);
  if (alpha == 1) v = v * x;
  else if (alpha != 0) v = v * pow(x, Qv(alpha));
  if (kappa != 0) {
    RealInterval l = ln(x + RealInterval::from_int(1));
    for (int i = 0; i < kappa; ++i) v = v * l;
  }
  return v;
}

std::string PowerLog::to_string() const {
  std::string s = coef == 1 ? "" : rat_text(coef) + " ";
  if (alpha == 1) s += "x";
  else if (alpha != 0) s += "x^(" + rat_text(alpha) + ")";
  if (kappa == 1) s += (alpha == 0 ? "" : " ") + std::string("ln(x+1)");
  else if (kappa > 1) s += (alpha == 0 ? "" : " ") + std::string("ln(x+1)^") + std::to_string(kappa);
  if (alpha == 0 && kappa == 0) s += coef == 1 ? "1" : "";
  return s;
}

RealInterval Growth::operator()(const RealInterval& x, const PowerLog& f) const {
  if (kind == Kind::kPower) {
    if (C.get_den() == 1 && C > 0 && C <= 64) {
      RealInterval v = x;
      for (long i = 1; i < C.get_num().get_si(); ++i) v = v * x;
      return v;
    }
    return pow(x, Qv(C));
  }
  return x + Qv(k) * f(x);
}

std::string Growth::to_string() const {
  if (kind == Kind::kPower) return "x^(" + rat_text(C) + ")";
  return "x + " + rat_text(k) + " f(x)";
}

json CorollaryFamily::to_json() const {
  json hj = {{"expr", h.to_string()}};
  if (h.kind == Growth::Kind::kPower) hj["power"] = rat_text(h.C);
  else hj["multiple"] = rat_text(h.k);
  return {{"kind", kind},
          {"f", {{"expr", f.to_string()}, {"coef", rat_text(f.coef)}, {"alpha", rat_text(f.alpha)}, {"kappa", f.kappa}}},
          {"h", hj}};
}

CorollaryFamily corollary_family(const std::string& kind, const CorollaryParams& p) {
  if (p.gamma <= 0) throw DomainError("gamma must be > 0");
  CorollaryFamily fam;
  fam.kind = kind;
  // min over the window of (R_{n+1}/R_n - 1) n^e
  auto growth_min = [](Rational e) {
    return [e](const FormSequence& seq, size_t from, size_t to) {
      if (from < 1 || to >= seq.size() || from > to) throw DomainError("growth window outside the sequence");
      GrowthReport r;
      r.statistic = "min (R_{n+1}/R_n - 1) n^" + rat_text(e);
      r.window_from = from;
      r.window_to = to;
      for (size_t n = from; n <= to; ++n) {
        RealInterval v = (ratio_interval(seq.norm(n + 1), seq.norm(n)) - RealInterval::from_int(1)) *
                         (e == 1 ? RealInterval::from_int(static_cast<long>(n))
                                 : pow(RealInterval::from_int(static_cast<long>(n)), Qv(e)));
        r.value = n == from ? v : min(r.value, v);
      }
      return r;
    };
  };
  if (kind == "cor1") {
    if (p.beta <= 0 || p.beta >= 1) throw DomainError("cor1 needs beta in (0, 1)");
    fam.f = PowerLog{1, p.beta, 1};
    fam.h = Growth{Growth::Kind::kPlusMultiple, 1, Rational(2) / p.gamma};
    fam.check = growth_min(p.beta);
  } else if (kind == "cor2") {
    fam.f = PowerLog{1, 1, 1};
    fam.h = Growth{Growth::Kind::kPower, Rational(3) / p.gamma + 1, 1};
    fam.check = growth_min(1);
  } else if (kind == "cor3") {
    if (p.beta1 < 0 || p.beta1 >= p.beta || p.beta > 1) throw DomainError("cor3 needs 0 <= beta1 < beta <= 1");
    if (p.A <= 0) throw DomainError("cor3 needs A > 0");
    Rational C = Rational(2) / (p.beta * p.gamma) * (3 * p.A + 2);
    fam.f = PowerLog{1, 1 - p.beta + p.beta1, p.beta1 == 0 ? 1 : 0};
    fam.h = Growth{Growth::Kind::kPlusMultiple, 1, C + 1};
    Rational g = p.gamma, b = p.beta, b1 = p.beta1;
    // max over the window of |ln R_n - gamma n^beta| / n^beta1, an empirical A
    fam.check = [g, b, b1](const FormSequence& seq, size_t from, size_t to) {
      if (from < 1 || to > seq.size() || from > to) throw DomainError("growth window outside the sequence");
      GrowthReport r;
      r.statistic = "max |ln R_n - gamma n^beta| / n^beta1";
      r.window_from = from;
      r.window_to = to;
      for (size_t n = from; n <= to; ++n) {
        RealInterval x = RealInterval::from_int(static_cast<long>(n));
        RealInterval v = abs(ln(seq.norm(n).interval()) - Qv(g) * pow(x, Qv(b)));
        if (b1 != 0) v = v / pow(x, Qv(b1));
        r.value = n == from ? v : max(r.value, v);
      }
      return r;
    };
  } else {
    throw DomainError("unknown corollary family '" + kind + "' (cor1, cor2, cor3)");
  }
  return fam;
}

RealInterval quadrature_C(const PowerLog& f, const Growth& h, double x_max, long precision_bits) {
  if (!(x_max > 1)) throw DomainError("quadrature grid needs x_max > 1");
  RealInterval top = h(RealInterval::from_rational(Rational(x_max), precision_bits), f);
  double u_end = top.hi_double() * (1 + 1.0 / 512);
  if (!std::isfinite(u_end)) throw DomainError("h(x_max) overflows the quadrature grid");
  const double rho = 1.0 + 1.0 / 1024;
  // 1/f is non-increasing, so left-endpoint sums bound each cell from above.
  std::vector<double> u{1.0};
  std::vector<RealInterval> F{RealInterval::from_int(0, precision_bits)};
  while (u.back() < u_end) {
    double a = u.back(), b = std::nextafter(a * rho, INFINITY);
    RealInterval A = RealInterval::from_rational(Rational(a), precision_bits);
    RealInterval B = RealInterval::from_rational(Rational(b), precision_bits);
    RealInterval cell = (B - A) / f(A);
    F.push_back(F.back() + RealInterval::from_rational(cell.hi_rational(), precision_bits));
    u.push_back(b);
  }
  // sup over x in [u_k, u_{k+1}] is at most the integral from u_k to h(u_{k+1}).
  RealInterval best = RealInterval::from_int(0, precision_bits);
  for (size_t k = 0; k + 1 < u.size() && u[k] < x_max; ++k) {
    RealInterval hx = h(RealInterval::from_rational(Rational(u[k + 1]), precision_bits), f);
    double target = hx.hi_double();
    auto it = std::lower_bound(u.begin(), u.end(), target);
    if (it == u.end()) throw DomainError("quadrature grid too short");
    size_t K = static_cast<size_t>(it - u.begin());
    if (Rational(u[K]) < hx.hi_rational()) ++K;
    if (K >= u.size()) throw DomainError("quadrature grid too short");
    RealInterval v = F[K] - F[k];
    best = max(best, v);
  }
  return best;
}

Thm3Result theorem3_schedule(const Thm3Config& cfg, const FormSequence& seq, std::optional<size_t> n1_opt) {
  const PowerLog f = cfg.family.f;
  const Growth h = cfg.family.h;
  if (seq.size() < 2) throw DomainError("sequence too short");
  if (cfg.n1_min < 1 || cfg.n1_max < cfg.n1_min) throw DomainError("bad n_1 search range");
  const long d = static_cast<long>(seq.dim());
  // Caller's promise, spot-checked: f non-decreasing and h(x) >= x.
  {
    RealInterval prev = f(RealInterval::from_int(1));
    for (double x = 1.25; x <= cfg.x_max; x *= 1.25) {
      RealInterval X = RealInterval::from_rational(Rational(x));
      RealInterval fx = f(X);
      if (certainly_lt(fx, prev)) throw DomainError("f decreases near x = " + std::to_string(x));
      if (certainly_lt(h(X, f), X)) throw DomainError("h(x) < x near x = " + std::to_string(x));
      prev = fx;
    }
  }

  Thm3Result res;
  if (cfg.C) {
    if (*cfg.C <= 0) throw DomainError("C must be > 0");
    res.C = *cfg.C;
    res.C_enclosure = Qv(res.C);
    res.C_from_quadrature = false;
  } else {
    res.C_enclosure = quadrature_C(f, h, cfg.x_max);
    res.C = dyadic_ceil(res.C_enclosure, 30);
  }

  json candidates = json::array();
  const size_t lo = n1_opt ? *n1_opt : cfg.n1_min, hi = n1_opt ? *n1_opt : cfg.n1_max;
  std::optional<size_t> chosen;
  for (size_t n1 = lo; n1 <= hi && !chosen; ++n1) {
    RealInterval N1 = RealInterval::from_int(static_cast<long>(n1));
    RealInterval fn1 = f(N1);
    Rational A = std::max(Rational(9), dyadic_ceil(RealInterval::from_int(40) * Qv(res.C) * fn1 / N1, 20));
    auto memo = std::make_shared<std::map<size_t, Rational>>();
    auto mu = std::make_shared<std::mutex>();
    Rational head = Rational(1) / (A * Rational(n1));
    auto delta = [=](size_t n) -> Rational {
      if (n == 0) throw DomainError("delta_n is defined for n >= 1");
      if (n <= n1) return head;
      std::lock_guard<std::mutex> lock(*mu);
      auto it = memo->find(n);
      if (it != memo->end()) return it->second;
      RealInterval v = fn1 / (Qv(A * Rational(n1)) * f(RealInterval::from_int(static_cast<long>(n))));
      Rational r = v.lo_rational();
      (*memo)[n] = r;
      return r;
    };
    Schedule sched;
    sched.lambda = RealInterval::from_int(0);
    sched.delta = delta;
    Prop2Schedule p2;
    p2.n = {0, n1};
    while (p2.n.size() < 12) {
      RealInterval nx = h(RealInterval::from_int(static_cast<long>(p2.n.back())), f);
      if (nx.hi_double() > 1e15) break;
      size_t next = certain_floor(nx).get_ui();
      if (next <= p2.n.back()) next = p2.n.back() + 1;
      p2.n.push_back(next);
    }
    p2.eta.assign(p2.n.size(), Rational(1, 2));

    json checks = json::array();
    bool ok = true;
    RealInterval chain = RealInterval::from_int(8) * Qv(res.C) * fn1 / Qv(A * Rational(n1));
    bool c1 = certainly_le(chain, Qv(Rational(1, 5)));
    ok = ok && c1;
    checks.push_back(check_json("sigma.chain", 0, c1, chain.to_string(20), "1/5", "8 C f(n_1)/(A n_1)"));
    RealInterval s0 = prop2_sigma(sched, p2, 0);
    bool c0 = certainly_lt(s0, Qv(p2.eta[0]));
    ok = ok && c0;
    checks.push_back(check_json("prop2.cond2", 0, c0, s0.to_string(20), "1/2"));
    for (size_t nu = 1; nu + 1 < p2.n.size(); ++nu) {
      if (p2.n[nu + 1] <= 20000) {
        RealInterval s = prop2_sigma(sched, p2, nu);
        bool c = certainly_le(s, Qv(Rational(1, 5)));
        ok = ok && c;
        checks.push_back(check_json("sigma", static_cast<long>(nu), c, s.to_string(20), "1/5"));
      }
      size_t idx = p2.n[nu + 1] + 1;
      Rational need = Rational(2 * d) / delta(p2.n[nu]);
      if (idx > seq.size()) {
        checks.push_back(check_json("prop2.cond1", static_cast<long>(nu), std::nullopt, "R_" + std::to_string(idx),
                                    rat_text(need), "outside the sequence window"));
        break;
      }
      RealInterval r = ratio_interval(seq.norm(idx), seq.norm(p2.n[nu]));
      bool c = certainly_le(Qv(need), r);
      ok = ok && c;
      checks.push_back(check_json("prop2.cond1", static_cast<long>(nu), c, r.to_string(20), rat_text(need)));
    }
    candidates.push_back({{"n1", n1}, {"A", rat_text(A)}, {"feasible", ok}, {"checks", checks}});
    if (!ok) continue;
    chosen = n1;
    res.n1 = n1;
    res.A = A;
    res.A_over_f = Qv(A) / fn1;
    res.floor_value = (fn1 / Qv(A * Rational(n1))).lo_rational();
    res.schedule = sched;
    res.p2 = p2;
  }
  json window = {{"from", 1}, {"to", seq.size()}};
  if (!chosen) {
    json rep = {{"window", window}, {"candidates", candidates}};
    throw ConditionViolated("theorem3.n1", static_cast<long>(hi),
                            "no feasible n_1 in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                "] on the window 1.." + std::to_string(seq.size()));
  }

  // Proposition 1 pieces: default m(n), and the smallest dyadic x_n meeting
  // 8 delta_n <= x_n prod_{m<k<n} (1 - x_k).
  const size_t top = std::min(cfg.prop1_n_max, seq.size());
  auto xs = std::make_shared<std::vector<Rational>>(1, Rational(0));
  auto ms = std::make_shared<std::vector<size_t>>(1, 0);
  for (size_t n = 1; n <= top; ++n) {
    size_t m = detail::default_m(seq, res.schedule, n);
    Rational window_prod = 1;
    for (size_t k = m + 1; k < n; ++k) window_prod *= 1 - (*xs)[k];
    Rational x = dyadic_ceil(Qv(8 * res.schedule.delta(n) / window_prod), 40);
    if (x >= 1) break;
    xs->push_back(x);
    ms->push_back(m);
  }
  res.prop1_limit = xs->size() - 1;
  const size_t lim = res.prop1_limit;
  res.schedule.x = [xs, lim](size_t n) -> Rational {
    if (n < 1 || n > lim) throw DomainError("x_n is tabulated for 1 <= n <= " + std::to_string(lim));
    return (*xs)[n];
  };
  res.schedule.m = [ms, lim](size_t n) -> size_t {
    if (n < 1 || n > lim) throw DomainError("m(n) is tabulated for 1 <= n <= " + std::to_string(lim));
    return (*ms)[n];
  };
  res.schedule.description = "theorem3 " + cfg.family.kind + " f = " + f.to_string() + ", h = " + h.to_string() +
                             ", n_1 = " + std::to_string(res.n1) + ", A = " + rat_text(res.A) +
                             ", C = " + rat_text(res.C);

  json growth = nullptr;
  if (cfg.family.check && seq.size() >= 2) {
    size_t to = cfg.family.kind == "cor3" ? seq.size() : seq.size() - 1;
    GrowthReport g = cfg.family.check(seq, 1, to);
    growth = {{"statistic", g.statistic}, {"from", g.window_from}, {"to", g.window_to}, {"value", g.value.to_string(20)}};
  }
  json nnu = json::array();
  for (auto v : res.p2.n) nnu.push_back(v);
  res.feasibility = {{"window", window},
                     {"family", cfg.family.to_json()},
                     {"C", {{"value", rat_text(res.C)}, {"enclosure", res.C_enclosure.to_string(20)},
                            {"from_quadrature", res.C_from_quadrature}, {"x_max", cfg.x_max}}},
                     {"candidates", candidates},
                     {"n1", res.n1},
                     {"A", rat_text(res.A)},
                     {"A_over_f_n1", res.A_over_f.to_string(20)},
                     {"n_nu", nnu},
                     {"floor", rat_text(res.floor_value)},
                     {"prop1_limit", res.prop1_limit},
                     {"growth", growth},
                     {"note", "hypotheses are checked on the finite window only; levels beyond it are reported, not assumed"}};
  return res;
}

}  // namespace lacuna
