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

#include "lacuna/theorems.hpp"

#include "lacuna/errors.hpp"

namespace lacuna {

using nlohmann::json;

namespace {

RealInterval I(long v, long prec) { return RealInterval::from_int(v, prec); }
RealInterval Q(const Rational& v, long prec) { return RealInterval::from_rational(v, prec); }

// Certain ceiling of log2 v, or PrecisionExhausted.
long exact_ceil_log2(const RealInterval& v, const std::string& what) {
  long l = guarded_ceil_log2(v);
  if (mpfr_cmp_q(v.lo(), pow2(l - 1).get_mpq_t()) <= 0)
    throw PrecisionExhausted("cannot decide ceil(log2 " + what + ") at working precision");
  return l;
}

ChainCheck confirm(const std::string& name, const RealInterval& lhs, const RealInterval& rhs,
                   bool strict) {
  ChainCheck c{name, false, lhs.to_string(20), rhs.to_string(20)};
  bool yes = strict ? certainly_lt(lhs, rhs) : certainly_le(lhs, rhs);
  bool no = strict ? certainly_le(rhs, lhs) : certainly_lt(rhs, lhs);
  if (yes) {
    c.verified = true;
  } else if (no) {
    throw ConditionViolated(name, 0, "chain " + name + " is false: " + c.lhs + " vs " + c.rhs);
  } else {
    throw PrecisionExhausted("cannot confirm " + name + " at working precision");
  }
  return c;
}

void validate_nd(long N, long d) {
  if (N < 1) throw DomainError("N must be ≥ 1");
  if (d < 1) throw DomainError("d must be ≥ 1");
}

// Shared part of Theorems 1 and 2: u = log2(Nd) + c, t = log2(Nd) + 4 log2 u.
void base_params(Thm1Params& p, long N, long d, long c, long prec) {
  p.N = N;
  p.d = d;
  RealInterval L = log2(I(N * d, prec));
  p.u = L + I(c, prec);
  p.t = L + I(4, prec) * log2(p.u);
  p.lambda = log2(p.t * ln2(prec));
}

void finish_params(Thm1Params& p, long prec) {
  p.delta_exact = p.delta.lo_rational();
  RealInterval tl = p.t * ln2(prec);
  RealInterval v = I(2, prec) * tl * tl * Q(Rational(p.d) / p.delta_exact, prec);
  p.h = exact_ceil_log2(v, "2^{2 lambda + 1} d / delta");
  p.x = Rational(1) / (p.N * p.h);
}

json chain_json(const std::vector<ChainCheck>& chain) {
  json out = json::array();
  for (const auto& c : chain) out.push_back({{"name", c.name}, {"verified", c.verified}, {"lhs", c.lhs}, {"rhs", c.rhs}});
  return out;
}

Schedule constant_schedule(const Thm1Params& p, const std::string& name) {
  Schedule s;
  Rational dl = p.delta_exact, x = p.x;
  size_t window = static_cast<size_t>(p.N * p.h);
  s.delta = [dl](size_t) { return dl; };
  s.x = [x](size_t) { return x; };
  s.m = [window](size_t n) { return n > window ? n - window : size_t(0); };
  s.lambda = p.lambda;
  s.description = name + " N=" + std::to_string(p.N) + " d=" + std::to_string(p.d);
  return s;
}

}  // namespace

json Thm1Params::to_json() const {
  return {{"N", N},
          {"d", d},
          {"u", u.to_string(30)},
          {"t", t.to_string(30)},
          {"lambda", lambda.to_string(30)},
          {"delta", delta.to_string(40)},
          {"delta_lo", dyadic_string(delta.lo_rational())},
          {"delta_hi", dyadic_string(delta.hi_rational())},
          {"delta_decimal", delta.lo_rational().get_d()},
          {"delta_exact", to_string(delta_exact)},
          {"h", h},
          {"x", to_string(x)},
          {"chain", chain_json(chain)}};
}

json Thm2Params::to_json() const {
  json j = Thm1Params::to_json();
  j["eta"] = eta.to_string(30);
  j["eta_exact"] = to_string(eta_exact);
  j["sigma0"] = sigma0_closed.to_string(30);
  j["sigma"] = sigma_closed.to_string(30);
  return j;
}

RealInterval theorem1_delta(long N, long d, long prec) {
  validate_nd(N, d);
  RealInterval L = log2(I(N * d, prec));
  RealInterval t = L + I(4, prec) * log2(L + I(30, prec));
  return I(1, prec) / (I(2 * N, prec) * euler_e(prec) * t);
}

Thm1Result theorem1_schedule(long N, long d, long prec) {
  validate_nd(N, d);
  Thm1Result r;
  Thm1Params& p = r.params;
  base_params(p, N, d, 30, prec);
  p.delta = I(1, prec) / (I(2 * N, prec) * euler_e(prec) * p.t);
  finish_params(p, prec);
  RealInterval h = I(p.h, prec);
  p.chain.push_back(confirm("h <= t - 2.9", h, p.t - Q(Rational(29, 10), prec), false));
  RealInterval f = I(1, prec) + I(1, prec) / (p.t * ln2(prec));
  p.chain.push_back(confirm("(1 + 1/(t ln 2))^2 h <= t", f * f * h, p.t, false));
  r.schedule = constant_schedule(p, "theorem1");
  return r;
}

Thm2Result theorem2_schedule(long N, long d, size_t nu_count, long prec) {
  validate_nd(N, d);
  if (nu_count < 3) throw DomainError("nu_count must be >= 3");
  Thm2Result r;
  Thm2Params& p = r.params;
  base_params(p, N, d, 36, prec);
  p.delta = I(1, prec) / (I(8 * N, prec) * p.t);
  finish_params(p, prec);
  RealInterval h = I(p.h, prec);
  RealInterval inv = I(1, prec) / exp2(p.lambda);
  p.eta = (I(1, prec) + inv) / I(2, prec) * sqrt(h / p.t);
  p.eta_exact = p.eta.lo_rational();
  p.sigma0_closed = p.eta * p.eta / (I(1, prec) + inv);
  p.sigma_closed = p.eta * p.eta;
  p.chain.push_back(confirm("h < t - 2.94", h, p.t - Q(Rational(294, 100), prec), true));
  p.chain.push_back(confirm("2 eta < 1 - 0.02/t", I(2, prec) * p.eta,
                            I(1, prec) - Q(Rational(2, 100), prec) / p.t, true));
  RealInterval l2 = ln2(prec);
  RealInterval q = I(16, prec) * l2 * l2 * I(N * d, prec) * p.t * p.t * p.t;
  p.chain.push_back(confirm("2^h >= 16 ln^2 2 N d t^3", q, Q(pow2(p.h), prec), false));
  p.chain.push_back(confirm("16 ln^2 2 N d t^3 > 100 t", I(100, prec) * p.t, q, true));
  r.schedule = constant_schedule(p, "theorem2");
  r.p2.n.resize(nu_count + 1);
  for (size_t nu = 0; nu <= nu_count; ++nu) r.p2.n[nu] = static_cast<size_t>(N * p.h) * nu;
  r.p2.eta.assign(nu_count + 1, p.eta_exact);
  return r;
}

std::vector<KhintchineRow> khintchine_gamma_comparison(long t_from, long t_to) {
  if (t_from < 1 || t_to < t_from) throw DomainError("t must be >= 1");
  std::vector<KhintchineRow> out;
  for (long t = t_from; t <= t_to; ++t) {
    KhintchineRow row;
    row.t = t;
    row.delta = theorem1_delta(t, 1);
    row.ratio = row.delta * RealInterval::from_int(t) * ln(RealInterval::from_int(t + 1));
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace lacuna
