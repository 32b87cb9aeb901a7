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

#include "lacuna/numerics.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>

#include "lacuna/errors.hpp"

namespace lacuna {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(),
                         [](unsigned char c) { return std::isspace(c); }),
          s.end());
  if (s.empty()) throw ParseError("empty rational");
  auto bad = [&] { return ParseError("malformed rational '" + std::string(text) + "'"); };
  auto is_int = [](std::string_view t) {
    size_t i = (!t.empty() && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
    if (i >= t.size()) return false;
    for (; i < t.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
    }
    return true;
  };
  Rational q;
  if (auto slash = s.find('/'); slash != std::string::npos) {
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!is_int(num) || !is_int(den) || den[0] == '-' || den[0] == '+') throw bad();
    if (num[0] == '+') num.erase(0, 1);
    Integer d(den);
    if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    q = Rational(Integer(num), d);
  } else if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
    bool neg = !ip.empty() && ip[0] == '-';
    if (!ip.empty() && (ip[0] == '-' || ip[0] == '+')) ip.erase(0, 1);
    if (ip.empty()) ip = "0";
    if (!is_int(ip) || (!fp.empty() && !is_int(fp)) || (!fp.empty() && fp[0] == '-')) {
      throw bad();
    }
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, fp.size());
    Integer num = Integer(ip) * scale + (fp.empty() ? Integer(0) : Integer(fp));
    q = Rational(neg ? Integer(-num) : num, scale);
  } else {
    if (!is_int(s)) throw bad();
    if (s[0] == '+') s.erase(0, 1);
    q = Rational(Integer(s));
  }
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

Integer floor_of(const Rational& q) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Integer ceil_of(const Rational& q) {
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Rational nearest_int_dist(const Rational& x) {
  Rational frac = x - Rational(floor_of(x));
  Rational other = Rational(1) - frac;
  return frac < other ? frac : other;
}

Rational pow2(long e) {
  Integer p;
  mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(e < 0 ? -e : e));
  return e < 0 ? Rational(Integer(1), p) : Rational(p);
}

long default_precision() {
  if (const char* env = std::getenv("LACUNA_PRECISION")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 32 && v <= 1 << 20) return v;
  }
  return 256;
}

// ---------------------------------------------------------------------------
// RealInterval

RealInterval::RealInterval(long precision_bits) {
  mpfr_init2(lo_, precision_bits);
  mpfr_init2(hi_, precision_bits);
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

RealInterval::RealInterval(const RealInterval& other) {
  mpfr_init2(lo_, mpfr_get_prec(other.lo_));
  mpfr_init2(hi_, mpfr_get_prec(other.hi_));
  mpfr_set(lo_, other.lo_, MPFR_RNDD);
  mpfr_set(hi_, other.hi_, MPFR_RNDU);
}

RealInterval::RealInterval(RealInterval&& other) noexcept {
  mpfr_init2(lo_, MPFR_PREC_MIN);
  mpfr_init2(hi_, MPFR_PREC_MIN);
  mpfr_swap(lo_, other.lo_);
  mpfr_swap(hi_, other.hi_);
}

RealInterval& RealInterval::operator=(const RealInterval& other) {
  if (this != &other) {
    mpfr_set_prec(lo_, mpfr_get_prec(other.lo_));
    mpfr_set_prec(hi_, mpfr_get_prec(other.hi_));
    mpfr_set(lo_, other.lo_, MPFR_RNDD);
    mpfr_set(hi_, other.hi_, MPFR_RNDU);
  }
  return *this;
}

RealInterval& RealInterval::operator=(RealInterval&& other) noexcept {
  mpfr_swap(lo_, other.lo_);
  mpfr_swap(hi_, other.hi_);
  return *this;
}

RealInterval::~RealInterval() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

RealInterval RealInterval::from_rational(const Rational& q, long precision_bits) {
  RealInterval r(precision_bits);
  mpfr_set_q(r.lo_, q.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(r.hi_, q.get_mpq_t(), MPFR_RNDU);
  return r;
}

RealInterval RealInterval::from_int(long v, long precision_bits) {
  return from_rational(Rational(v), precision_bits);
}

RealInterval RealInterval::hull(const RealInterval& a, const RealInterval& b) {
  RealInterval r(std::max(a.precision(), b.precision()));
  mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}

double RealInterval::mid_double() const {
  return 0.5 * (mpfr_get_d(lo_, MPFR_RNDN) + mpfr_get_d(hi_, MPFR_RNDN));
}

Rational RealInterval::lo_rational() const {
  Rational q;
  mpfr_get_q(q.get_mpq_t(), lo_);
  return q;
}

Rational RealInterval::hi_rational() const {
  Rational q;
  mpfr_get_q(q.get_mpq_t(), hi_);
  return q;
}

double RealInterval::width() const {
  mpfr_t w;
  mpfr_init2(w, precision());
  mpfr_sub(w, hi_, lo_, MPFR_RNDU);
  double d = mpfr_get_d(w, MPFR_RNDU);
  mpfr_clear(w);
  return d;
}

bool RealInterval::contains(const Rational& q) const {
  return mpfr_cmp_q(lo_, q.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_, q.get_mpq_t()) >= 0;
}

bool RealInterval::contains(const RealInterval& inner) const {
  return mpfr_lessequal_p(lo_, inner.lo_) && mpfr_lessequal_p(inner.hi_, hi_);
}

std::string RealInterval::to_string(int digits) const {
  auto render = [digits](mpfr_srcptr v, mpfr_rnd_t rnd) {
    char* buf = nullptr;
    std::string fmt = "%." + std::to_string(digits) + "R" + (rnd == MPFR_RNDD ? "D" : "U") + "g";
    mpfr_asprintf(&buf, fmt.c_str(), v);
    std::string s(buf);
    mpfr_free_str(buf);
    return s;
  };
  return "[" + render(lo_, MPFR_RNDD) + ", " + render(hi_, MPFR_RNDU) + "]";
}

namespace {

long joint_prec(const RealInterval& a, const RealInterval& b) {
  return std::max(a.precision(), b.precision());
}

void require_positive(const RealInterval& x, const char* op) {
  if (mpfr_sgn(x.lo()) <= 0) {
    throw DomainError(std::string(op) + " of non-positive enclosure " + x.to_string(6));
  }
}

template <typename F>
RealInterval monotone_up(const RealInterval& x, F f) {
  RealInterval r(x.precision());
  f(r.lo_mut(), x.lo(), MPFR_RNDD);
  f(r.hi_mut(), x.hi(), MPFR_RNDU);
  return r;
}

}  // namespace

RealInterval operator+(const RealInterval& a, const RealInterval& b) {
  RealInterval r(joint_prec(a, b));
  mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}

RealInterval operator-(const RealInterval& a, const RealInterval& b) {
  RealInterval r(joint_prec(a, b));
  mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
  mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
  return r;
}

RealInterval operator-(const RealInterval& a) {
  RealInterval r(a.precision());
  mpfr_neg(r.lo_, a.hi_, MPFR_RNDD);
  mpfr_neg(r.hi_, a.lo_, MPFR_RNDU);
  return r;
}

RealInterval operator*(const RealInterval& a, const RealInterval& b) {
  long prec = joint_prec(a, b);
  RealInterval r(prec);
  mpfr_t t;
  mpfr_init2(t, prec);
  bool first = true;
  for (mpfr_srcptr x : {a.lo_, a.hi_}) {
    for (mpfr_srcptr y : {b.lo_, b.hi_}) {
      mpfr_mul(t, x, y, MPFR_RNDD);
      if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
      mpfr_mul(t, x, y, MPFR_RNDU);
      if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
      first = false;
    }
  }
  mpfr_clear(t);
  return r;
}

RealInterval operator/(const RealInterval& a, const RealInterval& b) {
  if (mpfr_sgn(b.lo_) <= 0 && mpfr_sgn(b.hi_) >= 0) {
    throw DomainError("division by an interval containing zero " + b.to_string(6));
  }
  long prec = joint_prec(a, b);
  RealInterval r(prec);
  mpfr_t t;
  mpfr_init2(t, prec);
  bool first = true;
  for (mpfr_srcptr x : {a.lo_, a.hi_}) {
    for (mpfr_srcptr y : {b.lo_, b.hi_}) {
      mpfr_div(t, x, y, MPFR_RNDD);
      if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
      mpfr_div(t, x, y, MPFR_RNDU);
      if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
      first = false;
    }
  }
  mpfr_clear(t);
  return r;
}

RealInterval log2(const RealInterval& x) {
  require_positive(x, "log2");
  return monotone_up(x, mpfr_log2);
}

RealInterval ln(const RealInterval& x) {
  require_positive(x, "ln");
  return monotone_up(x, mpfr_log);
}

RealInterval exp(const RealInterval& x) { return monotone_up(x, mpfr_exp); }

RealInterval exp2(const RealInterval& x) { return monotone_up(x, mpfr_exp2); }

RealInterval sqrt(const RealInterval& x) {
  if (mpfr_sgn(x.lo()) < 0) throw DomainError("sqrt of negative enclosure " + x.to_string(6));
  return monotone_up(x, mpfr_sqrt);
}

RealInterval pow(const RealInterval& x, const RealInterval& y) {
  require_positive(x, "pow");
  return exp(y * ln(x));
}

RealInterval max(const RealInterval& a, const RealInterval& b) {
  RealInterval r(joint_prec(a, b));
  mpfr_max(r.lo_mut(), a.lo(), b.lo(), MPFR_RNDD);
  mpfr_max(r.hi_mut(), a.hi(), b.hi(), MPFR_RNDU);
  return r;
}

RealInterval min(const RealInterval& a, const RealInterval& b) {
  RealInterval r(joint_prec(a, b));
  mpfr_min(r.lo_mut(), a.lo(), b.lo(), MPFR_RNDD);
  mpfr_min(r.hi_mut(), a.hi(), b.hi(), MPFR_RNDU);
  return r;
}

RealInterval abs(const RealInterval& x) {
  if (mpfr_sgn(x.lo()) >= 0) return x;
  if (mpfr_sgn(x.hi()) <= 0) return -x;
  RealInterval r(x.precision());
  mpfr_set_zero(r.lo_mut(), 1);
  mpfr_t n;
  mpfr_init2(n, x.precision());
  mpfr_neg(n, x.lo(), MPFR_RNDU);
  mpfr_max(r.hi_mut(), n, x.hi(), MPFR_RNDU);
  mpfr_clear(n);
  return r;
}

RealInterval euler_e(long precision_bits) {
  return exp(RealInterval::from_int(1, precision_bits));
}

RealInterval ln2(long precision_bits) {
  RealInterval r(precision_bits);
  mpfr_const_log2(r.lo_mut(), MPFR_RNDD);
  mpfr_const_log2(r.hi_mut(), MPFR_RNDU);
  return r;
}

bool certainly_le(const RealInterval& a, const RealInterval& b) {
  return mpfr_lessequal_p(a.hi(), b.lo()) != 0;
}

bool certainly_lt(const RealInterval& a, const RealInterval& b) {
  return mpfr_less_p(a.hi(), b.lo()) != 0;
}

long guarded_ceil_log2(const RealInterval& v) {
  if (mpfr_sgn(v.lo()) <= 0) {
    throw DomainError("guarded_ceil_log2 of non-positive interval " + v.to_string(6));
  }
  // hi = m * 2^e with m in [1/2, 1).
  long e = mpfr_get_exp(v.hi());
  mpfr_t m;
  mpfr_init2(m, v.precision());
  mpfr_set(m, v.hi(), MPFR_RNDN);
  mpfr_set_exp(m, 0);
  bool power_of_two = mpfr_cmp_d(m, 0.5) == 0;
  mpfr_clear(m);
  return power_of_two ? e - 1 : e;
}

long guarded_floor_log2(const RealInterval& v) {
  if (mpfr_sgn(v.lo()) <= 0) {
    throw DomainError("guarded_floor_log2 of non-positive interval " + v.to_string(6));
  }
  return static_cast<long>(mpfr_get_exp(v.lo())) - 1;
}

Integer certain_ceil(const RealInterval& v) {
  Integer a = ceil_of(v.lo_rational()), b = ceil_of(v.hi_rational());
  if (a != b) throw PrecisionExhausted("ceiling undecided for " + v.to_string(12));
  return a;
}

Integer certain_floor(const RealInterval& v) {
  Integer a = floor_of(v.lo_rational()), b = floor_of(v.hi_rational());
  if (a != b) throw PrecisionExhausted("floor undecided for " + v.to_string(12));
  return a;
}

// ---------------------------------------------------------------------------
// ConstExpr

struct ConstExpr::Node {
  Op op;
  Rational value;
  std::vector<ConstExpr> args;
};

ConstExpr ConstExpr::make(Op op, std::vector<ConstExpr> args) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->args = std::move(args);
  return ConstExpr(std::move(n));
}

ConstExpr ConstExpr::constant(const Rational& q) {
  auto n = std::make_shared<Node>();
  n->op = Op::kConst;
  n->value = q;
  return ConstExpr(std::move(n));
}

ConstExpr ConstExpr::e() { return make(Op::kE, {}); }

ConstExpr operator+(const ConstExpr& a, const ConstExpr& b) {
  return ConstExpr::make(ConstExpr::Op::kAdd, {a, b});
}
ConstExpr operator-(const ConstExpr& a, const ConstExpr& b) {
  return ConstExpr::make(ConstExpr::Op::kSub, {a, b});
}
ConstExpr operator*(const ConstExpr& a, const ConstExpr& b) {
  return ConstExpr::make(ConstExpr::Op::kMul, {a, b});
}
ConstExpr operator/(const ConstExpr& a, const ConstExpr& b) {
  return ConstExpr::make(ConstExpr::Op::kDiv, {a, b});
}
ConstExpr log2(const ConstExpr& a) { return ConstExpr::make(ConstExpr::Op::kLog2, {a}); }
ConstExpr ln(const ConstExpr& a) { return ConstExpr::make(ConstExpr::Op::kLn, {a}); }
ConstExpr exp(const ConstExpr& a) { return ConstExpr::make(ConstExpr::Op::kExp, {a}); }
ConstExpr sqrt(const ConstExpr& a) { return ConstExpr::make(ConstExpr::Op::kSqrt, {a}); }
ConstExpr max(const ConstExpr& a, const ConstExpr& b) {
  return ConstExpr::make(ConstExpr::Op::kMax, {a, b});
}

RealInterval ConstExpr::evaluate(long precision_bits) const {
  const Node& n = *node_;
  auto arg = [&](size_t i) { return n.args[i].evaluate(precision_bits); };
  switch (n.op) {
    case Op::kConst: return RealInterval::from_rational(n.value, precision_bits);
    case Op::kE: return euler_e(precision_bits);
    case Op::kAdd: return arg(0) + arg(1);
    case Op::kSub: return arg(0) - arg(1);
    case Op::kMul: return arg(0) * arg(1);
    case Op::kDiv: return arg(0) / arg(1);
    case Op::kLog2: return lacuna::log2(arg(0));
    case Op::kLn: return lacuna::ln(arg(0));
    case Op::kExp: return lacuna::exp(arg(0));
    case Op::kSqrt: return lacuna::sqrt(arg(0));
    case Op::kMax: return lacuna::max(arg(0), arg(1));
  }
  throw DomainError("unknown expression node");
}

std::string ConstExpr::to_string() const {
  const Node& n = *node_;
  auto a = [&](size_t i) { return n.args[i].to_string(); };
  switch (n.op) {
    case Op::kConst: return lacuna::to_string(n.value);
    case Op::kE: return "e";
    case Op::kAdd: return "(" + a(0) + " + " + a(1) + ")";
    case Op::kSub: return "(" + a(0) + " - " + a(1) + ")";
    case Op::kMul: return "(" + a(0) + " * " + a(1) + ")";
    case Op::kDiv: return "(" + a(0) + " / " + a(1) + ")";
    case Op::kLog2: return "log2(" + a(0) + ")";
    case Op::kLn: return "ln(" + a(0) + ")";
    case Op::kExp: return "exp(" + a(0) + ")";
    case Op::kSqrt: return "sqrt(" + a(0) + ")";
    case Op::kMax: return "max(" + a(0) + ", " + a(1) + ")";
  }
  return "?";
}

RealInterval eval_constant(const ConstExpr& expr, long precision_bits) {
  return expr.evaluate(precision_bits);
}

}  // namespace lacuna
