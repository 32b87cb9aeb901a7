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

#ifndef LACUNA_NUMERICS_HPP_
#define LACUNA_NUMERICS_HPP_

#include <gmpxx.h>
#include <mpfr.h>

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace lacuna {

using Integer = mpz_class;
using Rational = mpq_class;

// Parses "p/q", "p", or a finite decimal such as "-0.125". Result is canonical.
Rational parse_rational(std::string_view text);
// Canonical "p/q" (or "p" for integers).
std::string to_string(const Rational& q);

Integer floor_of(const Rational& q);
Integer ceil_of(const Rational& q);

// ||x||: distance from x to the nearest integer. Result lies in [0, 1/2].
Rational nearest_int_dist(const Rational& x);

// 2^e as an exact rational; e may be negative.
Rational pow2(long e);

// Working precision in bits: LACUNA_PRECISION if set, else 256.
long default_precision();

// A closed real interval [lo, hi] with MPFR endpoints. Every operation rounds
// the lower endpoint down and the upper endpoint up, so the result encloses
// the exact value whenever the operands enclose theirs.
class RealInterval {
 public:
  explicit RealInterval(long precision_bits = default_precision());
  RealInterval(const RealInterval& other);
  RealInterval(RealInterval&& other) noexcept;
  RealInterval& operator=(const RealInterval& other);
  RealInterval& operator=(RealInterval&& other) noexcept;
  ~RealInterval();

  static RealInterval from_rational(const Rational& q,
                                    long precision_bits = default_precision());
  static RealInterval from_int(long v, long precision_bits = default_precision());
  static RealInterval hull(const RealInterval& a, const RealInterval& b);

  long precision() const { return static_cast<long>(mpfr_get_prec(lo_)); }
  mpfr_srcptr lo() const { return lo_; }
  mpfr_srcptr hi() const { return hi_; }
  mpfr_ptr lo_mut() { return lo_; }
  mpfr_ptr hi_mut() { return hi_; }

  bool is_point() const { return mpfr_equal_p(lo_, hi_) != 0; }
  double lo_double() const { return mpfr_get_d(lo_, MPFR_RNDD); }
  double hi_double() const { return mpfr_get_d(hi_, MPFR_RNDU); }
  double mid_double() const;
  // Exact rational value of an endpoint (endpoints are dyadic).
  Rational lo_rational() const;
  Rational hi_rational() const;
  // Upper endpoint minus lower endpoint, rounded up.
  double width() const;
  bool contains(const Rational& q) const;
  bool contains(const RealInterval& inner) const;
  // Decimal rendering "[lo, hi]" with the given significant digits.
  std::string to_string(int digits = 20) const;

  friend RealInterval operator+(const RealInterval& a, const RealInterval& b);
  friend RealInterval operator-(const RealInterval& a, const RealInterval& b);
  friend RealInterval operator*(const RealInterval& a, const RealInterval& b);
  friend RealInterval operator/(const RealInterval& a, const RealInterval& b);
  friend RealInterval operator-(const RealInterval& a);

 private:
  mpfr_t lo_;
  mpfr_t hi_;
};

RealInterval log2(const RealInterval& x);
RealInterval ln(const RealInterval& x);
RealInterval exp(const RealInterval& x);
RealInterval sqrt(const RealInterval& x);
RealInterval exp2(const RealInterval& x);
// x^y for x > 0.
RealInterval pow(const RealInterval& x, const RealInterval& y);
RealInterval max(const RealInterval& a, const RealInterval& b);
RealInterval min(const RealInterval& a, const RealInterval& b);
RealInterval abs(const RealInterval& x);
RealInterval euler_e(long precision_bits = default_precision());
RealInterval ln2(long precision_bits = default_precision());

// a.hi <= b.lo, i.e. a <= b holds for every pair of enclosed values.
bool certainly_le(const RealInterval& a, const RealInterval& b);
bool certainly_lt(const RealInterval& a, const RealInterval& b);
inline bool certainly_ge(const RealInterval& a, const RealInterval& b) {
  return certainly_le(b, a);
}
inline bool certainly_gt(const RealInterval& a, const RealInterval& b) {
  return certainly_lt(b, a);
}

// Smallest integer l with 2^l >= v.hi. Requires v.lo > 0.
long guarded_ceil_log2(const RealInterval& v);
// Floor of log2 of the lower endpoint: largest l with 2^l <= v.lo.
long guarded_floor_log2(const RealInterval& v);

// Ceil/floor of an interval when both endpoints agree; throws
// PrecisionExhausted if the interval straddles an integer.
Integer certain_ceil(const RealInterval& v);
Integer certain_floor(const RealInterval& v);

// Expression trees over rationals for the constant formulas used by the
// parameter calculators.
class ConstExpr {
 public:
  enum class Op { kConst, kAdd, kSub, kMul, kDiv, kLog2, kLn, kExp, kSqrt, kMax, kE };

  static ConstExpr constant(const Rational& q);
  static ConstExpr constant(long v) { return constant(Rational(v)); }
  static ConstExpr e();

  friend ConstExpr operator+(const ConstExpr& a, const ConstExpr& b);
  friend ConstExpr operator-(const ConstExpr& a, const ConstExpr& b);
  friend ConstExpr operator*(const ConstExpr& a, const ConstExpr& b);
  friend ConstExpr operator/(const ConstExpr& a, const ConstExpr& b);
  friend ConstExpr log2(const ConstExpr& a);
  friend ConstExpr ln(const ConstExpr& a);
  friend ConstExpr exp(const ConstExpr& a);
  friend ConstExpr sqrt(const ConstExpr& a);
  friend ConstExpr max(const ConstExpr& a, const ConstExpr& b);

  RealInterval evaluate(long precision_bits) const;
  std::string to_string() const;

 private:
  struct Node;
  explicit ConstExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static ConstExpr make(Op op, std::vector<ConstExpr> args);
  std::shared_ptr<const Node> node_;
};

RealInterval eval_constant(const ConstExpr& expr,
                           long precision_bits = default_precision());

}  // namespace lacuna

#endif  // LACUNA_NUMERICS_HPP_
