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

#ifndef LACUNA_FORMS_HPP_
#define LACUNA_FORMS_HPP_

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lacuna/dyadic.hpp"
#include "lacuna/numerics.hpp"

namespace lacuna {

// Selects the coefficient norm |a|_p, p in [1, inf].
class NormSelector {
 public:
  enum class Kind { kOne, kTwo, kInf, kGeneral };

  NormSelector() = default;
  static NormSelector one() { return NormSelector(Kind::kOne, Rational(1)); }
  static NormSelector two() { return NormSelector(Kind::kTwo, Rational(2)); }
  static NormSelector inf() { return NormSelector(Kind::kInf, Rational(0)); }
  // p >= 1; integer values 1 and 2 map onto the dedicated kinds.
  static NormSelector general(const Rational& p);
  // "1", "2", "inf", or a rational string.
  static NormSelector parse(const std::string& text);

  Kind kind() const { return kind_; }
  const Rational& p() const { return p_; }
  std::string to_string() const;

  // d^{1/p} (d^{1/p} = 1 for p = inf) and d^{1/q} with 1/p + 1/q = 1.
  // `exact` is set whenever the power is rational.
  struct Power {
    std::optional<Rational> exact;
    RealInterval enclosure;
  };
  Power dim_root(long d, long precision_bits = default_precision()) const;
  Power dual_dim_root(long d, long precision_bits = default_precision()) const;

  friend bool operator==(const NormSelector& a, const NormSelector& b) {
    return a.kind_ == b.kind_ && a.p_ == b.p_;
  }

 private:
  NormSelector(Kind k, Rational p) : kind_(k), p_(std::move(p)) {}
  Kind kind_ = Kind::kInf;
  Rational p_ = 0;
};

// R = |a|_p, held exactly where possible: the value itself for p in {1, inf},
// its square for p = 2, an enclosure otherwise.
class Norm {
 public:
  enum class Form { kExact, kSquared, kEnclosure };

  static Norm exact(Rational v) { return Norm(Form::kExact, std::move(v), {}); }
  static Norm squared(Rational sq) { return Norm(Form::kSquared, std::move(sq), {}); }
  static Norm enclosure(RealInterval iv) {
    return Norm(Form::kEnclosure, Rational(0), std::move(iv));
  }

  Form form() const { return form_; }
  // The exact value when rational (p = 2 with a rational root included).
  std::optional<Rational> exact_value() const;
  // Exact square for p = 2, exact value squared for p in {1, inf}.
  std::optional<Rational> exact_square() const;
  RealInterval interval(long precision_bits = default_precision()) const;
  bool positive() const;
  Norm scaled(const Rational& r) const;  // |r a|_p for r > 0
  std::string to_string() const;

 private:
  Norm(Form f, Rational v, std::optional<RealInterval> iv)
      : form_(f), value_(std::move(v)), iv_(std::move(iv)) {}
  Form form_;
  Rational value_;
  std::optional<RealInterval> iv_;
};

// Compares num/den >= t exactly where both norms are exact or squared,
// otherwise by outward enclosure (returns false when undecided).
bool ratio_at_least(const Norm& num, const Norm& den, const Rational& t);
RealInterval ratio_interval(const Norm& num, const Norm& den,
                            long precision_bits = default_precision());

// L(theta) = a . theta + b.
class LinearForm {
 public:
  LinearForm() = default;
  LinearForm(std::vector<Rational> a, Rational b);

  size_t dim() const { return a_.size(); }
  const std::vector<Rational>& a() const { return a_; }
  const Rational& b() const { return b_; }
  bool is_zero() const;

  Rational evaluate(std::span<const Rational> theta) const;
  // Exact [min, max] of a.theta + b over the closed cube.
  std::pair<Rational, Rational> affine_range(const DyadicCube& cube) const;
  // Same over an axis-aligned closed box [lo_i, hi_i].
  std::pair<Rational, Rational> affine_range(std::span<const Rational> lo,
                                             std::span<const Rational> hi) const;

  friend bool operator==(const LinearForm&, const LinearForm&) = default;

 private:
  std::vector<Rational> a_;
  Rational b_;
};

Norm norm(const LinearForm& form, const NormSelector& p,
          long precision_bits = default_precision());

// Minimum of ||x|| over the closed interval [lo, hi].
Rational min_nearest_int_dist(const Rational& lo, const Rational& hi);

// An immutable ordered list of forms L_1, L_2, ... sharing a dimension, with
// cached norms R_n. Indexing is 1-based to match the elimination stages.
class FormSequence {
 public:
  FormSequence() = default;
  FormSequence(std::vector<LinearForm> forms, NormSelector p);

  size_t size() const { return forms_.size(); }
  size_t dim() const { return dim_; }
  const NormSelector& p() const { return p_; }
  const LinearForm& form(size_t n) const { return forms_.at(n - 1); }
  const Norm& norm(size_t n) const { return norms_.at(n - 1); }
  const std::vector<LinearForm>& forms() const { return forms_; }

  // Forms n0, n0+1, ... renumbered from 1.
  FormSequence tail(size_t n0) const;
  FormSequence prefix(size_t count) const;

 private:
  std::vector<LinearForm> forms_;
  std::vector<Norm> norms_;
  NormSelector p_;
  size_t dim_ = 0;
};

// L~_n(t) = L_n(r t + v): a~ = r a, b~ = a.v + b.
FormSequence rescale(const FormSequence& seq, std::span<const Rational> v,
                     const Rational& r);

struct ValidationReport {
  size_t window = 1;
  bool monotone = true;
  std::optional<size_t> first_nonmonotone;
  // min over n of R_{n+N}/R_n; exact when available, squared for p = 2.
  std::optional<Rational> min_ratio_exact;
  std::optional<Rational> min_ratio_squared;
  std::optional<RealInterval> min_ratio;
  size_t argmin = 0;
  bool doubling = true;  // R_{n+N} >= 2 R_n for every n in the window
  std::optional<size_t> first_violation;
  bool ok() const { return monotone && doubling; }
};

ValidationReport validate_sequence(const FormSequence& seq, size_t window);

// --- Generators -------------------------------------------------------------

enum class GeneratorFamily {
  kLacunary,     // q_n with q_{n+t} = base * q_n
  kCassels,      // u_r = k^r w
  kSublacunary,  // a_n = n w
  kFibonacci,    // a_n = F_n w
  kCor1,         // a_{n+1} = ceil(a_n (1 + gamma n^-beta))
  kCor3,         // a_n = ceil(exp(gamma n^beta))
};

std::optional<GeneratorFamily> parse_family(const std::string& name);
std::string family_name(GeneratorFamily f);

struct GeneratorParams {
  long d = 1;
  NormSelector p = NormSelector::inf();
  long count = 1;
  long base = 2;
  long t = 1;
  Rational k = 3;
  Rational beta = Rational(1, 2);
  Rational beta1 = 0;
  Rational gamma = 1;
  Rational offset = 0;
  std::vector<Rational> direction;  // empty: family default
};

struct GeneratedSequence {
  FormSequence seq;
  // min over n of R_{n+1}/R_n (exact or as a square for p = 2).
  std::optional<Rational> min_ratio_exact;
  std::optional<Rational> min_ratio_squared;
  // Family statistic: "(R_{n+1}/R_n - 1) n" (sublacunary),
  // "(R_{n+1}/R_n - 1) n^beta" (cor1), "max |ln R_n - gamma n^beta| / n^beta1" (cor3).
  std::string statistic_name;
  std::optional<RealInterval> statistic;
  std::optional<Rational> statistic_exact;
};

GeneratedSequence generate(GeneratorFamily family, const GeneratorParams& params);

}  // namespace lacuna

#endif  // LACUNA_FORMS_HPP_
