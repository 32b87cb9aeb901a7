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

#include "lacuna/forms.hpp"

#include <algorithm>

#include "lacuna/errors.hpp"

namespace lacuna {

namespace {

// d^{num/den} for integers d >= 1, num >= 0, den >= 1.
NormSelector::Power rational_power(long d, const Integer& num, const Integer& den,
                                   long prec) {
  NormSelector::Power out{std::nullopt, RealInterval(prec)};
  if (num == 0 || d == 1) {
    out.exact = Rational(1);
    out.enclosure = RealInterval::from_int(1, prec);
    return out;
  }
  if (den == 1 && num.fits_ulong_p()) {
    Integer v;
    mpz_ui_pow_ui(v.get_mpz_t(), static_cast<unsigned long>(d), num.get_ui());
    out.exact = Rational(v);
    out.enclosure = RealInterval::from_rational(*out.exact, prec);
    return out;
  }
  if (num.fits_ulong_p() && den.fits_ulong_p()) {
    Integer powered, root;
    mpz_ui_pow_ui(powered.get_mpz_t(), static_cast<unsigned long>(d), num.get_ui());
    if (mpz_root(root.get_mpz_t(), powered.get_mpz_t(), den.get_ui()) != 0) {
      out.exact = Rational(root);
      out.enclosure = RealInterval::from_rational(*out.exact, prec);
      return out;
    }
  }
  out.enclosure = pow(RealInterval::from_int(d, prec),
                      RealInterval::from_rational(Rational(Rational(num) / den), prec));
  return out;
}

}  // namespace

NormSelector NormSelector::general(const Rational& p) {
  if (p < 1) throw DomainError("norm exponent p must be >= 1, got " + p.get_str());
  if (p == 1) return one();
  if (p == 2) return two();
  return NormSelector(Kind::kGeneral, p);
}

NormSelector NormSelector::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf") return inf();
  return general(parse_rational(text));
}

std::string NormSelector::to_string() const {
  switch (kind_) {
    case Kind::kOne: return "1";
    case Kind::kTwo: return "2";
    case Kind::kInf: return "inf";
    case Kind::kGeneral: return p_.get_str();
  }
  return "?";
}

NormSelector::Power NormSelector::dim_root(long d, long prec) const {
  switch (kind_) {
    case Kind::kOne: return rational_power(d, 1, 1, prec);
    case Kind::kTwo: return rational_power(d, 1, 2, prec);
    case Kind::kInf: return rational_power(d, 0, 1, prec);
    case Kind::kGeneral: return rational_power(d, p_.get_den(), p_.get_num(), prec);
  }
  throw DomainError("bad norm kind");
}

NormSelector::Power NormSelector::dual_dim_root(long d, long prec) const {
  switch (kind_) {
    case Kind::kOne: return rational_power(d, 0, 1, prec);
    case Kind::kTwo: return rational_power(d, 1, 2, prec);
    case Kind::kInf: return rational_power(d, 1, 1, prec);
    case Kind::kGeneral:
      return rational_power(d, p_.get_num() - p_.get_den(), p_.get_num(), prec);
  }
  throw DomainError("bad norm kind");
}

// ---------------------------------------------------------------------------

std::optional<Rational> Norm::exact_value() const {
  if (form_ == Form::kExact) return value_;
  if (form_ == Form::kSquared) {
    if (mpz_perfect_square_p(value_.get_num_mpz_t()) &&
        mpz_perfect_square_p(value_.get_den_mpz_t())) {
      Integer n, d;
      mpz_sqrt(n.get_mpz_t(), value_.get_num_mpz_t());
      mpz_sqrt(d.get_mpz_t(), value_.get_den_mpz_t());
      return Rational(n, d);
    }
  }
  return std::nullopt;
}

std::optional<Rational> Norm::exact_square() const {
  if (form_ == Form::kExact) return value_ * value_;
  if (form_ == Form::kSquared) return value_;
  return std::nullopt;
}

RealInterval Norm::interval(long prec) const {
  switch (form_) {
    case Form::kExact: return RealInterval::from_rational(value_, prec);
    case Form::kSquared: return sqrt(RealInterval::from_rational(value_, prec));
    case Form::kEnclosure: return *iv_;
  }
  throw DomainError("bad norm form");
}

bool Norm::positive() const {
  if (form_ == Form::kEnclosure) return mpfr_sgn(iv_->lo()) > 0;
  return value_ > 0;
}

Norm Norm::scaled(const Rational& r) const {
  switch (form_) {
    case Form::kExact: return exact(value_ * r);
    case Form::kSquared: return squared(value_ * r * r);
    case Form::kEnclosure: return enclosure(*iv_ * RealInterval::from_rational(r, iv_->precision()));
  }
  throw DomainError("bad norm form");
}

std::string Norm::to_string() const {
  switch (form_) {
    case Form::kExact: return value_.get_str();
    case Form::kSquared: {
      if (auto v = exact_value()) return v->get_str();
      return "sqrt(" + value_.get_str() + ")";
    }
    case Form::kEnclosure: return iv_->to_string(12);
  }
  return "?";
}

bool ratio_at_least(const Norm& num, const Norm& den, const Rational& t) {
  auto ns = num.exact_square(), ds = den.exact_square();
  if (ns && ds) {
    if (t <= 0) return true;
    return *ns >= t * t * *ds;
  }
  RealInterval r = ratio_interval(num, den);
  return mpfr_cmp_q(r.lo(), t.get_mpq_t()) >= 0;
}

RealInterval ratio_interval(const Norm& num, const Norm& den, long prec) {
  auto ns = num.exact_square(), ds = den.exact_square();
  if (ns && ds) {
    auto nv = num.exact_value(), dv = den.exact_value();
    if (nv && dv) return RealInterval::from_rational(*nv / *dv, prec);
    return sqrt(RealInterval::from_rational(*ns / *ds, prec));
  }
  return num.interval(prec) / den.interval(prec);
}

// ---------------------------------------------------------------------------

LinearForm::LinearForm(std::vector<Rational> a, Rational b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.empty()) throw DomainError("linear form needs dimension >= 1");
}

bool LinearForm::is_zero() const {
  return std::all_of(a_.begin(), a_.end(), [](const Rational& x) { return x == 0; });
}

Rational LinearForm::evaluate(std::span<const Rational> theta) const {
  if (theta.size() != a_.size()) {
    throw DomainError("dimension mismatch: form has d = " + std::to_string(a_.size()) +
                      ", point has " + std::to_string(theta.size()));
  }
  Rational v = b_;
  for (size_t i = 0; i < a_.size(); ++i) v += a_[i] * theta[i];
  return v;
}

std::pair<Rational, Rational> LinearForm::affine_range(const DyadicCube& cube) const {
  if (cube.dim() != a_.size()) {
    throw DomainError("dimension mismatch between form and cube");
  }
  std::vector<Rational> lo, hi;
  for (size_t i = 0; i < cube.dim(); ++i) {
    lo.push_back(cube.lower(i));
    hi.push_back(cube.upper(i));
  }
  return affine_range(lo, hi);
}

std::pair<Rational, Rational> LinearForm::affine_range(std::span<const Rational> lo,
                                                       std::span<const Rational> hi) const {
  if (lo.size() != a_.size() || hi.size() != a_.size()) {
    throw DomainError("dimension mismatch between form and box");
  }
  Rational mn = b_, mx = b_;
  for (size_t i = 0; i < a_.size(); ++i) {
    if (a_[i] >= 0) {
      mn += a_[i] * lo[i];
      mx += a_[i] * hi[i];
    } else {
      mn += a_[i] * hi[i];
      mx += a_[i] * lo[i];
    }
  }
  return {mn, mx};
}

Norm norm(const LinearForm& form, const NormSelector& p, long prec) {
  const auto& a = form.a();
  switch (p.kind()) {
    case NormSelector::Kind::kOne: {
      Rational s = 0;
      for (const auto& x : a) s += abs(x);
      return Norm::exact(s);
    }
    case NormSelector::Kind::kInf: {
      Rational m = 0;
      for (const auto& x : a) m = std::max(m, Rational(abs(x)));
      return Norm::exact(m);
    }
    case NormSelector::Kind::kTwo: {
      Rational s = 0;
      for (const auto& x : a) s += x * x;
      return Norm::squared(s);
    }
    case NormSelector::Kind::kGeneral: {
      if (form.is_zero()) return Norm::exact(0);
      RealInterval pe = RealInterval::from_rational(p.p(), prec);
      RealInterval s = RealInterval::from_int(0, prec);
      for (const auto& x : a) {
        if (x == 0) continue;
        s = s + pow(RealInterval::from_rational(abs(x), prec), pe);
      }
      return Norm::enclosure(pow(s, RealInterval::from_rational(1 / p.p(), prec)));
    }
  }
  throw DomainError("bad norm kind");
}

Rational min_nearest_int_dist(const Rational& lo, const Rational& hi) {
  if (ceil_of(lo) <= floor_of(hi)) return Rational(0);
  return std::min(nearest_int_dist(lo), nearest_int_dist(hi));
}

// ---------------------------------------------------------------------------

FormSequence::FormSequence(std::vector<LinearForm> forms, NormSelector p)
    : forms_(std::move(forms)), p_(std::move(p)) {
  dim_ = forms_.empty() ? 0 : forms_.front().dim();
  norms_.reserve(forms_.size());
  for (size_t i = 0; i < forms_.size(); ++i) {
    if (forms_[i].dim() != dim_) {
      throw DomainError("form " + std::to_string(i + 1) + " has dimension " +
                        std::to_string(forms_[i].dim()) + ", expected " + std::to_string(dim_));
    }
    if (forms_[i].is_zero()) {
      throw DomainError("form " + std::to_string(i + 1) + " has a zero coefficient vector");
    }
    norms_.push_back(lacuna::norm(forms_[i], p_));
  }
}

FormSequence FormSequence::tail(size_t n0) const {
  if (n0 < 1) throw DomainError("tail index must be >= 1");
  std::vector<LinearForm> f;
  for (size_t n = n0; n <= size(); ++n) f.push_back(form(n));
  FormSequence out;
  out.forms_ = std::move(f);
  out.norms_.assign(norms_.begin() + static_cast<long>(std::min(n0 - 1, size())), norms_.end());
  out.p_ = p_;
  out.dim_ = dim_;
  return out;
}

FormSequence FormSequence::prefix(size_t count) const {
  FormSequence out = *this;
  count = std::min(count, size());
  out.forms_.resize(count);
  out.norms_.erase(out.norms_.begin() + static_cast<long>(count), out.norms_.end());
  return out;
}

FormSequence rescale(const FormSequence& seq, std::span<const Rational> v, const Rational& r) {
  if (r <= 0) throw DomainError("rescale factor r must be > 0");
  if (v.size() != seq.dim()) throw DomainError("rescale offset has the wrong dimension");
  std::vector<LinearForm> out;
  out.reserve(seq.size());
  for (const auto& f : seq.forms()) {
    std::vector<Rational> a;
    a.reserve(f.dim());
    for (const auto& x : f.a()) a.push_back(x * r);
    out.emplace_back(std::move(a), f.evaluate(v));
  }
  return FormSequence(std::move(out), seq.p());
}

ValidationReport validate_sequence(const FormSequence& seq, size_t window) {
  if (window < 1) throw DomainError("window N must be >= 1");
  ValidationReport rep;
  rep.window = window;
  for (size_t n = 1; n < seq.size(); ++n) {
    if (!ratio_at_least(seq.norm(n + 1), seq.norm(n), Rational(1))) {
      rep.monotone = false;
      rep.first_nonmonotone = n;
      break;
    }
  }
  bool all_exact = true;
  for (size_t n = 1; n <= seq.size(); ++n) {
    if (!seq.norm(n).exact_square()) all_exact = false;
  }
  for (size_t n = 1; n + window <= seq.size(); ++n) {
    const Norm& hi = seq.norm(n + window);
    const Norm& lo = seq.norm(n);
    bool take = false;
    if (all_exact) {
      Rational sq = *hi.exact_square() / *lo.exact_square();
      if (!rep.min_ratio_squared || sq < *rep.min_ratio_squared) {
        rep.min_ratio_squared = sq;
        take = true;
      }
    } else {
      RealInterval r = ratio_interval(hi, lo);
      if (!rep.min_ratio || mpfr_less_p(r.lo(), rep.min_ratio->lo())) {
        take = true;
      }
      rep.min_ratio = rep.min_ratio ? min(*rep.min_ratio, r) : r;
    }
    if (take) rep.argmin = n;
    if (rep.doubling && !ratio_at_least(hi, lo, Rational(2))) {
      rep.doubling = false;
      rep.first_violation = n;
    }
  }
  if (rep.min_ratio_squared) {
    const Rational& sq = *rep.min_ratio_squared;
    if (mpz_perfect_square_p(sq.get_num_mpz_t()) && mpz_perfect_square_p(sq.get_den_mpz_t())) {
      Integer a, b;
      mpz_sqrt(a.get_mpz_t(), sq.get_num_mpz_t());
      mpz_sqrt(b.get_mpz_t(), sq.get_den_mpz_t());
      rep.min_ratio_exact = Rational(a, b);
      rep.min_ratio = RealInterval::from_rational(*rep.min_ratio_exact);
    } else {
      rep.min_ratio = sqrt(RealInterval::from_rational(sq));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

std::optional<GeneratorFamily> parse_family(const std::string& name) {
  if (name == "lacunary") return GeneratorFamily::kLacunary;
  if (name == "cassels") return GeneratorFamily::kCassels;
  if (name == "sublacunary") return GeneratorFamily::kSublacunary;
  if (name == "fibonacci") return GeneratorFamily::kFibonacci;
  if (name == "cor1") return GeneratorFamily::kCor1;
  if (name == "cor3") return GeneratorFamily::kCor3;
  return std::nullopt;
}

std::string family_name(GeneratorFamily f) {
  switch (f) {
    case GeneratorFamily::kLacunary: return "lacunary";
    case GeneratorFamily::kCassels: return "cassels";
    case GeneratorFamily::kSublacunary: return "sublacunary";
    case GeneratorFamily::kFibonacci: return "fibonacci";
    case GeneratorFamily::kCor1: return "cor1";
    case GeneratorFamily::kCor3: return "cor3";
  }
  return "?";
}

GeneratedSequence generate(GeneratorFamily family, const GeneratorParams& params) {
  const long d = params.d;
  if (d < 1) throw DomainError("dimension d must be >= 1");
  if (params.count < 0) throw DomainError("count must be >= 0");
  std::vector<Rational> w = params.direction;
  if (w.empty()) {
    for (long i = 0; i < d; ++i) {
      w.push_back(family == GeneratorFamily::kCassels ? Rational(i + 1) : Rational(1));
    }
  }
  if (static_cast<long>(w.size()) != d) throw DomainError("direction must have d entries");
  if (std::all_of(w.begin(), w.end(), [](const Rational& x) { return x == 0; })) {
    throw DomainError("direction must be non-zero");
  }

  const long prec = default_precision();
  std::vector<Rational> q;  // scalar multipliers; forms are q_n * w
  GeneratedSequence out;
  switch (family) {
    case GeneratorFamily::kLacunary: {
      if (params.base < 2) throw DomainError("lacunary base must be >= 2");
      if (params.t < 1) throw DomainError("lacunary t must be >= 1");
      for (long n = 1; n <= params.count; ++n) {
        long k = (n - 1) / params.t, j = (n - 1) % params.t;
        Integer p;
        mpz_ui_pow_ui(p.get_mpz_t(), static_cast<unsigned long>(params.base),
                      static_cast<unsigned long>(k + 1));
        q.emplace_back(p * (params.t + j));
      }
      break;
    }
    case GeneratorFamily::kCassels: {
      if (params.k <= 2) throw DomainError("Cassels growth factor k must be > 2");
      Rational cur = 1;
      for (long r = 1; r <= params.count; ++r) {
        cur *= params.k;
        q.push_back(cur);
      }
      break;
    }
    case GeneratorFamily::kSublacunary:
      for (long n = 1; n <= params.count; ++n) q.emplace_back(n);
      break;
    case GeneratorFamily::kFibonacci: {
      Integer a = 1, b = 1;
      for (long n = 1; n <= params.count; ++n) {
        q.emplace_back(a);
        Integer c = a + b;
        a = b;
        b = c;
      }
      break;
    }
    case GeneratorFamily::kCor1: {
      if (params.beta <= 0 || params.beta >= 1) throw DomainError("cor1 requires beta in (0, 1)");
      if (params.gamma <= 0) throw DomainError("cor1 requires gamma > 0");
      RealInterval beta = RealInterval::from_rational(params.beta, prec);
      RealInterval gamma = RealInterval::from_rational(params.gamma, prec);
      Integer cur = 1;
      for (long n = 1; n <= params.count; ++n) {
        q.emplace_back(cur);
        RealInterval growth = RealInterval::from_int(1, prec) +
                              gamma / pow(RealInterval::from_int(n, prec), beta);
        RealInterval next = RealInterval::from_rational(Rational(cur), prec) * growth;
        cur = ceil_of(next.hi_rational());
      }
      std::optional<RealInterval> stat;
      for (long n = 1; n < params.count; ++n) {
        RealInterval r = RealInterval::from_rational(q[n] / q[n - 1] - 1, prec) *
                         pow(RealInterval::from_int(n, prec), beta);
        stat = stat ? min(*stat, r) : r;
      }
      out.statistic_name = "min (R_{n+1}/R_n - 1) n^beta";
      out.statistic = stat;
      break;
    }
    case GeneratorFamily::kCor3: {
      if (!(params.beta1 >= 0 && params.beta1 < params.beta && params.beta <= 1)) {
        throw DomainError("cor3 requires 0 <= beta1 < beta <= 1");
      }
      if (params.gamma <= 0) throw DomainError("cor3 requires gamma > 0");
      RealInterval beta = RealInterval::from_rational(params.beta, prec);
      RealInterval beta1 = RealInterval::from_rational(params.beta1, prec);
      RealInterval gamma = RealInterval::from_rational(params.gamma, prec);
      Integer prev = 1;
      std::optional<RealInterval> stat;
      for (long n = 1; n <= params.count; ++n) {
        RealInterval nn = RealInterval::from_int(n, prec);
        RealInterval target = gamma * pow(nn, beta);
        Integer v = ceil_of(exp(target).hi_rational());
        if (v < prev) v = prev;
        prev = v;
        q.emplace_back(v);
        RealInterval dev = abs(ln(RealInterval::from_rational(Rational(v), prec)) - target) /
                           pow(nn, beta1);
        stat = stat ? max(*stat, dev) : dev;
      }
      out.statistic_name = "max |ln R_n - gamma n^beta| / n^beta1";
      out.statistic = stat;
      break;
    }
  }

  if (family == GeneratorFamily::kSublacunary) {
    out.statistic_name = "min (R_{n+1}/R_n - 1) n";
    if (params.count >= 2) {
      out.statistic_exact = Rational(1);
      out.statistic = RealInterval::from_int(1, prec);
    }
  }

  std::vector<LinearForm> forms;
  forms.reserve(q.size());
  for (const auto& s : q) {
    std::vector<Rational> a;
    for (const auto& x : w) a.push_back(s * x);
    forms.emplace_back(std::move(a), params.offset);
  }
  for (size_t i = 1; i < q.size(); ++i) {
    Rational r = q[i] / q[i - 1];
    if (!out.min_ratio_exact || r < *out.min_ratio_exact) out.min_ratio_exact = r;
  }
  if (out.min_ratio_exact) out.min_ratio_squared = *out.min_ratio_exact * *out.min_ratio_exact;
  out.seq = FormSequence(std::move(forms), params.p);
  return out;
}

}  // namespace lacuna
