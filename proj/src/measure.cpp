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

#include "lacuna/measure.hpp"

#include <cmath>
#include <random>
#include <thread>

#include "lacuna/errors.hpp"

namespace lacuna {

bool BoundValue::dominates(const Rational& value) const {
  if (exact) return value <= *exact;
  return mpfr_cmp_q(enclosure.lo(), value.get_mpq_t()) >= 0;
}

bool BoundValue::dominates(double value) const {
  if (exact) return Rational(value) <= *exact;
  return mpfr_cmp_d(enclosure.lo(), value) >= 0;
}

std::string BoundValue::to_string() const {
  return exact ? exact->get_str() : enclosure.to_string(20);
}

namespace {

BoundValue bound_impl(const Norm& R, const Rational& epsilon, long d, const NormSelector& p,
                      const Rational& r) {
  if (!R.positive()) throw DomainError("bound requires R > 0");
  if (r <= 0) throw DomainError("bound requires a cube side r > 0");
  if (d < 1) throw DomainError("bound requires d >= 1");
  auto root = p.dim_root(d);
  auto rv = R.exact_value();
  BoundValue out{std::nullopt, RealInterval()};
  if (root.exact && rv) {
    out.exact = 2 * epsilon * (1 + *root.exact / (*rv * r));
    out.enclosure = RealInterval::from_rational(*out.exact);
  } else {
    RealInterval one = RealInterval::from_int(1);
    out.enclosure = RealInterval::from_rational(2 * epsilon) *
                    (one + root.enclosure / (R.interval() * RealInterval::from_rational(r)));
  }
  return out;
}

}  // namespace

BoundValue lemma2_bound(const Norm& R, const Rational& epsilon, long d, const NormSelector& p) {
  return bound_impl(R, epsilon, d, p, Rational(1));
}

BoundValue corollary1_bound(const Norm& R, const Rational& epsilon, long d,
                            const NormSelector& p, const Rational& r) {
  return bound_impl(R, epsilon, d, p, r);
}

Rational exact_bad_measure_1d(const Rational& a, const Rational& b, const Rational& epsilon,
                              const Rational& u, const Rational& v) {
  if (a == 0) throw DomainError("exact_bad_measure_1d requires a != 0");
  if (!(u < v)) throw DomainError("exact_bad_measure_1d requires u < v");
  if (epsilon < 0) throw DomainError("epsilon must be >= 0");
  if (epsilon >= Rational(1, 2)) return v - u;
  // Solution set is the disjoint union over integers k of
  // {theta : |a theta + b - k| <= eps}, intervals of length 2 eps / |a|.
  Rational m = a > 0 ? a * u + b : a * v + b;
  Rational M = a > 0 ? a * v + b : a * u + b;
  Integer k_lo = ceil_of(m - epsilon), k_hi = floor_of(M + epsilon);
  if (k_lo > k_hi) return Rational(0);
  auto clipped = [&](const Integer& k) {
    Rational p = (Rational(k) - epsilon - b) / a, q = (Rational(k) + epsilon - b) / a;
    if (p > q) std::swap(p, q);
    Rational lo = std::max(p, u), hi = std::min(q, v);
    return hi > lo ? Rational(hi - lo) : Rational(0);
  };
  // Only the outermost intervals can stick out of [u, v].
  Integer count = k_hi - k_lo + 1;
  if (count == 1) return clipped(k_lo);
  Rational full = 2 * epsilon / abs(a);
  return clipped(k_lo) + clipped(k_hi) + Rational(count - 2) * full;
}

McEstimate mc_bad_measure(const BadSetSpec& spec, std::uint64_t samples, std::uint64_t seed,
                          unsigned threads) {
  if (samples < 100) throw DomainError("Monte-Carlo needs at least 100 samples");
  const size_t d = spec.form.dim();
  std::vector<long double> lo(d, 0.0L), width(d, 1.0L), a(d);
  long double volume = 1.0L;
  if (!spec.lo.empty()) {
    if (spec.lo.size() != d || spec.hi.size() != d) throw DomainError("region dimension mismatch");
    for (size_t i = 0; i < d; ++i) {
      if (!(spec.lo[i] < spec.hi[i])) throw DomainError("empty region");
      lo[i] = spec.lo[i].get_d();
      width[i] = Rational(spec.hi[i] - spec.lo[i]).get_d();
      volume *= width[i];
    }
  }
  for (size_t i = 0; i < d; ++i) a[i] = spec.form.a()[i].get_d();
  const long double b = spec.form.b().get_d();
  const long double eps = spec.epsilon.get_d();

  constexpr std::uint64_t kChunk = 1u << 16;
  const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
  threads = std::max(1u, threads);
  std::vector<std::uint64_t> hits(threads, 0);
  auto worker = [&](unsigned t) {
    std::vector<long double> theta(d);
    for (std::uint64_t c = t; c < chunks; c += threads) {
      std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
      std::mt19937_64 gen(ss);
      std::uint64_t n = std::min(kChunk, samples - c * kChunk);
      std::uint64_t h = 0;
      for (std::uint64_t s = 0; s < n; ++s) {
        long double x = b;
        for (size_t i = 0; i < d; ++i) {
          long double u01 = static_cast<long double>(gen() >> 11) * 0x1.0p-53L;
          x += a[i] * (lo[i] + width[i] * u01);
        }
        long double frac = x - std::floor(x);
        if (std::min(frac, 1.0L - frac) <= eps) ++h;
      }
      hits[t] += h;
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  McEstimate out;
  for (auto h : hits) out.hits += h;
  out.samples = samples;
  out.seed = seed;
  out.prng = kMcPrng;
  double frac = static_cast<double>(out.hits) / static_cast<double>(samples);
  out.estimate = frac * static_cast<double>(volume);
  out.stderr_ = std::sqrt(frac * (1 - frac) / static_cast<double>(samples)) *
                static_cast<double>(volume);
  return out;
}

bool cube_meets_bad(const LinearForm& form, const DyadicCube& cube, const Rational& delta) {
  auto [m, M] = form.affine_range(cube);
  // Smallest integer strictly above m - delta.
  Integer k = floor_of(m - delta) + 1;
  return Rational(k) < M + delta;
}

}  // namespace lacuna
