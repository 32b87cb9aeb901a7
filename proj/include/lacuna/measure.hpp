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

#ifndef LACUNA_MEASURE_HPP_
#define LACUNA_MEASURE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lacuna/dyadic.hpp"
#include "lacuna/forms.hpp"

namespace lacuna {

// A bound value that is exact when every ingredient is rational.
struct BoundValue {
  std::optional<Rational> exact;
  RealInterval enclosure;

  // True when the bound certainly holds for `value` (value <= bound).
  bool dominates(const Rational& value) const;
  bool dominates(double value) const;
  std::string to_string() const;
};

// 2 eps (1 + d^{1/p} / R), the bound on mu{theta in [0,1]^d : ||a.theta + b|| <= eps}.
BoundValue lemma2_bound(const Norm& R, const Rational& epsilon, long d, const NormSelector& p);
// The same relative to a cube of side r: 2 eps (1 + d^{1/p} / (R r)).
BoundValue corollary1_bound(const Norm& R, const Rational& epsilon, long d,
                            const NormSelector& p, const Rational& r);

// Exact measure of {theta in [u, v] : ||a theta + b|| <= eps}, a != 0.
Rational exact_bad_measure_1d(const Rational& a, const Rational& b, const Rational& epsilon,
                              const Rational& u, const Rational& v);

struct BadSetSpec {
  LinearForm form;
  Rational epsilon;
  // Axis-aligned region prod [lo_i, hi_i]; empty means the unit cube.
  std::vector<Rational> lo;
  std::vector<Rational> hi;
};

struct McEstimate {
  double estimate = 0;
  double stderr_ = 0;
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::string prng;
};

// Name and chunking of the Monte-Carlo generator, recorded in certificates.
inline constexpr const char* kMcPrng =
    "std::mt19937_64 per 65536-sample chunk, seeded by std::seed_seq{seed_lo, seed_hi, "
    "chunk_lo, chunk_hi}; u = (x >> 11) * 2^-53";

// Deterministic for a given seed, independent of `threads`.
McEstimate mc_bad_measure(const BadSetSpec& spec, std::uint64_t samples, std::uint64_t seed,
                          unsigned threads = 1);

// True iff some point of the closed cube has ||L(theta)|| < delta.
bool cube_meets_bad(const LinearForm& form, const DyadicCube& cube, const Rational& delta);

}  // namespace lacuna

#endif  // LACUNA_MEASURE_HPP_
