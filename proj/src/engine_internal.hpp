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

#ifndef LACUNA_SRC_ENGINE_INTERNAL_HPP_
#define LACUNA_SRC_ENGINE_INTERNAL_HPP_

#include <optional>
#include <string>

#include "lacuna/engine.hpp"

namespace lacuna::detail {

// A quantity held exactly when possible, else as an outward enclosure.
struct Quantity {
  std::optional<Rational> exact;
  RealInterval iv;
  static Quantity of(const Rational& q) { return {q, RealInterval::from_rational(q)}; }
  static Quantity of(RealInterval v) { return {std::nullopt, std::move(v)}; }
  std::string str() const;
};

// a <= b: true, false, or undecided.
std::optional<bool> le(const Quantity& a, const Quantity& b);
std::optional<bool> lt(const Quantity& a, const Quantity& b);

Quantity norm_quantity(const Norm& R);
// 2^{2 lambda + 1} d / delta
Quantity ratio_threshold(const RealInterval& lambda, long d, const Rational& delta);
// R_num / R_den >= threshold
std::optional<bool> ratio_ge(const Norm& num, const Norm& den, const Quantity& threshold);
// 2 (1 + 2^-lambda)^2 delta
Quantity cond2_lhs(const RealInterval& lambda, const Rational& delta);
// 2^{|lambda|} d^{1/p}
Quantity start_threshold(const RealInterval& lambda, long d, const NormSelector& p);

size_t default_m(const FormSequence& seq, const Schedule& sched, size_t n);
size_t resolve_m(const FormSequence& seq, const Schedule& sched, size_t n);

Integer pow2_int(long e);
long ceil_log2(const Rational& v);

}  // namespace lacuna::detail

#endif  // LACUNA_SRC_ENGINE_INTERNAL_HPP_
