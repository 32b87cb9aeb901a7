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

#ifndef LACUNA_THEOREMS_HPP_
#define LACUNA_THEOREMS_HPP_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lacuna/engine.hpp"
#include "lacuna/forms.hpp"

namespace lacuna {

struct ChainCheck {
  std::string name;
  bool verified = false;
  std::string lhs, rhs;
};

struct Thm1Params {
  long N = 1, d = 1;
  RealInterval u, t, lambda, delta;
  Rational delta_exact;  // lower endpoint handed to the engine
  long h = 0;
  Rational x;
  std::vector<ChainCheck> chain;
  nlohmann::json to_json() const;
};

struct Thm1Result {
  Thm1Params params;
  Schedule schedule;
};

// Raises PrecisionExhausted when a chain cannot be confirmed at `precision_bits`.
Thm1Result theorem1_schedule(long N, long d, long precision_bits = default_precision());
// delta alone, without chain checks.
RealInterval theorem1_delta(long N, long d, long precision_bits = default_precision());

struct Thm2Params : Thm1Params {
  RealInterval eta;
  Rational eta_exact;
  RealInterval sigma0_closed, sigma_closed;  // eta^2 / (1 + 2^-lambda), eta^2
  nlohmann::json to_json() const;
};

struct Thm2Result {
  Thm2Params params;
  Schedule schedule;
  Prop2Schedule p2;
};

Thm2Result theorem2_schedule(long N, long d, size_t nu_count = 8,
                             long precision_bits = default_precision());

// f(x) = coef * x^alpha * ln(x + 1)^kappa, kappa in {0, 1}.
struct PowerLog {
  Rational coef = 1;
  Rational alpha = 1;
  int kappa = 1;
  RealInterval operator()(const RealInterval& x) const;
  std::string to_string() const;
};

// h(x) = x^C, or h(x) = x + k f(x).
struct Growth {
  enum class Kind { kPower, kPlusMultiple };
  Kind kind = Kind::kPower;
  Rational C = 2;
  Rational k = 1;
  RealInterval operator()(const RealInterval& x, const PowerLog& f) const;
  std::string to_string() const;
};

struct GrowthReport {
  std::string statistic;
  size_t window_from = 0, window_to = 0;
  RealInterval value;  // window minimum (or maximum for cor3)
};

struct CorollaryFamily {
  std::string kind;
  PowerLog f;
  Growth h;
  std::function<GrowthReport(const FormSequence&, size_t, size_t)> check;
  nlohmann::json to_json() const;
};

struct CorollaryParams {
  Rational beta = Rational(1, 2);
  Rational gamma = 1;
  Rational beta1 = 0;
  Rational A = 1;
};

CorollaryFamily corollary_family(const std::string& kind, const CorollaryParams& params);

struct Thm3Config {
  CorollaryFamily family;
  std::optional<Rational> C;  // overrides the quadrature bound
  size_t n1_min = 2, n1_max = 64;
  double x_max = 1e6;         // quadrature grid covers [1, x_max]
  size_t prop1_n_max = 200;   // x_n and m(n) are tabulated up to here
};

struct Thm3Result {
  Rational C;
  RealInterval C_enclosure;
  bool C_from_quadrature = true;
  size_t n1 = 0;
  Rational A;
  RealInterval A_over_f;  // reported at n_1 only
  Schedule schedule;       // lambda = 0, for both propositions
  Prop2Schedule p2;        // eta = 1/2
  nlohmann::json feasibility;
  // Largest n for which x_n < 1 was tabulated.
  size_t prop1_limit = 0;
  Rational floor_value;  // f(n_1) / (A n_1)
};

// Searches n_1 upward from config.n1_min (or uses `n1` when given).
Thm3Result theorem3_schedule(const Thm3Config& config, const FormSequence& seq,
                             std::optional<size_t> n1 = std::nullopt);

// sup over the grid of the integral of 1/f from x to h(x), with padding.
RealInterval quadrature_C(const PowerLog& f, const Growth& h, double x_max, long precision_bits = 64);

struct KhintchineRow {
  long t = 1;
  RealInterval delta, ratio;  // ratio = delta t ln(t + 1)
};

std::vector<KhintchineRow> khintchine_gamma_comparison(long t_from, long t_to);

}  // namespace lacuna

#endif  // LACUNA_THEOREMS_HPP_
