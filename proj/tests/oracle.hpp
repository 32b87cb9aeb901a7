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


#ifndef LACUNA_TESTS_ORACLE_HPP_
#define LACUNA_TESTS_ORACLE_HPP_

// Interval-subtraction reference for d = 1: a closed cell survives stage n iff
// it misses every open interval ((k - delta - b)/a, (k + delta - b)/a).
// Written against plain rationals only; shares no code with the engine.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "lacuna/numerics.hpp"

namespace oracle {

using lacuna::Integer;
using lacuna::Rational;

struct Open {
  Rational lo, hi;
};

inline Integer floor_q(const Rational& q) {
  Integer f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return f;
}

// Bad intervals of ||a t + b|| < delta meeting [0, 1].
inline std::vector<Open> bad_intervals(const Rational& a, const Rational& b, const Rational& delta) {
  std::vector<Open> out;
  Rational ab = a + b;
  Rational lo = std::min(b, ab), hi = std::max(b, ab);
  for (Integer k = floor_q(lo - delta) - 1; Rational(k) <= hi + delta + 1; ++k) {
    Rational p = (Rational(k) - delta - b) / a, q = (Rational(k) + delta - b) / a;
    if (p > q) std::swap(p, q);
    if (q > 0 && p < 1) out.push_back({p, q});
  }
  return out;
}

// Cells (integer indices at `level`) alive after removing cells meeting the bad set.
class Survivors {
 public:
  Survivors() : level_(0), cells_{Integer(0)} {}

  long level() const { return level_; }
  const std::vector<Integer>& cells() const { return cells_; }

  void refine(long level) {
    std::vector<Integer> next;
    Integer f = 1;
    for (long i = level_; i < level; ++i) f *= 2;
    for (const auto& c : cells_)
      for (Integer j = 0; j < f; ++j) next.push_back(c * f + j);
    cells_ = std::move(next);
    level_ = std::max(level, level_);
  }

  void remove(const Rational& a, const Rational& b, const Rational& delta) {
    auto bad = bad_intervals(a, b, delta);
    Rational side = lacuna::pow2(-level_);
    std::vector<Integer> keep;
    for (const auto& c : cells_) {
      Rational x0 = Rational(c) * side, x1 = x0 + side;
      bool hit = false;
      for (const auto& iv : bad) hit = hit || (x0 < iv.hi && iv.lo < x1);
      if (!hit) keep.push_back(c);
    }
    cells_ = std::move(keep);
  }

 private:
  long level_;
  std::vector<Integer> cells_;
};

// Random d = 1 instance with n <= 10 and levels <= 14, lambda = 0.
struct Case {
  std::vector<Rational> a, b, delta, x;
};

inline Case random_case(std::uint64_t seed) {
  std::mt19937_64 g(seed);
  auto pick = [&](long lo, long hi) { return lo + static_cast<long>(g() % static_cast<std::uint64_t>(hi - lo + 1)); };
  Case c;
  long a = pick(1, 3);
  Rational dl = Rational(pick(4, 16), 256);
  for (int n = 0; n < 10; ++n) {
    if (n > 0) a = a + pick(0, a * 2 / 5);
    c.a.push_back(Rational(a));
    c.b.push_back(Rational(pick(0, 7), 8));
    if (n > 0) dl = std::max(Rational(1, 256), Rational(dl - Rational(pick(0, 2), 1024)));
    c.delta.push_back(dl);
    c.x.push_back(Rational(pick(8, 32), 64));
  }
  return c;
}

// l_n = max(l_{n-1}, ceil(log2(R_n / delta_n))) for lambda = 0, d = 1.
inline long level_of(const Rational& R, const Rational& delta, long prev) {
  Rational v = R / delta;
  long l = 0;
  while (lacuna::pow2(l) < v) ++l;
  return std::max(l, prev);
}

}  // namespace oracle

#endif  // LACUNA_TESTS_ORACLE_HPP_
