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

#ifndef LACUNA_DYADIC_HPP_
#define LACUNA_DYADIC_HPP_

#include <compare>
#include <string>
#include <vector>

#include "lacuna/numerics.hpp"

namespace lacuna {

// The closed cube prod_i [c_i / 2^l, (c_i + 1) / 2^l] inside [0, 1]^d.
class DyadicCube {
 public:
  DyadicCube() = default;
  DyadicCube(long level, std::vector<Integer> coords);
  static DyadicCube unit(size_t dim) { return DyadicCube(0, std::vector<Integer>(dim, 0)); }

  long level() const { return level_; }
  size_t dim() const { return coords_.size(); }
  const std::vector<Integer>& coords() const { return coords_; }
  const Integer& coord(size_t i) const { return coords_[i]; }

  Rational side() const { return pow2(-level_); }
  Rational lower(size_t i) const;
  Rational upper(size_t i) const;
  std::vector<Rational> center() const;

  // Child at level+1; bit (dim-1-i) of `mask` selects the upper half along axis i.
  DyadicCube child(unsigned long mask) const;
  // The ancestor at a coarser level.
  DyadicCube ancestor(long coarser_level) const;
  bool contains(const DyadicCube& finer) const;

  // "c/2^l" per coordinate for the lower corner.
  std::vector<std::string> corner_strings() const;

  friend bool operator==(const DyadicCube& a, const DyadicCube& b) {
    return a.level_ == b.level_ && a.coords_ == b.coords_;
  }
  // Lexicographic on (level, coords).
  friend bool operator<(const DyadicCube& a, const DyadicCube& b);

 private:
  long level_ = 0;
  std::vector<Integer> coords_;
};

// Renders a dyadic rational as "c/2^l" when its denominator is a power of two
// and as "p/q" otherwise.
std::string dyadic_string(const Rational& q);
Rational parse_dyadic_or_rational(const std::string& s);

}  // namespace lacuna

#endif  // LACUNA_DYADIC_HPP_
