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

#include "lacuna/dyadic.hpp"

#include "lacuna/errors.hpp"

namespace lacuna {

DyadicCube::DyadicCube(long level, std::vector<Integer> coords)
    : level_(level), coords_(std::move(coords)) {
  if (level_ < 0) throw DomainError("negative cube level");
  if (coords_.empty()) throw DomainError("cube dimension must be >= 1");
  Integer limit = Integer(1) << static_cast<mp_bitcnt_t>(level_);
  for (const auto& c : coords_) {
    if (c < 0 || c >= limit) {
      throw DomainError("cube coordinate " + c.get_str() + " outside [0, 2^" +
                        std::to_string(level_) + ")");
    }
  }
}

Rational DyadicCube::lower(size_t i) const { return Rational(coords_[i]) * side(); }

Rational DyadicCube::upper(size_t i) const {
  return Rational(coords_[i] + 1) * side();
}

std::vector<Rational> DyadicCube::center() const {
  std::vector<Rational> c;
  c.reserve(dim());
  Rational half = side() / 2;
  for (size_t i = 0; i < dim(); ++i) c.push_back(lower(i) + half);
  return c;
}

DyadicCube DyadicCube::child(unsigned long mask) const {
  std::vector<Integer> c(coords_.size());
  for (size_t i = 0; i < coords_.size(); ++i) {
    unsigned long bit = (mask >> (coords_.size() - 1 - i)) & 1UL;
    c[i] = coords_[i] * 2 + bit;
  }
  return DyadicCube(level_ + 1, std::move(c));
}

DyadicCube DyadicCube::ancestor(long coarser_level) const {
  if (coarser_level > level_ || coarser_level < 0) throw DomainError("bad ancestor level");
  std::vector<Integer> c(coords_.size());
  for (size_t i = 0; i < coords_.size(); ++i) {
    c[i] = coords_[i] >> static_cast<mp_bitcnt_t>(level_ - coarser_level);
  }
  return DyadicCube(coarser_level, std::move(c));
}

bool DyadicCube::contains(const DyadicCube& finer) const {
  return finer.dim() == dim() && finer.level_ >= level_ && finer.ancestor(level_) == *this;
}

std::vector<std::string> DyadicCube::corner_strings() const {
  std::vector<std::string> out;
  for (const auto& c : coords_) out.push_back(c.get_str() + "/2^" + std::to_string(level_));
  return out;
}

bool operator<(const DyadicCube& a, const DyadicCube& b) {
  if (a.level_ != b.level_) return a.level_ < b.level_;
  for (size_t i = 0; i < std::min(a.coords_.size(), b.coords_.size()); ++i) {
    int c = cmp(a.coords_[i], b.coords_[i]);
    if (c != 0) return c < 0;
  }
  return a.coords_.size() < b.coords_.size();
}

std::string dyadic_string(const Rational& q) {
  const Integer& den = q.get_den();
  if (mpz_popcount(den.get_mpz_t()) == 1) {
    size_t l = mpz_scan1(den.get_mpz_t(), 0);
    return q.get_num().get_str() + "/2^" + std::to_string(l);
  }
  return q.get_str();
}

Rational parse_dyadic_or_rational(const std::string& s) {
  if (auto pos = s.find("/2^"); pos != std::string::npos) {
    Rational num = parse_rational(s.substr(0, pos));
    std::string e = s.substr(pos + 3);
    if (e.empty() || e.find_first_not_of("0123456789") != std::string::npos) {
      throw ParseError("malformed dyadic '" + s + "'");
    }
    return num * pow2(-std::stol(e));
  }
  return parse_rational(s);
}

}  // namespace lacuna
