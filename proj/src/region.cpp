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

#include "region.hpp"

#include <algorithm>
#include <thread>

#include "lacuna/errors.hpp"

namespace lacuna::detail {

namespace {

Integer lcm_den(const LinearForm& form, const Rational& delta) {
  Integer D = delta.get_den();
  mpz_lcm(D.get_mpz_t(), D.get_mpz_t(), form.b().get_den_mpz_t());
  for (const auto& a : form.a()) mpz_lcm(D.get_mpz_t(), D.get_mpz_t(), a.get_den_mpz_t());
  return D;
}

Integer as_integer(const Rational& q) {
  // Caller guarantees q has denominator 1.
  return q.get_num();
}

void push_range(std::vector<CellRange>& out, std::uint64_t lo, std::uint64_t hi) {
  if (!out.empty() && lo <= out.back().hi + 1) {
    out.back().hi = std::max(out.back().hi, hi);
  } else {
    out.push_back({lo, hi});
  }
}

}  // namespace

BandKernel::BandKernel(const LinearForm& form, const Rational& delta, long level)
    : level_(level) {
  if (level < 0) throw DomainError("negative level");
  Integer D = lcm_den(form, delta);
  Integer S = 1;
  mpz_mul_2exp(S.get_mpz_t(), S.get_mpz_t(), static_cast<mp_bitcnt_t>(level));
  Integer neg = 0, wa = 0;
  for (const auto& a : form.a()) {
    Integer Ai = as_integer(a * D);
    if (Ai < 0) neg += Ai;
    wa += abs(Ai);
    A_.push_back(Ai);
  }
  Integer BS = as_integer(form.b() * D) * S;
  Integer DS = as_integer(delta * D) * S;
  T_ = D * S;
  lowc0_ = BS + neg - DS;
  highc0_ = BS + neg + wa + DS;
  absA0_ = abs(A_[0]);
  if (absA0_ != 0) mpz_fdiv_qr(qT_.get_mpz_t(), rT_.get_mpz_t(), T_.get_mpz_t(), absA0_.get_mpz_t());
}

double BandKernel::crossings(std::uint64_t width) const {
  Integer span = highc0_ - lowc0_ + absA0_ * Integer(static_cast<unsigned long>(width));
  return Rational(span, T_).get_d() + 2.0;
}

void BandKernel::row(const Integer& origin0, const std::vector<Integer>& others,
                     std::uint64_t width, std::vector<CellRange>& out) const {
  out.clear();
  if (width == 0) return;
  Integer lowc = lowc0_, highc = highc0_;
  for (size_t i = 1; i < A_.size(); ++i) {
    Integer t = A_[i] * others[i - 1];
    lowc += t;
    highc += t;
  }
  const std::uint64_t last = width - 1;
  Integer k;
  if (absA0_ == 0) {
    mpz_fdiv_q(k.get_mpz_t(), lowc.get_mpz_t(), T_.get_mpz_t());
    k += 1;
    if (k * T_ < highc) out.push_back({0, last});
    return;
  }
  const bool mirror = A_[0] < 0;
  Integer base = mirror ? Integer(A_[0] * (origin0 + Integer(static_cast<unsigned long>(last))))
                        : Integer(A_[0] * origin0);
  lowc += base;
  highc += base;
  // Cell c is bad for k iff lowc + a c < k T < highc + a c.
  Integer k_last, tmp = highc + absA0_ * Integer(static_cast<unsigned long>(last));
  mpz_fdiv_q(k.get_mpz_t(), lowc.get_mpz_t(), T_.get_mpz_t());
  k += 1;
  mpz_cdiv_q(k_last.get_mpz_t(), tmp.get_mpz_t(), T_.get_mpz_t());
  k_last -= 1;
  if (k > k_last) return;
  Integer kT = k * T_;
  Integer X = kT - lowc, Y = kT - highc;
  Integer qx, rx, qy, ry;
  mpz_fdiv_qr(qx.get_mpz_t(), rx.get_mpz_t(), X.get_mpz_t(), absA0_.get_mpz_t());
  mpz_fdiv_qr(qy.get_mpz_t(), ry.get_mpz_t(), Y.get_mpz_t(), absA0_.get_mpz_t());
  Integer span = k_last - k;
  if (!mpz_fits_ulong_p(span.get_mpz_t())) throw BudgetExceeded("band count overflow");
  const unsigned long steps = mpz_get_ui(span.get_mpz_t());
  for (unsigned long s = 0; s <= steps; ++s) {
    // hi = ceil(X / a) - 1, lo = floor(Y / a) + 1
    bool hi_neg = (rx == 0) ? mpz_sgn(qx.get_mpz_t()) <= 0 : mpz_sgn(qx.get_mpz_t()) < 0;
    if (!hi_neg) {
      std::uint64_t hi, lo;
      if (mpz_cmp_ui(qx.get_mpz_t(), last + (rx == 0 ? 1 : 0)) > 0) {
        hi = last;
      } else {
        hi = mpz_get_ui(qx.get_mpz_t()) - (rx == 0 ? 1 : 0);
      }
      if (mpz_sgn(qy.get_mpz_t()) < 0) {
        lo = 0;
      } else if (mpz_cmp_ui(qy.get_mpz_t(), last) >= 0) {
        lo = last + 1;
      } else {
        lo = mpz_get_ui(qy.get_mpz_t()) + 1;
      }
      if (lo <= hi) push_range(out, lo, hi);
    }
    qx += qT_;
    rx += rT_;
    if (rx >= absA0_) {
      rx -= absA0_;
      qx += 1;
    }
    qy += qT_;
    ry += rT_;
    if (ry >= absA0_) {
      ry -= absA0_;
      qy += 1;
    }
  }
  if (mirror) {
    std::reverse(out.begin(), out.end());
    for (auto& r : out) r = {last - r.hi, last - r.lo};
  }
}

// --- Region -------------------------------------------------------------------

Region::Region(DyadicCube box, long level) : box_(std::move(box)), level_(level) {
  if (level < box_.level()) throw DomainError("region level below its box");
  if (static_cast<long>(rel_bits() * dim()) > 62) throw BudgetExceeded("region too fine");
  std::uint64_t rows = std::uint64_t(1) << (rel_bits() * (dim() - 1));
  rows_.assign(rows, Row{{0}, {kAlive}});
  alive_ = cells();
}

std::uint64_t Region::total_runs() const {
  std::uint64_t t = 0;
  for (const auto& r : rows_) t += r.start.size();
  return t;
}

std::uint64_t Region::count_in(std::uint32_t m) const {
  std::uint64_t c = alive_;
  for (size_t s = m + 1; s < dead_.size(); ++s) c += dead_[s];
  return c;
}

std::vector<Integer> Region::row_coords(size_t r) const {
  std::vector<Integer> c(dim() > 0 ? dim() - 1 : 0);
  const std::uint64_t w = width();
  for (size_t i = c.size(); i-- > 0;) {
    c[i] = static_cast<unsigned long>(r % w);
    r /= w;
  }
  return c;
}

void Region::refine(long to_level) {
  if (to_level < level_) throw DomainError("refine to a coarser level");
  const int delta = static_cast<int>(to_level - level_);
  if (delta == 0) return;
  if (static_cast<long>((rel_bits() + delta) * dim()) > 62) throw BudgetExceeded("region too fine");
  for (auto& row : rows_)
    for (auto& s : row.start) s <<= delta;
  const std::uint64_t old_w = width();
  level_ = to_level;
  const std::uint64_t new_w = width();
  const size_t d = dim();
  if (d > 1) {
    std::uint64_t count = std::uint64_t(1) << (rel_bits() * (d - 1));
    std::vector<Row> next(count);
    for (std::uint64_t r = 0; r < count; ++r) {
      std::uint64_t rem = r, parent = 0, mult = 1;
      for (size_t i = 0; i + 1 < d; ++i) {
        std::uint64_t c = rem % new_w;
        rem /= new_w;
        parent += (c >> delta) * mult;
        mult *= old_w;
      }
      next[r] = rows_[parent];
    }
    rows_.swap(next);
  }
  const std::uint64_t factor = std::uint64_t(1) << (delta * d);
  alive_ *= factor;
  for (auto& c : dead_) c *= factor;
}

Region::StageCounts Region::eliminate(const BandKernel& kernel, std::uint32_t stage,
                                      std::uint32_t m, unsigned threads) {
  if (kernel.level() != level_) throw DomainError("kernel level mismatch");
  StageCounts out;
  out.prev_alive = alive_;
  out.bm = count_in(m);
  const std::uint64_t w = width();
  const size_t d = dim();
  Integer origin0 = box_.coord(0) * Integer(static_cast<unsigned long>(w));
  std::vector<Integer> base(d > 0 ? d - 1 : 0);
  for (size_t i = 1; i < d; ++i) base[i - 1] = box_.coord(i) * Integer(static_cast<unsigned long>(w));

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(rows_.size())));
  std::vector<std::uint64_t> killed(threads, 0), abm(threads, 0);
  auto work = [&](unsigned t) {
    std::vector<CellRange> bad;
    std::vector<Integer> others(base.size());
    Row next;
    for (size_t r = t; r < rows_.size(); r += threads) {
      auto rel = row_coords(r);
      for (size_t i = 0; i < others.size(); ++i) others[i] = base[i] + rel[i];
      kernel.row(origin0, others, w, bad);
      if (bad.empty()) continue;
      Row& row = rows_[r];
      next.start.clear();
      next.death.clear();
      auto emit = [&](std::uint64_t s, std::uint32_t dth) {
        if (!next.death.empty() && next.death.back() == dth) return;
        next.start.push_back(s);
        next.death.push_back(dth);
      };
      size_t j = 0;
      const size_t n = row.start.size();
      for (size_t i = 0; i < n; ++i) {
        const std::uint64_t s = row.start[i], e = (i + 1 < n ? row.start[i + 1] : w);
        const std::uint32_t dth = row.death[i];
        while (j < bad.size() && bad[j].hi < s) ++j;
        std::uint64_t pos = s;
        size_t jj = j;
        while (jj < bad.size() && bad[jj].lo < e) {
          std::uint64_t lo = std::max(bad[jj].lo, s), hi = std::min(bad[jj].hi + 1, e);
          if (dth > m) abm[t] += hi - lo;
          if (dth == kAlive) {
            if (pos < lo) emit(pos, kAlive);
            emit(lo, stage);
            killed[t] += hi - lo;
            pos = hi;
          }
          if (bad[jj].hi + 1 <= e) {
            ++jj;
          } else {
            break;
          }
        }
        if (dth == kAlive) {
          if (pos < e) emit(pos, kAlive);
        } else {
          emit(s, dth);
        }
        j = jj;
      }
      row.start.swap(next.start);
      row.death.swap(next.death);
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  std::uint64_t k = 0;
  for (unsigned t = 0; t < threads; ++t) {
    k += killed[t];
    out.abm += abm[t];
  }
  alive_ -= k;
  if (dead_.size() <= stage) dead_.resize(stage + 1, 0);
  dead_[stage] += k;
  out.alive = alive_;
  return out;
}

void Region::coalesce(std::uint32_t floor_stage) {
  if (floor_stage == 0) return;
  for (auto& row : rows_) {
    size_t out = 0;
    for (size_t i = 0; i < row.start.size(); ++i) {
      std::uint32_t dth = row.death[i];
      if (dth != kAlive && dth < floor_stage) dth = floor_stage;
      if (out > 0 && row.death[out - 1] == dth) continue;
      row.start[out] = row.start[i];
      row.death[out] = dth;
      ++out;
    }
    row.start.resize(out);
    row.death.resize(out);
  }
  if (dead_.size() <= floor_stage) dead_.resize(floor_stage + 1, 0);
  for (std::uint32_t s = 0; s < floor_stage; ++s) {
    dead_[floor_stage] += dead_[s];
    dead_[s] = 0;
  }
}

std::vector<std::uint64_t> Region::alive_by_half() const {
  const size_t d = dim();
  const std::uint64_t w = width(), half = w / 2;
  if (w < 2) throw DomainError("cannot halve a single cell");
  std::vector<std::uint64_t> counts(std::size_t(1) << d, 0);
  for (size_t r = 0; r < rows_.size(); ++r) {
    auto rel = row_coords(r);
    unsigned long mask = 0;
    for (size_t i = 1; i < d; ++i)
      if (rel[i - 1] >= static_cast<unsigned long>(half)) mask |= 1ul << (d - 1 - i);
    const Row& row = rows_[r];
    for (size_t i = 0; i < row.start.size(); ++i) {
      if (row.death[i] != kAlive) continue;
      std::uint64_t s = row.start[i], e = (i + 1 < row.start.size() ? row.start[i + 1] : w);
      std::uint64_t low = s < half ? std::min(e, half) - s : 0;
      counts[mask] += low;
      counts[mask | (1ul << (d - 1))] += (e - s) - low;
    }
  }
  return counts;
}

void Region::restrict_to(unsigned long mask) {
  const size_t d = dim();
  const std::uint64_t w = width(), half = w / 2;
  if (w < 2) throw DomainError("cannot halve a single cell");
  const std::uint64_t off0 = (mask >> (d - 1)) & 1 ? half : 0;
  const std::uint64_t count = std::uint64_t(1) << ((rel_bits() - 1) * (d - 1));
  std::vector<Row> next(count);
  for (std::uint64_t r = 0; r < count; ++r) {
    std::uint64_t rem = r, old = 0, mult = 1;
    for (size_t i = d - 1; i >= 1; --i) {
      std::uint64_t c = rem % half;
      rem /= half;
      if ((mask >> (d - 1 - i)) & 1) c += half;
      old += c * mult;
      mult *= w;
    }
    const Row& src = rows_[old];
    Row& dst = next[r];
    for (size_t i = 0; i < src.start.size(); ++i) {
      std::uint64_t s = src.start[i], e = (i + 1 < src.start.size() ? src.start[i + 1] : w);
      if (e <= off0 || s >= off0 + half) continue;
      dst.start.push_back(std::max(s, off0) - off0);
      dst.death.push_back(src.death[i]);
    }
  }
  rows_.swap(next);
  box_ = box_.child(mask);
  recount();
}

void Region::recount() {
  alive_ = 0;
  std::fill(dead_.begin(), dead_.end(), 0);
  const std::uint64_t w = width();
  for (const auto& row : rows_) {
    for (size_t i = 0; i < row.start.size(); ++i) {
      std::uint64_t len = (i + 1 < row.start.size() ? row.start[i + 1] : w) - row.start[i];
      if (row.death[i] == kAlive) {
        alive_ += len;
      } else {
        if (dead_.size() <= row.death[i]) dead_.resize(row.death[i] + 1, 0);
        dead_[row.death[i]] += len;
      }
    }
  }
}

std::optional<std::vector<Integer>> Region::first_alive() const {
  std::optional<std::pair<std::uint64_t, size_t>> best;
  for (size_t r = 0; r < rows_.size(); ++r) {
    const Row& row = rows_[r];
    for (size_t i = 0; i < row.start.size(); ++i) {
      if (row.death[i] != kAlive) continue;
      if (!best || row.start[i] < best->first) best = {row.start[i], r};
      break;
    }
  }
  if (!best) return std::nullopt;
  const Integer w = static_cast<unsigned long>(width());
  std::vector<Integer> abs(dim());
  abs[0] = box_.coord(0) * w + Integer(static_cast<unsigned long>(best->first));
  auto rel = row_coords(best->second);
  for (size_t i = 1; i < dim(); ++i) abs[i] = box_.coord(i) * w + rel[i - 1];
  return abs;
}

std::vector<std::vector<Integer>> Region::alive_cells(std::uint64_t limit) const {
  if (alive_ > limit) throw BudgetExceeded("too many survivors to enumerate");
  std::vector<std::pair<std::uint64_t, size_t>> cells;
  const std::uint64_t w = width();
  for (size_t r = 0; r < rows_.size(); ++r) {
    const Row& row = rows_[r];
    for (size_t i = 0; i < row.start.size(); ++i) {
      if (row.death[i] != kAlive) continue;
      std::uint64_t e = i + 1 < row.start.size() ? row.start[i + 1] : w;
      for (std::uint64_t c = row.start[i]; c < e; ++c) cells.push_back({c, r});
    }
  }
  std::sort(cells.begin(), cells.end());
  std::vector<std::vector<Integer>> out;
  out.reserve(cells.size());
  const Integer W = static_cast<unsigned long>(w);
  for (const auto& [c, r] : cells) {
    std::vector<Integer> abs(dim());
    abs[0] = box_.coord(0) * W + Integer(static_cast<unsigned long>(c));
    auto rel = row_coords(r);
    for (size_t i = 1; i < dim(); ++i) abs[i] = box_.coord(i) * W + rel[i - 1];
    out.push_back(std::move(abs));
  }
  return out;
}

void Region::for_each_alive(const std::function<bool(const std::vector<Integer>&)>& f) const {
  const std::uint64_t w = width();
  const Integer W = static_cast<unsigned long>(w);
  std::vector<Integer> abs(dim());
  for (size_t r = 0; r < rows_.size(); ++r) {
    auto rel = row_coords(r);
    for (size_t i = 1; i < dim(); ++i) abs[i] = box_.coord(i) * W + rel[i - 1];
    const Row& row = rows_[r];
    for (size_t i = 0; i < row.start.size(); ++i) {
      if (row.death[i] != kAlive) continue;
      std::uint64_t e = i + 1 < row.start.size() ? row.start[i + 1] : w;
      for (std::uint64_t c = row.start[i]; c < e; ++c) {
        abs[0] = box_.coord(0) * W + Integer(static_cast<unsigned long>(c));
        if (!f(abs)) return;
      }
    }
  }
}

SurvivorSet Region::export_set() const {
  return SurvivorSet(dim(), level_, alive_cells(std::numeric_limits<std::uint64_t>::max()));
}

}  // namespace lacuna::detail
