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

#ifndef LACUNA_SRC_REGION_HPP_
#define LACUNA_SRC_REGION_HPP_

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "lacuna/dyadic.hpp"
#include "lacuna/engine.hpp"
#include "lacuna/forms.hpp"

namespace lacuna::detail {

inline constexpr std::uint32_t kAlive = std::numeric_limits<std::uint32_t>::max();

struct CellRange {
  std::uint64_t lo, hi;  // inclusive
};

// Integer form of the closed-cube band test at a fixed level. With D clearing
// all denominators and S = 2^level, a cell with lower corner C/S meets
// {||L|| < delta} iff some k has  V_min - D delta S < k D S < V_max + D delta S,
// where V = D S L evaluated over the cell.
class BandKernel {
 public:
  BandKernel(const LinearForm& form, const Rational& delta, long level);

  long level() const { return level_; }
  // Cells C_0 = origin0 + c, 0 <= c < width, with absolute coordinates
  // `others` on axes 1..d-1. Appends merged bad ranges of c.
  void row(const Integer& origin0, const std::vector<Integer>& others, std::uint64_t width,
           std::vector<CellRange>& out) const;
  // Upper estimate of band crossings along a row of `width` cells.
  double crossings(std::uint64_t width) const;

 private:
  long level_;
  std::vector<Integer> A_;
  Integer T_, lowc0_, highc0_;  // lowc0 = B S + sum_{A_i<0} A_i - D delta S, highc0 = that + sum|A_i| + 2 D delta S
  Integer absA0_, qT_, rT_;
};

// Survivors inside a dyadic box J, as run-length rows along axis 0. Each run
// carries the stage at which its cells died (kAlive if alive).
class Region {
 public:
  Region(DyadicCube box, long level);

  size_t dim() const { return box_.dim(); }
  const DyadicCube& box() const { return box_; }
  long level() const { return level_; }
  int rel_bits() const { return static_cast<int>(level_ - box_.level()); }
  std::uint64_t width() const { return std::uint64_t(1) << rel_bits(); }
  std::uint64_t cells() const { return std::uint64_t(1) << (rel_bits() * dim()); }
  size_t row_count() const { return rows_.size(); }
  std::uint64_t total_runs() const;
  std::uint64_t alive() const { return alive_; }
  // Cells with death stage > m (that is, in B_m).
  std::uint64_t count_in(std::uint32_t m) const;

  void refine(long to_level);

  struct StageCounts {
    std::uint64_t prev_alive = 0, alive = 0, bm = 0, abm = 0;
  };
  StageCounts eliminate(const BandKernel& kernel, std::uint32_t stage, std::uint32_t m,
                        unsigned threads);
  // Deaths at stages <= floor collapse onto floor.
  void coalesce(std::uint32_t floor_stage);

  // Alive cells per half-box, indexed by DyadicCube::child mask.
  std::vector<std::uint64_t> alive_by_half() const;
  void restrict_to(unsigned long mask);

  // Lexicographically smallest alive cell, absolute coordinates.
  std::optional<std::vector<Integer>> first_alive() const;
  // All alive cells in lexicographic order (absolute coordinates).
  std::vector<std::vector<Integer>> alive_cells(std::uint64_t limit) const;
  SurvivorSet export_set() const;
  // Alive cells in storage order (lexicographic when d = 1); stops when f returns false.
  void for_each_alive(const std::function<bool(const std::vector<Integer>&)>& f) const;

 private:
  struct Row {
    std::vector<std::uint64_t> start;
    std::vector<std::uint32_t> death;
  };
  std::vector<Integer> row_coords(size_t r) const;  // relative coords on axes 1..d-1
  void recount();

  DyadicCube box_;
  long level_;
  std::vector<Row> rows_;
  std::uint64_t alive_ = 0;
  std::vector<std::uint64_t> dead_;  // cells per death stage
};

}  // namespace lacuna::detail

#endif  // LACUNA_SRC_REGION_HPP_
