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

#ifndef LACUNA_ENGINE_HPP_
#define LACUNA_ENGINE_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lacuna/dyadic.hpp"
#include "lacuna/forms.hpp"

namespace lacuna {

// Elimination schedule: delta_n, x_n, m(n), lambda. Indices are 1-based.
struct Schedule {
  std::function<Rational(size_t)> delta;
  std::function<Rational(size_t)> x;
  // Empty: largest m < n with R_n/R_m >= 2^{2 lambda + 1} d / delta_m, else 0.
  std::function<size_t(size_t)> m;
  RealInterval lambda = RealInterval::from_int(0);
  std::string description;
};

// Branching schedule: n[nu] for nu >= 1 (n[0] = 0) and eta[nu] for nu >= 0.
struct Prop2Schedule {
  std::vector<size_t> n;
  std::vector<Rational> eta;
  size_t max_nu() const { return n.empty() ? 0 : n.size() - 1; }
};

// The integer value of lambda when its enclosure is a single integer.
std::optional<long> exact_lambda(const RealInterval& lambda);
// 2^lambda, exact when lambda is an integer.
RealInterval pow2_interval(const RealInterval& lambda);

RealInterval prop2_sigma(const Schedule& sched, const Prop2Schedule& p2, size_t nu);
RealInterval prop2_Q(const FormSequence& seq, const Schedule& sched, const Prop2Schedule& p2,
                     size_t nu);

// Smallest l with d^{1/q} R 2^lambda / delta <= 2^l (guarded), verified afterwards.
long level_for(size_t n, const Norm& R, const Rational& delta, const RealInterval& lambda,
               long d, const NormSelector& p);

// --- Survivor sets ------------------------------------------------------------

class SurvivorSet {
 public:
  SurvivorSet() = default;
  SurvivorSet(size_t dim, long level, std::vector<std::vector<Integer>> cubes);
  static SurvivorSet full(size_t dim) { return SurvivorSet(dim, 0, {std::vector<Integer>(dim, 0)}); }

  size_t dim() const { return dim_; }
  long level() const { return level_; }
  const std::vector<std::vector<Integer>>& cubes() const { return cubes_; }
  size_t size() const { return cubes_.size(); }
  bool empty() const { return cubes_.empty(); }
  Rational measure() const;

  friend bool operator==(const SurvivorSet&, const SurvivorSet&) = default;

 private:
  size_t dim_ = 1;
  long level_ = 0;
  std::vector<std::vector<Integer>> cubes_;  // sorted, unique
};

SurvivorSet refine(const SurvivorSet& set, long to_level);
// Removes cubes whose closed cube meets {||L|| < delta}.
std::pair<SurvivorSet, size_t> eliminate_step(const SurvivorSet& set, const LinearForm& form,
                                              const Rational& delta);

// --- Conditions -------------------------------------------------------------

struct ConditionCheck {
  std::string name;
  long index = 0;
  std::optional<bool> pass;  // empty when undecided at working precision
  std::string lhs;
  std::string rhs;
  std::string note;
};

struct ConditionReport {
  std::vector<ConditionCheck> checks;
  size_t failures() const;
  nlohmann::json to_json() const;
};

// Pure diagnostics; never throws for failing conditions.
ConditionReport condition_report(const FormSequence& seq, const Schedule& sched, size_t n_max,
                                 const Prop2Schedule* p2 = nullptr, size_t nu_max = 0);

// --- Proposition 1 ------------------------------------------------------------

// Target cube v + r [0,1]^d.
struct Within {
  std::vector<Rational> v;
  Rational r;
};

struct Prop1Options {
  std::uint64_t cube_budget = std::uint64_t(1) << 24;
  long depth_bits = 0;
  // strict: precondition failures throw, and so do failed runtime assertions.
  bool strict = true;
  bool check_preconditions = true;
  std::optional<Within> within;
  unsigned threads = 1;
  bool keep_survivor_sets = false;
  nlohmann::json config;  // resolved configuration embedded in the certificate
};

struct StageRecord {
  size_t n = 0;  // stage index in working numbering
  long level = 0;
  size_t m = 0;
  DyadicCube region;
  Integer cells, survivors, prev_survivors, bm, abm;
  Rational x, window, lower_bound;
  bool cond1 = true, cond2 = true;
  bool hypothesis = true, conclusion = true, lower = true;
};

struct Extraction {
  DyadicCube cube;  // working coordinates
  std::vector<Rational> theta, box_lo, box_hi;  // original coordinates
  std::vector<std::pair<size_t, Rational>> margins;  // original index n
  Rational min_margin;
};

struct Prop1Result {
  std::vector<StageRecord> trace;
  std::vector<SurvivorSet> survivor_sets;  // B_0, B_1, ... when requested
  std::vector<std::string> violations;
  bool empty = false;
  size_t offset = 0;  // working stage j is original index j + offset
  Rational scale = 1;
  std::vector<Rational> shift;
  std::optional<Extraction> extraction;
  nlohmann::json certificate;
};

Prop1Result run_prop1(const FormSequence& seq, const Schedule& sched, size_t n_max,
                      const Prop1Options& opts = {});

// --- Proposition 2 ------------------------------------------------------------

struct Prop2Options {
  std::uint64_t cube_budget = std::uint64_t(1) << 24;
  std::uint64_t full_children_max = std::uint64_t(1) << 18;
  std::uint64_t search_limit = std::uint64_t(1) << 14;
  bool strict = true;
  unsigned threads = 1;
  std::vector<size_t> extract_leaves = {0};
  // When > 0, replaces extract_leaves by that many distinct leaves drawn with seed.
  size_t extract_random = 0;
  std::uint64_t seed = 0;
  nlohmann::json config;
};

struct TreeNode {
  size_t depth = 0;
  std::optional<size_t> parent;
  DyadicCube cube;  // working coordinates, level l_{n_depth}
  Integer cells;    // children cells 2^{d (l_{n_{depth+1}} - l_{n_depth})}
  Integer alive;    // a
  std::optional<Integer> good;  // g, exact in full mode
  bool full = false;
  bool branching_required = false;
  RealInterval bound_factor;  // 1 - sigma/(eta (1 - eta_prev))
  std::vector<size_t> children;
};

struct Prop2Result {
  std::vector<TreeNode> nodes;
  std::vector<size_t> leaves;
  std::vector<Extraction> extracted;
  std::vector<size_t> extracted_leaves;
  ConditionReport conditions;
  std::vector<std::string> violations;
  Rational scale = 1;
  std::vector<long> levels;  // l_n for n = 0..n_{nu_max+2}
  nlohmann::json certificate;
};

Prop2Result run_prop2(const FormSequence& seq, const Schedule& sched, const Prop2Schedule& p2,
                      size_t nu_max, const Prop2Options& opts = {});

}  // namespace lacuna

#endif  // LACUNA_ENGINE_HPP_
