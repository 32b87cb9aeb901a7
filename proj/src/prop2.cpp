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


#include <algorithm>
#include <atomic>
#include <random>
#include <thread>

#include "engine_internal.hpp"
#include "lacuna/certificate.hpp"
#include "lacuna/errors.hpp"
#include "region.hpp"

namespace lacuna {

using detail::Quantity;
using nlohmann::json;

namespace {

std::uint64_t shl(std::uint64_t v, long s) { return s >= 64 ? 0 : v << s; }

// Survivor counting over a stage window [s_from, s_to] inside one cube.
class StageWindow {
 public:
  StageWindow(const FormSequence& work, const Schedule& sched, const std::vector<long>& levels,
              std::uint64_t budget)
      : work_(work), sched_(sched), levels_(levels), budget_(budget), kernels_(levels.size()) {}

  const detail::BandKernel& kernel(size_t s) {
    if (!kernels_[s]) kernels_[s].emplace(work_.form(s), sched_.delta(s), levels_[s]);
    return *kernels_[s];
  }
  void prepare(size_t s_from, size_t s_to) {
    for (size_t s = s_from; s <= s_to; ++s) kernel(s);
  }

  detail::Region region(const DyadicCube& cube, size_t s_from, size_t s_to, unsigned threads) {
    detail::Region r(cube, cube.level());
    for (size_t s = s_from; s <= s_to; ++s) {
      r.refine(levels_[s]);
      r.eliminate(kernel(s), static_cast<std::uint32_t>(s), 0, threads);
      if (r.total_runs() > budget_)
        throw BudgetExceeded("cube budget " + std::to_string(budget_) + " exceeded at stage " +
                             std::to_string(s));
    }
    return r;
  }

  // Alive cells of `cube` at level l_{s_to}; kernels must be prepared.
  std::uint64_t alive(const DyadicCube& cube, size_t s_from, size_t s_to,
                      std::vector<detail::CellRange>& scratch) const {
    const long top = levels_[s_to];
    const long e = top - cube.level();
    if (cube.dim() != 1) {
      detail::Region r(cube, cube.level());
      for (size_t s = s_from; s <= s_to; ++s) {
        r.refine(levels_[s]);
        r.eliminate(*kernels_[s], static_cast<std::uint32_t>(s), 0, 1);
        if (r.alive() == 0) return 0;
      }
      return r.alive();
    }
    if (e > 62) throw BudgetExceeded("stage window spans more than 2^62 cells");
    std::vector<detail::CellRange> bad;
    for (size_t s = s_from; s <= s_to; ++s) {
      const long rel = levels_[s] - cube.level();
      Integer origin = cube.coord(0);
      mpz_mul_2exp(origin.get_mpz_t(), origin.get_mpz_t(), static_cast<mp_bitcnt_t>(rel));
      scratch.clear();
      kernels_[s]->row(origin, {}, std::uint64_t(1) << rel, scratch);
      const long up = top - levels_[s];
      for (const auto& c : scratch) bad.push_back({shl(c.lo, up), shl(c.hi + 1, up) - 1});
    }
    std::sort(bad.begin(), bad.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
    std::uint64_t covered = 0, end = 0;  // [.., end) already counted
    for (const auto& c : bad) {
      std::uint64_t lo = std::max(c.lo, end), hi = c.hi + 1;
      if (hi > lo) {
        covered += hi - lo;
        end = hi;
      }
    }
    return (std::uint64_t(1) << e) - covered;
  }

 private:
  const FormSequence& work_;
  const Schedule& sched_;
  const std::vector<long>& levels_;
  std::uint64_t budget_;
  std::vector<std::optional<detail::BandKernel>> kernels_;
};

bool exceeds(std::uint64_t v, const Rational& frac, const Integer& cells) {
  return Rational(Integer(static_cast<unsigned long>(v))) > frac * Rational(cells);
}

}  // namespace

Prop2Result run_prop2(const FormSequence& seq, const Schedule& sched, const Prop2Schedule& p2,
                      size_t nu_max, const Prop2Options& opts) {
  if (!sched.delta) throw DomainError("schedule needs delta_n");
  if (p2.n.empty() || p2.n[0] != 0) throw DomainError("n_0 must be 0");
  if (p2.max_nu() < nu_max + 2 || p2.eta.size() < nu_max + 3)
    throw DomainError("n_nu and eta_nu must extend to nu_max + 2");
  for (size_t v = 1; v <= nu_max + 2; ++v)
    if (p2.n[v] <= p2.n[v - 1]) throw DomainError("n_nu must be strictly increasing");
  for (size_t v = 0; v <= nu_max + 2; ++v)
    if (p2.eta[v] <= 0 || p2.eta[v] >= 1) throw DomainError("eta_nu must lie in (0, 1)");
  const size_t n_top = p2.n[nu_max + 2];
  if (seq.size() < n_top) throw DomainError("sequence shorter than n_{nu_max+2}");
  const size_t d = seq.dim();
  const long dl = static_cast<long>(d);

  Prop2Result res;
  Schedule plain = sched;
  plain.x = nullptr;
  plain.m = nullptr;
  res.conditions = condition_report(seq, plain, n_top, &p2, nu_max);
  std::vector<bool> branch(nu_max + 2, false);
  for (const auto& c : res.conditions.checks) {
    if (c.name == "prop2.cond4") {
      if (c.pass.value_or(false)) branch[static_cast<size_t>(c.index)] = true;
      continue;
    }
    if (c.name == "prop1.start" || c.pass.value_or(false)) continue;
    std::string msg = c.name + " at " + std::to_string(c.index) + ": " + c.lhs + " vs " + c.rhs +
                      (c.pass ? "" : " (undecided)") + (c.note.empty() ? "" : "; " + c.note);
    res.violations.push_back(msg);
    if (opts.strict) throw ConditionViolated(c.name, c.index, msg);
  }

  // theta = s t with s a power of two: s R_1 clears the start threshold and the
  // boundary slack keeps sigma_0 below eta_0.
  const Quantity thr = detail::start_threshold(sched.lambda, dl, seq.p());
  const RealInterval s0 = prop2_sigma(sched, p2, 0);
  const RealInterval root = seq.p().dim_root(dl).enclosure;
  Rational scale = 1;
  for (int i = 0;; ++i) {
    Norm r1 = seq.norm(1).scaled(scale);
    bool start = detail::le(thr, detail::norm_quantity(r1)).value_or(false);
    RealInterval slack = (RealInterval::from_int(1) + root / detail::norm_quantity(r1).iv) * s0;
    if (start && detail::lt(Quantity::of(slack), Quantity::of(p2.eta[0])).value_or(false)) break;
    if (i > 256) {
      std::string msg = "(1 + d^{1/p}/(s R_1)) sigma_0 stays >= eta_0";
      res.violations.push_back(msg);
      throw ConditionViolated("prop2.cond2", 0, msg);
    }
    scale *= 2;
  }
  res.scale = scale;
  const std::vector<Rational> shift(d, 0);
  FormSequence work = rescale(seq.prefix(n_top), shift, scale);

  res.levels.assign(n_top + 1, 0);
  for (size_t n = 1; n <= n_top; ++n)
    res.levels[n] = std::max(res.levels[n - 1],
                             level_for(n, work.norm(n), sched.delta(n), sched.lambda, dl, seq.p()));
  const auto& L = res.levels;
  StageWindow win(work, sched, L, opts.cube_budget);
  const unsigned threads = std::max(1u, opts.threads);

  auto fail = [&](const std::string& cond, long idx, const std::string& msg, bool branching) {
    res.violations.push_back(msg);
    if (!opts.strict) return;
    if (branching) throw BranchingAbsent(idx, msg);
    throw ConditionViolated(cond, idx, msg);
  };

  res.nodes.push_back(TreeNode{0, std::nullopt, DyadicCube::unit(d), 0, 0, std::nullopt, false, false,
                               RealInterval::from_int(0), {}});
  for (size_t id = 0; id < res.nodes.size(); ++id) {
    const size_t j = res.nodes[id].depth;
    if (j > nu_max) {
      res.leaves.push_back(id);
      continue;
    }
    const DyadicCube cube = res.nodes[id].cube;
    const size_t a0 = p2.n[j] + 1, a1 = p2.n[j + 1];
    const size_t b0 = p2.n[j + 1] + 1, b1 = p2.n[j + 2];
    detail::Region region = win.region(cube, a0, a1, threads);
    TreeNode node = res.nodes[id];
    node.cells = Integer(static_cast<unsigned long>(region.cells()));
    node.alive = Integer(static_cast<unsigned long>(region.alive()));
    if (!exceeds(region.alive(), 1 - p2.eta[j], node.cells))
      fail("prop2.good", static_cast<long>(j),
           "node " + std::to_string(id) + " is not a good " + std::to_string(j) + "-cube", false);
    node.bound_factor = RealInterval::from_int(1) -
                        prop2_sigma(sched, p2, j + 1) /
                            RealInterval::from_rational(p2.eta[j + 1] * (1 - p2.eta[j]));
    node.branching_required = j >= 1 && branch[j];
    const size_t want = j == 0 ? 1 : 2;
    const Integer child_cells = detail::pow2_int(dl * (L[b1] - L[b0 - 1]));
    const Rational keep = 1 - p2.eta[j + 1];
    win.prepare(b0, b1);
    std::vector<std::vector<Integer>> chosen;
    const long clevel = L[a1];

    if (region.alive() <= opts.full_children_max) {
      node.full = true;
      auto cells = region.alive_cells(region.alive());
      std::vector<char> good(cells.size(), 0);
      std::atomic<size_t> next{0};
      auto work_fn = [&] {
        std::vector<detail::CellRange> scratch;
        for (;;) {
          size_t i0 = next.fetch_add(256);
          if (i0 >= cells.size()) return;
          for (size_t i = i0; i < std::min(cells.size(), i0 + 256); ++i) {
            DyadicCube k(clevel, cells[i]);
            good[i] = exceeds(win.alive(k, b0, b1, scratch), keep, child_cells);
          }
        }
      };
      std::vector<std::thread> pool;
      for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work_fn);
      work_fn();
      for (auto& t : pool) t.join();
      unsigned long g = 0;
      for (size_t i = 0; i < cells.size(); ++i) {
        if (!good[i]) continue;
        ++g;
        if (chosen.size() < want) chosen.push_back(cells[i]);
      }
      node.good = Integer(g);
      bool ok = mpfr_cmp_q(node.bound_factor.hi(),
                           Rational(Rational(Integer(g)) / Rational(node.alive)).get_mpq_t()) < 0;
      if (!ok)
        fail("prop2.counting", static_cast<long>(j),
             "node " + std::to_string(id) + ": g = " + std::to_string(g) + " below " +
                 node.bound_factor.to_string(12) + " a",
             false);
    } else {
      std::vector<detail::CellRange> scratch;
      std::uint64_t tried = 0;
      region.for_each_alive([&](const std::vector<Integer>& c) {
        DyadicCube k(clevel, c);
        if (exceeds(win.alive(k, b0, b1, scratch), keep, child_cells)) chosen.push_back(c);
        return ++tried < opts.search_limit && chosen.size() < want;
      });
    }
    if (chosen.empty())
      fail("prop2.good_child", static_cast<long>(j),
           "node " + std::to_string(id) + " has no good child", false);
    else if (node.branching_required && chosen.size() < 2)
      fail("prop2.cond4", static_cast<long>(j),
           "node " + std::to_string(id) + " has a single good child at a branching level", true);
    for (const auto& c : chosen) {
      node.children.push_back(res.nodes.size());
      res.nodes.push_back(TreeNode{j + 1, id, DyadicCube(clevel, c), 0, 0, std::nullopt, false, false,
                                   RealInterval::from_int(0), {}});
    }
    res.nodes[id] = std::move(node);
  }

  std::vector<size_t> picks = opts.extract_leaves;
  if (opts.extract_random > 0) {
    if (opts.extract_random > res.leaves.size())
      throw DomainError("cannot draw " + std::to_string(opts.extract_random) + " of " +
                        std::to_string(res.leaves.size()) + " leaves");
    // Partial Fisher-Yates with an explicit generator, so picks are stable across toolchains.
    std::vector<size_t> idx(res.leaves.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::mt19937_64 gen(opts.seed);
    for (size_t i = 0; i < opts.extract_random; ++i) std::swap(idx[i], idx[i + gen() % (idx.size() - i)]);
    picks.assign(idx.begin(), idx.begin() + static_cast<long>(opts.extract_random));
  }
  for (size_t which : picks) {
    if (which >= res.leaves.size()) throw DomainError("leaf index " + std::to_string(which) + " out of range");
    const TreeNode& leaf = res.nodes[res.leaves[which]];
    detail::Region region = win.region(leaf.cube, p2.n[nu_max + 1] + 1, n_top, threads);
    auto cell = region.first_alive();
    if (!cell) {
      fail("prop2.extract", static_cast<long>(which), "leaf " + std::to_string(which) + " has no survivor", false);
      continue;
    }
    Extraction ex = make_extraction(DyadicCube(region.level(), *cell), shift, scale, seq, 1, n_top, sched.delta);
    for (const auto& [n, mg] : ex.margins)
      if (mg < 0) throw ConditionViolated("margin", static_cast<long>(n), "negative margin at n = " + std::to_string(n));
    res.extracted.push_back(std::move(ex));
    res.extracted_leaves.push_back(res.leaves[which]);
  }

  json deltas = json::array(), n_nu = json::array(), eta = json::array();
  for (size_t n = 1; n <= n_top; ++n) deltas.push_back({{"n", n}, {"delta", to_string(sched.delta(n))}});
  for (size_t v = 0; v <= nu_max + 2; ++v) {
    n_nu.push_back(p2.n[v]);
    eta.push_back(to_string(p2.eta[v]));
  }
  json sigma = json::array();
  for (size_t v = 0; v <= nu_max + 1; ++v) sigma.push_back(interval_json(prop2_sigma(sched, p2, v)));
  json tree = json::array();
  for (size_t id = 0; id < res.nodes.size(); ++id) {
    const TreeNode& t = res.nodes[id];
    json e = {{"id", id},
              {"parent", t.parent ? json(*t.parent) : json(nullptr)},
              {"depth", t.depth},
              {"cube", cube_json(t.cube)},
              {"children", t.children}};
    if (t.depth <= nu_max) {
      e["cells"] = t.cells.get_str();
      e["alive"] = t.alive.get_str();
      e["good"] = t.good ? json(t.good->get_str()) : json(nullptr);
      e["full"] = t.full;
      e["branching_required"] = t.branching_required;
      e["bound_factor"] = interval_json(t.bound_factor);
    }
    tree.push_back(std::move(e));
  }
  json extracted = json::array();
  for (size_t i = 0; i < res.extracted.size(); ++i) {
    const Extraction& ex = res.extracted[i];
    json theta = json::array(), margins = json::array();
    for (const auto& v : ex.theta) theta.push_back(dyadic_string(v));
    for (const auto& [n, mg] : ex.margins)
      margins.push_back({{"n", n}, {"delta", to_string(sched.delta(n))}, {"margin", to_string(mg)}});
    extracted.push_back({{"leaf", res.extracted_leaves[i]},
                         {"cube", cube_json(ex.cube)},
                         {"theta", theta},
                         {"margins", margins},
                         {"min_margin", to_string(ex.min_margin)}});
  }
  json sh = json::array();
  for (const auto& v : shift) sh.push_back(dyadic_string(v));
  json cert = {{"format", kCertificateFormat},
               {"tool", kToolVersion},
               {"mode", "prop2"},
               {"sequence",
                {{"digest", sequence_digest(seq, n_top)}, {"length", n_top}, {"dim", d}, {"p", seq.p().to_string()}}},
               {"lambda", interval_json(sched.lambda)},
               {"schedule", {{"description", sched.description}, {"deltas", deltas}, {"n_nu", n_nu}, {"eta", eta}}},
               {"affine", {{"shift", sh}, {"scale", dyadic_string(scale)}, {"offset", 0}}},
               {"levels", L},
               {"nu_max", nu_max},
               {"sigma", sigma},
               {"conditions", res.conditions.to_json()},
               {"tree", tree},
               {"leaves", res.leaves},
               {"extracted", extracted},
               {"checked_n_max", n_top},
               {"distinct_prefixes", res.leaves.size()},
               {"config", opts.config}};
  finalize_certificate(cert);
  res.certificate = std::move(cert);
  return res;
}

}  // namespace lacuna
