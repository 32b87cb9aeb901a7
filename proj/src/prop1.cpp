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
#include <cmath>

#include "engine_internal.hpp"
#include "lacuna/certificate.hpp"
#include "lacuna/errors.hpp"
#include "region.hpp"

namespace lacuna {

using detail::Quantity;
using nlohmann::json;

namespace detail {

// Shrinks the region by halving towards its densest half-box until the next
// stage at `target` fits the run budget.
void fit_budget(Region& region, long target, const BandKernel& kernel, std::uint64_t budget,
                std::vector<std::pair<size_t, DyadicCube>>& events, size_t n) {
  const long d = static_cast<long>(region.dim());
  for (int guard = 0; guard < 4096; ++guard) {
    long e = target - region.box().level();
    bool fits = e * d <= 62;
    if (fits) {
      double rows = std::ldexp(1.0, static_cast<int>(e * (d - 1)));
      double grow = std::ldexp(1.0, static_cast<int>((target - region.level()) * (d - 1)));
      double est = static_cast<double>(region.total_runs()) * grow +
                   2.0 * rows * kernel.crossings(std::uint64_t(1) << e);
      fits = rows <= static_cast<double>(budget) && est <= static_cast<double>(budget);
    }
    if (fits) return;
    if (region.level() == region.box().level()) {
      if (region.level() + 1 > target) break;
      region.refine(region.level() + 1);
    }
    auto counts = region.alive_by_half();
    size_t best = 0;
    for (size_t i = 1; i < counts.size(); ++i)
      if (counts[i] > counts[best]) best = i;
    region.restrict_to(best);
    events.push_back({n, region.box()});
  }
  throw BudgetExceeded("cube budget " + std::to_string(budget) + " cannot hold stage " +
                       std::to_string(n) + " even inside a single cube");
}

}  // namespace detail

namespace {

std::string q(const Integer& v) { return v.get_str(); }

}  // namespace

Prop1Result run_prop1(const FormSequence& seq, const Schedule& sched, size_t n_max,
                      const Prop1Options& opts) {
  if (!sched.delta || !sched.x) throw DomainError("schedule needs delta_n and x_n");
  if (n_max > seq.size()) throw DomainError("n_max exceeds the sequence length");
  if (opts.cube_budget < 16) throw DomainError("cube budget must be at least 16");
  const size_t d = seq.dim();
  const NormSelector& p = seq.p();
  Prop1Result res;
  std::vector<std::pair<std::string, long>> failed;  // runtime assertions

  auto violate = [&](const std::string& cond, long n, const std::string& msg, bool precondition) {
    res.violations.push_back(cond + " at n = " + std::to_string(n) + ": " + msg);
    if (precondition && opts.strict && opts.check_preconditions)
      throw ConditionViolated(cond, n, cond + " violated at n = " + std::to_string(n) + ": " + msg);
    if (!precondition) failed.push_back({cond, n});
  };

  if (n_max >= 2) {
    auto val = validate_sequence(seq.prefix(n_max), 1);
    if (!val.monotone) violate("sequence.monotone", static_cast<long>(*val.first_nonmonotone), "R_{n+1} < R_n", true);
  }
  for (size_t n = 1; n <= n_max; ++n) {
    Rational dl = sched.delta(n), x = sched.x(n);
    if (dl <= 0) throw DomainError("delta_n must be > 0 (n = " + std::to_string(n) + ")");
    if (n > 1 && dl > sched.delta(n - 1)) violate("schedule.delta", static_cast<long>(n), "delta_n > delta_{n-1}", true);
    if (x <= 0 || x >= 1) throw DomainError("x_n must lie in (0, 1) (n = " + std::to_string(n) + ")");
  }

  // Working coordinates theta = shift + scale * t.
  std::vector<Rational> shift(d, 0);
  Rational scale = 1;
  size_t n0 = 1;
  const Quantity thr = detail::start_threshold(sched.lambda, static_cast<long>(d), p);
  if (opts.within) {
    if (opts.within->v.size() != d) throw DomainError("target cube offset has the wrong dimension");
    if (opts.within->r <= 0) throw DomainError("target cube side r must be > 0");
    shift = opts.within->v;
    scale = opts.within->r;
    n0 = 0;
    for (size_t n = 1; n <= seq.size() && n0 == 0; ++n)
      if (detail::le(thr, detail::norm_quantity(seq.norm(n).scaled(scale))).value_or(false)) n0 = n;
    if (n0 == 0) throw ConditionViolated("within", 0, "no n with r R_n >= 2^{|lambda|} d^{1/p} in the sequence");
    if (n0 > n_max + 1) n0 = n_max + 1;
  } else if (n_max >= 1) {
    while (!detail::le(thr, detail::norm_quantity(seq.norm(1).scaled(scale))).value_or(false)) scale *= 2;
  }
  const size_t offset = n0 - 1;
  const size_t W = n_max - offset;
  res.offset = offset;
  res.scale = scale;
  res.shift = shift;
  FormSequence work = W > 0 ? rescale(seq.tail(n0).prefix(W), shift, scale) : FormSequence();

  std::vector<size_t> mt(W + 2, 0);
  for (size_t j = 1; j <= W; ++j) {
    size_t m = detail::resolve_m(seq, sched, j + offset);
    mt[j] = m > offset ? m - offset : 0;
  }
  std::vector<size_t> suffix_min(W + 2, SIZE_MAX);
  for (size_t j = W; j >= 1; --j) suffix_min[j] = std::min(mt[j], suffix_min[j + 1]);

  detail::Region region(DyadicCube::unit(d), 0);
  if (opts.keep_survivor_sets) res.survivor_sets.push_back(region.export_set());
  std::vector<std::pair<size_t, DyadicCube>> restrictions;
  long level = 0;
  Rational lower = 1;
  json stages = json::array(), trace = json::array();

  for (size_t j = 1; j <= W; ++j) {
    const size_t n = j + offset;
    const Rational dl = sched.delta(n), x = sched.x(n);
    const size_t m = mt[j];
    const long idx = static_cast<long>(n);
    stages.push_back({{"n", n}, {"delta", to_string(dl)}, {"x", to_string(x)}, {"m", m == 0 ? 0 : m + offset}});

    level = std::max(level, level_for(n, work.norm(j), dl, sched.lambda, static_cast<long>(d), p));
    StageRecord rec;
    rec.n = n;
    rec.level = level;
    rec.m = m == 0 ? 0 : m + offset;
    rec.x = x;
    if (m > 0) {
      auto t = detail::ratio_threshold(sched.lambda, static_cast<long>(d), sched.delta(m + offset));
      auto ok = detail::ratio_ge(work.norm(j), work.norm(m), t);
      rec.cond1 = ok.value_or(false);
      if (!rec.cond1)
        violate("prop1.cond1", idx, "R_n/R_m = " + ratio_interval(work.norm(j), work.norm(m)).to_string(20) +
                                        " vs " + t.str() + (ok ? "" : " (undecided)"), true);
    }
    Rational window = 1;
    for (size_t k = m + 1; k < j; ++k) window *= 1 - sched.x(k + offset);
    auto lhs = detail::cond2_lhs(sched.lambda, dl);
    auto ok2 = detail::le(lhs, Quantity::of(x * window));
    rec.cond2 = ok2.value_or(false);
    if (!rec.cond2)
      violate("prop1.cond2", idx, "2(1+2^-lambda)^2 delta_n = " + lhs.str() + " > x_n prod = " +
                                      to_string(x * window), true);
    rec.window = window;

    detail::BandKernel kernel(work.form(j), dl, level);
    size_t before = restrictions.size();
    detail::fit_budget(region, level, kernel, opts.cube_budget, restrictions, n);
    region.refine(level);
    auto counts = region.eliminate(kernel, static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(m),
                                   opts.threads);
    lower *= 1 - x;
    rec.lower_bound = lower;
    rec.region = region.box();
    rec.cells = Integer(static_cast<unsigned long>(region.cells()));
    rec.survivors = Integer(static_cast<unsigned long>(counts.alive));
    rec.prev_survivors = Integer(static_cast<unsigned long>(counts.prev_alive));
    rec.bm = Integer(static_cast<unsigned long>(counts.bm));
    rec.abm = Integer(static_cast<unsigned long>(counts.abm));
    rec.hypothesis = Rational(rec.abm) <= x * window * Rational(rec.bm);
    rec.conclusion = Rational(rec.survivors) >= (1 - x) * Rational(rec.prev_survivors);
    Rational measure = Rational(rec.survivors) / Rational(rec.cells);
    rec.lower = measure >= lower;
    if (!rec.hypothesis)
      violate("lemma1.hypothesis", idx, "mu(A_n cap B_m) = " + q(rec.abm) + " cells > x prod mu(B_m)", false);
    if (!rec.conclusion) violate("lemma1.conclusion", idx, "mu(B_n) < (1 - x_n) mu(B_{n-1})", false);
    if (!rec.lower) violate("lemma1.lower_bound", idx, "mu(B_n) = " + to_string(measure) + " < prod (1 - x_k)", false);
    res.trace.push_back(rec);

    json t = {{"n", n},
              {"level", level},
              {"m", rec.m},
              {"region", cube_json(rec.region)},
              {"cells", q(rec.cells)},
              {"survivors", q(rec.survivors)},
              {"prev_survivors", q(rec.prev_survivors)},
              {"bm", q(rec.bm)},
              {"abm", q(rec.abm)},
              {"measure", to_string(measure)},
              {"window", to_string(window)},
              {"lower_bound", to_string(lower)}};
    if (restrictions.size() > before) t["restricted"] = true;
    trace.push_back(std::move(t));

    if (counts.alive == 0) {
      res.empty = true;
      std::string first = failed.empty() ? std::string("delta unsound") : failed.front().first;
      long at = failed.empty() ? idx : failed.front().second;
      res.violations.push_back("survivors empty at n = " + std::to_string(n) + " (first failed: " + first + ")");
      if (opts.strict)
        throw SurvivorsEmpty(first, at, "B_" + std::to_string(n) + " is empty; first failed assertion: " + first +
                                            " at n = " + std::to_string(at));
      return res;
    }
    if (opts.keep_survivor_sets && region.box().level() == 0) {
      if (region.alive() > opts.cube_budget)
        throw BudgetExceeded("survivor set B_" + std::to_string(n) + " has " + std::to_string(region.alive()) +
                             " cubes, above the cube budget");
      res.survivor_sets.push_back(region.export_set());
    }
    if (suffix_min[j + 1] != SIZE_MAX && suffix_min[j + 1] > 0)
      region.coalesce(static_cast<std::uint32_t>(suffix_min[j + 1]));
  }
  if (opts.strict && !failed.empty())
    throw ConditionViolated(failed.front().first, failed.front().second,
                            failed.front().first + " failed at n = " + std::to_string(failed.front().second));

  auto cell = region.first_alive();
  if (!cell) throw SurvivorsEmpty("delta unsound", 0, "no survivors to extract");
  DyadicCube fin(region.level(), *cell);
  if (opts.depth_bits > fin.level()) {
    std::vector<Integer> c = fin.coords();
    for (auto& x : c) x *= detail::pow2_int(opts.depth_bits - fin.level());
    fin = DyadicCube(opts.depth_bits, c);
  }
  res.extraction = make_extraction(fin, shift, scale, seq, n0, n_max, sched.delta);
  for (const auto& [n, mg] : res.extraction->margins)
    if (mg < 0) throw ConditionViolated("margin", static_cast<long>(n), "negative margin at n = " + std::to_string(n));

  json margins = json::array();
  for (const auto& [n, mg] : res.extraction->margins)
    margins.push_back({{"n", n}, {"delta", to_string(sched.delta(n))}, {"margin", to_string(mg)}});
  json theta = json::array(), sh = json::array();
  for (const auto& t : res.extraction->theta) theta.push_back(dyadic_string(t));
  for (const auto& v : shift) sh.push_back(dyadic_string(v));
  json restr = json::array();
  for (const auto& [n, c] : restrictions) restr.push_back({{"n", n}, {"region", cube_json(c)}});

  json cert = {{"format", kCertificateFormat},
               {"tool", kToolVersion},
               {"mode", "prop1"},
               {"sequence",
                {{"digest", sequence_digest(seq, n_max)}, {"length", n_max}, {"dim", d}, {"p", p.to_string()}}},
               {"lambda", interval_json(sched.lambda)},
               {"schedule", {{"description", sched.description}, {"stages", stages}}},
               {"affine", {{"shift", sh}, {"scale", dyadic_string(scale)}, {"offset", offset}}},
               {"trace", trace},
               {"restrictions", restr},
               {"final_cube", cube_json(fin)},
               {"depth_bits", opts.depth_bits},
               {"theta", theta},
               {"checked_n_min", n0},
               {"checked_n_max", n_max},
               {"margins", margins},
               {"min_margin", margins.empty() ? json(nullptr) : json(to_string(res.extraction->min_margin))},
               {"config", opts.config}};
  finalize_certificate(cert);
  res.certificate = std::move(cert);
  return res;
}

}  // namespace lacuna
