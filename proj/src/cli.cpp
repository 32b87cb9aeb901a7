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


#include "lacuna/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "lacuna/certificate.hpp"
#include "lacuna/errors.hpp"
#include "lacuna/io.hpp"
#include "lacuna/measure.hpp"

namespace lacuna {

using nlohmann::json;

namespace {

int code(ExitCode c) { return static_cast<int>(c); }

void emit(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

std::vector<Rational> rational_list(const std::string& text) {
  std::vector<Rational> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_rational(item));
  if (out.empty()) throw ParseError("expected a comma-separated list of rationals");
  return out;
}

// "v=1/4,1/2" "r=1/4"
Within parse_within(const std::vector<std::string>& parts) {
  Within w;
  bool have_v = false, have_r = false;
  for (const auto& p : parts) {
    if (p.rfind("v=", 0) == 0) {
      w.v = rational_list(p.substr(2));
      have_v = true;
    } else if (p.rfind("r=", 0) == 0) {
      w.r = parse_rational(p.substr(2));
      have_r = true;
    } else {
      throw ParseError("--within expects v=<list> r=<side>, got '" + p + "'");
    }
  }
  if (!have_v || !have_r) throw ParseError("--within expects both v= and r=");
  return w;
}

void set_precision(long bits) {
  if (bits < 32) throw ParseError("precision must be at least 32 bits");
  setenv("LACUNA_PRECISION", std::to_string(bits).c_str(), 1);
}

std::string dir_of(const std::string& path) {
  auto p = std::filesystem::path(path).parent_path();
  return p.empty() ? std::string(".") : p.string();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot write " + path);
  f << text;
}

struct BoundArgs {
  int theorem = 0;
  long N = 1, d = 1;
  bool khintchine = false;
  long t_from = 1, t_to = 1024;
  std::string family = "cor2", beta = "1/2", gamma = "1", beta1 = "0", A = "1", C, sequence;
  long n1 = 0;
  size_t levels = 8;
};

int cmd_bound(const BoundArgs& a, std::ostream& out) {
  if (a.khintchine) {
    json rows = json::array();
    double lo = 0, hi = 0;
    for (const auto& r : khintchine_gamma_comparison(a.t_from, a.t_to)) {
      double v = r.ratio.mid_double();
      lo = rows.empty() ? v : std::min(lo, v);
      hi = rows.empty() ? v : std::max(hi, v);
      rows.push_back({{"t", r.t}, {"delta", r.delta.to_string(20)}, {"ratio", r.ratio.to_string(20)}});
    }
    emit(out, {{"comparison", "delta(t, 1) t ln(t + 1)"}, {"rows", rows}, {"ratio_min", lo}, {"ratio_max", hi},
               {"spread", hi / lo}});
    return 0;
  }
  if (a.theorem == 1) {
    auto t = theorem1_schedule(a.N, a.d);
    emit(out, {{"theorem", 1}, {"delta", t.params.delta.to_string(40)}, {"params", t.params.to_json()}});
  } else if (a.theorem == 2) {
    auto t = theorem2_schedule(a.N, a.d, a.levels);
    json nnu = json::array();
    for (auto v : t.p2.n) nnu.push_back(v);
    emit(out, {{"theorem", 2},
               {"delta", t.params.delta.to_string(40)},
               {"params", t.params.to_json()},
               {"n_nu", nnu},
               {"sigma0_engine", prop2_sigma(t.schedule, t.p2, 0).to_string(30)},
               {"sigma1_engine", prop2_sigma(t.schedule, t.p2, 1).to_string(30)}});
  } else if (a.theorem == 3) {
    if (a.sequence.empty()) throw ParseError("--theorem 3 needs --sequence <spec.json>");
    CorollaryParams cp{parse_rational(a.beta), parse_rational(a.gamma), parse_rational(a.beta1), parse_rational(a.A)};
    Thm3Config tc;
    tc.family = corollary_family(a.family, cp);
    if (!a.C.empty()) tc.C = parse_rational(a.C);
    FormSequence seq = sequence_from_json(load_json(a.sequence));
    tc.prop1_n_max = seq.size();
    std::optional<size_t> n1;
    if (a.n1 > 0) n1 = static_cast<size_t>(a.n1);
    auto t = theorem3_schedule(tc, seq, n1);
    emit(out, {{"theorem", 3}, {"feasibility", t.feasibility}});
  } else {
    throw ParseError("--theorem must be 1, 2 or 3 (or use --khintchine)");
  }
  return 0;
}

struct ConstructArgs {
  std::string config, out = "certificate.json";
  std::vector<std::string> within;
  unsigned threads = 1;
  std::uint64_t cube_budget = 0;
};

int cmd_construct(const ConstructArgs& a, std::ostream& out) {
  RunConfig cfg = parse_run_config(load_json(a.config), dir_of(a.config));
  if (!a.within.empty()) cfg.within = parse_within(a.within);
  if (a.cube_budget) cfg.cube_budget = a.cube_budget;
  if (cfg.precision_bits) set_precision(*cfg.precision_bits);
  ResolvedRun run = resolve_run(cfg);
  try {
    json summary;
    if (cfg.mode == "prop1") {
      Prop1Options o;
      o.cube_budget = cfg.cube_budget;
      o.depth_bits = cfg.depth_bits;
      o.threads = a.threads;
      o.within = cfg.within;
      o.config = cfg.resolved();
      auto r = run_prop1(run.seq, run.schedule, cfg.n_max, o);
      write_file(a.out, canonical_dump(r.certificate));
      json trace = json::array();
      for (const auto& s : r.trace) {
        Rational m = Rational(s.survivors) / Rational(s.cells);
        trace.push_back({{"n", s.n}, {"level", s.level}, {"measure", to_string(m)}, {"measure_decimal", m.get_d()},
                         {"lower_bound", to_string(s.lower_bound)}});
      }
      summary = {{"mode", "prop1"}, {"certificate", a.out}, {"certificate_digest", r.certificate["certificate_digest"]}, {"trace", trace}};
      if (r.extraction) {
        json theta = json::array(), dec = json::array();
        for (const auto& t : r.extraction->theta) {
          theta.push_back(dyadic_string(t));
          dec.push_back(t.get_d());
        }
        summary["theta"] = theta;
        summary["theta_decimal"] = dec;
        summary["min_margin"] = to_string(r.extraction->min_margin);
        summary["min_margin_decimal"] = r.extraction->min_margin.get_d();
      }
    } else {
      if (!run.p2) throw DomainError("mode prop2 needs n_nu and eta in the schedule");
      Prop2Options o;
      o.cube_budget = cfg.cube_budget;
      o.threads = a.threads;
      o.extract_random = cfg.extract;
      o.seed = cfg.seed;
      o.config = cfg.resolved();
      auto r = run_prop2(run.seq, run.schedule, *run.p2, cfg.nu_max, o);
      write_file(a.out, canonical_dump(r.certificate));
      json ex = json::array();
      for (size_t i = 0; i < r.extracted.size(); ++i) {
        json theta = json::array();
        for (const auto& t : r.extracted[i].theta) theta.push_back(dyadic_string(t));
        ex.push_back({{"leaf", r.extracted_leaves[i]}, {"theta", theta},
                      {"min_margin", to_string(r.extracted[i].min_margin)},
                      {"min_margin_decimal", r.extracted[i].min_margin.get_d()}});
      }
      summary = {{"mode", "prop2"}, {"certificate", a.out}, {"certificate_digest", r.certificate["certificate_digest"]},
                 {"nodes", r.nodes.size()}, {"distinct_prefixes", r.leaves.size()}, {"extracted", ex}};
    }
    emit(out, summary);
    return 0;
  } catch (const ConditionViolated& e) {
    json rep;
    try {
      rep = condition_report(run.seq, run.schedule, std::min(cfg.n_max, run.seq.size()),
                             run.p2 ? &*run.p2 : nullptr, cfg.nu_max).to_json();
    } catch (const Error& inner) {
      rep = inner.what();
    }
    emit(out, {{"error", e.what()}, {"condition", e.condition()}, {"index", e.index()}, {"report", rep}});
    throw;
  }
}

int cmd_verify(const std::string& cert_path, const std::string& seq_path, const std::string& cfg_path,
               std::ostream& out) {
  json cert = load_json(cert_path);
  json spec;
  if (!seq_path.empty()) spec = load_json(seq_path);
  else if (!cfg_path.empty()) spec = parse_run_config(load_json(cfg_path), dir_of(cfg_path)).sequence;
  else throw ParseError("verify needs --sequence or --config");
  auto rep = verify_certificate(cert, sequence_from_json(spec));
  emit(out, rep.to_json());
  return rep.ok ? 0 : code(ExitCode::kVerificationFailed);
}

struct MeasureArgs {
  std::string a, b = "0", eps, p = "inf", v, r;
  std::uint64_t samples = 1000000, seed = 0;
  unsigned threads = 1;
};

int cmd_measure(const MeasureArgs& m, std::ostream& out) {
  std::vector<Rational> a = rational_list(m.a);
  const long d = static_cast<long>(a.size());
  bool zero = true;
  for (const auto& c : a) zero = zero && c == 0;
  if (zero) throw DomainError("a must be nonzero");
  Rational b = parse_rational(m.b), eps = parse_rational(m.eps);
  if (eps <= 0) throw DomainError("eps must be > 0");
  NormSelector p = NormSelector::parse(m.p);
  LinearForm form(a, b);
  Rational side = m.r.empty() ? Rational(1) : parse_rational(m.r);
  if (side <= 0) throw DomainError("r must be > 0");
  std::vector<Rational> lo(d, 0);
  if (!m.v.empty()) {
    lo = rational_list(m.v);
    if (static_cast<long>(lo.size()) != d) throw DomainError("v has the wrong dimension");
  }
  std::vector<Rational> hi = lo;
  for (auto& x : hi) x += side;
  Norm R = norm(form, p);
  BoundValue bound = m.r.empty() && m.v.empty() ? lemma2_bound(R, eps, d, p) : corollary1_bound(R, eps, d, p, side);
  json j = {{"d", d}, {"epsilon", to_string(eps)}, {"p", p.to_string()}, {"R", R.to_string()},
            {"bound", bound.to_string()}, {"bound_decimal", bound.enclosure.hi_double()}};
  json region = json::array();
  for (long i = 0; i < d; ++i) region.push_back({to_string(lo[i]), to_string(hi[i])});
  j["region"] = region;
  Rational vol = 1;
  for (long i = 0; i < d; ++i) vol *= side;
  if (d == 1) {
    Rational meas = exact_bad_measure_1d(a[0], b, eps, lo[0], hi[0]);
    Rational rel = meas / vol;
    j["exact"] = to_string(meas);
    j["relative"] = to_string(rel);
    j["pass"] = bound.dominates(rel);
  } else {
    auto est = mc_bad_measure(BadSetSpec{form, eps, lo, hi}, m.samples, m.seed, m.threads);
    double rel = est.estimate / vol.get_d(), se = est.stderr_ / vol.get_d();
    j["estimate"] = est.estimate;
    j["stderr"] = est.stderr_;
    j["relative"] = rel;
    j["samples"] = est.samples;
    j["seed"] = est.seed;
    j["prng"] = est.prng;
    j["pass"] = bound.dominates(rel - 4 * se);
    j["criterion"] = "relative estimate <= bound + 4 stderr";
  }
  emit(out, j);
  return 0;
}

int cmd_analyze(const std::string& cfg_path, std::ostream& out) {
  RunConfig cfg = parse_run_config(load_json(cfg_path), dir_of(cfg_path));
  if (cfg.precision_bits) set_precision(*cfg.precision_bits);
  ResolvedRun run = resolve_run(cfg);
  size_t n = cfg.mode == "prop2" && run.p2 && run.p2->n.size() > cfg.nu_max + 2 ? run.p2->n[cfg.nu_max + 2] : cfg.n_max;
  Schedule s = run.schedule;
  if (cfg.mode == "prop2") s.x = nullptr;
  auto rep = condition_report(run.seq, s, std::min(n, run.seq.size()),
                              cfg.mode == "prop2" && run.p2 ? &*run.p2 : nullptr, cfg.nu_max);
  emit(out, {{"report", rep.to_json()}, {"failures", rep.failures()}, {"params", run.params}});
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"lacuna: certified badly approximable points for sequences of linear forms"};
  app.require_subcommand(1);
  long precision = 0;
  app.add_option("--precision", precision, "working precision in bits (default: LACUNA_PRECISION or 256)");

  BoundArgs ba;
  auto* bound = app.add_subcommand("bound", "compute delta and verified parameter chains");
  bound->add_option("--theorem", ba.theorem, "1, 2 or 3");
  bound->add_option("--N", ba.N, "number of forms per block");
  bound->add_option("--d", ba.d, "dimension");
  bound->add_option("--levels", ba.levels, "theorem 2: number of branching levels n_nu");
  bound->add_flag("--khintchine", ba.khintchine, "tabulate delta(t, 1) t ln(t + 1)");
  bound->add_option("--t-from", ba.t_from);
  bound->add_option("--t-to", ba.t_to);
  bound->add_option("--family", ba.family, "theorem 3: cor1, cor2 or cor3");
  bound->add_option("--beta", ba.beta);
  bound->add_option("--gamma", ba.gamma);
  bound->add_option("--beta1", ba.beta1);
  bound->add_option("--A", ba.A);
  bound->add_option("--C", ba.C, "theorem 3: override the quadrature bound for C");
  bound->add_option("--n1", ba.n1, "theorem 3: fix n_1 instead of searching");
  bound->add_option("--sequence", ba.sequence, "theorem 3: sequence spec file");

  ConstructArgs ca;
  auto* construct = app.add_subcommand("construct", "run an elimination and write a certificate");
  construct->add_option("--config", ca.config, "run config JSON")->required();
  construct->add_option("--out", ca.out, "certificate path");
  construct->add_option("--within", ca.within, "target cube: v=<v1,...> r=<side>")->expected(2);
  construct->add_option("--threads", ca.threads);
  construct->add_option("--cube-budget", ca.cube_budget);

  std::string vcert, vseq, vcfg;
  auto* verify = app.add_subcommand("verify", "re-check a certificate in exact arithmetic");
  verify->add_option("--certificate", vcert)->required();
  verify->add_option("--sequence", vseq, "sequence spec file");
  verify->add_option("--config", vcfg, "run config whose sequence to use");

  MeasureArgs ma;
  auto* measure = app.add_subcommand("measure", "measure of {||a.theta + b|| <= eps} against its bound");
  measure->add_option("--a", ma.a, "coefficients, comma separated")->required();
  measure->add_option("--b", ma.b);
  measure->add_option("--eps", ma.eps)->required();
  measure->add_option("--p", ma.p, "norm: 1, 2, inf or a rational >= 1");
  measure->add_option("--v", ma.v, "cube corner, comma separated");
  measure->add_option("--r", ma.r, "cube side");
  measure->add_option("--samples", ma.samples);
  measure->add_option("--seed", ma.seed);
  measure->add_option("--threads", ma.threads);

  std::string acfg;
  auto* analyze = app.add_subcommand("analyze", "condition report for a run config");
  analyze->add_option("--config", acfg)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return code(ExitCode::kUsage);
  }
  try {
    if (precision) set_precision(precision);
    if (*bound) return cmd_bound(ba, out);
    if (*construct) return cmd_construct(ca, out);
    if (*verify) return cmd_verify(vcert, vseq, vcfg, out);
    if (*measure) return cmd_measure(ma, out);
    if (*analyze) return cmd_analyze(acfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return code(ExitCode::kUsage);
  }
  return code(ExitCode::kUsage);
}

}  // namespace lacuna
