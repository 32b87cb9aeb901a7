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


#include "lacuna/io.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "lacuna/errors.hpp"

namespace lacuna {

using nlohmann::json;

namespace {

void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) throw ParseError(where + ": unknown key '" + k + "'");
}

Rational rat(const json& v, const std::string& where) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long>());
  throw ParseError(where + ": expected a rational string such as \"3/4\"");
}

long integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ParseError(where + ": expected an integer");
  return v.get<long>();
}

std::uint64_t count_of(const json& v, const std::string& where) {
  long c = integer(v, where);
  if (c < 0) throw ParseError(where + ": must be >= 0");
  return static_cast<std::uint64_t>(c);
}

NormSelector norm_of(const json& v, const std::string& where) {
  if (v.is_number_integer()) return NormSelector::parse(std::to_string(v.get<long>()));
  if (!v.is_string()) throw ParseError(where + ": expected \"1\", \"2\", \"inf\" or a rational");
  return NormSelector::parse(v.get<std::string>());
}

// A constant or a per-index list (index 1 first).
std::function<Rational(size_t)> table(const json& v, const std::string& where) {
  if (v.is_array()) {
    std::vector<Rational> vals;
    for (size_t i = 0; i < v.size(); ++i) vals.push_back(rat(v[i], where + "[" + std::to_string(i) + "]"));
    return [vals, where](size_t n) {
      if (n < 1 || n > vals.size()) throw DomainError(where + " has no entry for n = " + std::to_string(n));
      return vals[n - 1];
    };
  }
  Rational c = rat(v, where);
  return [c](size_t) { return c; };
}

}  // namespace

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

json resolve_sequence_spec(const json& spec, const std::string& base_dir) {
  if (spec.is_string()) {
    std::filesystem::path p(spec.get<std::string>());
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    return load_json(p.string());
  }
  if (!spec.is_object()) throw ParseError("sequence: expected an object or a file path");
  return spec;
}

FormSequence sequence_from_json(const json& spec) {
  if (!spec.is_object()) throw ParseError("sequence: expected an object");
  if (spec.contains("forms")) {
    only_keys(spec, {"p", "forms", "dim"}, "sequence");
    NormSelector p = spec.contains("p") ? norm_of(spec["p"], "sequence.p") : NormSelector::inf();
    const json& fs = spec["forms"];
    if (!fs.is_array() || fs.empty()) throw ParseError("sequence.forms: expected a non-empty array");
    std::vector<LinearForm> forms;
    for (size_t i = 0; i < fs.size(); ++i) {
      std::string w = "sequence.forms[" + std::to_string(i) + "]";
      only_keys(fs[i], {"a", "b"}, w);
      if (!fs[i].contains("a") || !fs[i]["a"].is_array()) throw ParseError(w + ".a: expected an array");
      std::vector<Rational> a;
      for (const auto& c : fs[i]["a"]) a.push_back(rat(c, w + ".a"));
      forms.emplace_back(std::move(a), fs[i].contains("b") ? rat(fs[i]["b"], w + ".b") : Rational(0));
    }
    if (spec.contains("dim") && integer(spec["dim"], "sequence.dim") != static_cast<long>(forms[0].dim()))
      throw ParseError("sequence.dim disagrees with the forms");
    return FormSequence(std::move(forms), p);
  }
  only_keys(spec, {"family", "d", "p", "params", "count"}, "sequence");
  if (!spec.contains("family") || !spec["family"].is_string()) throw ParseError("sequence.family: expected a string");
  auto fam = parse_family(spec["family"].get<std::string>());
  if (!fam) throw ParseError("sequence.family: unknown family '" + spec["family"].get<std::string>() + "'");
  GeneratorParams gp;
  if (spec.contains("d")) gp.d = integer(spec["d"], "sequence.d");
  if (spec.contains("p")) gp.p = norm_of(spec["p"], "sequence.p");
  if (!spec.contains("count")) throw ParseError("sequence.count is required");
  gp.count = integer(spec["count"], "sequence.count");
  if (spec.contains("params")) {
    const json& pr = spec["params"];
    only_keys(pr, {"base", "t", "k", "beta", "beta1", "gamma", "offset", "direction"}, "sequence.params");
    if (pr.contains("base")) gp.base = integer(pr["base"], "sequence.params.base");
    if (pr.contains("t")) gp.t = integer(pr["t"], "sequence.params.t");
    if (pr.contains("k")) gp.k = rat(pr["k"], "sequence.params.k");
    if (pr.contains("beta")) gp.beta = rat(pr["beta"], "sequence.params.beta");
    if (pr.contains("beta1")) gp.beta1 = rat(pr["beta1"], "sequence.params.beta1");
    if (pr.contains("gamma")) gp.gamma = rat(pr["gamma"], "sequence.params.gamma");
    if (pr.contains("offset")) gp.offset = rat(pr["offset"], "sequence.params.offset");
    if (pr.contains("direction")) {
      if (!pr["direction"].is_array()) throw ParseError("sequence.params.direction: expected an array");
      for (const auto& c : pr["direction"]) gp.direction.push_back(rat(c, "sequence.params.direction"));
    }
  }
  return generate(*fam, gp).seq;
}

json RunConfig::resolved() const {
  json j = {{"sequence", sequence},
            {"schedule", schedule},
            {"mode", mode},
            {"n_max", n_max},
            {"nu_max", nu_max},
            {"depth_bits", depth_bits},
            {"cube_budget", cube_budget},
            {"seed", seed},
            {"precision_bits", precision_bits ? *precision_bits : default_precision()},
            {"extract", extract}};
  if (within) {
    json v = json::array();
    for (const auto& c : within->v) v.push_back(to_string(c));
    j["within"] = {{"v", v}, {"r", to_string(within->r)}};
  }
  return j;
}

RunConfig parse_run_config(const json& doc, const std::string& base_dir) {
  only_keys(doc, {"sequence", "schedule", "mode", "n_max", "nu_max", "depth_bits", "cube_budget", "seed",
                  "precision_bits", "within", "extract", "$schema"},
            "config");
  RunConfig c;
  if (!doc.contains("sequence")) throw ParseError("config.sequence is required");
  c.sequence = resolve_sequence_spec(doc["sequence"], base_dir);
  if (!doc.contains("schedule")) throw ParseError("config.schedule is required");
  c.schedule = doc["schedule"];
  if (!c.schedule.is_object() || !c.schedule.contains("source") || !c.schedule["source"].is_string())
    throw ParseError("config.schedule.source: expected theorem1, theorem2, theorem3 or explicit");
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string()) throw ParseError("config.mode: expected \"prop1\" or \"prop2\"");
    c.mode = doc["mode"].get<std::string>();
    if (c.mode != "prop1" && c.mode != "prop2") throw ParseError("config.mode: expected \"prop1\" or \"prop2\"");
  }
  if (doc.contains("n_max")) c.n_max = count_of(doc["n_max"], "config.n_max");
  if (doc.contains("nu_max")) c.nu_max = count_of(doc["nu_max"], "config.nu_max");
  if (doc.contains("depth_bits")) c.depth_bits = static_cast<long>(count_of(doc["depth_bits"], "config.depth_bits"));
  if (doc.contains("cube_budget")) c.cube_budget = count_of(doc["cube_budget"], "config.cube_budget");
  if (doc.contains("seed")) c.seed = count_of(doc["seed"], "config.seed");
  if (doc.contains("precision_bits")) {
    long p = integer(doc["precision_bits"], "config.precision_bits");
    if (p < 32) throw ParseError("config.precision_bits must be >= 32");
    c.precision_bits = p;
  }
  if (doc.contains("extract")) c.extract = count_of(doc["extract"], "config.extract");
  if (doc.contains("within")) {
    const json& w = doc["within"];
    only_keys(w, {"v", "r"}, "config.within");
    if (!w.contains("v") || !w["v"].is_array() || !w.contains("r")) throw ParseError("config.within needs v (array) and r");
    Within t;
    for (const auto& x : w["v"]) t.v.push_back(rat(x, "config.within.v"));
    t.r = rat(w["r"], "config.within.r");
    c.within = t;
  }
  const std::string src = c.schedule["source"].get<std::string>();
  if (src == "theorem1") only_keys(c.schedule, {"source", "N", "d"}, "config.schedule");
  else if (src == "theorem2") only_keys(c.schedule, {"source", "N", "d", "levels"}, "config.schedule");
  else if (src == "theorem3")
    only_keys(c.schedule, {"source", "family", "params", "C", "n1", "n1_min", "n1_max", "x_max"}, "config.schedule");
  else if (src == "explicit")
    only_keys(c.schedule, {"source", "lambda", "delta", "x", "m", "n_nu", "eta", "description"}, "config.schedule");
  else
    throw ParseError("config.schedule.source: unknown source '" + src + "'");
  return c;
}

ResolvedRun resolve_run(const RunConfig& cfg) {
  ResolvedRun r;
  r.seq = sequence_from_json(cfg.sequence);
  const json& s = cfg.schedule;
  const std::string src = s["source"].get<std::string>();
  const long dim = static_cast<long>(r.seq.dim());
  auto nd = [&](long& N, long& d) {
    N = s.contains("N") ? integer(s["N"], "schedule.N") : 1;
    d = s.contains("d") ? integer(s["d"], "schedule.d") : dim;
    if (N < 1) throw DomainError("N must be ≥ 1");
    if (d != dim) throw DomainError("schedule.d = " + std::to_string(d) + " but the sequence has dimension " + std::to_string(dim));
  };
  if (src == "theorem1") {
    long N, d;
    nd(N, d);
    auto t = theorem1_schedule(N, d);
    r.schedule = t.schedule;
    r.params = t.params.to_json();
  } else if (src == "theorem2") {
    long N, d;
    nd(N, d);
    size_t levels = s.contains("levels") ? count_of(s["levels"], "schedule.levels") : cfg.nu_max + 3;
    auto t = theorem2_schedule(N, d, std::max<size_t>(levels, cfg.nu_max + 3));
    r.schedule = t.schedule;
    r.p2 = t.p2;
    r.params = t.params.to_json();
  } else if (src == "theorem3") {
    CorollaryParams cp;
    if (s.contains("params")) {
      const json& p = s["params"];
      only_keys(p, {"beta", "gamma", "beta1", "A"}, "schedule.params");
      if (p.contains("beta")) cp.beta = rat(p["beta"], "schedule.params.beta");
      if (p.contains("gamma")) cp.gamma = rat(p["gamma"], "schedule.params.gamma");
      if (p.contains("beta1")) cp.beta1 = rat(p["beta1"], "schedule.params.beta1");
      if (p.contains("A")) cp.A = rat(p["A"], "schedule.params.A");
    }
    if (!s.contains("family") || !s["family"].is_string()) throw ParseError("schedule.family: expected cor1, cor2 or cor3");
    Thm3Config tc;
    tc.family = corollary_family(s["family"].get<std::string>(), cp);
    if (s.contains("C")) tc.C = rat(s["C"], "schedule.C");
    if (s.contains("n1_min")) tc.n1_min = count_of(s["n1_min"], "schedule.n1_min");
    if (s.contains("n1_max")) tc.n1_max = count_of(s["n1_max"], "schedule.n1_max");
    if (s.contains("x_max")) {
      if (!s["x_max"].is_number()) throw ParseError("schedule.x_max: expected a number");
      tc.x_max = s["x_max"].get<double>();
    }
    tc.prop1_n_max = std::max<size_t>(cfg.n_max, 1);
    std::optional<size_t> n1;
    if (s.contains("n1")) n1 = count_of(s["n1"], "schedule.n1");
    auto t = theorem3_schedule(tc, r.seq, n1);
    r.schedule = t.schedule;
    r.p2 = t.p2;
    r.params = t.feasibility;
  } else {
    if (!s.contains("delta")) throw ParseError("schedule.delta is required");
    r.schedule.delta = table(s["delta"], "schedule.delta");
    Rational lam = s.contains("lambda") ? rat(s["lambda"], "schedule.lambda") : Rational(0);
    r.schedule.lambda = RealInterval::from_rational(lam);
    if (s.contains("x")) r.schedule.x = table(s["x"], "schedule.x");
    if (s.contains("m")) {
      if (!s["m"].is_array()) throw ParseError("schedule.m: expected an array of integers");
      std::vector<size_t> ms;
      for (const auto& v : s["m"]) ms.push_back(count_of(v, "schedule.m"));
      r.schedule.m = [ms](size_t n) -> size_t {
        if (n < 1 || n > ms.size()) throw DomainError("schedule.m has no entry for n = " + std::to_string(n));
        return ms[n - 1];
      };
    }
    r.schedule.description = s.contains("description") && s["description"].is_string()
                                 ? s["description"].get<std::string>()
                                 : std::string("explicit");
    if (s.contains("n_nu")) {
      Prop2Schedule p2;
      if (!s["n_nu"].is_array()) throw ParseError("schedule.n_nu: expected an array");
      for (const auto& v : s["n_nu"]) p2.n.push_back(count_of(v, "schedule.n_nu"));
      if (!s.contains("eta")) throw ParseError("schedule.eta is required with n_nu");
      auto eta = table(s["eta"], "schedule.eta");
      for (size_t i = 0; i < p2.n.size(); ++i) p2.eta.push_back(eta(i + 1));
      r.p2 = p2;
    }
  }
  return r;
}

}  // namespace lacuna
