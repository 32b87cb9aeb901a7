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

#include "lacuna/certificate.hpp"

#include <openssl/evp.h>

#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "lacuna/errors.hpp"

namespace lacuna {

using nlohmann::json;

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ExitCode::kVerificationFailed, "SHA-256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i)
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

std::string canonical_dump(const json& doc) { return doc.dump(2) + "\n"; }

json sequence_json(const FormSequence& seq, size_t count) {
  if (count > seq.size()) throw DomainError("sequence shorter than requested prefix");
  json forms = json::array();
  for (size_t n = 1; n <= count; ++n) {
    json a = json::array();
    for (const auto& c : seq.form(n).a()) a.push_back(to_string(c));
    forms.push_back({{"a", a}, {"b", to_string(seq.form(n).b())}});
  }
  return {{"dim", seq.dim()}, {"p", seq.p().to_string()}, {"forms", forms}};
}

std::string sequence_digest(const FormSequence& seq, size_t count) {
  return sha256_hex(sequence_json(seq, count).dump());
}

json cube_json(const DyadicCube& cube) {
  json c = json::array();
  for (const auto& x : cube.coords()) c.push_back(x.get_str());
  return {{"level", cube.level()}, {"coords", c}};
}

json interval_json(const RealInterval& v) {
  return {{"lo", dyadic_string(v.lo_rational())}, {"hi", dyadic_string(v.hi_rational())}};
}

namespace {

const json& field(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
  return j.at(key);
}

std::string str_field(const json& j, const std::string& key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_string()) throw ParseError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

Rational rat_field(const json& j, const std::string& key, const std::string& where) {
  try {
    return parse_dyadic_or_rational(str_field(j, key, where));
  } catch (const ParseError& e) {
    throw ParseError(where + "." + key + ": " + e.what());
  }
}

Integer int_str_field(const json& j, const std::string& key, const std::string& where) {
  std::string s = str_field(j, key, where);
  Integer v;
  if (v.set_str(s, 10) != 0) throw ParseError(where + "." + key + ": expected an integer string");
  return v;
}

long num_field(const json& j, const std::string& key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_number_integer()) throw ParseError(where + "." + key + ": expected an integer");
  return v.get<long>();
}

std::vector<Rational> rat_array(const json& j, const std::string& key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_array()) throw ParseError(where + "." + key + ": expected an array");
  std::vector<Rational> out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) throw ParseError(where + "." + key + "[" + std::to_string(i) + "]: expected a string");
    out.push_back(parse_dyadic_or_rational(v[i].get<std::string>()));
  }
  return out;
}

class Checker {
 public:
  explicit Checker(VerifyReport& rep) : rep_(rep) {}
  bool operator()(bool ok, const std::string& what) {
    rep_.checks.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    if (!ok && rep_.ok) {
      rep_.ok = false;
      rep_.failure = what;
    }
    return ok;
  }

 private:
  VerifyReport& rep_;
};

Rational cube_margin(const LinearForm& f, const std::vector<Rational>& lo,
                     const std::vector<Rational>& hi, const Rational& delta) {
  auto [m, M] = f.affine_range(lo, hi);
  return min_nearest_int_dist(m, M) - delta;
}

void box_of(const DyadicCube& cube, const std::vector<Rational>& shift, const Rational& scale,
            std::vector<Rational>& lo, std::vector<Rational>& hi) {
  lo.clear();
  hi.clear();
  for (size_t i = 0; i < cube.dim(); ++i) {
    lo.push_back(shift[i] + scale * cube.lower(i));
    hi.push_back(shift[i] + scale * cube.upper(i));
  }
}

}  // namespace

DyadicCube cube_from_json(const json& j, const std::string& where) {
  long level = num_field(j, "level", where);
  const json& c = field(j, "coords", where);
  if (!c.is_array()) throw ParseError(where + ".coords: expected an array");
  std::vector<Integer> coords;
  for (const auto& x : c) {
    Integer v;
    if (!x.is_string() || v.set_str(x.get<std::string>(), 10) != 0)
      throw ParseError(where + ".coords: expected integer strings");
    coords.push_back(v);
  }
  try {
    return DyadicCube(level, coords);
  } catch (const DomainError& e) {
    throw ParseError(where + ": " + e.what());
  }
}

Extraction make_extraction(const DyadicCube& working_cube, const std::vector<Rational>& shift,
                           const Rational& scale, const FormSequence& original, size_t n_from,
                           size_t n_to, const std::function<Rational(size_t)>& delta) {
  Extraction ex;
  ex.cube = working_cube;
  box_of(working_cube, shift, scale, ex.box_lo, ex.box_hi);
  for (size_t i = 0; i < working_cube.dim(); ++i) ex.theta.push_back((ex.box_lo[i] + ex.box_hi[i]) / 2);
  bool first = true;
  for (size_t n = n_from; n <= n_to; ++n) {
    Rational m = cube_margin(original.form(n), ex.box_lo, ex.box_hi, delta(n));
    ex.margins.push_back({n, m});
    if (first || m < ex.min_margin) ex.min_margin = m;
    first = false;
  }
  return ex;
}

void finalize_certificate(json& cert) {
  cert.erase("certificate_digest");
  cert["certificate_digest"] = sha256_hex(cert.dump());
}

json VerifyReport::to_json() const {
  return {{"ok", ok}, {"failure", failure}, {"checks", checks}};
}

namespace {

void verify_margins(const json& list, const std::string& where, const FormSequence& seq,
                    const std::vector<Rational>& lo, const std::vector<Rational>& hi,
                    const std::map<size_t, Rational>& deltas, size_t n_from, size_t n_to,
                    Checker& check) {
  if (!list.is_array()) throw ParseError(where + ": expected an array");
  check(list.size() == n_to - n_from + 1, where + ": one margin per n in [" +
                                              std::to_string(n_from) + ", " + std::to_string(n_to) + "]");
  for (size_t i = 0; i < list.size(); ++i) {
    std::string w = where + "[" + std::to_string(i) + "]";
    size_t n = static_cast<size_t>(num_field(list[i], "n", w));
    Rational recorded = rat_field(list[i], "margin", w);
    Rational dl = rat_field(list[i], "delta", w);
    if (!check(n == n_from + i && n <= seq.size(), w + ": index n = " + std::to_string(n) + " in order"))
      continue;
    auto it = deltas.find(n);
    if (!check(it != deltas.end() && it->second == dl, w + ": delta_n matches the schedule at n = " + std::to_string(n)))
      continue;
    Rational m = cube_margin(seq.form(n), lo, hi, dl);
    check(m == recorded, "margin at n = " + std::to_string(n) + " recomputes exactly");
    check(m >= 0, "margin at n = " + std::to_string(n) + " is non-negative");
  }
}

void verify_prop1(const json& cert, const FormSequence& seq, Checker& check) {
  const json& aff = field(cert, "affine", "affine");
  auto shift = rat_array(aff, "shift", "affine");
  Rational scale = rat_field(aff, "scale", "affine");
  size_t offset = static_cast<size_t>(num_field(aff, "offset", "affine"));
  check(shift.size() == seq.dim() && scale > 0, "affine map is well formed");
  if (shift.size() != seq.dim()) return;

  std::map<size_t, Rational> deltas, xs;
  std::map<size_t, size_t> ms;
  const json& stages = field(field(cert, "schedule", "schedule"), "stages", "schedule");
  if (!stages.is_array()) throw ParseError("schedule.stages: expected an array");
  for (size_t i = 0; i < stages.size(); ++i) {
    std::string w = "schedule.stages[" + std::to_string(i) + "]";
    size_t n = static_cast<size_t>(num_field(stages[i], "n", w));
    deltas[n] = rat_field(stages[i], "delta", w);
    xs[n] = rat_field(stages[i], "x", w);
    ms[n] = static_cast<size_t>(num_field(stages[i], "m", w));
    check(deltas[n] > 0 && xs[n] > 0 && xs[n] < 1 && ms[n] < n, w + ": 0 < delta, 0 < x < 1, m < n");
  }

  DyadicCube fin = cube_from_json(field(cert, "final_cube", "final_cube"), "final_cube");
  check(fin.dim() == seq.dim(), "final cube dimension");
  std::vector<Rational> lo, hi;
  box_of(fin, shift, scale, lo, hi);
  auto theta = rat_array(cert, "theta", "theta");
  bool inside = theta.size() == lo.size();
  for (size_t i = 0; inside && i < theta.size(); ++i) inside = lo[i] <= theta[i] && theta[i] <= hi[i];
  check(inside, "theta lies in the final closed cube");

  size_t n_from = static_cast<size_t>(num_field(cert, "checked_n_min", "checked_n_min"));
  size_t n_to = static_cast<size_t>(num_field(cert, "checked_n_max", "checked_n_max"));
  check(n_from == offset + 1 && n_to >= offset && n_to <= seq.size(), "checked range matches the affine offset");
  verify_margins(field(cert, "margins", "margins"), "margins", seq, lo, hi, deltas, n_from, n_to, check);

  const json& trace = field(cert, "trace", "trace");
  if (!trace.is_array()) throw ParseError("trace: expected an array");
  check(trace.size() == n_to - offset, "trace has one entry per stage");
  long prev_level = 0;
  Rational lower = 1;
  std::optional<DyadicCube> last_region;
  for (size_t i = 0; i < trace.size(); ++i) {
    std::string w = "trace[" + std::to_string(i) + "]";
    const json& t = trace[i];
    size_t n = static_cast<size_t>(num_field(t, "n", w));
    long level = num_field(t, "level", w);
    size_t m = static_cast<size_t>(num_field(t, "m", w));
    Integer cells = int_str_field(t, "cells", w), surv = int_str_field(t, "survivors", w);
    Integer prev = int_str_field(t, "prev_survivors", w), bm = int_str_field(t, "bm", w),
            abm = int_str_field(t, "abm", w);
    Rational meas = rat_field(t, "measure", w), lb = rat_field(t, "lower_bound", w),
             win = rat_field(t, "window", w);
    DyadicCube region = cube_from_json(field(t, "region", w), w + ".region");
    last_region = region;
    std::string at = " at n = " + std::to_string(n);
    if (!check(n == offset + 1 + i && xs.count(n) && ms.count(n) && ms[n] == m, w + ": stage index and m" + at))
      continue;
    check(level >= prev_level && level >= region.level(), "levels non-decreasing" + at);
    prev_level = level;
    Rational w_exact = 1;
    for (size_t k = std::max(m, offset) + 1; k < n; ++k) w_exact *= 1 - xs[k];
    lower *= 1 - xs[n];
    check(win == w_exact, "window product recomputes" + at);
    check(lb == lower, "lower bound product recomputes" + at);
    Integer expect = 1;
    mpz_mul_2exp(expect.get_mpz_t(), expect.get_mpz_t(),
                 static_cast<mp_bitcnt_t>((level - region.level()) * static_cast<long>(seq.dim())));
    check(cells == expect, "cell count matches the region" + at);
    check(cells > 0 && meas == Rational(surv) / Rational(cells), "measure = survivors / cells" + at);
    check(Rational(abm) <= xs[n] * win * Rational(bm), "Lemma 1 hypothesis mu(A_n cap B_m) <= x prod mu(B_m)" + at);
    check(Rational(surv) >= (1 - xs[n]) * Rational(prev), "Lemma 1 conclusion mu(B_n) >= (1 - x_n) mu(B_{n-1})" + at);
    check(meas >= lb, "mu(B_n) >= prod (1 - x_k)" + at);
    check(surv > 0, "B_n non-empty" + at);
  }
  if (last_region) {
    check(last_region->level() <= fin.level() && fin.ancestor(last_region->level()) == *last_region,
          "final cube lies in the last tracked region");
    check(trace.empty() || fin.level() >= prev_level, "final cube at or below the last level");
  }
}

}  // namespace

namespace {

void verify_prop2(const json& cert, const FormSequence& seq, Checker& check) {
  const json& aff = field(cert, "affine", "affine");
  auto shift = rat_array(aff, "shift", "affine");
  Rational scale = rat_field(aff, "scale", "affine");
  check(shift.size() == seq.dim() && scale > 0, "affine map is well formed");
  if (shift.size() != seq.dim()) return;
  const long d = static_cast<long>(seq.dim());

  const json& sch = field(cert, "schedule", "schedule");
  std::map<size_t, Rational> deltas;
  const json& dl = field(sch, "deltas", "schedule");
  if (!dl.is_array()) throw ParseError("schedule.deltas: expected an array");
  for (size_t i = 0; i < dl.size(); ++i) {
    std::string w = "schedule.deltas[" + std::to_string(i) + "]";
    deltas[static_cast<size_t>(num_field(dl[i], "n", w))] = rat_field(dl[i], "delta", w);
  }
  Prop2Schedule p2;
  for (const auto& v : field(sch, "n_nu", "schedule")) {
    if (!v.is_number_integer()) throw ParseError("schedule.n_nu: expected integers");
    p2.n.push_back(v.get<size_t>());
  }
  p2.eta = rat_array(sch, "eta", "schedule");
  const json& lam = field(cert, "lambda", "lambda");
  RealInterval lambda = RealInterval::hull(RealInterval::from_rational(rat_field(lam, "lo", "lambda")),
                                           RealInterval::from_rational(rat_field(lam, "hi", "lambda")));
  Schedule sched;
  sched.lambda = lambda;
  sched.delta = [&](size_t n) {
    auto it = deltas.find(n);
    if (it == deltas.end()) throw ParseError("schedule.deltas: missing n = " + std::to_string(n));
    return it->second;
  };
  std::vector<long> levels;
  for (const auto& v : field(cert, "levels", "levels")) {
    if (!v.is_number_integer()) throw ParseError("levels: expected integers");
    levels.push_back(v.get<long>());
  }
  size_t nu_max = static_cast<size_t>(num_field(cert, "nu_max", "nu_max"));
  if (p2.n.size() < nu_max + 3 || p2.eta.size() < nu_max + 3 || p2.n[0] != 0)
    throw ParseError("schedule: n_nu/eta too short for nu_max");
  if (levels.size() < p2.n[nu_max + 2] + 1) throw ParseError("levels: too short");
  bool monotone = true;
  for (size_t i = 1; i < levels.size(); ++i) monotone = monotone && levels[i] >= levels[i - 1];
  check(monotone, "levels non-decreasing");
  check(levels[0] == 0, "level of the 0-cube is 0");

  const json& tree = field(cert, "tree", "tree");
  if (!tree.is_array() || tree.empty()) throw ParseError("tree: expected a non-empty array");
  std::vector<DyadicCube> cubes;
  std::vector<size_t> depth;
  for (size_t i = 0; i < tree.size(); ++i) {
    std::string w = "tree[" + std::to_string(i) + "]";
    const json& t = tree[i];
    check(static_cast<size_t>(num_field(t, "id", w)) == i, w + ": id in order");
    cubes.push_back(cube_from_json(field(t, "cube", w), w + ".cube"));
    depth.push_back(static_cast<size_t>(num_field(t, "depth", w)));
  }
  for (size_t i = 0; i < tree.size(); ++i) {
    std::string w = "tree[" + std::to_string(i) + "]";
    const json& t = tree[i];
    size_t j = depth[i];
    if (!check(j <= nu_max + 1, w + ": depth within nu_max + 1")) continue;
    check(cubes[i].level() == levels[p2.n[j]], w + ": cube level is l_{n_depth}");
    const json& par = field(t, "parent", w);
    if (i == 0) {
      check(par.is_null() && j == 0, "root is the unit 0-cube");
      check(cubes[0] == DyadicCube::unit(seq.dim()), "root cube is [0,1]^d");
    } else {
      if (!par.is_number_integer()) throw ParseError(w + ".parent: expected an integer");
      size_t p = par.get<size_t>();
      if (!check(p < i && depth[p] + 1 == j && cubes[p].contains(cubes[i]), w + ": nested in its parent"))
        continue;
    }
    const json& ch = field(t, "children", w);
    if (!ch.is_array()) throw ParseError(w + ".children: expected an array");
    if (j > nu_max) {
      check(ch.empty(), w + ": leaves have no children");
      continue;
    }
    Integer cells = int_str_field(t, "cells", w), alive = int_str_field(t, "alive", w);
    Integer expect = 1;
    mpz_mul_2exp(expect.get_mpz_t(), expect.get_mpz_t(),
                 static_cast<mp_bitcnt_t>(d * (levels[p2.n[j + 1]] - levels[p2.n[j]])));
    check(cells == expect, w + ": child cell count");
    check(Rational(alive) > (1 - p2.eta[j]) * Rational(cells),
          w + ": good " + std::to_string(j) + "-cube, a > (1 - eta) cells");
    const json& g = field(t, "good", w);
    if (!g.is_null()) {
      Integer good;
      if (!g.is_string() || good.set_str(g.get<std::string>(), 10) != 0) throw ParseError(w + ".good: expected an integer string");
      RealInterval s = prop2_sigma(sched, p2, j + 1);
      RealInterval factor = RealInterval::from_int(1) -
                            s / RealInterval::from_rational(p2.eta[j + 1] * (1 - p2.eta[j]));
      bool ok = mpfr_cmp_q(factor.hi(), Rational(Rational(good) / Rational(alive)).get_mpq_t()) < 0;
      check(ok && good <= alive, w + ": counting bound g > (1 - sigma/(eta (1 - eta))) a");
      check(good >= static_cast<long>(ch.size()), w + ": kept children are among the good ones");
    }
    bool need = field(t, "branching_required", w).get<bool>();
    if (need) check(ch.size() >= 2, w + ": branching level keeps >= 2 good children");
    check(!ch.empty(), w + ": at least one good child");
    for (const auto& c : ch) {
      if (!c.is_number_integer() || c.get<size_t>() >= tree.size()) throw ParseError(w + ".children: bad id");
      size_t ci = c.get<size_t>();
      check(field(tree[ci], "parent", w).is_number_integer() && field(tree[ci], "parent", w).get<size_t>() == i,
            w + ": child back-reference");
    }
  }
  std::set<DyadicCube> leaf_cubes;
  const json& leaves = field(cert, "leaves", "leaves");
  for (const auto& l : leaves) {
    if (!l.is_number_integer() || l.get<size_t>() >= tree.size()) throw ParseError("leaves: bad id");
    size_t li = l.get<size_t>();
    check(depth[li] == nu_max + 1, "leaf " + std::to_string(li) + " at depth nu_max + 1");
    leaf_cubes.insert(cubes[li]);
  }
  size_t claimed = static_cast<size_t>(num_field(cert, "distinct_prefixes", "distinct_prefixes"));
  check(leaf_cubes.size() == leaves.size() && claimed == leaves.size(), "leaves are distinct dyadic prefixes");

  size_t n_to = static_cast<size_t>(num_field(cert, "checked_n_max", "checked_n_max"));
  check(n_to == p2.n[nu_max + 2] && n_to <= seq.size(), "checked range reaches n_{nu_max+2}");
  const json& ex = field(cert, "extracted", "extracted");
  if (!ex.is_array()) throw ParseError("extracted: expected an array");
  check(!ex.empty(), "at least one extracted point");
  for (size_t i = 0; i < ex.size(); ++i) {
    std::string w = "extracted[" + std::to_string(i) + "]";
    size_t leaf = static_cast<size_t>(num_field(ex[i], "leaf", w));
    if (!check(leaf < tree.size() && depth[leaf] == nu_max + 1, w + ": refers to a leaf")) continue;
    DyadicCube c = cube_from_json(field(ex[i], "cube", w), w + ".cube");
    check(c.dim() == seq.dim() && cubes[leaf].contains(c), w + ": cube inside its leaf");
    std::vector<Rational> lo, hi;
    box_of(c, shift, scale, lo, hi);
    auto theta = rat_array(ex[i], "theta", w);
    bool inside = theta.size() == lo.size();
    for (size_t k = 0; inside && k < theta.size(); ++k) inside = lo[k] <= theta[k] && theta[k] <= hi[k];
    check(inside, w + ": theta in its closed cube");
    verify_margins(field(ex[i], "margins", w), w + ".margins", seq, lo, hi, deltas, 1, n_to, check);
  }
}

}  // namespace

VerifyReport verify_certificate(const json& cert, const FormSequence& seq) {
  VerifyReport rep;
  Checker check(rep);
  if (!cert.is_object()) throw ParseError("certificate: expected an object");
  std::string digest = str_field(cert, "certificate_digest", "certificate");
  json body = cert;
  body.erase("certificate_digest");
  if (!check(sha256_hex(body.dump()) == digest, "certificate digest matches its body")) return rep;
  if (!check(str_field(cert, "format", "certificate") == kCertificateFormat, "format tag")) return rep;
  const json& sq = field(cert, "sequence", "sequence");
  size_t length = static_cast<size_t>(num_field(sq, "length", "sequence"));
  bool len_ok = length <= seq.size();
  check(len_ok, "sequence provides the " + std::to_string(length) + " forms the certificate uses");
  if (!len_ok) return rep;
  if (!check(str_field(sq, "digest", "sequence") == sequence_digest(seq, length), "sequence digest matches the supplied sequence"))
    return rep;
  check(static_cast<size_t>(num_field(sq, "dim", "sequence")) == seq.dim() &&
            str_field(sq, "p", "sequence") == seq.p().to_string(),
        "dimension and norm match");
  std::string mode = str_field(cert, "mode", "certificate");
  try {
    if (mode == "prop1") {
      verify_prop1(cert, seq, check);
    } else if (mode == "prop2") {
      verify_prop2(cert, seq, check);
    } else {
      throw ParseError("mode: unknown value '" + mode + "'");
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("certificate: ") + e.what());
  }
  return rep;
}

}  // namespace lacuna
