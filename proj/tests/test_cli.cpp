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


#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "lacuna/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
  json doc() const { return json::parse(out); }
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "lacuna");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = lacuna::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  fs::path p = fs::temp_directory_path() / ("lacuna_cli_" + std::to_string(::getpid()));
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

const char* kSmall = R"({
  "sequence": {"family": "lacunary", "d": 1, "params": {"base": 2}, "count": 12},
  "schedule": {"source": "theorem1", "N": 1},
  "n_max": 12
})";

}  // namespace

TEST_CASE("bound subcommand") {
  auto r = cli({"bound", "--theorem", "1", "--N", "1", "--d", "1"});
  REQUIRE(r.code == 0);
  CHECK(r.doc()["theorem"] == 1);
  CHECK(r.doc()["delta"].get<std::string>().rfind("[0.0093715010046453986998", 0) == 0);
  CHECK(cli({"bound", "--theorem", "1", "--N", "0"}).code == 64);
  CHECK(cli({"bound", "--theorem", "7"}).code == 64);
  auto k = cli({"bound", "--khintchine", "--t-from", "1", "--t-to", "8"});
  REQUIRE(k.code == 0);
  CHECK(k.doc()["rows"].size() == 8);
}

TEST_CASE("measure subcommand") {
  auto r = cli({"measure", "--a", "3", "--b", "0", "--eps", "1/8"});
  REQUIRE(r.code == 0);
  CHECK(r.doc()["relative"] == "1/4");
  CHECK(r.doc()["bound"] == "1/3");
  CHECK(r.doc()["pass"] == true);
  auto one = cli({"measure", "--a", "1", "--b", "0", "--eps", "1/4"});
  CHECK(one.doc()["relative"] == "1/2");
  CHECK(one.doc()["bound"] == "1");
  auto mc = cli({"measure", "--a", "5,7", "--b", "1/3", "--eps", "1/20", "--samples", "20000", "--seed", "3"});
  REQUIRE(mc.code == 0);
  CHECK(mc.doc()["pass"] == true);
  CHECK(mc.doc()["samples"] == 20000);
  auto bad = cli({"measure", "--a", "0", "--b", "0", "--eps", "1/8"});
  CHECK(bad.code == 64);
  CHECK(bad.err.find("a must be nonzero") != std::string::npos);
}

TEST_CASE("construct, verify and tamper round trip") {
  fs::path dir = scratch();
  spit(dir / "small.json", kSmall);
  auto c1 = cli({"construct", "--config", (dir / "small.json").string(), "--out", (dir / "a.json").string()});
  REQUIRE(c1.code == 0);
  auto c2 = cli({"construct", "--config", (dir / "small.json").string(), "--out", (dir / "b.json").string(),
                 "--threads", "3"});
  REQUIRE(c2.code == 0);
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));

  auto v = cli({"verify", "--certificate", (dir / "a.json").string(), "--config", (dir / "small.json").string()});
  CHECK(v.code == 0);

  json cert = json::parse(slurp(dir / "a.json"));
  cert["extraction"]["theta"][0] = "1/3";
  spit(dir / "t.json", cert.dump());
  CHECK(cli({"verify", "--certificate", (dir / "t.json").string(), "--config", (dir / "small.json").string()}).code ==
        5);

  auto a = cli({"analyze", "--config", (dir / "small.json").string()});
  REQUIRE(a.code == 0);
  CHECK(a.doc()["failures"] == 0);
  fs::remove_all(dir);
}

TEST_CASE("infeasible schedule exits 3 and names the condition") {
  fs::path dir = scratch();
  spit(dir / "bad.json", R"({
  "sequence": {"family": "lacunary", "d": 1, "params": {"base": 2}, "count": 6},
  "schedule": {"source": "explicit", "lambda": "0", "delta": "2/5", "x": "1/2"},
  "n_max": 6
})");
  auto r = cli({"construct", "--config", (dir / "bad.json").string(), "--out", (dir / "c.json").string()});
  CHECK(r.code == 3);
  CHECK(r.doc()["condition"] == "prop1.cond2");
  CHECK_FALSE(fs::exists(dir / "c.json"));
  CHECK(cli({"construct"}).code == 64);
  fs::remove_all(dir);
}
