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


#ifndef LACUNA_IO_HPP_
#define LACUNA_IO_HPP_

#include <optional>
#include <string>

#include "json.hpp"
#include "lacuna/engine.hpp"
#include "lacuna/forms.hpp"
#include "lacuna/theorems.hpp"

namespace lacuna {

// Reads and parses a JSON file; ParseError names the path and position.
nlohmann::json load_json(const std::string& path);

// Family form  {"family", "d", "p", "params", "count"}  or explicit form
// {"p", "forms": [{"a": [...], "b": ...}], "dim"?}. Unknown keys are rejected.
FormSequence sequence_from_json(const nlohmann::json& spec);
// A spec given inline, or as a path string resolved against base_dir.
nlohmann::json resolve_sequence_spec(const nlohmann::json& spec, const std::string& base_dir);

struct RunConfig {
  nlohmann::json sequence;  // resolved spec document
  nlohmann::json schedule;  // {"source": ..., ...}
  std::string mode = "prop1";
  size_t n_max = 0;
  size_t nu_max = 0;
  long depth_bits = 0;
  std::uint64_t cube_budget = std::uint64_t(1) << 24;
  std::uint64_t seed = 0;
  std::optional<long> precision_bits;
  std::optional<Within> within;
  size_t extract = 1;  // prop2: leaves drawn with `seed`
  // Everything above with defaults filled in; embedded in certificates.
  nlohmann::json resolved() const;
};

RunConfig parse_run_config(const nlohmann::json& doc, const std::string& base_dir = ".");

struct ResolvedRun {
  FormSequence seq;
  Schedule schedule;
  std::optional<Prop2Schedule> p2;
  nlohmann::json params;  // calculator output, when the source is a theorem
};

ResolvedRun resolve_run(const RunConfig& cfg);

}  // namespace lacuna

#endif  // LACUNA_IO_HPP_
