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

#ifndef LACUNA_CERTIFICATE_HPP_
#define LACUNA_CERTIFICATE_HPP_

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lacuna/dyadic.hpp"
#include "lacuna/engine.hpp"
#include "lacuna/forms.hpp"

namespace lacuna {

inline constexpr const char* kToolVersion = "lacuna 1.0.0";
inline constexpr const char* kCertificateFormat = "lacuna-certificate/1";

std::string sha256_hex(const std::string& data);
// Sorted keys, two-space indent, trailing newline.
std::string canonical_dump(const nlohmann::json& doc);

// Resolved forms L_1..L_count as canonical JSON, and its digest.
nlohmann::json sequence_json(const FormSequence& seq, size_t count);
std::string sequence_digest(const FormSequence& seq, size_t count);

nlohmann::json cube_json(const DyadicCube& cube);
DyadicCube cube_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::json interval_json(const RealInterval& v);

// Computes the exact margins min over the closed cube of ||L_n|| - delta_n for
// original indices n_from..n_to. The working cube maps to shift + scale * cube.
Extraction make_extraction(const DyadicCube& working_cube, const std::vector<Rational>& shift,
                           const Rational& scale, const FormSequence& original, size_t n_from,
                           size_t n_to, const std::function<Rational(size_t)>& delta);

// Adds "certificate_digest" over the canonical body.
void finalize_certificate(nlohmann::json& cert);

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> checks;
  std::string failure;
  nlohmann::json to_json() const;
};

// Never throws on a failed check; malformed documents raise ParseError.
VerifyReport verify_certificate(const nlohmann::json& cert, const FormSequence& seq);

}  // namespace lacuna

#endif  // LACUNA_CERTIFICATE_HPP_
