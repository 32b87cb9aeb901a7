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


#include "doctest.h"
#include "lacuna/theorems.hpp"

using namespace lacuna;

// mpmath, 50 digits: ratio(1) and ratio(1024) of delta(t, 1) t ln(t + 1).
// The ratio is increasing on [1, 1024]; its spread there is 6.2741328246146130055.
TEST_CASE("khintchine comparison values") {
  auto rows = khintchine_gamma_comparison(1, 1024);
  REQUIRE(rows.size() == 1024);
  CHECK(rows.front().ratio.contains(rows.front().ratio.lo_rational()));
  CHECK(std::abs(rows.front().ratio.mid_double() - 0.0064958294989846530) < 1e-15);
  CHECK(std::abs(rows.back().ratio.mid_double() - 0.0407556970826795075) < 1e-15);
  for (size_t i = 1; i < rows.size(); ++i) CHECK(certainly_lt(rows[i].delta, rows[i - 1].delta));
}

TEST_CASE("khintchine ratio varies by less than a factor 4 over [1, 2^10]") {
  auto rows = khintchine_gamma_comparison(1, 1024);
  double lo = rows.front().ratio.mid_double(), hi = lo;
  for (const auto& r : rows) {
    lo = std::min(lo, r.ratio.mid_double());
    hi = std::max(hi, r.ratio.mid_double());
  }
  CHECK(std::abs(hi / lo - 6.2741328246146130055) < 1e-9);
  CHECK(hi / lo < 4);
}
