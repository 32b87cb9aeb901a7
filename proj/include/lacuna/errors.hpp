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

#ifndef LACUNA_ERRORS_HPP_
#define LACUNA_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace lacuna {

// Process exit codes. These are a stable contract of the command-line tool.
enum class ExitCode : int {
  kOk = 0,
  kPrecision = 2,
  kConditionViolated = 3,
  kBudgetExceeded = 4,
  kVerificationFailed = 5,
  kUsage = 64,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

// Invalid argument or mathematical domain (log of non-positive, r <= 0, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ExitCode::kUsage, what) {}
};

class PrecisionExhausted : public Error {
 public:
  explicit PrecisionExhausted(const std::string& what)
      : Error(ExitCode::kPrecision, what) {}
};

class ConditionViolated : public Error {
 public:
  ConditionViolated(std::string condition, long index, const std::string& what)
      : Error(ExitCode::kConditionViolated, what),
        condition_(std::move(condition)),
        index_(index) {}
  const std::string& condition() const { return condition_; }
  long index() const { return index_; }

 private:
  std::string condition_;
  long index_;
};

// Raised when B_n becomes empty; always names the assertion that failed first.
class SurvivorsEmpty : public ConditionViolated {
 public:
  SurvivorsEmpty(std::string condition, long index, const std::string& what)
      : ConditionViolated(std::move(condition), index, what) {}
};

class BranchingAbsent : public ConditionViolated {
 public:
  BranchingAbsent(long index, const std::string& what)
      : ConditionViolated("branching", index, what) {}
};

class BudgetExceeded : public Error {
 public:
  explicit BudgetExceeded(const std::string& what)
      : Error(ExitCode::kBudgetExceeded, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ExitCode::kUsage, what) {}
};

}  // namespace lacuna

#endif  // LACUNA_ERRORS_HPP_
