// Copyright 2026 The Wardrobe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef WARDROBE_ERROR_H_
#define WARDROBE_ERROR_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wardrobe {

// Base class of every error the library raises. `module()` names the
// component that detected the problem so the CLI can surface it.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& message)
      : std::runtime_error(message), module_(std::move(module)) {}

  const std::string& module() const { return module_; }

 private:
  std::string module_;
};

// Malformed input: bad files, unknown attributes, violated preconditions.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Bad command-line usage.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& message) : Error("cli", message) {}
};

// An exhaustive enumeration would exceed its configured budget.
class BudgetExceededError : public Error {
 public:
  BudgetExceededError(const std::string& module, double required,
                      double budget)
      : Error(module, "enumeration budget exceeded: " +
                          std::to_string(static_cast<long double>(required)) +
                          " capsules required, budget is " +
                          std::to_string(static_cast<long double>(budget))),
        required_(required),
        budget_(budget) {}

  double required() const { return required_; }
  double budget() const { return budget_; }

 private:
  double required_;
  double budget_;
};

}  // namespace wardrobe

#endif  // WARDROBE_ERROR_H_
