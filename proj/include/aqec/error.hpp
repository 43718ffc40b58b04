// Copyright 2026 The aqec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace aqec {

// Process exit codes used by the command-line front end.
enum class ExitCode : int {
  kSuccess = 0,
  kConfigError = 2,
  kBudgetError = 3,
  kBoundViolation = 4,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape, modulus or index mismatch between operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// An exhaustive enumeration or dense construction would exceed its budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

// A code tableau or channel failed its structural checks.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Input that makes a quantity undefined (zero partition function, empty trace).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace aqec
