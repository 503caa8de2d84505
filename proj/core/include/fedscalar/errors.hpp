// Copyright 2026 The FedScalar Authors. All Rights Reserved.
//
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
// =============================================================================

#pragma once

#include <stdexcept>
#include <string>

namespace fedscalar {

// Base for every error raised by the library. The CLI maps subclasses onto
// process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand lengths or shapes disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A numeric invariant (finiteness, positivity) was violated.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Invalid argument to a sampling, model or estimator routine.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Experiment configuration could not be parsed or failed validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Dataset file missing or malformed.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace fedscalar
