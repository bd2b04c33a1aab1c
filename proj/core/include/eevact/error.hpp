// Copyright 2026 The eevact Authors
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

#ifndef EEVACT_ERROR_HPP_
#define EEVACT_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace eevact {

// Base of every exception thrown by the library. The CLI maps subclasses to
// process exit codes (see tools/cli.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad caller input: shape mismatch, out-of-range index, unknown enum name.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// File does not start with the expected magic or has an unknown version.
class FormatError : public Error {
 public:
  using Error::Error;
};

// File structure is recognised but its contents are truncated or damaged.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

// Data parsed correctly but violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Operation called in the wrong lifecycle state (e.g. backward twice).
class StateError : public Error {
 public:
  using Error::Error;
};

// Non-finite loss or gradient during training.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace eevact

#endif  // EEVACT_ERROR_HPP_
