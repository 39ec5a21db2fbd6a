// Copyright 2026 The evuniv Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace evuniv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed gate-set text or JSON.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Input parses but violates a model invariant (non-unitary gate,
/// dimension mismatch, duplicate qudit targets, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A requested computation exceeds the configured size limits.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// An iterative solve could not certify its answer. Never swallowed into a
/// silently wrong count.
class Inconclusive : public Error {
 public:
  using Error::Error;
};

/// Parameters outside the regime an operation supports (e.g. non-prime d
/// for the Clifford test).
class Unsupported : public Error {
 public:
  using Error::Error;
};

}  // namespace evuniv
