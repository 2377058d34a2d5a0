// Copyright 2026 The lgcert Authors.
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

namespace lgcert {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter violates a documented precondition (k > n, q < 2|C|, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// The request is well formed but would exceed an enumeration cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Shapes or index spaces of two objects do not match.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// A stored object violates one of its invariants.
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Two independently computed quantities contradict each other
// (e.g. a dual value above a primal value).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace lgcert
