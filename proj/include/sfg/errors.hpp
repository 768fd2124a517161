// Copyright 2026 The sfg Authors.
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

namespace sfg {

// Bad argument values: out-of-range vertices, nonpositive weights, etc.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Inconsistent experiment or algorithm configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The request exceeds what an exact solver is allowed to handle.
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Quantity is mathematically undefined for the given input.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Operation called in the wrong state (e.g. before enough rounds).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Learner and environment disagree about what was observable.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace sfg
