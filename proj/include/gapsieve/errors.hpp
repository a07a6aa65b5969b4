// Copyright 2026 The gapsieve Authors
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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace gapsieve {

/// Base class for every error raised by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments outside the mathematical domain of an operation (reversed
/// ranges, lo >= hi, non-squarefree input where squarefree is required).
class domain_error : public error {
 public:
  using error::error;
};

/// A segment or subset enumeration exceeded its configured budget.
class budget_exceeded : public error {
 public:
  using error::error;
};

/// A computation would need more than the configured resources, e.g. a
/// prime above the sieve ceiling.
class resource_error : public error {
 public:
  using error::error;
};

/// A product or quotient hit a zero or nonpositive factor.
class singularity_error : public error {
 public:
  using error::error;
};

/// Toy-scale caps of the exact laboratory were exceeded.
class scale_error : public error {
 public:
  using error::error;
};

/// Input failed validation (configs, files, CLI arguments).
class validation_error : public error {
 public:
  using error::error;
};

/// No candidate in the optimizer budget was feasible.
class infeasible_error : public error {
 public:
  using error::error;
};

/// An offset tuple covers every residue class of some prime.
class inadmissible_error : public error {
 public:
  inadmissible_error(const std::string& what, std::uint64_t witness)
      : error(what), witness_(witness) {}
  std::uint64_t witness() const noexcept { return witness_; }

 private:
  std::uint64_t witness_;
};

}  // namespace gapsieve
