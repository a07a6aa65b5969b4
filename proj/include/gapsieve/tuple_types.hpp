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

/// @file tuple_types.hpp
/// @brief Offset tuples and their normalized linear forms.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace gapsieve::tuples {

/// Strictly increasing offsets h_1 < ... < h_k with h_1 = 0.
class OffsetTuple {
 public:
  OffsetTuple() = default;

  /// Sorts, rejects duplicates and translates so that the least offset is 0.
  /// Throws validation_error on an empty list or repeated offsets.
  explicit OffsetTuple(std::vector<std::uint64_t> offsets);

  std::size_t size() const { return offsets_.size(); }
  std::uint64_t width() const { return offsets_.empty() ? 0 : offsets_.back(); }
  std::uint64_t operator[](std::size_t i) const { return offsets_[i]; }
  std::span<const std::uint64_t> offsets() const { return offsets_; }

  /// The first n offsets (already canonical since h_1 = 0).
  OffsetTuple prefix(std::size_t n) const;

  friend bool operator==(const OffsetTuple&, const OffsetTuple&) = default;

 private:
  std::vector<std::uint64_t> offsets_;
};

/// Linear forms L_i(n) = A n + b_i with b_i = a0 + h_i.
///
/// A is kept in factored form (the list of primes at which the offsets
/// collide) together with a0 mod p for each of those primes. The integers
/// A and a0 are materialized only when A < 2^63.
class AdmissibleTuple {
 public:
  struct Residue {
    std::uint64_t prime;
    std::uint64_t residue;
    friend bool operator==(const Residue&, const Residue&) = default;
  };

  AdmissibleTuple() = default;

  /// The plain forms n + h_i: A = 1, a0 = 0. Not normalized.
  static AdmissibleTuple unnormalized(OffsetTuple offsets);

  /// Assembles a normalized tuple. `a0_residues` must be sorted by prime.
  /// When A = 1 (no residues) a0 is taken as 1 so that every b_i >= 1.
  static AdmissibleTuple from_residues(OffsetTuple offsets, std::vector<Residue> a0_residues);

  const OffsetTuple& offsets() const { return offsets_; }
  std::size_t k() const { return offsets_.size(); }
  bool is_normalized() const { return normalized_; }

  std::span<const Residue> a0_residues() const { return a0_residues_; }
  std::vector<std::uint64_t> modulus_primes() const;
  bool divides_modulus(std::uint64_t p) const;

  /// A and a0 as integers when A < 2^63.
  std::optional<std::uint64_t> modulus() const { return modulus_; }
  std::optional<std::uint64_t> a0() const { return a0_; }

  /// b_i = a0 + h_i (requires materialized a0).
  std::uint64_t b(std::size_t i) const;

  /// L_i(n) = A n + b_i as an exact 128-bit value.
  unsigned __int128 form_value(std::size_t i, std::uint64_t n) const;

  friend bool operator==(const AdmissibleTuple&, const AdmissibleTuple&) = default;

 private:
  OffsetTuple offsets_;
  std::vector<Residue> a0_residues_;
  std::optional<std::uint64_t> modulus_;
  std::optional<std::uint64_t> a0_;
  bool normalized_ = false;
};

}  // namespace gapsieve::tuples
