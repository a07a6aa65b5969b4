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

#include "gapsieve/tuple_types.hpp"

#include <algorithm>
#include <string>

#include "gapsieve/errors.hpp"

namespace gapsieve::tuples {
namespace {

std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t m) {
  __int128 t = 0, new_t = 1, r = m, new_r = a % m;
  while (new_r != 0) {
    __int128 q = r / new_r;
    t -= q * new_t;
    std::swap(t, new_t);
    r -= q * new_r;
    std::swap(r, new_r);
  }
  if (r != 1) throw domain_error("inverse_mod: not invertible");
  if (t < 0) t += m;
  return static_cast<std::uint64_t>(t);
}

}  // namespace

OffsetTuple::OffsetTuple(std::vector<std::uint64_t> offsets) : offsets_(std::move(offsets)) {
  if (offsets_.empty()) throw validation_error("offset tuple must be nonempty");
  std::sort(offsets_.begin(), offsets_.end());
  if (std::adjacent_find(offsets_.begin(), offsets_.end()) != offsets_.end())
    throw validation_error("offset tuple has repeated offsets");
  const std::uint64_t base = offsets_.front();
  for (auto& h : offsets_) h -= base;
}

OffsetTuple OffsetTuple::prefix(std::size_t n) const {
  if (n == 0 || n > offsets_.size()) throw domain_error("prefix length out of range");
  return OffsetTuple(std::vector<std::uint64_t>(offsets_.begin(), offsets_.begin() + n));
}

AdmissibleTuple AdmissibleTuple::unnormalized(OffsetTuple offsets) {
  AdmissibleTuple t;
  t.offsets_ = std::move(offsets);
  t.modulus_ = 1;
  t.a0_ = 0;
  t.normalized_ = false;
  return t;
}

AdmissibleTuple AdmissibleTuple::from_residues(OffsetTuple offsets, std::vector<Residue> residues) {
  AdmissibleTuple t;
  t.offsets_ = std::move(offsets);
  t.a0_residues_ = std::move(residues);
  t.normalized_ = true;
  for (std::size_t i = 1; i < t.a0_residues_.size(); ++i)
    if (t.a0_residues_[i - 1].prime >= t.a0_residues_[i].prime)
      throw validation_error("a0 residues must be sorted by strictly increasing prime");

  unsigned __int128 A = 1;
  bool fits = true;
  for (const auto& r : t.a0_residues_) {
    A *= r.prime;
    if (A >= (static_cast<unsigned __int128>(1) << 63)) {
      fits = false;
      break;
    }
  }
  if (!fits) return t;
  t.modulus_ = static_cast<std::uint64_t>(A);
  if (t.a0_residues_.empty()) {
    t.a0_ = 1;
    return t;
  }
  // Incremental CRT: x = r_1 mod p_1, ..., growing modulus M.
  std::uint64_t x = 0, M = 1;
  for (const auto& r : t.a0_residues_) {
    std::uint64_t cur = x % r.prime;
    std::uint64_t diff = (r.residue + r.prime - cur) % r.prime;
    std::uint64_t step = static_cast<std::uint64_t>(
        static_cast<unsigned __int128>(diff) * inverse_mod(M % r.prime, r.prime) % r.prime);
    x += step * M;
    M *= r.prime;
  }
  t.a0_ = x;
  return t;
}

std::vector<std::uint64_t> AdmissibleTuple::modulus_primes() const {
  std::vector<std::uint64_t> out;
  out.reserve(a0_residues_.size());
  for (const auto& r : a0_residues_) out.push_back(r.prime);
  return out;
}

bool AdmissibleTuple::divides_modulus(std::uint64_t p) const {
  auto it = std::lower_bound(a0_residues_.begin(), a0_residues_.end(), p,
                             [](const Residue& r, std::uint64_t v) { return r.prime < v; });
  return it != a0_residues_.end() && it->prime == p;
}

std::uint64_t AdmissibleTuple::b(std::size_t i) const {
  if (!a0_) throw resource_error("a0 is not materialized (A >= 2^63)");
  return *a0_ + offsets_[i];
}

unsigned __int128 AdmissibleTuple::form_value(std::size_t i, std::uint64_t n) const {
  if (!modulus_) throw resource_error("A is not materialized (A >= 2^63)");
  return static_cast<unsigned __int128>(*modulus_) * n + b(i);
}

}  // namespace gapsieve::tuples
