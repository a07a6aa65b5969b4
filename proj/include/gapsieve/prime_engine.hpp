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

/// @file prime_engine.hpp
/// @brief Segmented odd-only sieve of Eratosthenes, prime counting and a
/// deterministic 64-bit primality test.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace gapsieve::primes {

inline constexpr std::uint64_t kDefaultSegmentBudget = std::uint64_t{1} << 22;
inline constexpr std::uint64_t kDefaultCeiling = 200'000'000;

struct SieveConfig {
  /// Largest integer any counting/streaming operation may need to sieve.
  std::uint64_t ceiling = kDefaultCeiling;
  /// Maximum number of integers per segment.
  std::uint64_t segment_budget = kDefaultSegmentBudget;
  unsigned threads = 1;
};

/// Exact primality flags for the half-open range [lo, hi).
///
/// Storage is odd-only: one byte per odd integer in the range; 2 is handled
/// separately. The public view is position based, flag(i) <=> lo+i is prime.
class PrimeSegment {
 public:
  PrimeSegment() = default;

  std::uint64_t lo() const { return lo_; }
  std::uint64_t hi() const { return hi_; }
  std::uint64_t size() const { return hi_ - lo_; }

  /// True iff lo()+i is prime. Requires i < size().
  bool flag(std::uint64_t i) const;
  bool contains_prime(std::uint64_t n) const { return n >= lo_ && n < hi_ && flag(n - lo_); }
  std::uint64_t count() const;

  /// Expands the odd-only storage into one bool per integer of the range.
  std::vector<bool> flags() const;

  /// Calls fn(p) for every prime in the segment in increasing order.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    if (has_two_) fn(std::uint64_t{2});
    for (std::size_t j = 0; j < odd_.size(); ++j)
      if (odd_[j]) fn(first_odd_ + 2 * j);
  }

 private:
  friend PrimeSegment sieve_segment(std::uint64_t, std::uint64_t, std::uint64_t);
  std::uint64_t lo_ = 0;
  std::uint64_t hi_ = 0;
  std::uint64_t first_odd_ = 1;
  bool has_two_ = false;
  std::vector<std::uint8_t> odd_;
};

/// Sieves [lo, hi). Throws domain_error when lo >= hi and budget_exceeded
/// when hi - lo exceeds `budget`.
PrimeSegment sieve_segment(std::uint64_t lo, std::uint64_t hi,
                           std::uint64_t budget = kDefaultSegmentBudget);

/// pi(x): number of primes <= x via the segmented sieve. Throws
/// resource_error when x exceeds config.ceiling.
std::uint64_t prime_count(std::uint64_t x, const SieveConfig& config = {});

/// pi(x) via a single odd-only bit sieve of [0, x]. Structurally independent
/// of the segmented path; used to cross-check it.
std::uint64_t prime_count_monolithic(std::uint64_t x);

/// p_i with p_1 = 2. Throws resource_error when p_i > config.ceiling.
std::uint64_t nth_prime(std::uint64_t i, const SieveConfig& config = {});

/// Streams the primes in [lo, hi), one segment in memory at a time.
class PrimeStream {
 public:
  PrimeStream(std::uint64_t lo, std::uint64_t hi, const SieveConfig& config = {});
  std::optional<std::uint64_t> next();

 private:
  void refill();
  std::uint64_t cursor_;
  std::uint64_t hi_;
  std::uint64_t budget_;
  std::vector<std::uint64_t> buffer_;
  std::size_t pos_ = 0;
};

/// Calls fn(p) for every prime p in [lo, hi) in increasing order.
void for_each_prime(std::uint64_t lo, std::uint64_t hi,
                    const std::function<void(std::uint64_t)>& fn,
                    const SieveConfig& config = {});

/// Collects primes_in(lo, hi) into a vector.
std::vector<std::uint64_t> primes_in(std::uint64_t lo, std::uint64_t hi,
                                     const SieveConfig& config = {});

/// Deterministic Miller-Rabin with a base set proven for all n < 2^64.
bool is_prime_u64(std::uint64_t n);

/// floor(sqrt(n)) computed exactly.
std::uint64_t isqrt(std::uint64_t n);

/// Multiplication and powering modulo m without overflow.
std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);

}  // namespace gapsieve::primes
