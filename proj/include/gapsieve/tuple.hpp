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

/// @file tuple.hpp
/// @brief Admissibility checks, the consecutive-prime tuple construction,
/// Normalization to linear forms and the singular series.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "gapsieve/log_number.hpp"
#include "gapsieve/prime_engine.hpp"
#include "gapsieve/tuple_types.hpp"

namespace gapsieve::tuples {

/// Largest k accepted by a full admissibility check (cost ~ k * pi(k)).
inline constexpr std::size_t kFullCheckCap = 100'000;
/// Primes above 1000 added to the sampled check, evenly spaced by index.
inline constexpr std::size_t kSampledExtraPrimes = 64;

enum class CheckMode { full, sampled };

std::string to_string(CheckMode mode);
CheckMode parse_check_mode(const std::string& text);

struct AdmissibilityResult {
  /// In sampled mode true only means "no covering prime found".
  bool admissible = true;
  /// Least prime whose residue classes are all covered.
  std::optional<std::uint64_t> witness;
  CheckMode mode = CheckMode::full;
  std::size_t primes_checked = 0;
};

/// Full mode scans every prime p <= k (k <= kFullCheckCap, budget_exceeded
/// otherwise). Sampled mode scans all p <= min(k, 1000) plus
/// kSampledExtraPrimes primes in (1000, k] taken at evenly spaced indices,
/// always including the largest prime <= k.
AdmissibilityResult check_admissible(const OffsetTuple& t, CheckMode mode = CheckMode::full,
                                     unsigned threads = 1);

/// True when every h_i + shift is prime and exceeds k. Then for each p <= k
/// the class -shift mod p is missed, a certificate of admissibility.
bool check_admissible_shifted_primes(const OffsetTuple& t, std::uint64_t shift);

struct ConsecutivePrimeTuple {
  OffsetTuple tuple;
  std::uint64_t shift = 0;  ///< p_{m+1}
};

/// h_i = p_{m+i} - p_{m+1} for i = 1..k where p_m is the largest prime
/// below x0. Throws resource_error if p_{m+k} exceeds the sieve ceiling.
ConsecutivePrimeTuple construct_consecutive_prime_tuple(std::uint64_t k, std::uint64_t x0,
                                                        const primes::SieveConfig& config = {});

/// Upper limit on pi(width) * k for normalize.
inline constexpr double kNormalizeWorkCap = 2e10;

/// A = product of primes at which the offsets collide; a0 mod each such p is
/// the least residue with p not dividing any a0 + h_i. Throws
/// inadmissible_error (with witness) for inadmissible input.
AdmissibleTuple normalize(const OffsetTuple& t);

struct SingularSeries {
  LogNumber<long double> log_value;
  /// Rigorous bound on |log(true value) - log_value| from primes > cutoff.
  double tail_bound = 0;
  std::uint64_t cutoff = 0;
  std::size_t primes_used = 0;
};

/// prod_{p | A} (1-1/p)^{-k} prod_{p not | A, p <= cutoff} (1-k/p)(1-1/p)^{-k}.
/// For p > cutoff each log factor is bounded by k^2 / (2 p^2 (1 - k/p)) and
/// the tail uses sum_{odd n > P} 1/n^2 <= 1/(2(P-1)). Requires cutoff >= k;
/// throws singularity_error if some factor is nonpositive.
SingularSeries singular_series(const AdmissibleTuple& t, std::uint64_t cutoff,
                               const primes::SieveConfig& config = {});

struct TupleFile {
  OffsetTuple tuple;
  std::optional<std::uint64_t> shift;
};

/// Reads {"k":..., "offsets":[...], "shift":...} or plain text with one
/// offset per line ('#' starts a comment).
TupleFile read_tuple_file(const std::filesystem::path& path);
TupleFile parse_tuple_text(const std::string& text);
void write_tuple_json(const std::filesystem::path& path, const TupleFile& file);
std::string tuple_json(const TupleFile& file);

}  // namespace gapsieve::tuples
