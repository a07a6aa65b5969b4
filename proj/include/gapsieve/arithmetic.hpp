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

/// @file arithmetic.hpp
/// @brief Factorization, classical multiplicative functions, root counts of
/// the tuple polynomial and the rho / theta multiplicative weights.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <vector>

#include "gapsieve/tuple_types.hpp"

namespace gapsieve::arith {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr std::uint64_t kFactorizeLimit = 1'000'000'000'000ULL;

struct PrimePower {
  std::uint64_t prime;
  unsigned exponent;
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// n = prod prime^exponent with strictly increasing primes.
struct Factorization {
  std::uint64_t n = 1;
  std::vector<PrimePower> factors;

  std::vector<std::uint64_t> primes() const;
};

/// Trial division to 10^4, then Miller-Rabin and Brent-Pollard rho on the
/// cofactor. Throws domain_error for n = 0 and validation_error above 10^12.
Factorization factorize(std::uint64_t n);

/// Factorization without the 10^12 cap, for internal callers that need the
/// full 64-bit range.
Factorization factorize_u64(std::uint64_t n);

int mobius(const Factorization& f);
std::uint64_t tau(const Factorization& f);
unsigned omega(const Factorization& f);
unsigned big_omega(const Factorization& f);
std::uint64_t euler_phi(const Factorization& f);
bool is_squarefree(const Factorization& f);

int mobius(std::uint64_t n);
std::uint64_t tau(std::uint64_t n);
unsigned omega(std::uint64_t n);
unsigned big_omega(std::uint64_t n);
std::uint64_t euler_phi(std::uint64_t n);
bool is_squarefree(std::uint64_t n);

/// floor(log2 b) for b >= 1, exact on integers.
unsigned floor_log2(std::uint64_t b);

struct AlmostPrimeClass {
  bool within_bound;  ///< tau(n) < B
  unsigned omega;
};

/// For squarefree n, tau(n) = 2^omega(n), so tau(n) < B forces
/// omega(n) <= floor(log2 B). Throws domain_error if n is not squarefree or
/// B < 2.
AlmostPrimeClass classify_almost_prime(std::uint64_t n, std::uint64_t B);

/// #{0 <= a < p : prod_i (A a + b_i) = 0 mod p}. For p | A this is p when
/// some b_i = 0 mod p and 0 otherwise; after normalization it is always 0.
std::uint64_t count_roots_mod_p(const tuples::AdmissibleTuple& t, std::uint64_t p);

/// Root count modulo a squarefree q as the product of the prime counts
/// (Chinese remainder theorem). Throws domain_error if q is not squarefree.
std::uint64_t count_roots_squarefree(const tuples::AdmissibleTuple& t, std::uint64_t q);

/// Multiplicative weights supported on squarefree d coprime to A:
///   rho(p) = k, rho2(p) = k - 1, rho3(p) = k + 1 - k^2/p   (p not dividing A).
/// Off that support the value is 0.
Rational rho(const tuples::AdmissibleTuple& t, std::uint64_t d);
Rational rho2(const tuples::AdmissibleTuple& t, std::uint64_t d);
Rational rho3(const tuples::AdmissibleTuple& t, std::uint64_t d);

/// rho3 at a single prime p not dividing A.
Rational rho3_prime(std::uint64_t k, std::uint64_t p);

/// theta3(d) = prod_{p | d} (1 - rho3(p)/p)^{-1}. Requires d squarefree and
/// coprime to A (domain_error otherwise); throws singularity_error if a
/// factor vanishes.
Rational theta3(const tuples::AdmissibleTuple& t, std::uint64_t d);

/// Nearest double to an exact rational.
double to_double(const Rational& r);

}  // namespace gapsieve::arith
