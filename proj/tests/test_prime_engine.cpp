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

#include <random>

#include "doctest.h"
#include "gapsieve/errors.hpp"
#include "gapsieve/prime_engine.hpp"
#include "oracles.hpp"

using namespace gapsieve;
using namespace gapsieve::primes;

TEST_CASE("sieve_segment marks 11 13 17 19 in [10, 20)") {
  auto seg = sieve_segment(10, 20);
  std::vector<std::uint64_t> found;
  for (std::uint64_t i = 0; i < seg.size(); ++i)
    if (seg.flag(i)) found.push_back(seg.lo() + i);
  CHECK(found == std::vector<std::uint64_t>{11, 13, 17, 19});
}

TEST_CASE("sieve_segment over [0, 100) has 25 primes") {
  auto seg = sieve_segment(0, 100);
  CHECK(seg.count() == 25);
  CHECK_FALSE(seg.flag(0));
  CHECK_FALSE(seg.flag(1));
  CHECK(seg.flag(2));
}

TEST_CASE("sieve_segment near 1e8 agrees with trial division") {
  auto seg = sieve_segment(99'999'000, 100'000'000);
  for (std::uint64_t i = 0; i < seg.size(); ++i)
    REQUIRE(seg.flag(i) == oracle::trial_division_prime(seg.lo() + i));
}

TEST_CASE("sieve_segment errors") {
  CHECK_THROWS_AS(sieve_segment(5, 5), domain_error);
  CHECK_THROWS_AS(sieve_segment(9, 5), domain_error);
  CHECK_THROWS_AS(sieve_segment(0, 1000, 100), budget_exceeded);
}

TEST_CASE("sieve_segment works far above the cached base primes") {
  // Base primes above 2^24 are streamed for hi > 2^48.
  const std::uint64_t lo = (std::uint64_t{1} << 50) - 200;
  auto seg = sieve_segment(lo, lo + 200);
  for (std::uint64_t i = 0; i < seg.size(); ++i) REQUIRE(seg.flag(i) == is_prime_u64(lo + i));
}

TEST_CASE("segment independence under random partitions") {
  const std::uint64_t X = 200'000;
  auto reference = sieve_segment(0, X, X).flags();
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<bool> joined;
    std::uint64_t lo = 0;
    while (lo < X) {
      std::uint64_t len = 1 + rng() % 20'000;
      std::uint64_t hi = std::min(X, lo + len);
      auto part = sieve_segment(lo, hi).flags();
      joined.insert(joined.end(), part.begin(), part.end());
      lo = hi;
    }
    REQUIRE(joined == reference);
  }
}

TEST_CASE("prime_count matches trial division for every x up to 1e4 and sampled up to 1e6") {
  std::uint64_t running = 0;
  for (std::uint64_t x = 0; x <= 10'000; ++x) {
    if (oracle::trial_division_prime(x)) ++running;
    REQUIRE(prime_count(x) == running);
  }
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    std::uint64_t x = rng() % 1'000'001;
    std::uint64_t brute = 0;
    for (std::uint64_t n = 0; n <= x; ++n) brute += oracle::trial_division_prime(n);
    REQUIRE(prime_count(x) == brute);
    REQUIRE(prime_count_monolithic(x) == brute);
  }
}

TEST_CASE("prime_count small values and ceiling") {
  CHECK(prime_count(100) == 25);
  CHECK(prime_count(0) == 0);
  CHECK(prime_count(2) == 1);
  CHECK(prime_count_monolithic(100) == 25);
  CHECK(prime_count_monolithic(1) == 0);
  CHECK(prime_count_monolithic(2) == 1);
  SieveConfig small;
  small.ceiling = 1000;
  CHECK_THROWS_AS(prime_count(1001, small), resource_error);
}

TEST_CASE("parallel and serial counting agree") {
  SieveConfig serial;
  serial.segment_budget = 1 << 16;
  SieveConfig par = serial;
  par.threads = 4;
  CHECK(prime_count(5'000'000, serial) == prime_count(5'000'000, par));
  CHECK(prime_count(5'000'000, par) == 348'513);
}

TEST_CASE("nth_prime") {
  CHECK(nth_prime(1) == 2);
  CHECK(nth_prime(25) == 97);
  CHECK(nth_prime(1229) == 9973);
  CHECK_THROWS_AS(nth_prime(0), domain_error);
  SieveConfig small;
  small.ceiling = 1000;
  CHECK_THROWS_AS(nth_prime(200, small), resource_error);
  for (std::uint64_t i = 1; i < 3000; i += 37) CHECK(prime_count(nth_prime(i)) == i);
}

TEST_CASE("nth_prime and prime_count are mutually inverse on primes") {
  for (std::uint64_t p : primes_in(100'000, 101'000)) CHECK(nth_prime(prime_count(p)) == p);
}

TEST_CASE("primes_in") {
  CHECK(primes_in(2, 10) == std::vector<std::uint64_t>{2, 3, 5, 7});
  CHECK(primes_in(0, 2).empty());
  auto got = primes_in(4'500'000, 4'500'100);
  std::vector<std::uint64_t> want;
  for (std::uint64_t n = 4'500'000; n < 4'500'100; ++n)
    if (oracle::trial_division_prime(n)) want.push_back(n);
  CHECK(got == want);
  CHECK_THROWS_AS(primes_in(10, 2), domain_error);
  SieveConfig small;
  small.ceiling = 1000;
  CHECK_THROWS_AS(primes_in(0, 2000, small), resource_error);
}

TEST_CASE("PrimeStream crosses segment boundaries") {
  SieveConfig cfg;
  cfg.segment_budget = 64;
  PrimeStream stream(0, 10'000, cfg);
  std::uint64_t count = 0, last = 0;
  while (auto p = stream.next()) {
    REQUIRE(*p > last);
    last = *p;
    ++count;
  }
  CHECK(count == 1229);
}

TEST_CASE("is_prime_u64") {
  CHECK_FALSE(is_prime_u64(0));
  CHECK_FALSE(is_prime_u64(1));
  CHECK(is_prime_u64(2));
  CHECK(is_prime_u64((std::uint64_t{1} << 61) - 1));
  CHECK(is_prime_u64(4'500'007) == oracle::trial_division_prime(4'500'007));
  CHECK_FALSE(is_prime_u64(3215031751ULL));  // strong pseudoprime to bases 2,3,5,7
  CHECK(is_prime_u64(18446744073709551557ULL));
  CHECK_FALSE(is_prime_u64(18446744073709551615ULL));
  for (std::uint64_t n = 0; n < 200'000; ++n) REQUIRE(is_prime_u64(n) == oracle::trial_division_prime(n));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    std::uint64_t n = rng() % 1'000'000'000'000ULL;
    REQUIRE(is_prime_u64(n) == oracle::trial_division_prime(n));
  }
}

TEST_CASE("isqrt") {
  CHECK(isqrt(0) == 0);
  CHECK(isqrt(15) == 3);
  CHECK(isqrt(16) == 4);
  CHECK(isqrt(~std::uint64_t{0}) == 4294967295ULL);
}
