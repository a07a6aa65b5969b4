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

#include "gapsieve/prime_engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <numeric>
#include <string>

#include "gapsieve/errors.hpp"
#include "gapsieve/parallel.hpp"

namespace gapsieve::primes {
namespace {

// Base primes up to this bound are computed once and cached. That covers
// segments with hi < 2^48; beyond that base primes are streamed in chunks.
constexpr std::uint64_t kCachedBaseLimit = std::uint64_t{1} << 24;
constexpr std::uint64_t kBaseChunk = std::uint64_t{1} << 22;

std::vector<std::uint32_t> simple_odd_sieve(std::uint32_t limit) {
  std::vector<std::uint32_t> out;
  if (limit < 2) return out;
  out.push_back(2);
  std::vector<std::uint8_t> composite(limit / 2 + 1, 0);
  for (std::uint64_t i = 3; i * i <= limit; i += 2)
    if (!composite[i / 2])
      for (std::uint64_t j = i * i; j <= limit; j += 2 * i) composite[j / 2] = 1;
  for (std::uint64_t i = 3; i <= limit; i += 2)
    if (!composite[i / 2]) out.push_back(static_cast<std::uint32_t>(i));
  return out;
}

const std::vector<std::uint32_t>& cached_base_primes() {
  static const std::vector<std::uint32_t> primes =
      simple_odd_sieve(static_cast<std::uint32_t>(kCachedBaseLimit));
  return primes;
}

// Marks multiples of the odd prime q inside the odd-only array.
inline void cross_off(std::vector<std::uint8_t>& odd, std::uint64_t first_odd,
                      std::uint64_t hi, std::uint64_t q) {
  std::uint64_t start = q * q;
  if (start < first_odd) {
    std::uint64_t m = (first_odd + q - 1) / q;
    start = m * q;
  }
  if ((start & 1) == 0) start += q;
  if (start >= hi) return;
  for (std::uint64_t j = (start - first_odd) / 2; j < odd.size(); j += q) odd[j] = 0;
}

// Calls fn(q) for every odd prime q <= limit.
template <typename Fn>
void for_each_odd_base_prime(std::uint64_t limit, Fn&& fn) {
  const auto& cached = cached_base_primes();
  for (std::size_t i = 1; i < cached.size() && cached[i] <= limit; ++i) fn(std::uint64_t{cached[i]});
  if (limit <= kCachedBaseLimit) return;
  std::vector<std::uint8_t> chunk;
  for (std::uint64_t c = kCachedBaseLimit + 1; c <= limit; c += 2 * kBaseChunk) {
    std::uint64_t c_hi = std::min(limit + 1, c + 2 * kBaseChunk);
    chunk.assign((c_hi - c + 1) / 2, 1);
    std::uint64_t r = isqrt(c_hi - 1);
    for (std::size_t i = 1; i < cached.size() && cached[i] <= r; ++i)
      cross_off(chunk, c, c_hi, cached[i]);
    for (std::size_t j = 0; j < chunk.size(); ++j)
      if (chunk[j]) fn(c + 2 * j);
  }
}

void check_ceiling(std::uint64_t x, const SieveConfig& config, const char* what) {
  if (x > config.ceiling)
    throw resource_error(std::string(what) + ": " + std::to_string(x) +
                         " exceeds the sieve ceiling " + std::to_string(config.ceiling));
}

}  // namespace

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && (r > n / r)) --r;
  while ((r + 1) <= n / (r + 1)) ++r;
  return r;
}

bool PrimeSegment::flag(std::uint64_t i) const {
  std::uint64_t n = lo_ + i;
  if (n == 2) return has_two_;
  if ((n & 1) == 0) return false;
  return odd_[(n - first_odd_) / 2] != 0;
}

std::uint64_t PrimeSegment::count() const {
  return static_cast<std::uint64_t>(has_two_) +
         static_cast<std::uint64_t>(std::count(odd_.begin(), odd_.end(), std::uint8_t{1}));
}

std::vector<bool> PrimeSegment::flags() const {
  std::vector<bool> out(size(), false);
  for_each([&](std::uint64_t p) { out[p - lo_] = true; });
  return out;
}

PrimeSegment sieve_segment(std::uint64_t lo, std::uint64_t hi, std::uint64_t budget) {
  if (lo >= hi)
    throw domain_error("sieve_segment: empty or reversed range [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + ")");
  if (hi - lo > budget)
    throw budget_exceeded("sieve_segment: length " + std::to_string(hi - lo) +
                          " exceeds the segment budget " + std::to_string(budget));
  if (hi > (std::uint64_t{1} << 63)) throw domain_error("sieve_segment: hi exceeds 2^63");

  PrimeSegment seg;
  seg.lo_ = lo;
  seg.hi_ = hi;
  seg.has_two_ = lo <= 2 && 2 < hi;
  seg.first_odd_ = lo | 1;
  std::uint64_t n_odd = seg.first_odd_ < hi ? (hi - seg.first_odd_ + 1) / 2 : 0;
  seg.odd_.assign(n_odd, 1);
  if (n_odd > 0 && seg.first_odd_ == 1) seg.odd_[0] = 0;
  std::uint64_t r = isqrt(hi - 1);
  for_each_odd_base_prime(r, [&](std::uint64_t q) { cross_off(seg.odd_, seg.first_odd_, hi, q); });
  return seg;
}

std::uint64_t prime_count(std::uint64_t x, const SieveConfig& config) {
  check_ceiling(x, config, "prime_count");
  const std::uint64_t end = x + 1;
  const std::uint64_t budget = config.segment_budget;
  const std::size_t n_blocks = static_cast<std::size_t>((end + budget - 1) / budget);
  std::vector<std::uint64_t> counts(n_blocks, 0);
  parallel_blocks(n_blocks, config.threads, [&](std::size_t b) {
    std::uint64_t lo = b * budget;
    counts[b] = sieve_segment(lo, std::min(end, lo + budget), budget).count();
  });
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::uint64_t prime_count_monolithic(std::uint64_t x) {
  if (x < 2) return 0;
  // bit j <=> 2j+1 is composite (j = 0 marks 1).
  const std::uint64_t n_odd = (x - 1) / 2 + 1;
  std::vector<std::uint64_t> bits((n_odd + 63) / 64, 0);
  auto set = [&](std::uint64_t j) { bits[j >> 6] |= std::uint64_t{1} << (j & 63); };
  auto test = [&](std::uint64_t j) { return (bits[j >> 6] >> (j & 63)) & 1; };
  set(0);
  for (std::uint64_t i = 1; (2 * i + 1) * (2 * i + 1) <= x; ++i) {
    if (test(i)) continue;
    const std::uint64_t p = 2 * i + 1;
    for (std::uint64_t j = (p * p) / 2; j < n_odd; j += p) set(j);
  }
  std::uint64_t composite = 0;
  for (std::uint64_t w = 0; w < bits.size(); ++w) {
    std::uint64_t word = bits[w];
    if (w == bits.size() - 1 && (n_odd & 63) != 0) word &= (std::uint64_t{1} << (n_odd & 63)) - 1;
    composite += static_cast<std::uint64_t>(std::popcount(word));
  }
  return 1 + (n_odd - composite);
}

std::uint64_t nth_prime(std::uint64_t i, const SieveConfig& config) {
  if (i == 0) throw domain_error("nth_prime: index must be >= 1");
  const std::uint64_t budget = config.segment_budget;
  const std::uint64_t end = config.ceiling + 1;
  std::uint64_t seen = 0;
  for (std::uint64_t lo = 0; lo < end; lo += budget) {
    PrimeSegment seg = sieve_segment(lo, std::min(end, lo + budget), budget);
    std::uint64_t c = seg.count();
    if (seen + c >= i) {
      std::uint64_t result = 0;
      seg.for_each([&](std::uint64_t p) {
        if (++seen == i) result = p;
      });
      return result;
    }
    seen += c;
  }
  throw resource_error("nth_prime: p_" + std::to_string(i) + " exceeds the sieve ceiling " +
                       std::to_string(config.ceiling));
}

PrimeStream::PrimeStream(std::uint64_t lo, std::uint64_t hi, const SieveConfig& config)
    : cursor_(lo), hi_(hi), budget_(config.segment_budget) {
  if (lo > hi)
    throw domain_error("primes_in: reversed range [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + ")");
  if (hi > 0) check_ceiling(hi - 1, config, "primes_in");
}

void PrimeStream::refill() {
  buffer_.clear();
  pos_ = 0;
  while (buffer_.empty() && cursor_ < hi_) {
    std::uint64_t seg_hi = std::min(hi_, cursor_ + budget_);
    sieve_segment(cursor_, seg_hi, budget_).for_each([&](std::uint64_t p) { buffer_.push_back(p); });
    cursor_ = seg_hi;
  }
}

std::optional<std::uint64_t> PrimeStream::next() {
  if (pos_ >= buffer_.size()) refill();
  if (pos_ >= buffer_.size()) return std::nullopt;
  return buffer_[pos_++];
}

void for_each_prime(std::uint64_t lo, std::uint64_t hi,
                    const std::function<void(std::uint64_t)>& fn, const SieveConfig& config) {
  PrimeStream stream(lo, hi, config);
  while (auto p = stream.next()) fn(*p);
}

std::vector<std::uint64_t> primes_in(std::uint64_t lo, std::uint64_t hi,
                                     const SieveConfig& config) {
  std::vector<std::uint64_t> out;
  for_each_prime(lo, hi, [&](std::uint64_t p) { out.push_back(p); }, config);
  return out;
}

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  if (n < 41 * 41) return true;
  std::uint64_t d = n - 1;
  int s = std::countr_zero(d);
  d >>= s;
  // {2, 7, 61} is deterministic below 4759123141; Jim Sinclair's seven
  // bases cover every n < 2^64.
  static constexpr std::uint64_t small_bases[] = {2, 7, 61};
  static constexpr std::uint64_t full_bases[] = {2, 325, 9375, 28178, 450775, 9780504, 1795265022};
  std::span<const std::uint64_t> bases = n < 4'759'123'141ULL ? std::span<const std::uint64_t>(small_bases)
                                                               : std::span<const std::uint64_t>(full_bases);
  for (std::uint64_t a : bases) {
    std::uint64_t x = pow_mod(a % n, d, n);
    if (a % n == 0 || x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

}  // namespace gapsieve::primes
