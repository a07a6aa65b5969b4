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

#include "gapsieve/arithmetic.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <string>

#include "gapsieve/errors.hpp"
#include "gapsieve/prime_engine.hpp"

namespace gapsieve::arith {
namespace {

using primes::is_prime_u64;
using primes::mul_mod;

constexpr std::uint64_t kTrialLimit = 10'000;

const std::vector<std::uint32_t>& trial_primes() {
  static const std::vector<std::uint32_t> table = [] {
    std::vector<std::uint32_t> out;
    std::vector<bool> composite(kTrialLimit + 1, false);
    for (std::uint32_t i = 2; i <= kTrialLimit; ++i) {
      if (composite[i]) continue;
      out.push_back(i);
      for (std::uint64_t j = std::uint64_t{i} * i; j <= kTrialLimit; j += i) composite[j] = true;
    }
    return out;
  }();
  return table;
}

// Brent's variant of Pollard rho; n must be odd and composite.
std::uint64_t pollard_brent(std::uint64_t n) {
  for (std::uint64_t c = 1;; ++c) {
    std::uint64_t y = 2, x = 2, g = 1, q = 1, ys = 2;
    const std::uint64_t m = 128;
    std::uint64_t r = 1;
    auto f = [&](std::uint64_t v) { return (mul_mod(v, v, n) + c) % n; };
    do {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) y = f(y);
      std::uint64_t k = 0;
      do {
        ys = y;
        for (std::uint64_t i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = mul_mod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
        k += m;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void split(std::uint64_t n, std::vector<std::uint64_t>& out) {
  if (n == 1) return;
  if (is_prime_u64(n)) {
    out.push_back(n);
    return;
  }
  std::uint64_t r = primes::isqrt(n);
  if (r * r == n) {
    split(r, out);
    split(r, out);
    return;
  }
  std::uint64_t d = pollard_brent(n);
  split(d, out);
  split(n / d, out);
}

Factorization factor_impl(std::uint64_t n) {
  if (n == 0) throw domain_error("factorize: n must be positive");
  Factorization f;
  f.n = n;
  std::uint64_t m = n;
  for (std::uint32_t p : trial_primes()) {
    if (std::uint64_t{p} * p > m) break;
    if (m % p) continue;
    unsigned e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    f.factors.push_back({p, e});
  }
  if (m > 1) {
    std::vector<std::uint64_t> rest;
    split(m, rest);
    std::sort(rest.begin(), rest.end());
    for (std::uint64_t p : rest) {
      if (!f.factors.empty() && f.factors.back().prime == p)
        ++f.factors.back().exponent;
      else
        f.factors.push_back({p, 1});
    }
  }
  return f;
}

// Distinct residues of the offsets modulo p.
std::uint64_t distinct_offset_residues(const tuples::OffsetTuple& t, std::uint64_t p) {
  if (p <= (std::uint64_t{1} << 22)) {
    std::vector<std::uint8_t> seen(p, 0);
    std::uint64_t count = 0;
    for (std::uint64_t h : t.offsets()) {
      auto& s = seen[h % p];
      if (!s) {
        s = 1;
        ++count;
      }
    }
    return count;
  }
  std::vector<std::uint64_t> r;
  r.reserve(t.size());
  for (std::uint64_t h : t.offsets()) r.push_back(h % p);
  std::sort(r.begin(), r.end());
  return static_cast<std::uint64_t>(std::unique(r.begin(), r.end()) - r.begin());
}

// Prime factors of d when d is squarefree and coprime to A; empty optional
// otherwise (the support convention maps such d to 0).
std::optional<std::vector<std::uint64_t>> support_primes(const tuples::AdmissibleTuple& t,
                                                         std::uint64_t d) {
  if (d == 0) return std::nullopt;
  Factorization f = factorize_u64(d);
  if (!is_squarefree(f)) return std::nullopt;
  auto ps = f.primes();
  for (std::uint64_t p : ps)
    if (t.divides_modulus(p)) return std::nullopt;
  return ps;
}

template <typename PrimeValue>
Rational multiplicative(const tuples::AdmissibleTuple& t, std::uint64_t d, PrimeValue&& at_prime) {
  auto ps = support_primes(t, d);
  if (!ps) return Rational(0);
  Rational out(1);
  for (std::uint64_t p : *ps) out *= at_prime(p);
  return out;
}

}  // namespace

std::vector<std::uint64_t> Factorization::primes() const {
  std::vector<std::uint64_t> out;
  out.reserve(factors.size());
  for (const auto& pp : factors) out.push_back(pp.prime);
  return out;
}

Factorization factorize(std::uint64_t n) {
  if (n > kFactorizeLimit)
    throw validation_error("factorize: " + std::to_string(n) + " exceeds the 10^12 range cap");
  return factor_impl(n);
}

Factorization factorize_u64(std::uint64_t n) { return factor_impl(n); }

int mobius(const Factorization& f) {
  for (const auto& pp : f.factors)
    if (pp.exponent > 1) return 0;
  return (f.factors.size() % 2) ? -1 : 1;
}

std::uint64_t tau(const Factorization& f) {
  std::uint64_t out = 1;
  for (const auto& pp : f.factors) out *= pp.exponent + 1;
  return out;
}

unsigned omega(const Factorization& f) { return static_cast<unsigned>(f.factors.size()); }

unsigned big_omega(const Factorization& f) {
  unsigned out = 0;
  for (const auto& pp : f.factors) out += pp.exponent;
  return out;
}

std::uint64_t euler_phi(const Factorization& f) {
  std::uint64_t out = f.n;
  for (const auto& pp : f.factors) out = out / pp.prime * (pp.prime - 1);
  return out;
}

bool is_squarefree(const Factorization& f) {
  return std::all_of(f.factors.begin(), f.factors.end(),
                     [](const PrimePower& pp) { return pp.exponent == 1; });
}

int mobius(std::uint64_t n) { return mobius(factorize(n)); }
std::uint64_t tau(std::uint64_t n) { return tau(factorize(n)); }
unsigned omega(std::uint64_t n) { return omega(factorize(n)); }
unsigned big_omega(std::uint64_t n) { return big_omega(factorize(n)); }
std::uint64_t euler_phi(std::uint64_t n) { return euler_phi(factorize(n)); }
bool is_squarefree(std::uint64_t n) { return is_squarefree(factorize(n)); }

unsigned floor_log2(std::uint64_t b) {
  if (b == 0) throw domain_error("floor_log2 of 0");
  return static_cast<unsigned>(std::bit_width(b) - 1);
}

AlmostPrimeClass classify_almost_prime(std::uint64_t n, std::uint64_t B) {
  if (B < 2) throw domain_error("classify_almost_prime: B must be >= 2");
  Factorization f = factorize(n);
  if (!is_squarefree(f))
    throw domain_error("classify_almost_prime: " + std::to_string(n) + " is not squarefree");
  return {tau(f) < B, omega(f)};
}

std::uint64_t count_roots_mod_p(const tuples::AdmissibleTuple& t, std::uint64_t p) {
  if (t.divides_modulus(p)) {
    // A = 0 mod p, so the product is constant in a: prod b_i mod p.
    std::uint64_t a0p = 0;
    for (const auto& r : t.a0_residues())
      if (r.prime == p) a0p = r.residue;
    for (std::uint64_t h : t.offsets().offsets())
      if ((a0p + h % p) % p == 0) return p;
    return 0;
  }
  if (t.modulus() && *t.modulus() % p == 0) {
    // Unnormalized tuple whose materialized A happens to share p: same rule.
    for (std::size_t i = 0; i < t.k(); ++i)
      if (t.b(i) % p == 0) return p;
    return 0;
  }
  // A invertible mod p: one root per distinct b_i mod p, and b_i = a0 + h_i.
  return distinct_offset_residues(t.offsets(), p);
}

std::uint64_t count_roots_squarefree(const tuples::AdmissibleTuple& t, std::uint64_t q) {
  Factorization f = factorize_u64(q);
  if (!is_squarefree(f))
    throw domain_error("count_roots_squarefree: " + std::to_string(q) + " is not squarefree");
  std::uint64_t out = 1;
  for (const auto& pp : f.factors) out *= count_roots_mod_p(t, pp.prime);
  return out;
}

Rational rho3_prime(std::uint64_t k, std::uint64_t p) {
  Rational kk(static_cast<long long>(k));
  return kk + 1 - kk * kk / Rational(static_cast<long long>(p));
}

Rational rho(const tuples::AdmissibleTuple& t, std::uint64_t d) {
  const auto k = static_cast<long long>(t.k());
  return multiplicative(t, d, [&](std::uint64_t) { return Rational(k); });
}

Rational rho2(const tuples::AdmissibleTuple& t, std::uint64_t d) {
  const auto k = static_cast<long long>(t.k());
  return multiplicative(t, d, [&](std::uint64_t) { return Rational(k - 1); });
}

Rational rho3(const tuples::AdmissibleTuple& t, std::uint64_t d) {
  return multiplicative(t, d, [&](std::uint64_t p) { return rho3_prime(t.k(), p); });
}

Rational theta3(const tuples::AdmissibleTuple& t, std::uint64_t d) {
  auto ps = support_primes(t, d);
  if (!ps)
    throw domain_error("theta3: " + std::to_string(d) + " is not squarefree and coprime to A");
  Rational out(1);
  for (std::uint64_t p : *ps) {
    Rational factor = 1 - rho3_prime(t.k(), p) / Rational(static_cast<long long>(p));
    if (factor == 0) throw singularity_error("theta3: 1 - rho3(p)/p vanishes at p=" + std::to_string(p));
    out /= factor;
  }
  return out;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace gapsieve::arith
