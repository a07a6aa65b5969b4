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

#include "gapsieve/lab.hpp"

#include <algorithm>
#include <cfloat>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <tuple>
#include <set>
#include <sstream>
#include <unordered_map>

#include "gapsieve/arithmetic.hpp"
#include "gapsieve/errors.hpp"
#include "gapsieve/parallel.hpp"
#include "gapsieve/prime_engine.hpp"
#include "gapsieve/report.hpp"
#include "gapsieve/tuple.hpp"

namespace gapsieve::lab {

namespace {

constexpr long double kEps = LDBL_EPSILON;
constexpr std::uint64_t kBlock = 1 << 16;
constexpr std::uint32_t kNoRoot = 0xffffffffu;

long double to_ld(const arith::Rational& r) { return r.convert_to<long double>(); }

long double rel_delta(long double a, long double b) {
  long double scale = std::max({std::abs(a), std::abs(b), LDBL_MIN});
  return std::abs(a - b) / scale;
}

/// Inverse of a modulo m for gcd(a, m) = 1, any m >= 1.
std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t m) {
  if (m == 1) return 0;
  __int128 old_r = static_cast<__int128>(a % m), r = m, old_s = 1, s = 0;
  while (r != 0) {
    const __int128 q = old_r / r;
    std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
    std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
  }
  if (old_r != 1) throw std::logic_error("inverse_mod: arguments are not coprime");
  __int128 v = old_s % static_cast<__int128>(m);
  if (v < 0) v += m;
  return static_cast<std::uint64_t>(v);
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}
/// Root of A n + b = 0 mod p, or kNoRoot when p | A.
std::uint32_t form_root(std::uint64_t A, std::uint64_t b, std::uint64_t p) {
  if (A % p == 0) {
    if (b % p == 0) throw std::logic_error("form has a fixed prime divisor");
    return kNoRoot;
  }
  return static_cast<std::uint32_t>(primes::mul_mod((p - b % p) % p, inverse_mod(A, p), p));
}

/// Distinct roots of Pi(n) = 0 mod p (p coprime to A), ascending.
std::vector<std::uint64_t> product_roots(const SieveParams& params, std::uint64_t p) {
  std::vector<std::uint64_t> roots;
  for (std::size_t i = 0; i < params.k; ++i) roots.push_back(form_root(params.A, params.tuple.b(i), p));
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  if (roots.size() != arith::count_roots_mod_p(params.tuple, p))
    throw std::logic_error("root enumeration disagrees with count_roots_mod_p");
  return roots;
}

/// Calls visit(d, sign) for every squarefree product d < D of `ps`
/// (ascending), pruning once d p >= D.
template <typename Visit>
void visit_products(const std::vector<std::uint64_t>& ps, long double D, Visit&& visit) {
  auto rec = [&](auto& self, std::size_t start, std::uint64_t d, int sign) -> void {
    visit(d, sign);
    for (std::size_t j = start; j < ps.size(); ++j) {
      if (static_cast<long double>(d) * ps[j] >= D) break;
      self(self, j + 1, d * ps[j], -sign);
    }
  };
  rec(rec, 0, 1, 1);
}

std::vector<std::uint64_t> mask_primes(const SieveParams& params, std::uint64_t mask) {
  std::vector<std::uint64_t> ps;
  for (std::size_t j = 0; j < params.support_primes.size(); ++j)
    if (mask >> j & 1) ps.push_back(params.support_primes[j]);
  if (ps.size() > params.caps.max_subset)
    throw scale_error("weighted sieve value: " + std::to_string(ps.size()) +
                      " support primes divide Pi(n), above the subset cap of " +
                      std::to_string(params.caps.max_subset));
  return ps;
}

std::uint64_t direct_mask(std::uint64_t n, const SieveParams& params) {
  std::uint64_t mask = 0;
  for (std::size_t j = 0; j < params.support_primes.size(); ++j) {
    const std::uint64_t p = params.support_primes[j];
    for (std::size_t i = 0; i < params.k; ++i)
      if (params.tuple.form_value(i, n) % p == 0) mask |= std::uint64_t{1} << j;
  }
  return mask;
}

struct SieveValue {
  long double value = 0;
  long double error = 0;
};

SieveValue mask_value(std::uint64_t mask, const SieveParams& params, const WeightTable& weights) {
  long double sum = 0, comp = 0, abs_sum = 0;
  std::uint64_t count = 0;
  visit_products(mask_primes(params, mask), params.D, [&](std::uint64_t d, int) {
    const long double x = weights.at(d);
    const long double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
    abs_sum += std::abs(x);
    ++count;
  });
  return {sum + comp, count * weights.entry_error + 2 * kEps * abs_sum};
}

/// Weight-support entries with nonzero lambda, ascending in d.
std::vector<std::pair<std::uint64_t, long double>> support_entries(const SieveParams& params,
                                                                   const WeightTable& weights) {
  std::vector<std::pair<std::uint64_t, long double>> out;
  for (const auto& [d, v] : weights.entries)
    if (v != 0 && params.in_weight_support(d)) out.emplace_back(d, v);
  return out;
}

/// Coefficients C_q = sum over [d,e] = q of lambda_d lambda_e.
std::map<std::uint64_t, CompensatedSum> lcm_coefficients(const SieveParams& params, const WeightTable& weights) {
  auto list = support_entries(params, weights);
  std::map<std::uint64_t, CompensatedSum> out;
  for (const auto& [d, ld] : list)
    for (const auto& [e, le] : list) out[d / std::gcd(d, e) * e].add(ld * le);
  return out;
}

/// CRT residues n mod M with q | Pi(n), and n = a0 mod A in the extra
/// congruence mode. Returns M.
std::uint64_t crt_residues(const SieveParams& params, std::uint64_t q, std::vector<std::uint64_t>& residues) {
  residues.assign(1, 0);
  std::uint64_t M = 1;
  auto combine = [&](const std::vector<std::uint64_t>& targets, std::uint64_t m) {
    if (residues.size() * targets.size() > params.caps.max_crt_combinations)
      throw scale_error("bilinear count: more than " + std::to_string(params.caps.max_crt_combinations) +
                        " CRT residues for modulus " + std::to_string(q));
    std::vector<std::uint64_t> next;
    next.reserve(residues.size() * targets.size());
    const std::uint64_t inv = inverse_mod(M % m, m);
    for (std::uint64_t r : residues)
      for (std::uint64_t s : targets) {
        const std::uint64_t t = mulmod((s + m - r % m) % m, inv, m);
        next.push_back(r + M * t);
      }
    residues.swap(next);
    M *= m;
  };
  for (std::uint64_t p : params.support_primes)
    if (q % p == 0) combine(product_roots(params, p), p);
  if (params.mode == CongruenceMode::extra_congruence && params.A > 1) combine({params.a0 % params.A}, params.A);
  return M;
}

/// #{n in [lo, hi) : n = r mod M}.
std::uint64_t count_in_class(std::uint64_t lo, std::uint64_t hi, std::uint64_t r, std::uint64_t M) {
  auto below = [&](std::uint64_t x) -> std::uint64_t { return x > r ? (x - 1 - r) / M + 1 : 0; };
  return below(hi) - below(lo);
}

/// Per-prime factor f(p) = rho3(p)/p for p coprime to A.
long double f_prime(std::size_t k, std::uint64_t p) {
  const long double pp = static_cast<long double>(p), kk = static_cast<long double>(k);
  return (kk + 1) / pp - kk * kk / (pp * pp);
}

/// mu(r) f(r) for r < limit, zero unless r is squarefree and coprime to
/// every prime in `excluded`.
std::vector<long double> signed_f_table(std::size_t k, std::uint64_t limit, const std::vector<std::uint64_t>& excluded) {
  std::vector<long double> v(limit, 1.0L);
  if (limit > 0) v[0] = 0;
  primes::for_each_prime(2, std::max<std::uint64_t>(limit, 2), [&](std::uint64_t p) {
    const bool drop = std::binary_search(excluded.begin(), excluded.end(), p);
    const long double fp = -f_prime(k, p);
    for (std::uint64_t m = p; m < limit; m += p) v[m] = drop ? 0 : v[m] * fp;
    if (p <= limit / p)
      for (std::uint64_t m = p * p; m < limit; m += p * p) v[m] = 0;
  });
  return v;
}

std::vector<std::uint64_t> prime_factors_of(std::uint64_t A) {
  return A == 1 ? std::vector<std::uint64_t>{} : arith::factorize_u64(A).primes();
}

long double a_over_phi(std::uint64_t A) {
  long double r = 1;
  for (std::uint64_t p : prime_factors_of(A)) r *= static_cast<long double>(p) / (p - 1);
  return r;
}

long double factorial(unsigned n) {
  long double r = 1;
  for (unsigned i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace

std::string to_string(CongruenceMode mode) {
  return mode == CongruenceMode::normalized_functions ? "normalized_functions" : "extra_congruence";
}

CongruenceMode parse_congruence_mode(const std::string& text) {
  if (text == "normalized_functions") return CongruenceMode::normalized_functions;
  if (text == "extra_congruence") return CongruenceMode::extra_congruence;
  throw validation_error("unknown congruence_mode '" + text + "' (expected normalized_functions|extra_congruence)");
}

SieveParams SieveParams::make(const tuples::OffsetTuple& offsets, std::uint64_t N, unsigned l, Fraction varpi,
                              std::optional<std::uint64_t> B, CongruenceMode mode, std::optional<long double> x,
                              const LabCaps& caps) {
  std::vector<std::string> errors;
  SieveParams p;
  p.N = N;
  p.k = offsets.size();
  p.l = l;
  p.varpi = varpi;
  p.B = B;
  p.mode = mode;
  p.caps = caps;
  // Exceeding a toy cap is a scale error; anything else is a validation error.
  bool over_cap = false;
  auto cap = [&](bool bad, std::string msg) {
    if (bad) {
      errors.push_back(std::move(msg));
      over_cap = true;
    }
  };
  cap(p.k > caps.max_k, "k = " + std::to_string(p.k) + " exceeds the toy cap " + std::to_string(caps.max_k));
  cap(l > caps.max_l, "l = " + std::to_string(l) + " exceeds the toy cap " + std::to_string(caps.max_l));
  cap(N > caps.max_N, "N = " + std::to_string(N) + " exceeds the toy cap " + std::to_string(caps.max_N));
  if (l < 1) errors.push_back("l must be >= 1");
  if (N < 2) errors.push_back("N must be >= 2");
  if (varpi.num <= 0) errors.push_back("varpi must be positive");
  if (B && *B < 1) errors.push_back("B must be >= 1");
  if (caps.max_support > 64) errors.push_back("caps.max_support cannot exceed 64");
  auto fail_if_any = [&] {
    if (errors.empty()) return;
    std::string msg = "invalid lab parameters: " + errors[0];
    for (std::size_t i = 1; i < errors.size(); ++i) msg += "; " + errors[i];
    if (over_cap) throw scale_error(msg);
    throw validation_error(msg);
  };
  if (over_cap) fail_if_any();
  try {
    p.tuple = tuples::normalize(offsets);
  } catch (const inadmissible_error& e) {
    errors.push_back(e.what());
  }
  fail_if_any();
  if (!p.tuple.modulus()) throw scale_error("normalizing modulus A exceeds 2^63");
  p.A = *p.tuple.modulus();
  p.a0 = *p.tuple.a0();
  const long double logN = std::log(static_cast<long double>(N));
  const long double w = varpi.as<long double>();
  p.D = std::exp((0.25L + w) * logN) / p.A;
  p.D1 = std::exp(w * logN) / p.A;
  p.D0 = p.D > 1 ? std::pow(std::log(p.D), 1.0L / p.k) : 0;
  p.x = x.value_or(static_cast<long double>(p.A) * N);
  if (!(p.D1 < p.D && p.D < N)) errors.push_back("need D1 < D < N (D1 = " + std::to_string(static_cast<double>(p.D1)) +
                                                 ", D = " + std::to_string(static_cast<double>(p.D)) + ")");
  if (!(p.D > 1)) errors.push_back("D must exceed 1");
  if (!(p.x > 0)) errors.push_back("x must be positive");
  const unsigned __int128 max_form =
      static_cast<unsigned __int128>(p.A) * (2 * N - 1) + p.tuple.b(p.k - 1);
  cap(max_form > caps.max_form_value,
      "largest form value exceeds caps.max_form_value = " + std::to_string(caps.max_form_value));
  if (p.D1 >= 2)
    for (std::uint64_t q : primes::primes_in(2, static_cast<std::uint64_t>(p.D1) + 1))
      if (p.A % q != 0) p.support_primes.push_back(q);
  cap(p.support_primes.size() > caps.max_support,
      std::to_string(p.support_primes.size()) + " support primes exceed caps.max_support = " +
          std::to_string(caps.max_support));
  fail_if_any();
  return p;
}

bool SieveParams::in_weight_support(std::uint64_t d) const {
  if (d == 0 || !(static_cast<long double>(d) < D)) return false;
  for (std::uint64_t p : support_primes) {
    if (d % p) continue;
    d /= p;
    if (d % p == 0) return false;
  }
  return d == 1;
}

WeightTable WeightTable::build(const SieveParams& params) {
  WeightTable t;
  visit_products(params.support_primes, params.D,
                 [&](std::uint64_t d, int sign) { t.entries[d] = sign * g_eval(static_cast<long double>(d), params); });
  // log(D/d) carries an absolute error of a few ulps of log D; raising it to
  // the power k+l scales that to (k+l) log D (log D/d)^{k+l-1}/(k+l)!, which
  // is at most (k+l) lambda_1.
  t.entry_error = (params.k + params.l + 4) * kEps * g_eval(1, params);
  return t;
}

long double WeightTable::at(std::uint64_t d) const {
  auto it = entries.find(d);
  return it == entries.end() ? 0.0L : it->second;
}

long double g_eval(long double y, const SieveParams& params) {
  if (!(y > 0)) throw domain_error("g: argument must be positive");
  if (!(y < params.D)) return 0;
  const unsigned K = static_cast<unsigned>(params.k + params.l);
  return std::pow(std::log(params.D / y), static_cast<long double>(K)) / factorial(K);
}

long double lambda_weight(std::uint64_t d, const SieveParams& params) {
  if (!params.in_weight_support(d)) return 0;
  int sign = 1;
  for (std::uint64_t p : params.support_primes)
    if (d % p == 0) sign = -sign;
  return sign * g_eval(static_cast<long double>(d), params);
}

long double weighted_sieve_value(std::uint64_t n, const SieveParams& params, const WeightTable& weights) {
  return mask_value(direct_mask(n, params), params, weights).value;
}

std::vector<std::uint64_t> sieve_value_divisors(std::uint64_t n, const SieveParams& params) {
  std::vector<std::uint64_t> out;
  visit_products(mask_primes(params, direct_mask(n, params)), params.D,
                 [&](std::uint64_t d, int) { out.push_back(d); });
  std::sort(out.begin(), out.end());
  return out;
}

void CompensatedSum::add(long double x, long double x_error) {
  const long double t = value + x;
  comp_ += std::abs(value) >= std::abs(x) ? (value - t) + x : (x - t) + value;
  value = t;
  abs_sum += std::abs(x);
  term_error += x_error;
  ++terms;
}

void CompensatedSum::merge(const CompensatedSum& other) {
  const auto a = abs_sum, e = term_error;
  const auto n = terms;
  add(other.value);
  add(other.comp_);
  abs_sum = a + other.abs_sum;
  term_error = e + other.term_error;
  terms = n + other.terms;
}

long double CompensatedSum::error_bound() const {
  return term_error + (2 * kEps + static_cast<long double>(terms) * kEps * kEps) * abs_sum;
}

FormData compute_form_data(const SieveParams& params, unsigned threads) {
  const std::uint64_t N = params.N, A = params.A, k = params.k;
  const std::uint64_t max_form = A * (2 * N - 1) + params.tuple.b(k - 1);
  const std::vector<std::uint64_t> base = primes::primes_in(2, primes::isqrt(max_form) + 1);
  std::vector<std::uint32_t> roots(k * base.size());
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < base.size(); ++j) roots[i * base.size() + j] = form_root(A, params.tuple.b(i), base[j]);
  std::vector<std::uint32_t> support_roots(k * params.support_primes.size());
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < params.support_primes.size(); ++j)
      support_roots[i * params.support_primes.size() + j] = form_root(A, params.tuple.b(i), params.support_primes[j]);

  FormData data;
  data.N = N;
  data.tau_last.assign(N, 0);
  data.prime_bits.assign(N, 0);
  data.squarefree.assign(N, 1);
  data.in_class.assign(N, 0);
  data.support_mask.assign(N, 0);
  const std::size_t n_blocks = (N + kBlock - 1) / kBlock;
  parallel_blocks(n_blocks, threads, [&](std::size_t blk) {
    const std::uint64_t off = blk * kBlock, n0 = N + off, m = std::min(kBlock, N - off);
    std::vector<std::uint64_t> rem(m);
    std::vector<std::uint32_t> tau(m);
    for (std::size_t i = 0; i < k; ++i) {
      const std::uint64_t b = params.tuple.b(i);
      for (std::uint64_t j = 0; j < m; ++j) rem[j] = A * (n0 + j) + b;
      std::fill(tau.begin(), tau.end(), 1);
      for (std::size_t s = 0; s < base.size(); ++s) {
        const std::uint32_t r = roots[i * base.size() + s];
        if (r == kNoRoot) continue;
        const std::uint64_t p = base[s];
        for (std::uint64_t j = (r + p - n0 % p) % p; j < m; j += p) {
          unsigned e = 0;
          do {
            rem[j] /= p;
            ++e;
          } while (rem[j] % p == 0);
          tau[j] *= e + 1;
          if (e >= 2) data.squarefree[off + j] = 0;
        }
      }
      for (std::uint64_t j = 0; j < m; ++j) {
        if (rem[j] > 1) tau[j] *= 2;
        if (tau[j] == 2) data.prime_bits[off + j] |= std::uint8_t(1u << i);
        if (i + 1 == k) data.tau_last[off + j] = tau[j];
      }
    }
    // Two forms share a prime only if it divides b_j - b_i.
    for (std::uint64_t j = 0; j < m; ++j) {
      if (!data.squarefree[off + j]) continue;
      for (std::size_t a = 0; a < k && data.squarefree[off + j]; ++a)
        for (std::size_t c = a + 1; c < k; ++c) {
          const std::uint64_t diff = params.tuple.b(c) - params.tuple.b(a);
          const std::uint64_t La = A * (n0 + j) + params.tuple.b(a);
          if (std::gcd(diff, La % diff) > 1) {
            data.squarefree[off + j] = 0;
            break;
          }
        }
    }
    for (std::uint64_t j = 0; j < m; ++j) data.in_class[off + j] = (n0 + j) % A == params.a0 % A;
    const std::size_t ns = params.support_primes.size();
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t s = 0; s < ns; ++s) {
        const std::uint64_t p = params.support_primes[s];
        const std::uint32_t r = support_roots[i * ns + s];
        for (std::uint64_t j = (r + p - n0 % p) % p; j < m; j += p) data.support_mask[off + j] |= std::uint64_t{1} << s;
      }
  });
  return data;
}

SieveSums evaluate_sums(const SieveParams& params, const WeightTable& weights, const FormData& data,
                        unsigned threads) {
  std::vector<std::uint64_t> masks(data.support_mask);
  std::sort(masks.begin(), masks.end());
  masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
  std::vector<SieveValue> values(masks.size());
  parallel_blocks(masks.size(), threads, [&](std::size_t i) { values[i] = mask_value(masks[i], params, weights); });
  std::unordered_map<std::uint64_t, SieveValue> lookup;
  for (std::size_t i = 0; i < masks.size(); ++i) lookup.emplace(masks[i], values[i]);

  const std::size_t k = params.k;
  const std::uint64_t N = data.N;
  const std::size_t n_blocks = (N + kBlock - 1) / kBlock;
  std::vector<SieveSums> parts(n_blocks);
  const long double invB = params.B ? 1.0L / static_cast<long double>(*params.B) : 0.0L;
  parallel_blocks(n_blocks, threads, [&](std::size_t blk) {
    SieveSums& s = parts[blk];
    s.S2.resize(k);
    const std::uint64_t lo = blk * kBlock, hi = std::min(N, lo + kBlock);
    for (std::uint64_t j = lo; j < hi; ++j) {
      const SieveValue& w = lookup.at(data.support_mask[j]);
      const long double w2 = w.value * w.value;
      const long double w2e = 2 * std::abs(w.value) * w.error + w.error * w.error + kEps * w2;
      const long double tau = data.tau_last[j];
      const bool cong = params.mode == CongruenceMode::normalized_functions || data.in_class[j];
      s.S3_all.add(tau * w2, tau * w2e + kEps * tau * w2);
      if (!data.squarefree[j]) s.Sprime.add(w2, w2e);
      if (!cong) continue;
      s.S1.add(w2, w2e);
      s.S3.add(tau * w2, tau * w2e + kEps * tau * w2);
      unsigned primes_among_first = 0;
      for (std::size_t i = 0; i < k; ++i)
        if (data.prime_bits[j] >> i & 1) {
          s.S2[i].add(w2, w2e);
          if (i + 1 < k) ++primes_among_first;
        }
      if (data.squarefree[j]) {
        const long double coef = static_cast<long double>(primes_among_first) - 1 - tau * invB;
        s.S.add(coef * w2, std::abs(coef) * w2e + 3 * kEps * std::abs(coef * w2));
      }
    }
  });
  SieveSums total;
  total.S2.resize(k);
  for (const auto& s : parts) {
    total.S.merge(s.S);
    total.Sprime.merge(s.Sprime);
    total.S1.merge(s.S1);
    total.S3.merge(s.S3);
    total.S3_all.merge(s.S3_all);
    for (std::size_t i = 0; i < k; ++i) total.S2[i].merge(s.S2[i]);
  }
  total.distinct_masks = masks.size();
  return total;
}

namespace {
SieveSums sums_for(const SieveParams& params, const WeightTable& weights, unsigned threads) {
  return evaluate_sums(params, weights, compute_form_data(params, threads), threads);
}
}  // namespace

long double S_exact(const SieveParams& params, const WeightTable& weights, unsigned threads) {
  return sums_for(params, weights, threads).S.finish();
}
long double Sprime_exact(const SieveParams& params, const WeightTable& weights, unsigned threads) {
  return sums_for(params, weights, threads).Sprime.finish();
}
long double S1_exact(const SieveParams& params, const WeightTable& weights, unsigned threads) {
  return sums_for(params, weights, threads).S1.finish();
}
long double S2_exact(std::size_t i, const SieveParams& params, const WeightTable& weights, unsigned threads) {
  if (i < 1 || i > params.k) throw domain_error("S2: form index must lie in [1, k]");
  return sums_for(params, weights, threads).S2[i - 1].finish();
}
long double S3_exact(const SieveParams& params, const WeightTable& weights, unsigned threads) {
  return sums_for(params, weights, threads).S3.finish();
}

long double S1_bilinear(const SieveParams& params, const WeightTable& weights) {
  CompensatedSum total;
  std::vector<std::uint64_t> residues;
  for (const auto& [q, c] : lcm_coefficients(params, weights)) {
    const std::uint64_t M = crt_residues(params, q, residues);
    std::uint64_t count = 0;
    for (std::uint64_t r : residues) count += count_in_class(params.N, 2 * params.N, r, M);
    total.add(c.finish() * static_cast<long double>(count));
  }
  return total.finish();
}

long double S3_bilinear(const SieveParams& params, const WeightTable& weights, const FormData& data) {
  CompensatedSum total;
  std::vector<std::uint64_t> residues;
  const std::uint64_t N = params.N;
  for (const auto& [q, c] : lcm_coefficients(params, weights)) {
    const std::uint64_t M = crt_residues(params, q, residues);
    std::uint64_t tau_sum = 0;
    for (std::uint64_t r : residues) {
      std::uint64_t n = N % M <= r ? N - N % M + r : N - N % M + M + r;
      for (; n < 2 * N; n += M) tau_sum += data.tau_last[n - N];
    }
    total.add(c.finish() * static_cast<long double>(tau_sum));
  }
  return total.finish();
}

MSums m_sums(const SieveParams& params, const WeightTable& weights, unsigned threads) {
  const std::size_t m = params.support_primes.size();
  if (m > params.caps.max_msum_primes)
    throw scale_error("M sums: " + std::to_string(m) + " support primes exceed caps.max_msum_primes = " +
                      std::to_string(params.caps.max_msum_primes));
  const std::size_t full = std::size_t{1} << m;
  const long double D2 = params.D * params.D;
  std::vector<std::uint64_t> dval(full, 1);
  std::vector<long double> lam(full, 0), rq(full, 0), W(full, 0);
  for (std::size_t mask = 1; mask < full; ++mask) {
    const std::size_t low = static_cast<std::size_t>(std::countr_zero(mask));
    const std::uint64_t p = params.support_primes[low];
    const std::uint64_t prev = dval[mask & (mask - 1)];
    dval[mask] = static_cast<long double>(prev) * p < D2 ? prev * p : 0;  // 0 marks "beyond D^2"
    if (prev == 0) dval[mask] = 0;
    const long double kk = static_cast<long double>(params.k);
    W[mask] = W[mask & (mask - 1)] +
              2 * (p - kk) * std::log(static_cast<long double>(p)) / ((kk + 1) * p - kk);
  }
  for (std::size_t mask = 0; mask < full; ++mask) {
    if (dval[mask] == 0) continue;
    if (static_cast<long double>(dval[mask]) < params.D) lam[mask] = weights.at(dval[mask]);
    rq[mask] = to_ld(arith::rho3(params.tuple, dval[mask]) / dval[mask]);
  }
  std::vector<std::size_t> live;
  for (std::size_t mask = 0; mask < full; ++mask)
    if (lam[mask] != 0) live.push_back(mask);
  constexpr std::size_t kRows = 32;
  const std::size_t n_blocks = (live.size() + kRows - 1) / kRows;
  std::vector<std::array<CompensatedSum, 3>> parts(n_blocks);
  parallel_blocks(n_blocks, threads, [&](std::size_t blk) {
    auto& s = parts[blk];
    for (std::size_t ia = blk * kRows; ia < std::min(live.size(), (blk + 1) * kRows); ++ia) {
      const std::size_t a = live[ia];
      for (std::size_t b : live) {
        const long double t = lam[a] * lam[b] * rq[a | b];
        s[0].add(t);
        s[1].add(t * W[a]);
        s[2].add(t * W[a & b]);
      }
    }
  });
  std::array<CompensatedSum, 3> total;
  for (const auto& s : parts)
    for (int i = 0; i < 3; ++i) total[i].merge(s[i]);
  return {total[0].finish(), total[1].finish(), total[2].finish()};
}

long double M1_reordered(const SieveParams& params, const WeightTable& weights) {
  auto list = support_entries(params, weights);
  std::map<std::uint64_t, long double> memo;
  CompensatedSum sum;
  for (const auto& [e, le] : list)
    for (const auto& [d, ld] : list) {
      const std::uint64_t q = d / std::gcd(d, e) * e;
      auto it = memo.find(q);
      if (it == memo.end()) it = memo.emplace(q, to_ld(arith::rho3(params.tuple, q) / q)).first;
      sum.add(ld * le * it->second);
    }
  return sum.finish();
}

namespace {

/// sum_r h(r) y_r^2 with f = rho3/id, h = mu * (1/f) and
/// y_r = sum_{r | d} lambda_d f(d), over the given squarefree d list.
long double diagonal_form(const SieveParams& params, const std::vector<std::pair<std::uint64_t, long double>>& list,
                          const std::vector<std::uint64_t>& primes_of_interest) {
  std::map<std::uint64_t, std::pair<long double, CompensatedSum>> y;  // r -> (h(r), y_r)
  for (const auto& [d, lambda] : list) {
    std::vector<std::uint64_t> ps;
    long double f = 1;
    for (std::uint64_t p : primes_of_interest)
      if (d % p == 0) {
        ps.push_back(p);
        f *= f_prime(params.k, p);
      }
    const long double x = lambda * f;
    for (std::size_t sub = 0; sub < (std::size_t{1} << ps.size()); ++sub) {
      std::uint64_t r = 1;
      long double h = 1;
      for (std::size_t j = 0; j < ps.size(); ++j)
        if (sub >> j & 1) {
          r *= ps[j];
          h *= 1 / f_prime(params.k, ps[j]) - 1;
        }
      auto& slot = y[r];
      slot.first = h;
      slot.second.add(x);
    }
  }
  CompensatedSum total;
  for (const auto& [r, hy] : y) {
    const long double v = hy.second.finish();
    total.add(hy.first * v * v);
  }
  return total.finish();
}

}  // namespace

long double M1_diagonal(const SieveParams& params, const WeightTable& weights) {
  return diagonal_form(params, support_entries(params, weights), params.support_primes);
}

long double M1_star_exact(const SieveParams& params) {
  const std::uint64_t limit = static_cast<std::uint64_t>(std::ceil(params.D));
  if (limit > params.caps.max_divisor_range) throw scale_error("M1*: D exceeds caps.max_divisor_range");
  const auto excluded = prime_factors_of(params.A);
  const auto table = signed_f_table(params.k, limit, excluded);
  std::vector<std::uint64_t> ps;
  for (std::uint64_t p : primes::primes_in(2, std::max<std::uint64_t>(limit, 2)))
    if (!std::binary_search(excluded.begin(), excluded.end(), p)) ps.push_back(p);
  // Only d with f(d) != 0 contribute; list them with the companion weight.
  std::vector<std::pair<std::uint64_t, long double>> list;
  for (std::uint64_t d = 1; d < limit; ++d) {
    if (table[d] == 0 || !(static_cast<long double>(d) < params.D)) continue;
    const long double mu = table[d] < 0 ? -1 : 1;
    list.emplace_back(d, mu * g_eval(static_cast<long double>(d), params));
  }
  // y_r over divisors: sum over multiples of r, then h(r) from the table.
  std::vector<CompensatedSum> y(limit);
  std::vector<long double> fd(limit, 0);
  for (const auto& [d, lambda] : list) fd[d] = std::abs(table[d]) * lambda;
  for (std::uint64_t r = 1; r < limit; ++r) {
    if (table[r] == 0) continue;
    for (std::uint64_t d = r; d < limit; d += r)
      if (fd[d] != 0) y[r].add(fd[d]);
  }
  CompensatedSum total;
  for (std::uint64_t r = 1; r < limit; ++r) {
    if (table[r] == 0) continue;
    long double h = 1;
    std::uint64_t rest = r;
    for (std::uint64_t p : ps) {
      if (p * p > rest) break;
      if (rest % p == 0) {
        h *= 1 / f_prime(params.k, p) - 1;
        rest /= p;
      }
    }
    if (rest > 1) h *= 1 / f_prime(params.k, rest) - 1;
    const long double v = y[r].finish();
    total.add(h * v * v);
  }
  return total.finish();
}

long double A3_eval(std::uint64_t d, const SieveParams& params, std::optional<long double> D_opt) {
  const long double D = D_opt.value_or(params.D);
  if (d == 0 || !arith::is_squarefree(d)) throw domain_error("A3: d must be squarefree");
  if (std::gcd(d, params.A) != 1) throw domain_error("A3: d must be coprime to A");
  if (!(static_cast<long double>(d) < D)) return 0;
  const std::uint64_t limit = static_cast<std::uint64_t>(std::ceil(D / d));
  if (limit > params.caps.max_divisor_range) throw scale_error("A3: D/d exceeds caps.max_divisor_range");
  auto excluded = prime_factors_of(params.A);
  if (d > 1)
    for (std::uint64_t p : arith::factorize_u64(d).primes()) excluded.push_back(p);
  std::sort(excluded.begin(), excluded.end());
  const auto table = signed_f_table(params.k, limit, excluded);
  SieveParams at = params;
  at.D = D;
  CompensatedSum sum;
  for (std::uint64_t r = 1; r < limit; ++r)
    if (table[r] != 0) sum.add(table[r] * g_eval(static_cast<long double>(d) * r, at));
  return sum.finish();
}

namespace {

/// log of prod_{p not | A, p <= cutoff} (1 - rho3(p)/p)(1 - 1/p)^{-(k+1)}
/// times prod_{p | A} (1 - 1/p)^{-(k+1)}.
long double dimension_constant(const SieveParams& params, std::uint64_t cutoff) {
  const long double kk = static_cast<long double>(params.k);
  CompensatedSum log_sum;
  primes::for_each_prime(2, cutoff + 1, [&](std::uint64_t p) {
    const long double inv = 1.0L / static_cast<long double>(p);
    long double term = -(kk + 1) * std::log1p(-inv);
    if (params.A % p != 0) term += std::log1p(-f_prime(params.k, p));
    log_sum.add(term);
  });
  return std::exp(log_sum.finish());
}

}  // namespace

A3Report a3_convergence_report(const SieveParams& params, const std::vector<std::uint64_t>& sample_ds,
                                       unsigned decades) {
  constexpr std::uint64_t kCutoff = 1'000'000;
  A3Report rep;
  const long double singular = tuples::singular_series(params.tuple, kCutoff).log_value.value();
  rep.constant_singular = singular * a_over_phi(params.A);
  rep.constant_dimension = dimension_constant(params, kCutoff);
  const long double lfact = factorial(params.l - 1);
  auto main_term = [&](std::uint64_t d, long double D, long double constant) {
    const long double th = to_ld(arith::theta3(params.tuple, d));
    return th / lfact * constant * std::pow(std::log(D / d), static_cast<long double>(params.l - 1));
  };
  for (std::uint64_t d : sample_ds) {
    A3Sample s;
    s.d = d;
    s.A3 = A3_eval(d, params);
    s.main_term = static_cast<long double>(d) < params.D ? main_term(d, params.D, rep.constant_singular) : 0;
    s.ratio = s.main_term != 0 ? s.A3 / s.main_term : 0;
    rep.samples.push_back(s);
  }
  std::vector<long double> rp, rd, band;
  for (unsigned j = 0; j <= decades; ++j) {
    A3TrendPoint pt;
    pt.D = params.D * std::pow(10.0L, static_cast<long double>(j));
    pt.A3 = A3_eval(1, params, pt.D);
    pt.main_singular = main_term(1, pt.D, rep.constant_singular);
    pt.main_dimension = main_term(1, pt.D, rep.constant_dimension);
    pt.ratio_singular = pt.A3 / pt.main_singular;
    pt.ratio_dimension = pt.A3 / pt.main_dimension;
    pt.slack = 1 / std::log(pt.D);
    band.push_back(pt.slack);
    rp.push_back(pt.ratio_singular);
    rd.push_back(pt.ratio_dimension);
    rep.trend.push_back(pt);
  }
  rep.trend_monotone_singular = approaches_one(rp, band);
  rep.trend_monotone_dimension = approaches_one(rd, band);

  // sum_{d <= x^{1/4}} rho3(d) theta3(d)/d over squarefree d coprime to A;
  // per prime the factor is f/(1-f).
  const std::uint64_t limit = static_cast<std::uint64_t>(std::floor(std::pow(params.x, 0.25L))) + 1;
  if (limit > params.caps.max_divisor_range) throw scale_error("A3 companion: x^{1/4} exceeds caps.max_divisor_range");
  std::vector<long double> v(limit, 1.0L);
  v[0] = 0;
  const auto excluded = prime_factors_of(params.A);
  primes::for_each_prime(2, std::max<std::uint64_t>(limit, 2), [&](std::uint64_t p) {
    const bool drop = std::binary_search(excluded.begin(), excluded.end(), p);
    const long double f = f_prime(params.k, p), t = f / (1 - f);
    for (std::uint64_t m = p; m < limit; m += p) v[m] = drop ? 0 : v[m] * t;
    if (p <= limit / p)
      for (std::uint64_t m = p * p; m < limit; m += p * p) v[m] = 0;
  });
  CompensatedSum second;
  for (std::uint64_t d = 1; d < limit; ++d) second.add(v[d]);
  rep.second_sum = second.finish();
  const long double kk = static_cast<long double>(params.k);
  rep.second_main = std::pow(1 + 4 * params.varpi.as<long double>(), -(kk + 1)) / factorial(params.k + 1) /
                    singular / a_over_phi(params.A) * std::pow(std::log(params.D), kk + 1);
  rep.second_main_dimension = std::pow(std::log(static_cast<long double>(limit - 1)), kk + 1) /
                              factorial(params.k + 1) / rep.constant_dimension;
  return rep;
}

long double consistency_ratio(const SieveParams& params, const MSums& m, long double S3_all) {
  const long double logN = std::log(static_cast<long double>(params.N));
  return static_cast<long double>(params.N) / a_over_phi(params.A) * (logN * m.M1 - 2 * m.M2 + m.M3) / S3_all;
}

bool approaches_one(const std::vector<long double>& ratios, const std::vector<long double>& slack) {
  if (ratios.size() < 2) return false;
  for (std::size_t j = 1; j < ratios.size(); ++j) {
    const long double e = std::abs(ratios[j] - 1);
    const bool inside = j < slack.size() && e <= slack[j];
    if (!(e < std::abs(ratios[j - 1] - 1)) && !inside) return false;
  }
  return std::abs(ratios.back() - 1) < std::abs(ratios.front() - 1);
}

SieveParams LabConfig::params() const { return SieveParams::make(tuple, N, l, varpi, B, mode, x, caps); }

LabConfig parse_lab_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw validation_error("lab config must be a JSON object");
  static const std::set<std::string> known{"tuple", "tuple_file", "k", "N", "l", "varpi", "B", "congruence_mode",
                                           "x", "caps", "a3", "oracle_samples"};
  std::vector<std::string> errors;
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) errors.push_back("unknown key '" + it.key() + "'");
  LabConfig c;
  auto guard = [&](const char* what, auto&& fn) {
    try {
      fn();
    } catch (const nlohmann::json::exception& e) {
      errors.push_back(std::string(what) + ": " + e.what());
    } catch (const gapsieve::error& e) {
      errors.push_back(std::string(what) + ": " + e.what());
    }
  };
  const bool has_tuple = j.contains("tuple"), has_file = j.contains("tuple_file");
  if (has_tuple == has_file) errors.push_back("exactly one of 'tuple' and 'tuple_file' is required");
  if (has_tuple) guard("tuple", [&] { c.tuple = tuples::OffsetTuple(j.at("tuple").get<std::vector<std::uint64_t>>()); });
  if (has_file)
    guard("tuple_file", [&] {
      std::filesystem::path p = j.at("tuple_file").get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      c.tuple = tuples::read_tuple_file(p).tuple;
    });
  if (j.contains("k"))
    guard("k", [&] {
      if (j.at("k").get<std::uint64_t>() != c.tuple.size()) throw validation_error("does not match the tuple size");
    });
  if (j.contains("N")) guard("N", [&] { c.N = j.at("N").get<std::uint64_t>(); });
  if (j.contains("l")) guard("l", [&] { c.l = j.at("l").get<unsigned>(); });
  if (j.contains("varpi"))
    guard("varpi", [&] {
      const auto& v = j.at("varpi");
      c.varpi = parse_fraction(v.is_string() ? v.get<std::string>() : v.dump());
    });
  if (j.contains("B"))
    guard("B", [&] {
      const auto& v = j.at("B");
      if (v.is_null() || (v.is_string() && v.get<std::string>() == "infinity"))
        c.B.reset();
      else
        c.B = v.get<std::uint64_t>();
    });
  if (j.contains("congruence_mode"))
    guard("congruence_mode", [&] { c.mode = parse_congruence_mode(j.at("congruence_mode").get<std::string>()); });
  if (j.contains("x")) guard("x", [&] { c.x = j.at("x").get<double>(); });
  if (j.contains("oracle_samples")) guard("oracle_samples", [&] { c.oracle_samples = j.at("oracle_samples").get<std::size_t>(); });
  if (j.contains("caps"))
    guard("caps", [&] {
      const auto& cj = j.at("caps");
      if (!cj.is_object()) throw validation_error("must be an object");
      for (auto it = cj.begin(); it != cj.end(); ++it) {
        const auto& key = it.key();
        const auto v = it.value().get<std::uint64_t>();
        if (key == "max_N") c.caps.max_N = v;
        else if (key == "max_k") c.caps.max_k = v;
        else if (key == "max_l") c.caps.max_l = static_cast<unsigned>(v);
        else if (key == "max_support") c.caps.max_support = v;
        else if (key == "max_msum_primes") c.caps.max_msum_primes = v;
        else if (key == "max_subset") c.caps.max_subset = v;
        else if (key == "max_form_value") c.caps.max_form_value = v;
        else if (key == "max_divisor_range") c.caps.max_divisor_range = v;
        else if (key == "max_crt_combinations") c.caps.max_crt_combinations = v;
        else errors.push_back("caps: unknown key '" + key + "'");
      }
    });
  if (j.contains("a3"))
    guard("a3", [&] {
      const auto& lj = j.at("a3");
      if (!lj.is_object()) throw validation_error("must be an object");
      for (auto it = lj.begin(); it != lj.end(); ++it) {
        if (it.key() == "sample_ds") c.sample_ds = it.value().get<std::vector<std::uint64_t>>();
        else if (it.key() == "decades") c.decades = it.value().get<unsigned>();
        else errors.push_back("a3: unknown key '" + it.key() + "'");
      }
    });
  if (errors.empty())
    guard("parameters", [&] {
      auto p = c.params();
      for (std::uint64_t d : c.sample_ds)
        if (d == 0 || !arith::is_squarefree(d) || std::gcd(d, p.A) != 1 || !(static_cast<long double>(d) < p.D))
          errors.push_back("a3.sample_ds: " + std::to_string(d) + " is not squarefree, coprime to A and below D");
    });
  if (!errors.empty()) {
    std::string msg = "invalid lab config: " + errors[0];
    for (std::size_t i = 1; i < errors.size(); ++i) msg += "; " + errors[i];
    throw validation_error(msg);
  }
  return c;
}

LabConfig read_lab_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot read lab config '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw validation_error("lab config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_lab_config(j, path.parent_path());
}

namespace {

/// Sum of table lookups over every divisor d < D of Pi(n), found from the
/// factorizations of the individual forms.
std::pair<long double, std::vector<std::uint64_t>> divisor_oracle(std::uint64_t n, const SieveParams& params,
                                                                  const WeightTable& weights) {
  std::map<std::uint64_t, unsigned> exps;
  for (std::size_t i = 0; i < params.k; ++i)
    for (const auto& pp : arith::factorize(static_cast<std::uint64_t>(params.tuple.form_value(i, n))).factors)
      exps[pp.prime] += pp.exponent;
  std::vector<std::pair<std::uint64_t, unsigned>> fs(exps.begin(), exps.end());
  std::vector<std::uint64_t> used;
  long double sum = 0;
  auto rec = [&](auto& self, std::size_t idx, std::uint64_t d) -> void {
    if (idx == fs.size()) {
      if (weights.entries.count(d) && params.in_weight_support(d)) {
        sum += weights.at(d);
        used.push_back(d);
      } else if (params.in_weight_support(d)) {
        used.push_back(d);
      }
      return;
    }
    std::uint64_t x = d;
    for (unsigned e = 0; e <= fs[idx].second; ++e) {
      self(self, idx + 1, x);
      if (static_cast<long double>(x) * fs[idx].first >= params.D) break;
      x *= fs[idx].first;
    }
  };
  rec(rec, 0, 1);
  std::sort(used.begin(), used.end());
  return {sum, used};
}

nlohmann::ordered_json sum_json(const CompensatedSum& s) {
  const double v = static_cast<double>(s.finish());
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  nlohmann::ordered_json j;
  j["value"] = v;
  j["error_bound"] = static_cast<double>(s.error_bound());
  j["terms"] = s.terms;
  j["summation"] = "neumaier";
  j["checksum"] = hex64(fnv1a64(std::string_view(reinterpret_cast<const char*>(&bits), sizeof bits)));
  return j;
}

}  // namespace

LabReport run_experiment(const LabConfig& config, unsigned threads) {
  LabReport r;
  r.config = config;
  r.params = config.params();
  const auto& params = r.params;
  const WeightTable weights = WeightTable::build(params);
  r.weight_entries = weights.entries.size();
  const FormData data = compute_form_data(params, threads);
  r.sums = evaluate_sums(params, weights, data, threads);
  r.m = m_sums(params, weights, threads);
  r.M1_star = M1_star_exact(params);
  r.M1_star_literal = r.m.M1;

  const std::size_t k = params.k;
  const long double invB = params.B ? 1.0L / static_cast<long double>(*params.B) : 0.0L;
  auto& dec = r.decomposition;
  dec.lhs = r.sums.S.finish();
  CompensatedSum rhs;
  rhs.add(-r.sums.S1.finish());
  for (std::size_t i = 0; i + 1 < k; ++i) rhs.add(r.sums.S2[i].finish());
  rhs.add(-r.sums.S3.finish() * invB);
  rhs.add(-static_cast<long double>(k) * r.sums.Sprime.finish());
  dec.rhs = rhs.finish();
  dec.residual = dec.lhs - dec.rhs;
  dec.tolerance = r.sums.S.error_bound() + r.sums.S1.error_bound() + r.sums.S3.error_bound() * invB +
                  k * r.sums.Sprime.error_bound() + 2 * kEps * rhs.abs_sum;
  for (std::size_t i = 0; i + 1 < k; ++i) dec.tolerance += r.sums.S2[i].error_bound();
  dec.holds = dec.residual >= -dec.tolerance;

  auto& o = r.oracles;
  o.S1_bilinear = S1_bilinear(params, weights);
  o.S1_rel_delta = rel_delta(o.S1_bilinear, r.sums.S1.finish());
  o.S3_bilinear = S3_bilinear(params, weights, data);
  o.S3_rel_delta = rel_delta(o.S3_bilinear, r.sums.S3.finish());
  o.M1_reordered = M1_reordered(params, weights);
  o.M1_rel_delta = rel_delta(o.M1_reordered, r.m.M1);
  const std::size_t samples = std::min<std::uint64_t>(config.oracle_samples, params.N);
  for (std::size_t s = 0; s < samples; ++s) {
    const std::uint64_t n = params.N + s * params.N / samples;
    const long double fast = weighted_sieve_value(n, params, weights);
    const auto [slow, used] = divisor_oracle(n, params, weights);
    const auto visited = sieve_value_divisors(n, params);
    const long double tol = 4 * (used.size() + 1) * (weights.entry_error + kEps * std::abs(g_eval(1, params)));
    ++o.sieve_value_checked;
    if (used != visited || std::abs(fast - slow) > tol || data.support_mask[n - params.N] != direct_mask(n, params))
      ++o.sieve_value_mismatches;
  }
  r.consistency = consistency_ratio(params, r.m, r.sums.S3_all.finish());
  r.a3 = a3_convergence_report(params, config.sample_ds, config.decades);
  return r;
}

std::vector<ConsistencyPoint> consistency_trend(const LabConfig& base, const std::vector<std::uint64_t>& Ns, unsigned threads) {
  std::vector<ConsistencyPoint> out;
  for (std::uint64_t N : Ns) {
    LabConfig c = base;
    c.N = N;
    const auto params = c.params();
    const auto weights = WeightTable::build(params);
    const auto sums = evaluate_sums(params, weights, compute_form_data(params, threads), threads);
    const auto m = m_sums(params, weights, threads);
    out.push_back({N, params.support_primes.size(), consistency_ratio(params, m, sums.S3_all.finish()),
                   1 / std::log(static_cast<long double>(N))});
  }
  return out;
}

nlohmann::ordered_json report_json(const LabReport& r) {
  using nlohmann::ordered_json;
  const auto& p = r.params;
  auto ld = [](long double v) { return static_cast<double>(v); };
  ordered_json j;
  ordered_json cfg;
  cfg["tuple"] = std::vector<std::uint64_t>(r.config.tuple.offsets().begin(), r.config.tuple.offsets().end());
  cfg["N"] = r.config.N;
  cfg["l"] = r.config.l;
  cfg["varpi"] = r.config.varpi.str();
  cfg["B"] = r.config.B ? ordered_json(*r.config.B) : ordered_json(nullptr);
  cfg["congruence_mode"] = to_string(r.config.mode);
  cfg["x"] = r.config.x ? ordered_json(ld(*r.config.x)) : ordered_json(nullptr);
  cfg["sample_ds"] = r.config.sample_ds;
  cfg["decades"] = r.config.decades;
  cfg["oracle_samples"] = r.config.oracle_samples;
  j["config"] = cfg;

  ordered_json pj;
  pj["k"] = p.k;
  pj["A"] = p.A;
  pj["a0"] = p.a0;
  std::vector<std::uint64_t> b;
  for (std::size_t i = 0; i < p.k; ++i) b.push_back(p.tuple.b(i));
  pj["b"] = b;
  pj["D"] = ld(p.D);
  pj["D1"] = ld(p.D1);
  pj["D0"] = ld(p.D0);
  pj["x"] = ld(p.x);
  pj["support_primes"] = p.support_primes;
  pj["weight_entries"] = r.weight_entries;
  pj["lambda_1"] = ld(g_eval(1, p));
  j["params"] = pj;

  ordered_json sj;
  sj["S"] = sum_json(r.sums.S);
  sj["S_prime"] = sum_json(r.sums.Sprime);
  sj["S1"] = sum_json(r.sums.S1);
  sj["S2"] = ordered_json::array();
  for (const auto& s : r.sums.S2) sj["S2"].push_back(sum_json(s));
  sj["S3"] = sum_json(r.sums.S3);
  sj["S3_all_n"] = sum_json(r.sums.S3_all);
  j["sums"] = sj;

  ordered_json mj;
  mj["M1"] = ld(r.m.M1);
  mj["M2"] = ld(r.m.M2);
  mj["M3"] = ld(r.m.M3);
  mj["M1_star_companion"] = ld(r.M1_star);
  mj["M1_star_literal"] = ld(r.M1_star_literal);
  j["m_sums"] = mj;

  ordered_json dj;
  dj["lhs"] = ld(r.decomposition.lhs);
  dj["rhs"] = ld(r.decomposition.rhs);
  dj["residual"] = ld(r.decomposition.residual);
  dj["tolerance"] = ld(r.decomposition.tolerance);
  dj["holds"] = r.decomposition.holds;
  j["decomposition"] = dj;

  ordered_json oj;
  oj["S1_bilinear"] = ld(r.oracles.S1_bilinear);
  oj["S1_rel_delta"] = ld(r.oracles.S1_rel_delta);
  oj["S3_bilinear"] = ld(r.oracles.S3_bilinear);
  oj["S3_rel_delta"] = ld(r.oracles.S3_rel_delta);
  oj["M1_reordered"] = ld(r.oracles.M1_reordered);
  oj["M1_rel_delta"] = ld(r.oracles.M1_rel_delta);
  oj["sieve_value_checked"] = r.oracles.sieve_value_checked;
  oj["sieve_value_mismatches"] = r.oracles.sieve_value_mismatches;
  j["oracles"] = oj;

  j["consistency_ratio"] = ld(r.consistency);
  ordered_json lj;
  lj["constant_singular"] = ld(r.a3.constant_singular);
  lj["constant_dimension"] = ld(r.a3.constant_dimension);
  lj["samples"] = ordered_json::array();
  for (const auto& s : r.a3.samples)
    lj["samples"].push_back({{"d", s.d}, {"A3", ld(s.A3)}, {"main_term", ld(s.main_term)}, {"ratio", ld(s.ratio)}});
  lj["trend"] = ordered_json::array();
  for (const auto& t : r.a3.trend)
    lj["trend"].push_back({{"D", ld(t.D)},
                           {"A3", ld(t.A3)},
                           {"main_singular", ld(t.main_singular)},
                           {"main_dimension", ld(t.main_dimension)},
                           {"ratio_singular", ld(t.ratio_singular)},
                           {"ratio_dimension", ld(t.ratio_dimension)},
                           {"slack", ld(t.slack)}});
  lj["trend_monotone_singular"] = r.a3.trend_monotone_singular;
  lj["trend_monotone_dimension"] = r.a3.trend_monotone_dimension;
  lj["second_sum"] = ld(r.a3.second_sum);
  lj["second_main"] = ld(r.a3.second_main);
  lj["second_main_dimension"] = ld(r.a3.second_main_dimension);
  j["a3"] = lj;

  ordered_json meta;
  meta["evaluated_n"] = p.N;
  meta["block_size"] = kBlock;
  meta["distinct_masks"] = r.sums.distinct_masks;
  meta["float_type"] = "long double";
  j["metadata"] = meta;
  return j;
}

std::string report_csv(const LabReport& r) {
  std::ostringstream out;
  out.precision(17);
  out << "section,name,value,error_bound\n";
  auto row = [&](const char* section, const std::string& name, long double v, long double e) {
    out << section << ',' << name << ',' << static_cast<double>(v) << ',' << static_cast<double>(e) << '\n';
  };
  row("sums", "S", r.sums.S.finish(), r.sums.S.error_bound());
  row("sums", "S_prime", r.sums.Sprime.finish(), r.sums.Sprime.error_bound());
  row("sums", "S1", r.sums.S1.finish(), r.sums.S1.error_bound());
  for (std::size_t i = 0; i < r.sums.S2.size(); ++i)
    row("sums", "S2_" + std::to_string(i + 1), r.sums.S2[i].finish(), r.sums.S2[i].error_bound());
  row("sums", "S3", r.sums.S3.finish(), r.sums.S3.error_bound());
  row("m_sums", "M1", r.m.M1, 0);
  row("m_sums", "M2", r.m.M2, 0);
  row("m_sums", "M3", r.m.M3, 0);
  row("m_sums", "M1_star_companion", r.M1_star, 0);
  row("decomposition", "residual", r.decomposition.residual, r.decomposition.tolerance);
  row("oracles", "S1_rel_delta", r.oracles.S1_rel_delta, 0);
  row("oracles", "S3_rel_delta", r.oracles.S3_rel_delta, 0);
  row("oracles", "M1_rel_delta", r.oracles.M1_rel_delta, 0);
  row("consistency", "ratio", r.consistency, 0);
  for (const auto& t : r.a3.trend) {
    std::ostringstream name;
    name.precision(17);
    name << "ratio_singular@D=" << static_cast<double>(t.D);
    row("a3", name.str(), t.ratio_singular, 0);
  }
  return out.str();
}

}  // namespace gapsieve::lab
