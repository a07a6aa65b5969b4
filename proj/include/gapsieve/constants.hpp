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

/// @file constants.hpp
/// @brief Log-domain evaluation of the explicit constants of the bounded
/// gaps argument (delta_1, delta_2, kappa_1..3, c_0 and the final
/// coefficient of the lower bound for S), and a parameter optimizer.
///
/// Everything that can leave the range of a long double is kept as a
/// LogNumber. The templates are instantiated for three working precisions so
/// that the stability of every reported value under doubled precision can be
/// checked directly.
#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gapsieve/errors.hpp"
#include "gapsieve/fraction.hpp"
#include "gapsieve/log_number.hpp"

namespace gapsieve::constants {

using Extended = long double;
using Quad = boost::multiprecision::cpp_bin_float_quad;
using Octuple = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<237, boost::multiprecision::digit_base_2, void,
                                         std::int32_t, -262142, 262143>,
    boost::multiprecision::et_off>;

/// Mantissa bits of the three supported working types.
enum class Precision : unsigned { extended = 64, quad = 113, octuple = 237 };

/// Smallest supported precision with at least `bits` mantissa bits.
/// Throws validation_error above 237.
Precision precision_from_bits(unsigned bits);

/// Number of terms nu = 1..293 in delta_2, and the log 293 coefficient.
inline constexpr unsigned kDelta2Terms = 293;
/// Largest lower index accepted by log_binomial after symmetry.
inline constexpr std::uint64_t kMaxBinomialIndex = 10'000;

struct ChainParameters {
  std::uint64_t k = 4'500'000;
  std::uint64_t l = 300;
  Fraction varpi{1, 1168};
  std::uint64_t B = 4'294'967'295ULL;
  /// log N / log D. Unset means the N -> infinity limit 4/(1 + 4 varpi).
  std::optional<Fraction> log_ratio;

  /// k >= 2, l >= 1, 0 < varpi < 1/4, B >= 2; throws validation_error.
  void validate() const;
  Fraction effective_log_ratio() const;
};

enum class Kappa { one = 1, two = 2, three = 3 };

/// ln C(n, r) as an exact sum of logarithms over the smaller index.
template <typename Real>
LogNumber<Real> log_binomial(std::uint64_t n, std::uint64_t r) {
  using std::log;
  if (r > n) throw domain_error("log_binomial: r > n");
  const std::uint64_t s = std::min(r, n - r);
  if (s > kMaxBinomialIndex)
    throw domain_error("log_binomial: lower index " + std::to_string(s) + " exceeds 10^4");
  Real acc = 0;
  for (std::uint64_t j = 1; j <= s; ++j) acc += log(Real(n - s + j)) - log(Real(j));
  return LogNumber<Real>::from_log(acc);
}

/// delta_1 = (1 + 4 varpi)^{-k}.
template <typename Real>
LogNumber<Real> delta1(const ChainParameters& p) {
  const Real four_varpi = Real(4 * p.varpi.num) / Real(p.varpi.den);
  return LogNumber<Real>::from_log(-Real(p.k) * boost::math::log1p(four_varpi));
}

/// delta_2 = 1 + sum_{nu=1}^{293} (log 293) k^nu / nu!.
template <typename Real>
LogNumber<Real> delta2(const ChainParameters& p) {
  using std::log;
  std::vector<LogNumber<Real>> terms;
  terms.reserve(kDelta2Terms + 1);
  terms.push_back(LogNumber<Real>::one());
  const Real log_k = log(Real(p.k));
  const Real log_log293 = log(log(Real(kDelta2Terms)));
  Real log_factorial = 0;
  for (unsigned nu = 1; nu <= kDelta2Terms; ++nu) {
    log_factorial += log(Real(nu));
    terms.push_back(LogNumber<Real>::from_log(log_log293 + Real(nu) * log_k - log_factorial));
  }
  return log_sum<Real>(terms);
}

/// kappa_i = delta_1 (1 + delta_2^2 + (log 293) k') C(...), with k' = k for
/// kappa_1, kappa_2 and k' = k + 1 for kappa_3. The delta arguments are
/// explicit so that sharper or degenerate values can be plugged in.
template <typename Real>
LogNumber<Real> kappa(Kappa which, const ChainParameters& p, const LogNumber<Real>& d1,
                      const LogNumber<Real>& d2) {
  using std::log;
  const std::uint64_t k = p.k, l = p.l;
  std::uint64_t k_prime = which == Kappa::three ? k + 1 : k;
  LogNumber<Real> binom;
  switch (which) {
    case Kappa::one: binom = log_binomial<Real>(k + 2 * l, k); break;
    case Kappa::two: binom = log_binomial<Real>(k + 2 * l + 1, k - 1); break;
    case Kappa::three: binom = log_binomial<Real>(k + 2 * l - 1, k + 1); break;
  }
  auto linear = LogNumber<Real>::from_log(log(log(Real(kDelta2Terms))) + log(Real(k_prime)));
  auto bracket = LogNumber<Real>::one() + d2 * d2 + linear;
  return d1 * bracket * binom;
}

template <typename Real>
LogNumber<Real> kappa(Kappa which, const ChainParameters& p) {
  return kappa<Real>(which, p, delta1<Real>(p), delta2<Real>(p));
}

/// (k-1)(2l+1)(1+4 varpi)(1-kappa_2) / ((k+2l+1)(2l+2)) - 1 - kappa_1, with
/// the o(1) term dropped.
template <typename Real>
Real main_coefficient(const ChainParameters& p, const LogNumber<Real>& kappa1,
                      const LogNumber<Real>& kappa2) {
  const Real k(p.k), l(p.l);
  const Real one_plus = Real(p.varpi.den + 4 * p.varpi.num) / Real(p.varpi.den);
  const Real ratio = (k - 1) * (2 * l + 1) * one_plus / ((k + 2 * l + 1) * (2 * l + 2));
  return ratio * (1 - kappa2.value()) - 1 - kappa1.value();
}

/// c_0 = l(k+2l)/(4l-2) * ((6l-4)/(l(k+2l)) + r + kappa_3 (6 varpi + r)),
/// r = log N / log D, with the o(1) term dropped.
template <typename Real>
Real c0(const ChainParameters& p, const LogNumber<Real>& kappa3) {
  const Real k(p.k), l(p.l);
  const Fraction r = p.effective_log_ratio();
  const Real ratio = Real(r.num) / Real(r.den);
  const Real six_varpi = Real(6 * p.varpi.num) / Real(p.varpi.den);
  const Real lk = l * (k + 2 * l);
  return lk / (4 * l - 2) * ((6 * l - 4) / lk + ratio + kappa3.value() * (six_varpi + ratio));
}

/// ln of the relative change of c_0 caused by its kappa_3 term. Stays finite
/// when kappa_3 itself underflows.
template <typename Real>
Real c0_kappa3_log_relative_effect(const ChainParameters& p, const LogNumber<Real>& kappa3) {
  using std::log;
  const Real k(p.k), l(p.l);
  const Fraction r = p.effective_log_ratio();
  const Real ratio = Real(r.num) / Real(r.den);
  const Real six_varpi = Real(6 * p.varpi.num) / Real(p.varpi.den);
  const Real base = (6 * l - 4) / (l * (k + 2 * l)) + ratio;
  return kappa3.log_magnitude() + log(six_varpi + ratio) - log(base);
}

template <typename Real>
Real s_coefficient(const ChainParameters& p, const Real& main_coeff, const Real& c0_value) {
  return main_coeff - c0_value / Real(p.B);
}

/// floor(log2 B): an n with tau(n) < B has at most this many prime factors.
unsigned prime_factor_bound(std::uint64_t B);

struct VerificationThresholds {
  double max_ln_kappa = -1000.0;
  double min_main_coefficient = 0.0016;
  double max_c0 = 4.6e6;
  double min_s_coefficient = 0.00045;
  unsigned max_prime_factor_bound = 31;
};

struct Check {
  std::string name;
  double value;
  std::string relation;  ///< "<=", ">=", ">"
  double threshold;
  bool pass;
};

struct ConstantsReport {
  ChainParameters params;
  Fraction log_ratio;
  unsigned precision_bits = 64;
  double ln_delta1 = 0, ln_delta2 = 0;
  double ln_kappa1 = 0, ln_kappa2 = 0, ln_kappa3 = 0;
  double main_coefficient = 0;
  double c0 = 0;
  double c0_kappa3_log_relative_effect = 0;
  double s_coefficient = 0;
  unsigned prime_factor_bound = 0;
  std::vector<Check> checks;
  bool verified = false;
  /// Fields whose o(1) terms were dropped.
  std::vector<std::string> asymptotic_fields;
  std::vector<std::string> assumptions;
};

ConstantsReport compute_constants(const ChainParameters& params, Precision precision = Precision::extended,
                                  const VerificationThresholds& thresholds = {});

struct Candidate {
  std::uint64_t k;
  std::uint64_t l;
  std::optional<std::uint64_t> B;  ///< unset: smallest B with s_coefficient > 0
};

struct SearchBudget {
  std::size_t evaluations = 4000;
  /// When nonempty, only these candidates are evaluated.
  std::vector<Candidate> candidates;
  unsigned threads = 1;
  std::optional<Fraction> log_ratio;
};

struct OptimizationResult {
  std::uint64_t k = 0, l = 0, B = 0;
  unsigned bound = 0;
  double s_coefficient = 0;
  double main_coefficient = 0;
  double c0 = 0;
  std::size_t evaluated = 0;
  std::size_t feasible = 0;
};

/// Searches (k, l, B) for a configuration with s_coefficient > 0 and the
/// smallest prime_factor_bound. Ties are broken by (bound, k, l, B)
/// lexicographically. Throws infeasible_error when nothing in the budget is
/// feasible.
OptimizationResult optimize_parameters(Fraction varpi, const SearchBudget& budget = {});

}  // namespace gapsieve::constants
