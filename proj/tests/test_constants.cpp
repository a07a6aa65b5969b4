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

#include <cmath>
#include <random>

#include "doctest.h"
#include "gapsieve/constants.hpp"
#include "gapsieve/log_number.hpp"

using namespace gapsieve;
using namespace gapsieve::constants;
using LN = LogNumber<long double>;

namespace {

// Reference values computed independently with 60-digit mpmath and exact
// big-integer binomials / rational arithmetic.
constexpr double kLnC4500600_600 = 5949.5175023495131901;
constexpr double kLnKappa1 = -3204.4599996261590232;
constexpr double kLnKappa2 = -3186.6195425498841491;
constexpr double kLnKappa3 = -3222.3071178289759558;
constexpr double kLnDelta1 = -15384.630369535011060;
constexpr double kLnDelta2 = 3115.3264337796694232;
constexpr double kMainNoKappa = 0.0016238441244366096;  // 183525389/113019092312
constexpr double kC0 = 4492728.9687248941638;
constexpr double kS = 0.00057779914664245529;
// 1 + sum_{nu=1}^{293} log(293)/nu! summed term by term in double.
constexpr double kDelta2AtK1 = 10.76013737658483;

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }

ChainParameters reference() { return {}; }

}  // namespace

TEST_CASE("LogNumber arithmetic") {
  auto a = LN::from_value(3), b = LN::from_value(-5);
  CHECK(std::abs((a * b).value() + 15) < 1e-15);
  CHECK(std::abs((a / b).value() + 0.6) < 1e-15);
  CHECK(std::abs((a + b).value() + 2) < 1e-15);
  CHECK(std::abs((a - b).value() - 8) < 1e-15);
  CHECK((a - a).is_zero());
  CHECK(std::abs(b.pow(std::int64_t{3}).value() + 125) < 1e-13);
  CHECK(std::abs(a.pow(0.5L).value() - std::sqrt(3.0L)) < 1e-15);
  CHECK(LN::zero() + a == a);
  CHECK(b < a);
  CHECK(LN::zero() < a);
  CHECK_THROWS_AS(a / LN::zero(), singularity_error);
  CHECK_THROWS_AS(LN::zero().log_magnitude(), domain_error);
  // e^{-20000} + e^{-20000} = 2 e^{-20000} far below any float's range.
  auto tiny = LN::from_log(-20000);
  CHECK(std::abs((tiny + tiny).log_magnitude() - (-20000 + std::log(2.0L))) < 1e-12);
  auto huge = LN::from_log(20000);
  CHECK(std::abs((huge * tiny).log_magnitude()) < 1e-12);
}

TEST_CASE("log_binomial") {
  CHECK(std::abs(log_binomial<long double>(4, 2).log_magnitude() - std::log(6.0L)) < 1e-15);
  CHECK(log_binomial<long double>(10, 10).log_magnitude() == 0);
  CHECK(rel_close(static_cast<double>(log_binomial<long double>(4500600, 600).log_magnitude()),
                  kLnC4500600_600, 1e-12));
  CHECK(rel_close(static_cast<double>(log_binomial<long double>(4500600, 4500000).log_magnitude()),
                  kLnC4500600_600, 1e-12));
  CHECK_THROWS_AS(log_binomial<long double>(3, 4), domain_error);
  CHECK_THROWS_AS(log_binomial<long double>(100'000, 20'000), domain_error);
}

TEST_CASE("log_binomial satisfies Pascal's multiplicative step") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 1000; ++i) {
    std::uint64_t r = 1 + rng() % 10'000;
    std::uint64_t n = 2 * r + rng() % 1'000'000'000;
    long double lhs = log_binomial<long double>(n, r).log_magnitude();
    long double rhs = log_binomial<long double>(n - 1, r - 1).log_magnitude() +
                      std::log(static_cast<long double>(n) / r);
    REQUIRE(std::abs(lhs - rhs) <= 1e-9L * std::abs(lhs) + 1e-12L);
  }
}

TEST_CASE("delta1 and delta2") {
  ChainParameters p;
  p.k = 1;
  CHECK(std::abs(delta1<long double>(p).log_magnitude() + std::log1p(4.0L / 1168)) < 1e-18);
  p.k = 0;
  CHECK(delta1<long double>(p).log_magnitude() == 0);
  p.k = 1;
  CHECK(rel_close(static_cast<double>(delta2<long double>(p).value()), kDelta2AtK1, 1e-12));
  CHECK(rel_close(static_cast<double>(delta1<long double>(reference()).log_magnitude()), kLnDelta1, 1e-14));
  CHECK(rel_close(static_cast<double>(delta2<long double>(reference()).log_magnitude()), kLnDelta2, 1e-13));
}

TEST_CASE("kappa at the reference parameters") {
  auto p = reference();
  long double k1 = kappa<long double>(Kappa::one, p).log_magnitude();
  long double k2 = kappa<long double>(Kappa::two, p).log_magnitude();
  long double k3 = kappa<long double>(Kappa::three, p).log_magnitude();
  CHECK(k1 <= -1000);
  CHECK(k2 <= -1000);
  CHECK(k3 <= -1000);
  CHECK(rel_close(static_cast<double>(k1), kLnKappa1, 1e-12));
  CHECK(rel_close(static_cast<double>(k2), kLnKappa2, 1e-12));
  CHECK(rel_close(static_cast<double>(k3), kLnKappa3, 1e-12));
}

TEST_CASE("kappa with delta_2 forced to zero") {
  ChainParameters p;
  p.k = 2;
  p.l = 1;
  auto d1 = delta1<long double>(p);
  long double got = kappa<long double>(Kappa::one, p, d1, LN::zero()).value();
  long double want = std::pow(1 + 4.0L / 1168, -2.0L) * (1 + std::log(293.0L) * 2) * 6;
  CHECK(std::abs(got - want) < 1e-15L * want);
}

TEST_CASE("main_coefficient") {
  auto p = reference();
  auto k1 = kappa<long double>(Kappa::one, p), k2 = kappa<long double>(Kappa::two, p);
  CHECK(main_coefficient<long double>(p, k1, k2) >= 0.0016L);
  CHECK(rel_close(static_cast<double>(main_coefficient<long double>(p, LN::zero(), LN::zero())),
                  kMainNoKappa, 1e-12));
  ChainParameters toy;
  toy.k = 2;
  toy.l = 1;
  toy.varpi = Fraction(0, 1);
  CHECK(std::abs(main_coefficient<long double>(toy, LN::zero(), LN::zero()) + 0.85L) < 1e-18L);
}

TEST_CASE("main_coefficient and s_coefficient are monotone decreasing") {
  auto p = reference();
  long double prev = 1e9L;
  for (double lk : {-50.0, -20.0, -8.0, -3.0, -1.0}) {
    long double v = main_coefficient<long double>(p, LN::from_log(lk), LN::zero());
    CHECK(v < prev);
    prev = v;
  }
  prev = 1e9L;
  for (double lk : {-50.0, -20.0, -8.0, -3.0, -1.0}) {
    long double v = main_coefficient<long double>(p, LN::zero(), LN::from_log(lk));
    CHECK(v < prev);
    prev = v;
  }
  prev = 1e9L;
  for (long double c : {1e5L, 1e6L, 4e6L, 5e6L, 1e7L}) {
    long double v = s_coefficient<long double>(p, 0.0016L, c);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("c0") {
  auto p = reference();
  long double c = c0<long double>(p, kappa<long double>(Kappa::three, p));
  CHECK(c <= 4.6e6L);
  CHECK(rel_close(static_cast<double>(c), kC0, 1e-12));
  ChainParameters toy;
  toy.k = 1;
  toy.l = 1;
  toy.varpi = Fraction(0, 1);
  toy.log_ratio = Fraction(4, 1);
  CHECK(std::abs(c0<long double>(toy, LN::zero()) - 7) < 1e-17L);
  CHECK(c0_kappa3_log_relative_effect<long double>(p, LN::from_log(-1000)) < -400 * std::log(10.0L));
}

TEST_CASE("s_coefficient and prime_factor_bound") {
  auto p = reference();
  auto r = compute_constants(p);
  CHECK(r.s_coefficient >= 0.00045);
  CHECK(rel_close(r.s_coefficient, kS, 1e-10));
  CHECK(prime_factor_bound(4294967295ULL) == 31);
  CHECK(prime_factor_bound(1024) == 10);
  CHECK(prime_factor_bound(2) == 1);
  CHECK_THROWS_AS(prime_factor_bound(1), domain_error);
}

TEST_CASE("compute_constants verifies the chain at the reference parameters") {
  auto r = compute_constants(reference());
  CHECK(r.verified);
  CHECK(r.prime_factor_bound == 31);
  for (const auto& c : r.checks) CHECK_MESSAGE(c.pass, c.name);
  CHECK(r.log_ratio == Fraction(1168, 293));
}

TEST_CASE("reported values are stable under doubled precision") {
  auto lo = compute_constants(reference(), Precision::extended);
  for (Precision hi : {Precision::quad, Precision::octuple}) {
    auto r = compute_constants(reference(), hi);
    CHECK(rel_close(r.ln_delta1, lo.ln_delta1, 1e-6));
    CHECK(rel_close(r.ln_delta2, lo.ln_delta2, 1e-6));
    CHECK(rel_close(r.ln_kappa1, lo.ln_kappa1, 1e-6));
    CHECK(rel_close(r.ln_kappa2, lo.ln_kappa2, 1e-6));
    CHECK(rel_close(r.ln_kappa3, lo.ln_kappa3, 1e-6));
    CHECK(rel_close(r.main_coefficient, lo.main_coefficient, 1e-6));
    CHECK(rel_close(r.c0, lo.c0, 1e-6));
    CHECK(rel_close(r.s_coefficient, lo.s_coefficient, 1e-6));
  }
}

TEST_CASE("parameter validation") {
  ChainParameters p;
  p.k = 1;
  CHECK_THROWS_AS(p.validate(), validation_error);
  p = reference();
  p.varpi = Fraction(1, 4);
  CHECK_THROWS_AS(p.validate(), validation_error);
  p = reference();
  p.B = 1;
  CHECK_THROWS_AS(p.validate(), validation_error);
  CHECK(precision_from_bits(53) == Precision::extended);
  CHECK(precision_from_bits(128) == Precision::octuple);
  CHECK(precision_from_bits(100) == Precision::quad);
  CHECK_THROWS_AS(precision_from_bits(1000), validation_error);
}

TEST_CASE("optimize_parameters") {
  SearchBudget single;
  single.candidates = {{4'500'000, 300, 4'294'967'295ULL}};
  auto passthrough = optimize_parameters(Fraction(1, 1168), single);
  CHECK(passthrough.bound == 31);
  CHECK(passthrough.k == 4'500'000);

  unsigned previous = ~0u;
  for (Fraction v : {Fraction(1, 2336), Fraction(1, 1168), Fraction(1, 584)}) {
    auto r = optimize_parameters(v);
    CHECK(r.s_coefficient > 0);
    CHECK(r.bound <= previous);
    if (v == Fraction(1, 1168)) CHECK(r.bound <= 31);
    previous = r.bound;
  }

  SearchBudget hopeless;
  hopeless.candidates = {{10, 1, std::nullopt}};
  CHECK_THROWS_AS(optimize_parameters(Fraction(1, 1168), hopeless), infeasible_error);
}

TEST_CASE("optimizer is independent of the worker count") {
  SearchBudget a;
  a.evaluations = 600;
  SearchBudget b = a;
  b.threads = 4;
  auto ra = optimize_parameters(Fraction(1, 1168), a);
  auto rb = optimize_parameters(Fraction(1, 1168), b);
  CHECK(ra.k == rb.k);
  CHECK(ra.l == rb.l);
  CHECK(ra.B == rb.B);
}

TEST_CASE("parse_fraction") {
  CHECK(parse_fraction("1/1168") == Fraction(1, 1168));
  CHECK(parse_fraction("2/4") == Fraction(1, 2));
  CHECK(parse_fraction("7") == Fraction(7, 1));
  CHECK(parse_fraction("3.25") == Fraction(13, 4));
  CHECK_THROWS_AS(parse_fraction("1/0"), validation_error);
  CHECK_THROWS_AS(parse_fraction("x/2"), validation_error);
  CHECK_THROWS_AS(parse_fraction(""), validation_error);
}
