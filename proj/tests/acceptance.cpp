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


// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Every check uses oracles written here rather than the
// library's own cross-checks where that is possible.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gapsieve/arithmetic.hpp"
#include "gapsieve/cli.hpp"
#include "gapsieve/constants.hpp"
#include "gapsieve/errors.hpp"
#include "gapsieve/lab.hpp"
#include "gapsieve/prime_engine.hpp"
#include "gapsieve/tuple.hpp"

using namespace gapsieve;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

long double rel(long double a, long double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300L});
}

std::vector<bool> composite_table(std::uint64_t limit) {
  std::vector<bool> composite(limit + 1, false);
  composite[0] = composite[1] = true;
  for (std::uint64_t p = 2; p * p <= limit; ++p)
    if (!composite[p])
      for (std::uint64_t m = p * p; m <= limit; m += p) composite[m] = true;
  return composite;
}

Verdict prime_count_chain() {
  Verdict v;
  primes::SieveConfig cfg;
  cfg.ceiling = 200'000'000;
  const auto t0 = Clock::now();
  const auto hi = primes::prime_count(100'000'000, cfg);
  const auto lo = primes::prime_count(4'500'000, cfg);
  const auto mono = primes::prime_count_monolithic(100'000'000);
  const double t = seconds_since(t0);
  v.detail << "pi(1e8)=" << hi << " pi(4.5e6)=" << lo << " difference=" << hi - lo << " monolithic=" << mono
           << " time=" << t << "s";
  v.require(hi - lo >= 4'500'000, "difference >= 4.5e6");
  v.require(hi == mono, "implementations agree");
  v.require(t <= 60, "runtime <= 60 s");
  return v;
}

Verdict tuple_chain() {
  Verdict v;
  primes::SieveConfig cfg;
  cfg.ceiling = 200'000'000;
  cfg.threads = 4;
  const auto t0 = Clock::now();
  const auto built = tuples::construct_consecutive_prime_tuple(4'500'000, 4'500'000, cfg);
  const bool certificate = tuples::check_admissible_shifted_primes(built.tuple, built.shift);
  const auto prefix = tuples::check_admissible(built.tuple.prefix(10'000), tuples::CheckMode::full, 4);
  const double t = seconds_since(t0);
  v.detail << "k=" << built.tuple.size() << " width=" << built.tuple.width() << " shift=" << built.shift
           << " certificate=" << certificate << " prefix(1e4) admissible=" << prefix.admissible << " time=" << t << "s";
  v.require(built.tuple.size() == 4'500'000, "k = 4.5e6");
  v.require(built.tuple.width() <= 100'000'000, "width <= 1e8");
  v.require(certificate, "shifted-primes certificate");
  v.require(prefix.admissible, "prefix admissible");
  v.require(t <= 300, "runtime <= 5 min");
  return v;
}

Verdict constants_chain() {
  Verdict v;
  constants::ChainParameters p;
  p.k = 4'500'000;
  p.l = 300;
  p.varpi = Fraction(1, 1168);
  p.B = 4'294'967'295ULL;
  const auto t0 = Clock::now();
  const auto r = constants::compute_constants(p, constants::Precision::extended);
  const double t = seconds_since(t0);
  v.detail << "ln kappa=(" << r.ln_kappa1 << ", " << r.ln_kappa2 << ", " << r.ln_kappa3
           << ") main=" << r.main_coefficient << " c0=" << r.c0 << " s=" << r.s_coefficient
           << " bound=" << r.prime_factor_bound;
  v.require(r.ln_kappa1 <= -1000 && r.ln_kappa2 <= -1000 && r.ln_kappa3 <= -1000, "ln kappa <= -1000");
  v.require(r.main_coefficient >= 0.0016, "main coefficient >= 0.0016");
  v.require(r.c0 <= 4.6e6, "c0 <= 4.6e6");
  v.require(r.s_coefficient >= 0.00045, "s >= 0.00045");
  v.require(r.prime_factor_bound == 31, "bound = 31");
  v.require(t <= 1, "runtime <= 1 s");

  long double worst = 0;
  for (auto prec : {constants::Precision::quad, constants::Precision::octuple}) {
    const auto q = constants::compute_constants(p, prec);
    for (auto [a, b] : {std::pair{r.ln_kappa1, q.ln_kappa1}, {r.ln_kappa2, q.ln_kappa2}, {r.ln_kappa3, q.ln_kappa3},
                        {r.main_coefficient, q.main_coefficient}, {r.c0, q.c0}, {r.s_coefficient, q.s_coefficient}})
      worst = std::max(worst, rel(a, b));
    v.require(q.prime_factor_bound == r.prime_factor_bound, "bound stable under precision");
  }
  v.detail << " max rel change at 113/237 bits=" << static_cast<double>(worst) << " time=" << t << "s";
  v.require(worst <= 1e-6, "stable to 1e-6 under doubled precision");
  return v;
}

// Independent divisor enumeration: factor the forms by trial division and
// sum mu(d) (log D/d)^{k+l}/(k+l)! over squarefree d < D whose prime
// factors all lie in the support.
std::pair<long double, std::vector<std::uint64_t>> divisor_oracle(std::uint64_t n, const lab::SieveParams& p) {
  std::vector<std::uint64_t> primes_of_product;
  for (std::size_t i = 0; i < p.k; ++i) {
    std::uint64_t x = static_cast<std::uint64_t>(p.tuple.form_value(i, n));
    for (std::uint64_t q = 2; q * q <= x; ++q)
      if (x % q == 0) {
        primes_of_product.push_back(q);
        while (x % q == 0) x /= q;
      }
    if (x > 1) primes_of_product.push_back(x);
  }
  std::sort(primes_of_product.begin(), primes_of_product.end());
  primes_of_product.erase(std::unique(primes_of_product.begin(), primes_of_product.end()), primes_of_product.end());
  std::vector<std::uint64_t> support;
  for (auto q : primes_of_product)
    if (std::find(p.support_primes.begin(), p.support_primes.end(), q) != p.support_primes.end())
      support.push_back(q);

  const unsigned exponent = static_cast<unsigned>(p.k + p.l);
  long double factorial = 1;
  for (unsigned i = 2; i <= exponent; ++i) factorial *= i;
  long double sum = 0;
  std::vector<std::uint64_t> used;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << support.size()); ++mask) {
    long double d = 1;
    int sign = 1;
    for (std::size_t j = 0; j < support.size(); ++j)
      if (mask >> j & 1) {
        d *= support[j];
        sign = -sign;
      }
    if (!(d < p.D)) continue;
    used.push_back(static_cast<std::uint64_t>(d));
    sum += sign * std::pow(std::log(p.D / d), static_cast<long double>(exponent)) / factorial;
  }
  std::sort(used.begin(), used.end());
  return {sum, used};
}

Verdict oracle_equivalence() {
  Verdict v;
  const std::vector<std::vector<std::uint64_t>> shapes{{0},          {0, 2},       {0, 4},          {0, 6},
                                                       {0, 2, 6},    {0, 4, 6},    {0, 2, 8},       {0, 4, 6, 10},
                                                       {0, 2, 6, 8}, {0, 6, 8, 14}, {0, 2, 6, 8, 12}};
  const std::vector<Fraction> varpis{{1, 3}, {1, 4}, {1, 5}, {2, 7}, {3, 10}};
  std::mt19937_64 rng(20260419);
  std::size_t configs = 0, samples = 0, pattern_mismatch = 0, decomposition_fail = 0;
  long double worst_S1 = 0, worst_M1 = 0, worst_value = 0;
  while (configs < 24) {
    lab::LabConfig c;
    c.tuple = tuples::OffsetTuple(shapes[rng() % shapes.size()]);
    c.N = 5'000 + rng() % 200'000;
    c.l = 1 + rng() % 3;
    c.varpi = varpis[rng() % varpis.size()];
    c.B = rng() % 4 == 0 ? std::nullopt : std::optional<std::uint64_t>(2 + rng() % 5000);
    if (rng() % 2) c.mode = lab::CongruenceMode::extra_congruence;
    c.oracle_samples = 0;
    lab::SieveParams p;
    try {
      p = c.params();
    } catch (const gapsieve::error&) {
      continue;
    }
    if (p.support_primes.empty() || p.support_primes.size() > 10) continue;
    ++configs;
    const auto r = lab::run_experiment(c, 2);
    const auto w = lab::WeightTable::build(p);
    worst_S1 = std::max(worst_S1, rel(lab::S1_bilinear(p, w), r.sums.S1.finish()));
    worst_M1 = std::max(worst_M1, rel(lab::M1_reordered(p, w), r.m.M1));
    decomposition_fail += !r.decomposition.holds;
    for (int s = 0; s < 32; ++s) {
      const std::uint64_t n = p.N + rng() % p.N;
      const auto [value, used] = divisor_oracle(n, p);
      pattern_mismatch += used != lab::sieve_value_divisors(n, p);
      worst_value = std::max(worst_value, std::abs(value - lab::weighted_sieve_value(n, p, w)) /
                                              std::max<long double>(1, std::abs(value)));
      ++samples;
    }
  }
  v.detail << configs << " configs, S1 rel delta<=" << static_cast<double>(worst_S1)
           << ", M1 rel delta<=" << static_cast<double>(worst_M1) << ", sieve values " << samples - pattern_mismatch
           << "/" << samples << " same divisor pattern (max delta " << static_cast<double>(worst_value)
           << "), decomposition violated on " << decomposition_fail;
  v.require(configs >= 20, ">= 20 configs");
  v.require(worst_S1 <= 1e-9, "S1 bilinear");
  v.require(worst_M1 <= 1e-10, "M1 reordered");
  v.require(pattern_mismatch == 0 && worst_value <= 1e-12, "divisor oracle");
  v.require(decomposition_fail == 0, "decomposition inequality");
  return v;
}

std::string series(const std::vector<long double>& xs) {
  std::ostringstream s;
  s.precision(4);
  for (std::size_t i = 0; i < xs.size(); ++i) s << (i ? "," : "") << static_cast<double>(xs[i]);
  return s.str();
}

Verdict trend_suites() {
  Verdict v;
  lab::LabConfig base;
  base.tuple = tuples::OffsetTuple({0, 2, 6});
  base.varpi = Fraction(1, 3);
  base.l = 1;
  base.B = 1000;
  const auto l1 = lab::consistency_trend(base, {10'000, 100'000, 1'000'000}, 4);
  std::vector<long double> r1, s1;
  for (const auto& t : l1) {
    r1.push_back(t.ratio);
    s1.push_back(t.slack);
  }
  const bool consistency = lab::approaches_one(r1, s1);

  lab::LabConfig k1;
  k1.tuple = tuples::OffsetTuple({0});
  k1.varpi = Fraction(1, 4);
  k1.N = 100'000;
  const auto l2 = lab::a3_convergence_report(k1.params(), {1}, 3);
  std::vector<long double> r2;
  for (const auto& t : l2.trend) r2.push_back(t.ratio_singular);

  const auto l2k3 = lab::a3_convergence_report(base.params(), {1}, 3);
  std::vector<long double> singular3, dim3;
  for (const auto& t : l2k3.trend) {
    singular3.push_back(t.ratio_singular);
    dim3.push_back(t.ratio_dimension);
  }
  v.detail << "consistency ratio over N=1e4..1e6: " << series(r1) << "; A3 ratio over D decades (k=1): " << series(r2)
           << "; k=3 ratio to singular-series constant " << series(singular3) << ", to dimension-(k+1) constant "
           << series(dim3);
  v.require(consistency, "consistency trend");
  v.require(l2.trend_monotone_singular, "a3 trend");
  return v;
}

Verdict arithmetic_suite() {
  Verdict v;
  std::size_t mismatches = 0;
  for (std::uint64_t n = 1; n <= 10'000; ++n) {
    std::uint64_t tau = 0, phi = 0;
    for (std::uint64_t d = 1; d <= n; ++d) {
      tau += n % d == 0;
      phi += std::gcd(n, d) == 1;
    }
    unsigned omega = 0, big_omega = 0;
    bool squarefree = true;
    std::uint64_t m = n;
    for (std::uint64_t q = 2; q <= m; ++q) {
      if (m % q) continue;
      ++omega;
      unsigned e = 0;
      while (m % q == 0) {
        m /= q;
        ++e;
      }
      big_omega += e;
      squarefree &= e == 1;
    }
    const int mu = squarefree ? (omega % 2 ? -1 : 1) : 0;
    mismatches += arith::tau(n) != tau || arith::euler_phi(n) != phi || arith::omega(n) != omega ||
                  arith::big_omega(n) != big_omega || arith::mobius(n) != mu;
  }

  // Root counts for forms n + 1 + h_i (A = 1): brute force mod every prime
  // up to 1e4, the library count checked against the product over primes for
  // every squarefree q <= 1e4, and the CRT itself checked by brute force
  // for q <= 1000.
  const auto composite = composite_table(10'000);
  std::mt19937_64 rng(6);
  std::size_t root_mismatch = 0, moduli = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 1 + rng() % 12;
    std::vector<std::uint64_t> h{0};
    while (h.size() < k) h.push_back(h.back() + 1 + rng() % 40);
    const auto t = tuples::AdmissibleTuple::from_residues(tuples::OffsetTuple(h), {});
    auto brute = [&](std::uint64_t q) {
      std::uint64_t roots = 0;
      for (std::uint64_t n = 0; n < q; ++n) {
        std::uint64_t prod = 1 % q;
        for (std::size_t i = 0; i < k; ++i) prod = prod * ((n + t.b(i)) % q) % q;
        roots += prod == 0;
      }
      return roots;
    };
    std::vector<std::uint64_t> nu(10'001, 0);
    for (std::uint64_t p = 2; p <= 10'000; ++p)
      if (!composite[p]) {
        nu[p] = brute(p);
        root_mismatch += arith::count_roots_mod_p(t, p) != nu[p];
      }
    for (std::uint64_t q = 1; q <= 10'000; ++q) {
      std::uint64_t m = q, expected = 1;
      bool squarefree = true;
      for (std::uint64_t p = 2; p <= m && squarefree; ++p)
        if (m % p == 0) {
          m /= p;
          squarefree = m % p != 0;
          expected *= nu[p];
        }
      if (!squarefree) continue;
      ++moduli;
      const auto got = arith::count_roots_squarefree(t, q);
      root_mismatch += got != expected;
      if (q <= 1000) root_mismatch += got != brute(q);
    }
  }
  v.detail << "mu/tau/omega/Omega/phi mismatches for n<=1e4: " << mismatches << "; root-count mismatches over "
           << moduli << " (tuple, squarefree q) pairs: " << root_mismatch;
  v.require(mismatches == 0, "arithmetic functions");
  v.require(root_mismatch == 0, "root counts");
  return v;
}

Verdict singular_series_check() {
  Verdict v;
  // Twin-prime constant from its own sieve: product over odd p <= P of
  // 1 - 1/(p-1)^2, truncation error below sum_{n > P} 1/(n-1)^2 < 1/(P-2).
  constexpr std::uint64_t P = 20'000'000;
  const auto composite = composite_table(P);
  long double log_c2 = 0;
  for (std::uint64_t p = 3; p <= P; ++p)
    if (!composite[p]) log_c2 += std::log1p(-1.0L / ((p - 1.0L) * (p - 1.0L)));
  const long double c2 = std::exp(log_c2);
  const long double c2_truncation = c2 * (std::exp(1.0L / (P - 2)) - 1);

  const auto s = tuples::singular_series(tuples::normalize(tuples::OffsetTuple({0, 2})), 1'000'000);
  const long double value = s.log_value.value();
  const long double residual = std::abs(value - 4 * c2);
  // The reported bound is on the log; translate to an absolute bound.
  const long double covered = value * std::expm1(static_cast<long double>(s.tail_bound)) + 4 * c2_truncation;
  v.detail.precision(12);
  v.detail << "S({0,2})=" << static_cast<double>(value) << " 4*C2=" << static_cast<double>(4 * c2)
           << " residual=" << static_cast<double>(residual) << " tail bound covers " << static_cast<double>(covered);
  v.require(residual <= 1e-3, "within 1e-3");
  v.require(residual <= covered, "tail bound covers the residual");
  return v;
}

Verdict determinism() {
  Verdict v;
  const std::string dir = std::filesystem::temp_directory_path() / "gapsieve_acceptance";
  std::filesystem::create_directories(dir);
  const std::string cfg = dir + "/lab.json", tuple_file = dir + "/tuple.json";
  std::ofstream(cfg) << R"({"tuple":[0,4,6,10],"N":300000,"varpi":"1/4","l":2,"B":200,)"
                     << R"("congruence_mode":"extra_congruence","a3":{"sample_ds":[1,7]}})";
  std::ofstream(tuple_file) << R"({"offsets":[0,2,6,8,12,18,20,26,30,32]})";
  const std::vector<std::vector<std::string>> commands{
      {"primes", "count", "1e8"},
      {"primes", "list", "1e6", "1001000"},
      {"tuple", "build", "--k", "20000", "--start", "1e6"},
      {"tuple", "verify", tuple_file},
      {"tuple", "verify", tuple_file, "--mode", "sampled"},
      {"tuple", "normalize", tuple_file},
      {"tuple", "sseries", tuple_file, "--cutoff", "1e6"},
      {"constants", "verify"},
      {"constants", "optimize", "--budget", "300"},
      {"lab", "run", "--config", cfg},
      {"verify-theorem"},
  };
  std::size_t identical = 0;
  for (const auto& cmd : commands) {
    std::vector<std::string> outputs;
    for (const char* workers : {"1", "4", "16"}) {
      std::vector<std::string> args{"--json", "--threads", workers};
      args.insert(args.end(), cmd.begin(), cmd.end());
      const auto o = cli::dispatch(args);
      outputs.push_back(std::to_string(o.exit_code) + "\n" + o.out);
    }
    const bool same = outputs[0] == outputs[1] && outputs[0] == outputs[2];
    identical += same;
    if (!same) v.detail << " differs: " << cmd[0] << " " << cmd[1];
  }
  std::filesystem::remove_all(dir);
  v.detail << identical << "/" << commands.size() << " reports byte-identical at 1, 4 and 16 workers";
  v.require(identical == commands.size(), "byte-identical reports");
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"prime-count chain", prime_count_chain},     {"tuple chain", tuple_chain},
      {"constants chain", constants_chain},         {"oracle equivalence", oracle_equivalence},
      {"trend suites", trend_suites},               {"arithmetic functions", arithmetic_suite},
      {"singular series", singular_series_check},   {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << "exception: " << e.what();
    }
    failed += !v.pass;
    std::printf("%s %zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), v.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
