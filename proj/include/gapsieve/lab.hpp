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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gapsieve/fraction.hpp"
#include "gapsieve/tuple_types.hpp"
#include "json.hpp"

namespace gapsieve::lab {

enum class CongruenceMode { normalized_functions, extra_congruence };

std::string to_string(CongruenceMode mode);
CongruenceMode parse_congruence_mode(const std::string& text);

/// Toy-scale limits. These are configuration, not constants of the method.
struct LabCaps {
  std::uint64_t max_N = 1'000'000;
  std::size_t max_k = 5;
  unsigned max_l = 3;
  std::size_t max_support = 40;
  std::size_t max_msum_primes = 12;
  std::size_t max_subset = 25;
  std::uint64_t max_form_value = 10'000'000'000'000ULL;
  std::uint64_t max_divisor_range = 10'000'000;
  std::uint64_t max_crt_combinations = 1'000'000;
};

/// Derived sieve parameters for one toy run.
struct SieveParams {
  tuples::AdmissibleTuple tuple;
  std::uint64_t N = 0;
  std::size_t k = 0;
  unsigned l = 0;
  Fraction varpi;
  std::uint64_t A = 1;
  std::uint64_t a0 = 1;
  long double D = 0, D1 = 0, D0 = 0;
  /// Divisor bound; nullopt means B = infinity (the tau term drops out).
  std::optional<std::uint64_t> B;
  std::vector<std::uint64_t> support_primes;
  CongruenceMode mode = CongruenceMode::normalized_functions;
  /// Range parameter of the second A3 companion sum; defaults to A N.
  long double x = 0;
  LabCaps caps;

  /// Normalizes `offsets` and derives D = N^{1/4+varpi}/A, D1 = N^varpi/A.
  /// Collects every violated condition into one validation_error.
  static SieveParams make(const tuples::OffsetTuple& offsets, std::uint64_t N, unsigned l, Fraction varpi,
                          std::optional<std::uint64_t> B,
                          CongruenceMode mode = CongruenceMode::normalized_functions,
                          std::optional<long double> x = std::nullopt, const LabCaps& caps = {});

  /// True when d is a squarefree product of support primes with d < D.
  bool in_weight_support(std::uint64_t d) const;
};

/// lambda_d keyed by d. Absent keys mean 0. Evaluators only ever look up
/// d in the weight support, so entries outside it have no effect.
struct WeightTable {
  std::map<std::uint64_t, long double> entries;
  /// Uniform bound on the floating error of any single entry.
  long double entry_error = 0;

  static WeightTable build(const SieveParams& params);
  long double at(std::uint64_t d) const;
};

/// (log(D/y))^{k+l}/(k+l)! for 0 < y < D, else 0.
long double g_eval(long double y, const SieveParams& params);
/// mu(d) g(d) on the weight support, else 0.
long double lambda_weight(std::uint64_t d, const SieveParams& params);

/// Sum of lambda_d over d | Pi(n) in the weight support, by pruned subset
/// enumeration over the support primes dividing Pi(n). Throws scale_error
/// if more than caps.max_subset support primes divide Pi(n).
long double weighted_sieve_value(std::uint64_t n, const SieveParams& params, const WeightTable& weights);
/// The divisors d visited by weighted_sieve_value, in ascending order.
std::vector<std::uint64_t> sieve_value_divisors(std::uint64_t n, const SieveParams& params);

/// Neumaier sum with a running bound on the accumulated floating error.
struct CompensatedSum {
  long double value = 0;
  long double abs_sum = 0;
  long double term_error = 0;
  std::uint64_t terms = 0;

  void add(long double x, long double x_error = 0);
  void merge(const CompensatedSum& other);
  long double finish() const { return value + comp_; }
  long double error_bound() const;

 private:
  long double comp_ = 0;
};

/// Per-n arithmetic of the forms over [N, 2N), produced by sieving each
/// progression A n + b_i.
struct FormData {
  std::uint64_t N = 0;
  std::vector<std::uint32_t> tau_last;    // tau(L_k(n))
  std::vector<std::uint8_t> prime_bits;   // bit i: L_{i+1}(n) prime
  std::vector<std::uint8_t> squarefree;   // Pi(n) squarefree
  std::vector<std::uint8_t> in_class;     // n = a0 mod A
  std::vector<std::uint64_t> support_mask;  // bit j: support prime j | Pi(n)
};

FormData compute_form_data(const SieveParams& params, unsigned threads = 1);

struct SieveSums {
  CompensatedSum S, Sprime, S1, S3, S3_all;
  std::vector<CompensatedSum> S2;  // one per L_i, i = 1..k
  std::size_t distinct_masks = 0;
};

SieveSums evaluate_sums(const SieveParams& params, const WeightTable& weights, const FormData& data,
                        unsigned threads = 1);

long double S_exact(const SieveParams& params, const WeightTable& weights, unsigned threads = 1);
long double Sprime_exact(const SieveParams& params, const WeightTable& weights, unsigned threads = 1);
long double S1_exact(const SieveParams& params, const WeightTable& weights, unsigned threads = 1);
/// S2 for the form L_i with 1 <= i <= k.
long double S2_exact(std::size_t i, const SieveParams& params, const WeightTable& weights, unsigned threads = 1);
long double S3_exact(const SieveParams& params, const WeightTable& weights, unsigned threads = 1);

/// S1 as sum_{d,e} lambda_d lambda_e #{n : [d,e] | Pi(n)}, with the counts
/// from root sets mod p combined by CRT.
long double S1_bilinear(const SieveParams& params, const WeightTable& weights);
/// S3 as sum_{d,e} lambda_d lambda_e sum_{n : [d,e] | Pi(n)} tau(L_k(n)),
/// striding over the CRT residues.
long double S3_bilinear(const SieveParams& params, const WeightTable& weights, const FormData& data);

struct MSums {
  long double M1 = 0, M2 = 0, M3 = 0;
};

/// Double subset sums over the support with rho3([d,e])/[d,e] taken from
/// exact rationals. Throws scale_error above caps.max_msum_primes.
MSums m_sums(const SieveParams& params, const WeightTable& weights, unsigned threads = 1);
/// M1 with e as the outer loop and rho3 recomputed per lcm.
long double M1_reordered(const SieveParams& params, const WeightTable& weights);
/// M1 with the companion weights mu(d) g(d) on every squarefree d < D,
/// evaluated through the diagonal form sum_r h(r) (sum_{r | d} lambda_d f(d))^2.
long double M1_star_exact(const SieveParams& params);
/// Same diagonal form restricted to the weight table's support; equals M1.
long double M1_diagonal(const SieveParams& params, const WeightTable& weights);

/// sum over squarefree r coprime to dA with dr < D of mu(r) rho3(r)/r g(dr),
/// evaluated at the given D (defaults to params.D).
long double A3_eval(std::uint64_t d, const SieveParams& params, std::optional<long double> D = std::nullopt);

struct A3Sample {
  std::uint64_t d = 0;
  long double A3 = 0, main_term = 0, ratio = 0;
};

struct A3TrendPoint {
  long double D = 0;
  long double A3 = 0;
  long double main_singular = 0;
  long double main_dimension = 0;
  long double ratio_singular = 0;
  long double ratio_dimension = 0;
  /// 1/log D: the shape of the expected relative error with constant 1.
  long double slack = 0;
};

struct A3Report {
  /// The singular-series constant S A/phi(A), and the Euler product matching a sum of
  /// dimension k+1 (they agree only for k = 1).
  long double constant_singular = 0;
  long double constant_dimension = 0;
  std::vector<A3Sample> samples;
  std::vector<A3TrendPoint> trend;
  bool trend_monotone_singular = false;
  bool trend_monotone_dimension = false;
  long double second_sum = 0;
  long double second_main = 0;
  /// (log x^{1/4})^{k+1}/(k+1)! divided by the dimension-(k+1) constant.
  long double second_main_dimension = 0;
};

A3Report a3_convergence_report(const SieveParams& params, const std::vector<std::uint64_t>& sample_ds,
                                       unsigned decades = 3);

/// (N phi(A)/A)((log N) M1 - 2 M2 + M3) / S3 over all n.
long double consistency_ratio(const SieveParams& params, const MSums& m, long double S3_all);

struct LabConfig {
  tuples::OffsetTuple tuple;
  std::uint64_t N = 100'000;
  unsigned l = 1;
  Fraction varpi{1, 3};
  std::optional<std::uint64_t> B;
  CongruenceMode mode = CongruenceMode::normalized_functions;
  std::optional<long double> x;
  LabCaps caps;
  std::vector<std::uint64_t> sample_ds{1};
  unsigned decades = 3;
  std::size_t oracle_samples = 64;

  SieveParams params() const;
};

/// Parses a lab config object. Relative tuple_file paths resolve against
/// base_dir. Unknown keys are rejected.
LabConfig parse_lab_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
LabConfig read_lab_config(const std::filesystem::path& path);

struct OracleDeltas {
  long double S1_bilinear = 0, S1_rel_delta = 0;
  long double S3_bilinear = 0, S3_rel_delta = 0;
  long double M1_reordered = 0, M1_rel_delta = 0;
  std::size_t sieve_value_checked = 0, sieve_value_mismatches = 0;
};

struct Decomposition {
  long double lhs = 0, rhs = 0, residual = 0, tolerance = 0;
  bool holds = false;
};

struct LabReport {
  LabConfig config;
  SieveParams params;
  std::size_t weight_entries = 0;
  SieveSums sums;
  MSums m;
  long double M1_star = 0;
  long double M1_star_literal = 0;
  Decomposition decomposition;
  OracleDeltas oracles;
  long double consistency = 0;
  A3Report a3;
};

LabReport run_experiment(const LabConfig& config, unsigned threads = 1);

struct ConsistencyPoint {
  std::uint64_t N = 0;
  std::size_t support = 0;
  long double ratio = 0;
  /// 1/log N, the relative size of the O(1) correction to M1.
  long double slack = 0;
};

/// Consistency ratio for the config's tuple at each N in turn.
std::vector<ConsistencyPoint> consistency_trend(const LabConfig& base, const std::vector<std::uint64_t>& Ns,
                                      unsigned threads = 1);

/// True when every step either strictly shrinks |r_j - 1| or lands inside
/// the slack band |r_j - 1| <= slack_j, and the last point is closer to 1
/// than the first. An empty slack vector means no band.
bool approaches_one(const std::vector<long double>& ratios, const std::vector<long double>& slack = {});

nlohmann::ordered_json report_json(const LabReport& report);
std::string report_csv(const LabReport& report);

}  // namespace gapsieve::lab
