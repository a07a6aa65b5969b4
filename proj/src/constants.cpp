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

#include "gapsieve/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <tuple>

#include "gapsieve/arithmetic.hpp"
#include "gapsieve/parallel.hpp"

namespace gapsieve::constants {

Precision precision_from_bits(unsigned bits) {
  if (bits <= 64) return Precision::extended;
  if (bits <= 113) return Precision::quad;
  if (bits <= 237) return Precision::octuple;
  throw validation_error("precision of " + std::to_string(bits) +
                         " bits is not supported (maximum 237)");
}

void ChainParameters::validate() const {
  if (k < 2) throw validation_error("k must be >= 2");
  if (l < 1) throw validation_error("l must be >= 1");
  if (!(Fraction(0, 1) < varpi) || !(varpi < Fraction(1, 4)))
    throw validation_error("varpi must satisfy 0 < varpi < 1/4");
  if (B < 2) throw validation_error("B must be >= 2");
  if (log_ratio && !(Fraction(0, 1) < *log_ratio))
    throw validation_error("log N / log D must be positive");
  if (2 * l + 2 > kMaxBinomialIndex)
    throw validation_error("l too large: binomial lower index 2l+2 exceeds 10^4");
}

Fraction ChainParameters::effective_log_ratio() const {
  if (log_ratio) return *log_ratio;
  // 1 / (1/4 + p/q) = 4q / (q + 4p)
  return Fraction(4 * varpi.den, varpi.den + 4 * varpi.num);
}

unsigned prime_factor_bound(std::uint64_t B) {
  if (B < 2) throw domain_error("prime_factor_bound: B must be >= 2");
  return arith::floor_log2(B);
}

namespace {

template <typename Real>
double to_d(const Real& x) {
  return static_cast<double>(x);
}

Check make_check(std::string name, double value, std::string relation, double threshold) {
  bool pass = relation == "<=" ? value <= threshold : relation == ">=" ? value >= threshold : value > threshold;
  return {std::move(name), value, std::move(relation), threshold, pass};
}

template <typename Real>
ConstantsReport compute(const ChainParameters& p, unsigned bits, const VerificationThresholds& th) {
  p.validate();
  ConstantsReport r;
  r.params = p;
  r.log_ratio = p.effective_log_ratio();
  r.precision_bits = bits;
  const auto d1 = delta1<Real>(p);
  const auto d2 = delta2<Real>(p);
  const auto k1 = kappa<Real>(Kappa::one, p, d1, d2);
  const auto k2 = kappa<Real>(Kappa::two, p, d1, d2);
  const auto k3 = kappa<Real>(Kappa::three, p, d1, d2);
  const Real main = main_coefficient<Real>(p, k1, k2);
  const Real c = c0<Real>(p, k3);
  const Real s = s_coefficient<Real>(p, main, c);
  r.ln_delta1 = to_d(d1.log_magnitude());
  r.ln_delta2 = to_d(d2.log_magnitude());
  r.ln_kappa1 = to_d(k1.log_magnitude());
  r.ln_kappa2 = to_d(k2.log_magnitude());
  r.ln_kappa3 = to_d(k3.log_magnitude());
  r.main_coefficient = to_d(main);
  r.c0 = to_d(c);
  r.c0_kappa3_log_relative_effect = to_d(c0_kappa3_log_relative_effect<Real>(p, k3));
  r.s_coefficient = to_d(s);
  r.prime_factor_bound = prime_factor_bound(p.B);

  r.checks.push_back(make_check("ln_kappa1", r.ln_kappa1, "<=", th.max_ln_kappa));
  r.checks.push_back(make_check("ln_kappa2", r.ln_kappa2, "<=", th.max_ln_kappa));
  r.checks.push_back(make_check("ln_kappa3", r.ln_kappa3, "<=", th.max_ln_kappa));
  r.checks.push_back(make_check("main_coefficient", r.main_coefficient, ">=", th.min_main_coefficient));
  r.checks.push_back(make_check("c0", r.c0, "<=", th.max_c0));
  r.checks.push_back(make_check("s_coefficient", r.s_coefficient, ">=", th.min_s_coefficient));
  r.checks.push_back(make_check("s_coefficient_positive", r.s_coefficient, ">", 0.0));
  r.checks.push_back(make_check("prime_factor_bound", r.prime_factor_bound, "<=",
                                th.max_prime_factor_bound));
  r.verified = std::all_of(r.checks.begin(), r.checks.end(), [](const Check& c) { return c.pass; });
  r.asymptotic_fields = {"main_coefficient", "c0", "s_coefficient"};
  r.assumptions = {
      "o(1) terms dropped (N -> infinity)",
      "kappa_3 uses the same delta_1, delta_2 as kappa_1 and kappa_2",
      "c0 is computed exactly and compared with 4600000",
  };
  if (!p.log_ratio) r.assumptions.emplace_back("log N / log D = 4/(1+4 varpi)");
  return r;
}

struct Evaluation {
  Candidate candidate;
  bool feasible = false;
  std::uint64_t B = 0;
  unsigned bound = std::numeric_limits<unsigned>::max();
  double b_real = std::numeric_limits<double>::infinity();  // c0 / main
  double main = 0, c0 = 0, s = 0;
};

Evaluation evaluate(const Fraction& varpi, const Candidate& cand, const std::optional<Fraction>& ratio) {
  Evaluation e;
  e.candidate = cand;
  ChainParameters p;
  p.k = cand.k;
  p.l = cand.l;
  p.varpi = varpi;
  p.B = cand.B.value_or(2);
  p.log_ratio = ratio;
  if (cand.k < 2 || cand.l < 1 || 2 * cand.l + 2 > kMaxBinomialIndex) return e;
  using Real = Extended;
  const auto d1 = delta1<Real>(p);
  const auto d2 = delta2<Real>(p);
  const Real main =
      main_coefficient<Real>(p, kappa<Real>(Kappa::one, p, d1, d2), kappa<Real>(Kappa::two, p, d1, d2));
  const Real c = c0<Real>(p, kappa<Real>(Kappa::three, p, d1, d2));
  e.main = static_cast<double>(main);
  e.c0 = static_cast<double>(c);
  if (!(main > 0) || !std::isfinite(static_cast<double>(c))) return e;
  const Real ratio_b = c / main;
  e.b_real = static_cast<double>(ratio_b);
  if (cand.B) {
    e.B = *cand.B;
  } else {
    if (!(ratio_b < Real(1e19))) return e;
    e.B = std::max<std::uint64_t>(2, static_cast<std::uint64_t>(std::floor(ratio_b)) + 1);
  }
  p.B = e.B;
  const Real s = s_coefficient<Real>(p, main, c);
  e.s = static_cast<double>(s);
  if (!(s > 0)) return e;
  e.feasible = true;
  e.bound = prime_factor_bound(e.B);
  return e;
}

auto order_key(const Evaluation& e) {
  return std::make_tuple(!e.feasible, e.bound, e.candidate.k, e.candidate.l, e.B);
}

std::vector<std::uint64_t> geometric(double lo, double hi, std::size_t n) {
  std::set<std::uint64_t> out;
  if (n <= 1) {
    out.insert(static_cast<std::uint64_t>(std::llround(lo)));
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      double t = static_cast<double>(i) / static_cast<double>(n - 1);
      out.insert(static_cast<std::uint64_t>(std::llround(lo * std::pow(hi / lo, t))));
    }
  }
  return {out.begin(), out.end()};
}

}  // namespace

ConstantsReport compute_constants(const ChainParameters& params, Precision precision,
                                  const VerificationThresholds& thresholds) {
  switch (precision) {
    case Precision::extended: return compute<Extended>(params, 64, thresholds);
    case Precision::quad: return compute<Quad>(params, 113, thresholds);
    case Precision::octuple: return compute<Octuple>(params, 237, thresholds);
  }
  throw validation_error("unknown precision");
}

OptimizationResult optimize_parameters(Fraction varpi, const SearchBudget& budget) {
  if (!(Fraction(0, 1) < varpi) || !(varpi < Fraction(1, 4)))
    throw validation_error("varpi must satisfy 0 < varpi < 1/4");
  std::vector<Evaluation> all;

  auto run_batch = [&](const std::vector<Candidate>& batch) {
    std::vector<Evaluation> out(batch.size());
    parallel_blocks(batch.size(), budget.threads,
                    [&](std::size_t i) { out[i] = evaluate(varpi, batch[i], budget.log_ratio); });
    all.insert(all.end(), out.begin(), out.end());
    return out;
  };

  if (!budget.candidates.empty()) {
    run_batch(budget.candidates);
  } else {
    if (budget.evaluations < 4) throw validation_error("search budget must allow at least 4 evaluations");
    // Coarse grid over k ~ [200, 20000]/varpi and l ~ [1, 4000], then a
    // pattern search on c0/main from the best grid point.
    const double inv = static_cast<double>(varpi.den) / static_cast<double>(varpi.num);
    const std::size_t side = std::max<std::size_t>(2, static_cast<std::size_t>(std::sqrt(budget.evaluations / 2.0)));
    std::vector<Candidate> grid;
    for (std::uint64_t k : geometric(200 * inv, 20000 * inv, side))
      for (std::uint64_t l : geometric(1, 4000, side)) grid.push_back({k, l, std::nullopt});
    run_batch(grid);

    auto guide_better = [](const Evaluation& a, const Evaluation& b) {
      if (a.feasible != b.feasible) return a.feasible;
      return std::tie(a.b_real, a.candidate.k, a.candidate.l) < std::tie(b.b_real, b.candidate.k, b.candidate.l);
    };
    Evaluation current = *std::min_element(all.begin(), all.end(), guide_better);
    if (current.feasible) {
      double k_step = 0.25;
      double l_step = 0.25;
      while (all.size() + 4 <= budget.evaluations && (k_step > 1e-6 || l_step > 1e-3)) {
        const auto k = static_cast<double>(current.candidate.k);
        const auto l = static_cast<double>(current.candidate.l);
        auto kk = [&](double f) { return static_cast<std::uint64_t>(std::llround(k * f)); };
        auto ll = [&](double d) {
          return static_cast<std::uint64_t>(std::max(1.0, std::round(l + d)));
        };
        double dl = std::max(1.0, std::round(l * l_step));
        std::vector<Candidate> moves{{kk(1 + k_step), current.candidate.l, std::nullopt},
                                     {kk(1 - k_step), current.candidate.l, std::nullopt},
                                     {current.candidate.k, ll(dl), std::nullopt},
                                     {current.candidate.k, ll(-dl), std::nullopt}};
        auto out = run_batch(moves);
        const Evaluation& best = *std::min_element(out.begin(), out.end(), guide_better);
        if (guide_better(best, current)) {
          current = best;
        } else {
          k_step /= 2;
          if (dl > 1) l_step /= 2;
          else if (k_step <= 1e-6) break;
        }
      }
    }
  }

  OptimizationResult result;
  result.evaluated = all.size();
  result.feasible = static_cast<std::size_t>(
      std::count_if(all.begin(), all.end(), [](const Evaluation& e) { return e.feasible; }));
  if (result.feasible == 0)
    throw infeasible_error("no (k, l, B) in the search budget gives s_coefficient > 0 at varpi = " +
                           varpi.str());
  const Evaluation& best = *std::min_element(
      all.begin(), all.end(), [](const Evaluation& a, const Evaluation& b) { return order_key(a) < order_key(b); });
  result.k = best.candidate.k;
  result.l = best.candidate.l;
  result.B = best.B;
  result.bound = best.bound;
  result.s_coefficient = best.s;
  result.main_coefficient = best.main;
  result.c0 = best.c0;
  return result;
}

}  // namespace gapsieve::constants
