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

#include "gapsieve/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "gapsieve/arithmetic.hpp"
#include "gapsieve/constants.hpp"
#include "gapsieve/errors.hpp"
#include "gapsieve/lab.hpp"
#include "gapsieve/prime_engine.hpp"
#include "gapsieve/report.hpp"
#include "gapsieve/tuple.hpp"

namespace gapsieve::cli {

using nlohmann::ordered_json;

std::uint64_t parse_count(std::string_view text) {
  const std::string s(text);
  auto bad = [&]() { return validation_error("expected a nonnegative integer, got '" + s + "'"); };
  if (s.empty()) throw bad();
  if (s.find_first_not_of("0123456789") == std::string::npos) {
    if (s.size() > 20) throw bad();
    errno = 0;
    const unsigned long long v = std::strtoull(s.c_str(), nullptr, 10);
    if (errno == ERANGE) throw bad();
    return v;
  }
  // Scientific form: mantissa digits with at most one '.', then e<digits>.
  const auto epos = s.find_first_of("eE");
  if (epos == std::string::npos || epos == 0 || epos + 1 == s.size()) throw bad();
  std::string mant = s.substr(0, epos), ex = s.substr(epos + 1);
  if (ex.find_first_not_of("0123456789") != std::string::npos || ex.size() > 2) throw bad();
  const auto dot = mant.find('.');
  std::string frac;
  if (dot != std::string::npos) {
    frac = mant.substr(dot + 1);
    mant = mant.substr(0, dot);
  }
  if ((mant + frac).empty() || (mant + frac).find_first_not_of("0123456789") != std::string::npos) throw bad();
  int e = std::stoi(ex);
  if (static_cast<int>(frac.size()) > e) {
    // Trailing fractional zeros are fine ("1.50e1" is 15).
    const auto extra = frac.substr(static_cast<std::size_t>(e));
    if (extra.find_first_not_of('0') != std::string::npos) throw bad();
    frac = frac.substr(0, static_cast<std::size_t>(e));
  }
  std::string digits = mant + frac + std::string(static_cast<std::size_t>(e) - frac.size(), '0');
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
  if (digits.size() > 20) throw bad();
  errno = 0;
  const unsigned long long v = std::strtoull(digits.c_str(), nullptr, 10);
  if (errno == ERANGE) throw bad();
  return v;
}

namespace {

struct Globals {
  bool json = false;
  unsigned threads = 0;
  unsigned precision = 64;
  std::string ceiling = "2e8";

  unsigned workers() const { return threads ? threads : std::max(1u, std::thread::hardware_concurrency()); }
  primes::SieveConfig sieve() const {
    primes::SieveConfig c;
    c.ceiling = parse_count(ceiling);
    c.threads = workers();
    return c;
  }
};

std::string pretty(const ordered_json& j) { return j.dump(2) + "\n"; }

std::string format_double(double v) {
  std::ostringstream s;
  s.precision(15);
  s << v;
  return s.str();
}

ordered_json constants_json(const constants::ConstantsReport& r) {
  ordered_json j;
  ordered_json p;
  p["k"] = r.params.k;
  p["l"] = r.params.l;
  p["varpi"] = r.params.varpi.str();
  p["B"] = r.params.B;
  p["log_ratio"] = r.log_ratio.str();
  j["params"] = p;
  j["precision_bits"] = r.precision_bits;
  j["ln_delta1"] = r.ln_delta1;
  j["ln_delta2"] = r.ln_delta2;
  j["ln_kappa1"] = r.ln_kappa1;
  j["ln_kappa2"] = r.ln_kappa2;
  j["ln_kappa3"] = r.ln_kappa3;
  j["main_coefficient"] = r.main_coefficient;
  j["c0"] = r.c0;
  j["c0_kappa3_log_relative_effect"] = r.c0_kappa3_log_relative_effect;
  j["s_coefficient"] = r.s_coefficient;
  j["prime_factor_bound"] = r.prime_factor_bound;
  j["checks"] = ordered_json::array();
  for (const auto& c : r.checks)
    j["checks"].push_back(
        {{"name", c.name}, {"value", c.value}, {"relation", c.relation}, {"threshold", c.threshold}, {"pass", c.pass}});
  j["verified"] = r.verified;
  j["asymptotic_fields"] = r.asymptotic_fields;
  j["assumptions"] = r.assumptions;
  return j;
}

ordered_json optimization_json(const constants::OptimizationResult& r) {
  return ordered_json{{"k", r.k},
                      {"l", r.l},
                      {"B", r.B},
                      {"prime_factor_bound", r.bound},
                      {"s_coefficient", r.s_coefficient},
                      {"main_coefficient", r.main_coefficient},
                      {"c0", r.c0},
                      {"evaluated", r.evaluated},
                      {"feasible", r.feasible}};
}

std::vector<std::uint64_t> offsets_of(const tuples::OffsetTuple& t) {
  return {t.offsets().begin(), t.offsets().end()};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw validation_error("cannot write '" + path + "'");
  f << text;
  if (!f) throw validation_error("failed writing '" + path + "'");
}

/// Emits either sealed JSON or the text rendering.
void emit(Outcome& o, const Globals& g, std::string_view schema, const ordered_json& body, const std::string& text) {
  o.out += g.json ? pretty(seal_report(schema, body)) : text;
}

}  // namespace

TheoremReport verify_theorem_pipeline(const TheoremOptions& opt) {
  TheoremReport rep;
  ordered_json& body = rep.body;
  ordered_json inputs;
  inputs["k"] = opt.k;
  inputs["start"] = opt.x0;
  inputs["width_limit"] = opt.width_limit;
  inputs["count_limit"] = opt.count_limit;
  inputs["prefix"] = opt.prefix;
  inputs["l"] = opt.l;
  inputs["varpi"] = opt.varpi.str();
  inputs["B"] = opt.B;
  inputs["ceiling"] = opt.ceiling;
  inputs["precision_bits"] = opt.precision_bits;
  body["inputs"] = inputs;
  body["stages"] = ordered_json::array();
  primes::SieveConfig sieve;
  sieve.ceiling = opt.ceiling;
  sieve.threads = opt.threads;
  bool all_pass = true;
  std::string stage = "tuple";
  try {
    {
      const auto built = tuples::construct_consecutive_prime_tuple(opt.k, opt.x0, sieve);
      ordered_json s;
      s["name"] = "tuple";
      s["k"] = built.tuple.size();
      s["shift"] = built.shift;
      s["width"] = built.tuple.width();
      s["width_within_limit"] = built.tuple.width() <= opt.width_limit;
      s["shifted_primes_certificate"] = tuples::check_admissible_shifted_primes(built.tuple, built.shift);
      const std::uint64_t pre = std::min<std::uint64_t>(opt.prefix, built.tuple.size());
      const auto adm = tuples::check_admissible(built.tuple.prefix(pre), tuples::CheckMode::full, opt.threads);
      s["prefix_k"] = pre;
      s["prefix_admissible"] = adm.admissible;
      s["prefix_witness"] = adm.witness ? ordered_json(*adm.witness) : ordered_json(nullptr);
      s["pass"] = s["width_within_limit"].get<bool>() && s["shifted_primes_certificate"].get<bool>() && adm.admissible;
      all_pass &= s["pass"].get<bool>();
      body["stages"].push_back(s);
    }
    {
      stage = "prime_counts";
      ordered_json s;
      s["name"] = "prime_counts";
      const std::uint64_t hi = primes::prime_count(opt.count_limit, sieve);
      const std::uint64_t lo = primes::prime_count(opt.x0, sieve);
      if (opt.count_limit > sieve.ceiling) throw resource_error("count limit above the sieve ceiling");
      const std::uint64_t mono = primes::prime_count_monolithic(opt.count_limit);
      s["pi_count_limit"] = hi;
      s["pi_start"] = lo;
      s["difference"] = hi - lo;
      s["difference_at_least_k"] = hi - lo >= opt.k;
      s["monolithic_pi_count_limit"] = mono;
      s["implementations_agree"] = mono == hi;
      s["pass"] = hi - lo >= opt.k && mono == hi;
      all_pass &= s["pass"].get<bool>();
      body["stages"].push_back(s);
    }
    {
      stage = "constants";
      constants::ChainParameters params;
      params.k = opt.k;
      params.l = opt.l;
      params.varpi = opt.varpi;
      params.B = opt.B;
      const auto r = constants::compute_constants(params, constants::precision_from_bits(opt.precision_bits));
      ordered_json s;
      s["name"] = "constants";
      s["report"] = constants_json(r);
      if (!(opt.varpi == Fraction(1, 1168))) {
        constants::SearchBudget budget;
        budget.threads = opt.threads;
        try {
          s["optimizer"] = optimization_json(constants::optimize_parameters(opt.varpi, budget));
        } catch (const infeasible_error& e) {
          s["optimizer"] = ordered_json{{"infeasible", e.what()}};
        }
      }
      s["pass"] = r.verified;
      all_pass &= r.verified;
      body["stages"].push_back(s);
    }
  } catch (const gapsieve::error& e) {
    rep.error_stage = stage;
    all_pass = false;
    std::string kind = "error";
    if (dynamic_cast<const resource_error*>(&e)) kind = "resource_error";
    else if (dynamic_cast<const budget_exceeded*>(&e)) kind = "budget_exceeded";
    else if (dynamic_cast<const validation_error*>(&e)) kind = "validation_error";
    body["error"] = ordered_json{{"stage", stage}, {"kind", kind}, {"message", e.what()}};
  }
  rep.pass = all_pass;
  body["verdict"] = rep.error_stage ? "error" : all_pass ? "pass" : "fail";
  return rep;
}

namespace {

std::string theorem_text(const TheoremReport& r) {
  std::ostringstream s;
  for (const auto& st : r.body["stages"]) {
    s << st["name"].get<std::string>() << ": " << (st["pass"].get<bool>() ? "pass" : "FAIL");
    const auto name = st["name"].get<std::string>();
    if (name == "tuple")
      s << " (k=" << st["k"] << ", width=" << st["width"] << ", shift=" << st["shift"]
        << ", certificate=" << st["shifted_primes_certificate"] << ", prefix " << st["prefix_k"]
        << " admissible=" << st["prefix_admissible"] << ")";
    else if (name == "prime_counts")
      s << " (pi=" << st["pi_count_limit"] << ", pi(start)=" << st["pi_start"] << ", difference=" << st["difference"]
        << ", monolithic agrees=" << st["implementations_agree"] << ")";
    else if (name == "constants")
      s << " (main=" << format_double(st["report"]["main_coefficient"].get<double>())
        << ", c0=" << format_double(st["report"]["c0"].get<double>())
        << ", s=" << format_double(st["report"]["s_coefficient"].get<double>())
        << ", prime factors <= " << st["report"]["prime_factor_bound"] << ")";
    s << "\n";
    if (st.contains("optimizer")) {
      const auto& opt = st["optimizer"];
      if (opt.contains("infeasible"))
        s << "  optimizer: infeasible\n";
      else
        s << "  optimizer: k=" << opt["k"] << " l=" << opt["l"] << " B=" << opt["B"]
          << " prime factors <= " << opt["prime_factor_bound"] << "\n";
    }
  }
  if (r.body.contains("error"))
    s << "error in stage " << r.body["error"]["stage"].get<std::string>() << ": "
      << r.body["error"]["message"].get<std::string>() << "\n";
  s << "verdict: " << r.body["verdict"].get<std::string>() << "\n";
  return s.str();
}

std::string lab_text(const lab::LabReport& r) {
  std::ostringstream s;
  s.precision(12);
  auto v = [](const lab::CompensatedSum& c) { return static_cast<double>(c.finish()); };
  s << "k=" << r.params.k << " l=" << r.params.l << " N=" << r.params.N << " A=" << r.params.A
    << " D=" << static_cast<double>(r.params.D) << " support=" << r.params.support_primes.size() << "\n";
  s << "S=" << v(r.sums.S) << " S'=" << v(r.sums.Sprime) << " S1=" << v(r.sums.S1) << " S3=" << v(r.sums.S3) << "\n";
  for (std::size_t i = 0; i < r.sums.S2.size(); ++i) s << "S2(L" << i + 1 << ")=" << v(r.sums.S2[i]) << "\n";
  s << "M1=" << static_cast<double>(r.m.M1) << " M2=" << static_cast<double>(r.m.M2)
    << " M3=" << static_cast<double>(r.m.M3) << " M1*=" << static_cast<double>(r.M1_star) << "\n";
  s << "decomposition inequality: " << (r.decomposition.holds ? "holds" : "VIOLATED")
    << " (margin " << static_cast<double>(r.decomposition.residual) << ")\n";
  s << "oracles: S1 " << static_cast<double>(r.oracles.S1_rel_delta) << ", S3 "
    << static_cast<double>(r.oracles.S3_rel_delta) << ", M1 " << static_cast<double>(r.oracles.M1_rel_delta)
    << ", sieve value mismatches " << r.oracles.sieve_value_mismatches << "/" << r.oracles.sieve_value_checked << "\n";
  s << "consistency ratio " << static_cast<double>(r.consistency) << "\n";
  return s.str();
}

bool lab_passes(const lab::LabReport& r) {
  return r.decomposition.holds && r.oracles.S1_rel_delta <= 1e-9 && r.oracles.S3_rel_delta <= 1e-9 &&
         r.oracles.M1_rel_delta <= 1e-10 && r.oracles.sieve_value_mismatches == 0;
}

}  // namespace

Outcome dispatch(const std::vector<std::string>& args) {
  Outcome o;
  Globals g;
  CLI::App app{"Prime gaps with almost-primes: sieves, tuples, constants and toy sieve sums", "gapsieve"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_flag("--json", g.json, "Emit a JSON report");
  app.add_option("--threads", g.threads, "Worker threads (default: hardware concurrency)");
  app.add_option("--precision", g.precision, "Mantissa bits for the constants engine (64, 113, 237)");
  app.add_option("--ceiling", g.ceiling, "Sieve ceiling (default 2e8)");

  // primes
  auto* primes_cmd = app.add_subcommand("primes", "Prime counting and enumeration");
  primes_cmd->require_subcommand(1);
  std::string a1, a2;
  auto* p_count = primes_cmd->add_subcommand("count", "pi(x)");
  p_count->add_option("x", a1)->required();
  auto* p_nth = primes_cmd->add_subcommand("nth", "The i-th prime (1-based)");
  p_nth->add_option("i", a1)->required();
  auto* p_list = primes_cmd->add_subcommand("list", "Primes in [lo, hi)");
  p_list->add_option("lo", a1)->required();
  p_list->add_option("hi", a2)->required();

  // arith
  auto* arith_cmd = app.add_subcommand("arith", "Arithmetic functions of n <= 1e12");
  arith_cmd->require_subcommand(1);
  std::string n_arg, b_arg;
  std::map<std::string, CLI::App*> arith_fns;
  for (const char* name : {"tau", "mobius", "factor", "phi", "omega", "bigomega"}) {
    arith_fns[name] = arith_cmd->add_subcommand(name, std::string(name) + "(n)");
    arith_fns[name]->add_option("n", n_arg)->required();
  }
  auto* a_almost = arith_cmd->add_subcommand("almost-prime", "Squarefree n with tau(n) < B has <= floor(log2 B) factors");
  a_almost->add_option("n", n_arg)->required();
  a_almost->add_option("--B", b_arg)->required();

  // tuple
  auto* tuple_cmd = app.add_subcommand("tuple", "Admissible tuples");
  tuple_cmd->require_subcommand(1);
  std::string k_arg, start_arg, out_path, file_arg, mode_arg = "full", cutoff_arg;
  auto* t_build = tuple_cmd->add_subcommand("build", "First k primes >= start, shifted to 0");
  t_build->add_option("--k", k_arg)->required();
  t_build->add_option("--start", start_arg)->required();
  t_build->add_option("--out", out_path, "Write the tuple file here");
  auto* t_verify = tuple_cmd->add_subcommand("verify", "Admissibility check");
  t_verify->add_option("file", file_arg)->required();
  t_verify->add_option("--mode", mode_arg, "full|sampled");
  auto* t_norm = tuple_cmd->add_subcommand("normalize", "Normalized linear forms A n + b_i");
  t_norm->add_option("file", file_arg)->required();
  auto* t_ss = tuple_cmd->add_subcommand("sseries", "Singular series of the normalized tuple");
  t_ss->add_option("file", file_arg)->required();
  t_ss->add_option("--cutoff", cutoff_arg)->required();

  // constants
  auto* const_cmd = app.add_subcommand("constants", "Sieve constants and the prime-factor bound");
  const_cmd->require_subcommand(1);
  std::string ck = "4500000", cl = "300", cvarpi = "1/1168", cB = "4294967295", cratio, cbudget = "4000";
  auto* c_verify = const_cmd->add_subcommand("verify", "Evaluate and check the constants chain");
  c_verify->add_option("--k", ck);
  c_verify->add_option("--l", cl);
  c_verify->add_option("--varpi", cvarpi);
  c_verify->add_option("--B", cB);
  c_verify->add_option("--ratio", cratio, "log N / log D as p/q (default 4/(1+4 varpi))");
  auto* c_opt = const_cmd->add_subcommand("optimize", "Search (k, l, B) minimizing the prime-factor bound");
  c_opt->add_option("--varpi", cvarpi);
  c_opt->add_option("--budget", cbudget, "Evaluation budget");

  // lab
  auto* lab_cmd = app.add_subcommand("lab", "Exact toy-scale sieve sums");
  lab_cmd->require_subcommand(1);
  std::string config_path, csv_path;
  auto* l_run = lab_cmd->add_subcommand("run", "Run a lab experiment");
  l_run->add_option("--config", config_path)->required();
  l_run->add_option("--out", out_path, "Write the JSON report here");
  l_run->add_option("--csv", csv_path, "Write the CSV table here");

  // verify-theorem
  auto* vt = app.add_subcommand("verify-theorem", "End-to-end check of the bounded-gap construction");
  std::string vt_k = "4500000", vt_start = "4500000", vt_l = "300", vt_varpi = "1/1168", vt_B = "4294967295",
              vt_prefix = "10000", vt_width = "1e8";
  vt->add_option("--k", vt_k);
  vt->add_option("--start", vt_start);
  vt->add_option("--l", vt_l);
  vt->add_option("--varpi", vt_varpi);
  vt->add_option("--B", vt_B);
  vt->add_option("--prefix", vt_prefix, "Prefix length for the generic admissibility check");
  vt->add_option("--width-limit", vt_width);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream out, err;
    const int code = app.exit(e, out, err);
    o.out = out.str();
    o.err = err.str();
    o.exit_code = code == 0 ? kExitOk : kExitError;
    return o;
  }

  try {
    if (*primes_cmd) {
      const auto cfg = g.sieve();
      if (*p_count) {
        const auto x = parse_count(a1);
        const auto pi = primes::prime_count(x, cfg);
        emit(o, g, "primes_count", ordered_json{{"x", x}, {"pi", pi}}, std::to_string(pi) + "\n");
      } else if (*p_nth) {
        const auto i = parse_count(a1);
        const auto p = primes::nth_prime(i, cfg);
        emit(o, g, "primes_nth", ordered_json{{"i", i}, {"prime", p}}, std::to_string(p) + "\n");
      } else {
        const auto lo = parse_count(a1), hi = parse_count(a2);
        const auto ps = primes::primes_in(lo, hi, cfg);
        std::string text;
        for (auto p : ps) text += std::to_string(p) + "\n";
        emit(o, g, "primes_list", ordered_json{{"lo", lo}, {"hi", hi}, {"count", ps.size()}, {"primes", ps}}, text);
      }
    } else if (*arith_cmd) {
      const auto n = parse_count(n_arg);
      if (*a_almost) {
        const auto B = parse_count(b_arg);
        const auto c = arith::classify_almost_prime(n, B);
        emit(o, g, "arith_almost_prime",
             ordered_json{{"n", n}, {"B", B}, {"omega", c.omega}, {"tau_below_B", c.within_bound},
                          {"factor_bound", arith::floor_log2(B)}},
             std::string(c.within_bound ? "tau < B" : "tau >= B") + ", omega = " + std::to_string(c.omega) + "\n");
      } else {
        const auto f = arith::factorize(n);
        if (*arith_fns["tau"]) {
          emit(o, g, "arith_tau", ordered_json{{"n", n}, {"tau", arith::tau(f)}}, std::to_string(arith::tau(f)) + "\n");
        } else if (*arith_fns["mobius"]) {
          emit(o, g, "arith_mobius", ordered_json{{"n", n}, {"mobius", arith::mobius(f)}},
               std::to_string(arith::mobius(f)) + "\n");
        } else if (*arith_fns["phi"]) {
          emit(o, g, "arith_phi", ordered_json{{"n", n}, {"phi", arith::euler_phi(f)}},
               std::to_string(arith::euler_phi(f)) + "\n");
        } else if (*arith_fns["omega"]) {
          emit(o, g, "arith_omega", ordered_json{{"n", n}, {"omega", arith::omega(f)}},
               std::to_string(arith::omega(f)) + "\n");
        } else if (*arith_fns["bigomega"]) {
          emit(o, g, "arith_bigomega", ordered_json{{"n", n}, {"bigomega", arith::big_omega(f)}},
               std::to_string(arith::big_omega(f)) + "\n");
        } else {
          ordered_json fs = ordered_json::array();
          std::string text = std::to_string(n) + " =";
          bool first = true;
          for (const auto& pp : f.factors) {
            fs.push_back({{"prime", pp.prime}, {"exponent", pp.exponent}});
            text += (first ? " " : " * ") + std::to_string(pp.prime) +
                    (pp.exponent > 1 ? "^" + std::to_string(pp.exponent) : "");
            first = false;
          }
          if (f.factors.empty()) text += " 1";
          emit(o, g, "arith_factor", ordered_json{{"n", n}, {"factors", fs}}, text + "\n");
        }
      }
    } else if (*tuple_cmd) {
      if (*t_build) {
        const auto k = parse_count(k_arg), x0 = parse_count(start_arg);
        const auto built = tuples::construct_consecutive_prime_tuple(k, x0, g.sieve());
        tuples::TupleFile file{built.tuple, built.shift};
        if (!out_path.empty()) tuples::write_tuple_json(out_path, file);
        ordered_json body{{"k", k},
                          {"start", x0},
                          {"shift", built.shift},
                          {"width", built.tuple.width()},
                          {"out", out_path.empty() ? ordered_json(nullptr) : ordered_json(out_path)}};
        if (out_path.empty()) body["offsets"] = offsets_of(built.tuple);
        std::string text = out_path.empty() ? tuples::tuple_json(file)
                                            : "k=" + std::to_string(k) + " shift=" + std::to_string(built.shift) +
                                                  " width=" + std::to_string(built.tuple.width()) + " -> " +
                                                  out_path + "\n";
        emit(o, g, "tuple_build", body, text);
      } else if (*t_verify) {
        const auto file = tuples::read_tuple_file(file_arg);
        const auto mode = tuples::parse_check_mode(mode_arg);
        const auto r = tuples::check_admissible(file.tuple, mode, g.workers());
        ordered_json body{{"k", file.tuple.size()},
                          {"width", file.tuple.width()},
                          {"mode", tuples::to_string(mode)},
                          {"admissible", r.admissible},
                          {"witness", r.witness ? ordered_json(*r.witness) : ordered_json(nullptr)},
                          {"primes_checked", r.primes_checked}};
        body["shift"] = file.shift ? ordered_json(*file.shift) : ordered_json(nullptr);
        body["shifted_primes_certificate"] =
            file.shift ? ordered_json(tuples::check_admissible_shifted_primes(file.tuple, *file.shift))
                       : ordered_json(nullptr);
        std::string text = r.admissible ? "admissible (" + tuples::to_string(mode) + ", k=" +
                                              std::to_string(file.tuple.size()) + ")\n"
                                        : "inadmissible: every residue class mod " + std::to_string(*r.witness) +
                                              " is covered\n";
        emit(o, g, "tuple_verify", body, text);
        if (!r.admissible) o.exit_code = kExitFail;
      } else if (*t_norm) {
        const auto file = tuples::read_tuple_file(file_arg);
        const auto t = tuples::normalize(file.tuple);
        ordered_json res = ordered_json::array();
        for (const auto& r : t.a0_residues()) res.push_back({{"prime", r.prime}, {"residue", r.residue}});
        ordered_json body{{"k", t.k()},
                          {"modulus_primes", t.modulus_primes()},
                          {"a0_residues", res},
                          {"A", t.modulus() ? ordered_json(*t.modulus()) : ordered_json(nullptr)},
                          {"a0", t.a0() ? ordered_json(*t.a0()) : ordered_json(nullptr)}};
        std::string text = "A = " + (t.modulus() ? std::to_string(*t.modulus()) : std::string("(> 2^63)")) +
                           ", a0 = " + (t.a0() ? std::to_string(*t.a0()) : std::string("(by residues)")) + "\n";
        if (t.a0()) {
          std::vector<std::uint64_t> b;
          for (std::size_t i = 0; i < t.k(); ++i) b.push_back(t.b(i));
          body["b"] = b;
          text += "b =";
          for (auto v : b) text += " " + std::to_string(v);
          text += "\n";
        } else {
          body["b"] = nullptr;
        }
        emit(o, g, "tuple_normalize", body, text);
      } else {
        const auto file = tuples::read_tuple_file(file_arg);
        const auto cutoff = parse_count(cutoff_arg);
        const auto s = tuples::singular_series(tuples::normalize(file.tuple), cutoff, g.sieve());
        const double log_value = static_cast<double>(s.log_value.log_magnitude());
        const double value = static_cast<double>(s.log_value.value());
        ordered_json body{{"k", file.tuple.size()},
                          {"cutoff", s.cutoff},
                          {"log_value", log_value},
                          {"value", std::isfinite(value) ? ordered_json(value) : ordered_json(nullptr)},
                          {"tail_bound", s.tail_bound},
                          {"primes_used", s.primes_used}};
        emit(o, g, "tuple_sseries", body,
             "S = " + format_double(value) + " (log " + format_double(log_value) + ", tail bound " +
                 format_double(s.tail_bound) + ")\n");
      }
    } else if (*const_cmd) {
      if (*c_verify) {
        constants::ChainParameters p;
        p.k = parse_count(ck);
        p.l = parse_count(cl);
        p.varpi = parse_fraction(cvarpi);
        p.B = parse_count(cB);
        if (!cratio.empty()) p.log_ratio = parse_fraction(cratio);
        const auto r = constants::compute_constants(p, constants::precision_from_bits(g.precision));
        std::ostringstream text;
        for (const auto& c : r.checks)
          text << c.name << " = " << format_double(c.value) << " " << c.relation << " " << format_double(c.threshold)
               << (c.pass ? "  ok" : "  FAIL") << "\n";
        text << "prime factors <= " << r.prime_factor_bound << "\n" << (r.verified ? "verified\n" : "NOT verified\n");
        emit(o, g, "constants_report", constants_json(r), text.str());
        if (!r.verified) o.exit_code = kExitFail;
      } else {
        constants::SearchBudget budget;
        budget.evaluations = parse_count(cbudget);
        budget.threads = g.workers();
        try {
          const auto r = constants::optimize_parameters(parse_fraction(cvarpi), budget);
          emit(o, g, "constants_optimize", optimization_json(r),
               "k=" + std::to_string(r.k) + " l=" + std::to_string(r.l) + " B=" + std::to_string(r.B) +
                   " prime factors <= " + std::to_string(r.bound) + "\n");
        } catch (const infeasible_error& e) {
          o.err += std::string("infeasible: ") + e.what() + "\n";
          o.exit_code = kExitFail;
        }
      }
    } else if (*lab_cmd) {
      const auto config = lab::read_lab_config(config_path);
      const auto report = lab::run_experiment(config, g.workers());
      const auto sealed = seal_report("lab_report", lab::report_json(report));
      if (!out_path.empty()) write_file(out_path, pretty(sealed));
      if (!csv_path.empty()) write_file(csv_path, lab::report_csv(report));
      o.out += g.json ? pretty(sealed) : lab_text(report);
      if (!lab_passes(report)) o.exit_code = kExitFail;
    } else if (*vt) {
      TheoremOptions opt;
      opt.k = parse_count(vt_k);
      opt.x0 = parse_count(vt_start);
      opt.l = parse_count(vt_l);
      opt.varpi = parse_fraction(vt_varpi);
      opt.B = parse_count(vt_B);
      opt.prefix = parse_count(vt_prefix);
      opt.width_limit = parse_count(vt_width);
      opt.ceiling = parse_count(g.ceiling);
      opt.precision_bits = g.precision;
      opt.threads = g.workers();
      const auto r = verify_theorem_pipeline(opt);
      emit(o, g, "verify_theorem", r.body, theorem_text(r));
      o.exit_code = r.error_stage ? kExitError : r.pass ? kExitOk : kExitFail;
      if (r.error_stage) o.err += "error in stage " + *r.error_stage + "\n";
    }
  } catch (const gapsieve::error& e) {
    o.err += std::string("error: ") + e.what() + "\n";
    o.exit_code = kExitError;
  } catch (const std::exception& e) {
    o.err += std::string("error: ") + e.what() + "\n";
    o.exit_code = kExitError;
  }
  return o;
}

}  // namespace gapsieve::cli
