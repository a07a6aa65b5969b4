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

#include "gapsieve/tuple.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "gapsieve/errors.hpp"
#include "gapsieve/parallel.hpp"
#include "json.hpp"

namespace gapsieve::tuples {
namespace {

constexpr std::uint64_t kSampledSmallLimit = 1000;

primes::SieveConfig config_for(std::uint64_t limit) {
  primes::SieveConfig c;
  c.ceiling = std::max(c.ceiling, limit);
  return c;
}

// True when {h_i mod p} hits every class mod p.
bool covers_all_classes(const OffsetTuple& t, std::uint64_t p) {
  if (t.size() < p) return false;
  std::vector<std::uint8_t> seen(p, 0);
  std::uint64_t hit = 0;
  for (std::uint64_t h : t.offsets()) {
    auto& s = seen[h % p];
    if (!s) {
      s = 1;
      if (++hit == p) return true;
    }
  }
  return false;
}

std::vector<std::uint64_t> sampled_primes(std::uint64_t k) {
  auto out = primes::primes_in(2, std::min(k, kSampledSmallLimit) + 1, config_for(k));
  if (k <= kSampledSmallLimit) return out;
  auto large = primes::primes_in(kSampledSmallLimit + 1, k + 1, config_for(k));
  if (large.empty()) return out;
  const std::size_t n = std::min(kSampledExtraPrimes, large.size());
  std::size_t last = std::numeric_limits<std::size_t>::max();
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t idx = n == 1 ? large.size() - 1 : j * (large.size() - 1) / (n - 1);
    if (idx != last) out.push_back(large[idx]);
    last = idx;
  }
  return out;
}

struct NeumaierSum {
  long double sum = 0, comp = 0;
  void add(long double x) {
    long double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  long double value() const { return sum + comp; }
};

}  // namespace

std::string to_string(CheckMode mode) { return mode == CheckMode::full ? "full" : "sampled"; }

CheckMode parse_check_mode(const std::string& text) {
  if (text == "full") return CheckMode::full;
  if (text == "sampled") return CheckMode::sampled;
  throw validation_error("unknown admissibility mode '" + text + "' (expected full|sampled)");
}

AdmissibilityResult check_admissible(const OffsetTuple& t, CheckMode mode, unsigned threads) {
  const std::uint64_t k = t.size();
  AdmissibilityResult result;
  result.mode = mode;
  std::vector<std::uint64_t> ps;
  if (mode == CheckMode::full) {
    if (k > kFullCheckCap)
      throw budget_exceeded("full admissibility check is capped at k <= " + std::to_string(kFullCheckCap) +
                            " (k = " + std::to_string(k) + "); use sampled mode");
    ps = primes::primes_in(2, k + 1, config_for(k));
  } else {
    ps = sampled_primes(k);
  }
  result.primes_checked = ps.size();
  constexpr std::size_t kBlock = 16;
  const std::size_t n_blocks = (ps.size() + kBlock - 1) / kBlock;
  std::vector<std::uint64_t> block_witness(n_blocks, 0);
  parallel_blocks(n_blocks, threads, [&](std::size_t b) {
    for (std::size_t i = b * kBlock; i < std::min(ps.size(), (b + 1) * kBlock); ++i)
      if (covers_all_classes(t, ps[i])) {
        block_witness[b] = ps[i];
        return;
      }
  });
  for (std::uint64_t w : block_witness)
    if (w) {
      result.admissible = false;
      result.witness = w;
      break;
    }
  return result;
}

bool check_admissible_shifted_primes(const OffsetTuple& t, std::uint64_t shift) {
  const std::uint64_t k = t.size();
  for (std::uint64_t h : t.offsets()) {
    const std::uint64_t v = h + shift;
    if (v <= k || !primes::is_prime_u64(v)) return false;
  }
  return true;
}

ConsecutivePrimeTuple construct_consecutive_prime_tuple(std::uint64_t k, std::uint64_t x0,
                                                        const primes::SieveConfig& config) {
  if (k == 0) throw domain_error("construct_consecutive_prime_tuple: k must be >= 1");
  if (x0 > config.ceiling)
    throw resource_error("construct_consecutive_prime_tuple: start exceeds the sieve ceiling");
  std::vector<std::uint64_t> chosen;
  chosen.reserve(k);
  primes::PrimeStream stream(x0, config.ceiling + 1, config);
  while (chosen.size() < k) {
    auto p = stream.next();
    if (!p)
      throw resource_error("construct_consecutive_prime_tuple: p_{m+" + std::to_string(k) +
                           "} exceeds the sieve ceiling " + std::to_string(config.ceiling));
    chosen.push_back(*p);
  }
  ConsecutivePrimeTuple out;
  out.shift = chosen.front();
  for (auto& p : chosen) p -= out.shift;
  out.tuple = OffsetTuple(std::move(chosen));
  return out;
}

AdmissibleTuple normalize(const OffsetTuple& t) {
  const std::uint64_t k = t.size();
  const std::uint64_t width = t.width();
  if (k > kFullCheckCap)
    throw budget_exceeded("normalize: k exceeds " + std::to_string(kFullCheckCap));
  if (width > 2) {
    const double work = static_cast<double>(width) / std::log(static_cast<double>(width)) * static_cast<double>(k);
    if (work > kNormalizeWorkCap)
      throw budget_exceeded("normalize: pi(width) * k exceeds the work cap");
  }
  auto adm = check_admissible(t, CheckMode::full);
  if (!adm.admissible)
    throw inadmissible_error("normalize: tuple is inadmissible (every class mod " +
                                 std::to_string(*adm.witness) + " is covered)",
                             *adm.witness);
  std::vector<AdmissibleTuple::Residue> residues;
  // Offsets can only collide modulo a prime dividing some difference, so
  // every such prime is <= width.
  std::vector<std::uint8_t> seen;
  primes::for_each_prime(2, std::max<std::uint64_t>(width + 1, 2), [&](std::uint64_t p) {
    seen.assign(p, 0);
    bool collide = false;
    for (std::uint64_t h : t.offsets()) {
      auto& s = seen[h % p];
      if (s) collide = true;
      s = 1;
    }
    if (!collide) return;
    // least a with a + h_i != 0 mod p for all i, i.e. -a mod p unseen.
    for (std::uint64_t a = 0; a < p; ++a)
      if (!seen[(p - a) % p]) {
        residues.push_back({p, a});
        return;
      }
  }, config_for(width));
  return AdmissibleTuple::from_residues(t, std::move(residues));
}

SingularSeries singular_series(const AdmissibleTuple& t, std::uint64_t cutoff,
                               const primes::SieveConfig& config) {
  const std::uint64_t k = t.k();
  if (cutoff < k)
    throw domain_error("singular_series: cutoff " + std::to_string(cutoff) + " is below k = " +
                       std::to_string(k));
  const long double kk = static_cast<long double>(k);
  NeumaierSum acc;
  std::size_t used = 0;
  for (const auto& r : t.a0_residues()) {
    acc.add(-kk * std::log1p(-1.0L / static_cast<long double>(r.prime)));
    ++used;
  }
  primes::for_each_prime(2, cutoff + 1, [&](std::uint64_t p) {
    if (t.divides_modulus(p)) return;
    const long double pp = static_cast<long double>(p);
    if (p <= k)
      throw singularity_error("singular_series: factor 1 - k/p is nonpositive at p = " + std::to_string(p) +
                              " (p <= k must divide A; tuple not normalized?)");
    acc.add(std::log1p(-kk / pp) - kk * std::log1p(-1.0L / pp));
    ++used;
  }, config);

  SingularSeries out;
  out.cutoff = cutoff;
  out.primes_used = used;
  out.log_value = LogNumber<long double>::from_log(acc.value());
  if (k > 1) {
    const long double P = static_cast<long double>(cutoff);
    // sum over primes p > P of 1/p^2
    const long double inv_square_tail = cutoff >= 2 ? 1.0L / (2.0L * (P - 1.0L)) : 0.75L;
    const long double per_term = kk * kk / (2.0L * (1.0L - kk / (P + 1.0L)));
    out.tail_bound = static_cast<double>(per_term * inv_square_tail);
  }
  return out;
}

TupleFile parse_tuple_text(const std::string& text) {
  auto first = text.find_first_not_of(" \t\r\n");
  TupleFile out;
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw validation_error(std::string("tuple file: ") + e.what());
    }
    static const std::vector<std::string> allowed{"k", "offsets", "shift"};
    for (const auto& [key, value] : j.items())
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        throw validation_error("tuple file: unknown key '" + key + "'");
    if (!j.contains("offsets") || !j["offsets"].is_array())
      throw validation_error("tuple file: missing 'offsets' array");
    std::vector<std::uint64_t> offsets;
    offsets.reserve(j["offsets"].size());
    for (const auto& v : j["offsets"]) {
      if (!v.is_number_unsigned()) throw validation_error("tuple file: offsets must be nonnegative integers");
      offsets.push_back(v.get<std::uint64_t>());
    }
    out.tuple = OffsetTuple(std::move(offsets));
    if (j.contains("k") && j["k"].get<std::uint64_t>() != out.tuple.size())
      throw validation_error("tuple file: 'k' does not match the number of offsets");
    if (j.contains("shift") && !j["shift"].is_null()) out.shift = j["shift"].get<std::uint64_t>();
    return out;
  }
  std::vector<std::uint64_t> offsets;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    std::string tok = line.substr(b, e - b + 1);
    if (tok.find_first_not_of("0123456789") != std::string::npos)
      throw validation_error("tuple file line " + std::to_string(line_no) + ": not a nonnegative integer");
    offsets.push_back(std::stoull(tok));
  }
  out.tuple = OffsetTuple(std::move(offsets));
  return out;
}

TupleFile read_tuple_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open tuple file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_tuple_text(buf.str());
}

std::string tuple_json(const TupleFile& file) {
  nlohmann::ordered_json j;
  j["k"] = file.tuple.size();
  j["offsets"] = std::vector<std::uint64_t>(file.tuple.offsets().begin(), file.tuple.offsets().end());
  if (file.shift) j["shift"] = *file.shift;
  return j.dump() + "\n";
}

void write_tuple_json(const std::filesystem::path& path, const TupleFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot write tuple file " + path.string());
  out << tuple_json(file);
}

}  // namespace gapsieve::tuples
