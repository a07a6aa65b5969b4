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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gapsieve/fraction.hpp"
#include "json.hpp"

namespace gapsieve::cli {

/// Exit codes: success or verification pass, usage/validation/resource
/// error, verification fail.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFail = 2;

struct Outcome {
  int exit_code = kExitOk;
  std::string out;
  std::string err;
};

/// Runs one command line (without the program name). Never throws; errors
/// become exit code 1 with a message on `err`.
Outcome dispatch(const std::vector<std::string>& args);

/// Parses a nonnegative integer written plainly ("100000000") or in
/// scientific form with an integral value ("1e8", "4.5e6").
std::uint64_t parse_count(std::string_view text);

struct TheoremOptions {
  std::uint64_t k = 4'500'000;
  std::uint64_t x0 = 4'500'000;
  std::uint64_t width_limit = 100'000'000;
  std::uint64_t count_limit = 100'000'000;
  std::uint64_t prefix = 10'000;
  std::uint64_t l = 300;
  Fraction varpi{1, 1168};
  std::uint64_t B = 4'294'967'295ULL;
  std::uint64_t ceiling = 200'000'000;
  unsigned precision_bits = 64;
  unsigned threads = 1;
};

struct TheoremReport {
  nlohmann::ordered_json body;
  bool pass = false;
  /// Set when a stage raised an error rather than failing a check.
  std::optional<std::string> error_stage;
};

/// Prime counts, tuple construction and certificates, and the constants
/// chain, each recorded as a stage with every intermediate number.
TheoremReport verify_theorem_pipeline(const TheoremOptions& options);

}  // namespace gapsieve::cli
