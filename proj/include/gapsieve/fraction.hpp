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
#include <numeric>
#include <string>
#include <string_view>

namespace gapsieve {

/// Exact positive or negative fraction in lowest terms, parsed from "p/q" or
/// "p" so that inputs such as varpi = 1/1168 never pass through a decimal.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Fraction() = default;
  Fraction(std::int64_t n, std::int64_t d);

  template <typename Real>
  Real as() const {
    return Real(num) / Real(den);
  }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;

  friend bool operator==(const Fraction&, const Fraction&) = default;
  friend bool operator<(const Fraction& a, const Fraction& b) {
    return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
  }
  Fraction operator*(std::int64_t m) const { return Fraction(num * m, den); }
};

/// Parses "p/q" or an integer. Throws validation_error on malformed input or
/// a zero denominator.
Fraction parse_fraction(std::string_view text);

}  // namespace gapsieve
