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

#include "gapsieve/fraction.hpp"

#include <charconv>

#include "gapsieve/errors.hpp"

namespace gapsieve {
namespace {

std::int64_t parse_int(std::string_view s, std::string_view whole) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw validation_error("malformed fraction '" + std::string(whole) + "'");
  return v;
}

}  // namespace

Fraction::Fraction(std::int64_t n, std::int64_t d) {
  if (d == 0) throw validation_error("fraction with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  std::int64_t g = std::gcd(n < 0 ? -n : n, d);
  if (g == 0) g = 1;
  num = n / g;
  den = d / g;
}

std::string Fraction::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

Fraction parse_fraction(std::string_view text) {
  auto dot = text.find('.');
  if (dot != std::string_view::npos && text.find('/') == std::string_view::npos) {
    std::string digits(text.substr(0, dot));
    std::string frac(text.substr(dot + 1));
    if (frac.size() > 17) throw validation_error("too many decimals in '" + std::string(text) + "'");
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    bool negative = !digits.empty() && digits[0] == '-';
    std::int64_t whole = digits.empty() || digits == "-" ? 0 : parse_int(digits, text);
    std::int64_t part = frac.empty() ? 0 : parse_int(frac, text);
    if (part < 0) throw validation_error("malformed fraction '" + std::string(text) + "'");
    std::int64_t magnitude = (whole < 0 ? -whole : whole) * den + part;
    return Fraction(negative ? -magnitude : magnitude, den);
  }
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Fraction(parse_int(text, text), 1);
  return Fraction(parse_int(text.substr(0, slash), text), parse_int(text.substr(slash + 1), text));
}

}  // namespace gapsieve
