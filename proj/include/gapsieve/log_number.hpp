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

/// @file log_number.hpp
/// @brief Sign plus natural-log-magnitude numbers for quantities far
/// outside the range of any fixed-width float (e^{-15000}, e^{+6000}).
#pragma once

#include <algorithm>
#include <boost/math/special_functions/log1p.hpp>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

#include "gapsieve/errors.hpp"

namespace gapsieve {

template <typename Real>
class LogNumber {
 public:
  /// Zero.
  LogNumber() = default;

  static LogNumber zero() { return {}; }
  static LogNumber one() { return from_log(Real(0)); }
  static LogNumber from_log(Real log_magnitude, int sign = 1) {
    LogNumber x;
    x.sign_ = sign > 0 ? 1 : (sign < 0 ? -1 : 0);
    x.log_ = sign ? log_magnitude : Real(0);
    return x;
  }
  static LogNumber from_value(const Real& v) {
    using std::abs;
    using std::log;
    if (v == 0) return zero();
    return from_log(log(abs(v)), v > 0 ? 1 : -1);
  }

  int sign() const { return sign_; }
  bool is_zero() const { return sign_ == 0; }

  /// ln|x|; throws domain_error on zero.
  const Real& log_magnitude() const {
    if (sign_ == 0) throw domain_error("log magnitude of zero");
    return log_;
  }

  /// exp back to the linear domain; underflows to 0 or overflows to inf
  /// exactly as the underlying type does.
  Real value() const {
    using std::exp;
    if (sign_ == 0) return Real(0);
    return sign_ * exp(log_);
  }

  friend LogNumber operator*(const LogNumber& a, const LogNumber& b) {
    if (a.sign_ == 0 || b.sign_ == 0) return zero();
    return from_log(a.log_ + b.log_, a.sign_ * b.sign_);
  }
  friend LogNumber operator/(const LogNumber& a, const LogNumber& b) {
    if (b.sign_ == 0) throw singularity_error("LogNumber division by zero");
    if (a.sign_ == 0) return zero();
    return from_log(a.log_ - b.log_, a.sign_ * b.sign_);
  }
  LogNumber pow(const Real& e) const {
    if (sign_ == 0) {
      if (e > 0) return zero();
      throw singularity_error("LogNumber: nonpositive power of zero");
    }
    if (sign_ < 0) throw domain_error("LogNumber: real power of a negative number");
    return from_log(log_ * e);
  }
  LogNumber pow(std::int64_t e) const {
    if (sign_ == 0) {
      if (e > 0) return zero();
      throw singularity_error("LogNumber: nonpositive power of zero");
    }
    return from_log(log_ * Real(e), (sign_ < 0 && (e & 1)) ? -1 : 1);
  }

  /// Signed log-sum-exp.
  friend LogNumber operator+(const LogNumber& a, const LogNumber& b) {
    using std::exp;
    if (a.sign_ == 0) return b;
    if (b.sign_ == 0) return a;
    const LogNumber& big = a.log_ >= b.log_ ? a : b;
    const LogNumber& small = a.log_ >= b.log_ ? b : a;
    const Real ratio = exp(small.log_ - big.log_);
    if (big.sign_ == small.sign_) return from_log(big.log_ + boost::math::log1p(ratio), big.sign_);
    if (ratio == 1) return zero();
    return from_log(big.log_ + boost::math::log1p(-ratio), big.sign_);
  }
  LogNumber operator-() const {
    LogNumber x = *this;
    x.sign_ = -x.sign_;
    return x;
  }
  friend LogNumber operator-(const LogNumber& a, const LogNumber& b) { return a + (-b); }

  /// Order by value.
  friend bool operator<(const LogNumber& a, const LogNumber& b) {
    if (a.sign_ != b.sign_) return a.sign_ < b.sign_;
    if (a.sign_ == 0) return false;
    return a.sign_ > 0 ? a.log_ < b.log_ : a.log_ > b.log_;
  }
  friend bool operator==(const LogNumber& a, const LogNumber& b) {
    return a.sign_ == b.sign_ && (a.sign_ == 0 || a.log_ == b.log_);
  }

 private:
  int sign_ = 0;
  Real log_ = Real(0);
};

/// Sum of many terms with a single rescaling by the largest magnitude.
template <typename Real>
LogNumber<Real> log_sum(std::span<const LogNumber<Real>> terms) {
  using std::exp;
  using std::log;
  bool any = false;
  Real top = 0;
  for (const auto& t : terms) {
    if (t.is_zero()) continue;
    if (!any || t.log_magnitude() > top) top = t.log_magnitude();
    any = true;
  }
  if (!any) return LogNumber<Real>::zero();
  Real acc = 0;
  for (const auto& t : terms)
    if (!t.is_zero()) acc += t.sign() * exp(t.log_magnitude() - top);
  return LogNumber<Real>::from_value(acc) * LogNumber<Real>::from_log(top);
}

}  // namespace gapsieve
