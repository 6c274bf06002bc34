// Copyright 2026 The ldparith Authors
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

#ifndef LDPARITH_RATIONAL_HPP
#define LDPARITH_RATIONAL_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ldparith {

namespace detail {

using int128 = __int128;

inline int128 abs128(int128 v) { return v < 0 ? -v : v; }

inline int128 gcd128(int128 a, int128 b) {
  a = abs128(a);
  b = abs128(b);
  while (b != 0) {
    const int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace detail

/// Exact rational with int64 storage, normalized (den > 0, gcd = 1).
/// Construction and arithmetic go through 128-bit intermediates and throw
/// std::length_error when a reduced value does not fit.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(detail::int128 n, detail::int128 d) {
    if (d == 0) throw std::domain_error("rational: zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    const detail::int128 g = n == 0 ? d : detail::gcd128(n, d);
    n /= g;
    d /= g;
    constexpr detail::int128 kMax = INT64_MAX;
    if (n > kMax || n < -kMax || d > kMax) {
      throw std::length_error("rational: value exceeds 64-bit capacity");
    }
    return Rational{static_cast<std::int64_t>(n), static_cast<std::int64_t>(d)};
  }

  static Rational of(std::int64_t n, std::int64_t d) {
    return make(static_cast<detail::int128>(n), static_cast<detail::int128>(d));
  }

  double as_double() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }

  friend Rational operator-(const Rational& a, const Rational& b) {
    const auto n = static_cast<detail::int128>(a.num) * b.den -
                   static_cast<detail::int128>(b.num) * a.den;
    const auto d = static_cast<detail::int128>(a.den) * b.den;
    return make(n, d);
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }

  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<detail::int128>(a.num) * b.den <
           static_cast<detail::int128>(b.num) * a.den;
  }

  friend bool operator<=(const Rational& a, const Rational& b) {
    return a == b || a < b;
  }
};

}  // namespace ldparith

#endif  // LDPARITH_RATIONAL_HPP
