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

#ifndef LDPARITH_PRIMES_HPP
#define LDPARITH_PRIMES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ldparith/util.hpp"

namespace ldparith {

/// Primes up to a limit plus the smallest-prime-factor table that makes
/// factorization O(log m). Immutable after construction; safe to share
/// across threads.
struct PrimeTable {
  std::int64_t limit = 0;
  std::vector<std::int64_t> primes;     // ascending, p_1 = 2
  std::vector<std::uint32_t> spf;       // spf[m] for m in [2, limit]

  std::int64_t spf_of(std::int64_t m) const {
    if (m < 2 || m > limit) {
      throw std::domain_error("spf_of: argument " + std::to_string(m) +
                              " outside [2, " + std::to_string(limit) + "]");
    }
    return spf[static_cast<std::size_t>(m)];
  }

  /// 1-based index of a prime (p_1 = 2). Throws if p is not in the table.
  std::int64_t index_of(std::int64_t p) const {
    const auto it = std::lower_bound(primes.begin(), primes.end(), p);
    if (it == primes.end() || *it != p) {
      throw std::domain_error("index_of: " + std::to_string(p) +
                              " is not a prime in the table");
    }
    return (it - primes.begin()) + 1;
  }
};

/// Linear (one-pass) smallest-prime-factor sieve.
inline PrimeTable build_prime_table(std::int64_t limit) {
  if (limit < 2) {
    throw std::domain_error("build_prime_table: limit must be >= 2");
  }
  if (limit > (std::int64_t{1} << 31)) {
    throw std::length_error("build_prime_table: limit above 2^31");
  }
  PrimeTable table;
  table.limit = limit;
  table.spf.assign(static_cast<std::size_t>(limit) + 1, 0);
  for (std::int64_t i = 2; i <= limit; ++i) {
    if (table.spf[i] == 0) {
      table.spf[i] = static_cast<std::uint32_t>(i);
      table.primes.push_back(i);
    }
    for (const std::int64_t p : table.primes) {
      if (p > table.spf[i] || i * p > limit) break;
      table.spf[i * p] = static_cast<std::uint32_t>(p);
    }
  }
  return table;
}

struct Factor {
  std::int64_t prime = 0;
  int exponent = 0;

  friend bool operator==(const Factor&, const Factor&) = default;
};

/// Prime factorization of m. Uses the spf chain for m <= limit and trial
/// division by table primes up to limit^2. m = 1 yields the empty product.
inline std::vector<Factor> factorize(std::int64_t m, const PrimeTable& table) {
  if (m < 1) {
    throw std::domain_error("factorize: argument must be positive");
  }
  std::vector<Factor> out;
  if (m == 1) return out;
  if (m <= table.limit) {
    while (m > 1) {
      const auto p = static_cast<std::int64_t>(table.spf[m]);
      int e = 0;
      while (m % p == 0) {
        m /= p;
        ++e;
      }
      out.push_back({p, e});
    }
    return out;
  }
  if (m > table.limit * table.limit) {
    throw std::length_error("factorize: " + std::to_string(m) +
                            " exceeds table capacity limit^2");
  }
  for (const std::int64_t p : table.primes) {
    if (p * p > m) break;
    if (m % p != 0) continue;
    int e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    out.push_back({p, e});
  }
  if (m > 1) out.push_back({m, 1});  // leftover cofactor is prime
  return out;
}

struct MertensSums {
  double total = 0.0;
  double odd_index = 0.0;   // 1/p over p_1, p_3, ...
  double even_index = 0.0;  // 1/p over p_2, p_4, ...
};

/// Streams primes <= limit in ascending order as fn(p, k) with 1-based
/// index k. Segmented odd-only sieve; memory stays a few MB at 10^8.
template <typename Fn>
void for_each_prime(std::int64_t limit, Fn&& fn) {
  if (limit < 2) return;
  std::int64_t index = 0;
  fn(std::int64_t{2}, ++index);
  if (limit < 3) return;

  const auto root = static_cast<std::int64_t>(std::sqrt(static_cast<double>(limit))) + 1;
  std::vector<char> small(static_cast<std::size_t>(root) + 1, 0);
  std::vector<std::int64_t> base;  // odd primes <= sqrt(limit)
  for (std::int64_t i = 3; i <= root; i += 2) {
    if (small[i]) continue;
    base.push_back(i);
    for (std::int64_t j = i * i; j <= root; j += 2 * i) small[j] = 1;
  }

  constexpr std::int64_t kOddsPerSegment = std::int64_t{1} << 20;
  std::vector<char> seg(kOddsPerSegment);
  for (std::int64_t lo = 3; lo <= limit; lo += 2 * kOddsPerSegment) {
    const std::int64_t hi = std::min(limit, lo + 2 * kOddsPerSegment - 2);
    const std::int64_t count = (hi - lo) / 2 + 1;
    std::fill(seg.begin(), seg.begin() + count, 0);
    for (const std::int64_t p : base) {
      if (p * p > hi) break;
      std::int64_t start = std::max(p * p, ((lo + p - 1) / p) * p);
      if (start % 2 == 0) start += p;
      for (std::int64_t m = start; m <= hi; m += 2 * p) {
        seg[(m - lo) / 2] = 1;
      }
    }
    for (std::int64_t i = 0; i < count; ++i) {
      if (!seg[i]) fn(lo + 2 * i, ++index);
    }
  }
}

/// Partial Mertens sums over primes <= n split by prime index parity.
/// total is odd_index + even_index by construction.
inline MertensSums mertens_sums(std::int64_t n) {
  if (n < 1) throw std::domain_error("mertens_sums: n must be positive");
  KahanSum odd, even;
  for_each_prime(n, [&](std::int64_t p, std::int64_t k) {
    (k % 2 == 1 ? odd : even).add(1.0 / static_cast<double>(p));
  });
  MertensSums out;
  out.odd_index = odd.value();
  out.even_index = even.value();
  out.total = out.odd_index + out.even_index;
  return out;
}

inline MertensSums mertens_sums(const PrimeTable& table, std::int64_t n) {
  if (n < 1) throw std::domain_error("mertens_sums: n must be positive");
  if (n > table.limit) {
    throw std::length_error("mertens_sums: n exceeds table limit " +
                            std::to_string(table.limit));
  }
  KahanSum odd, even;
  std::int64_t k = 0;
  for (const std::int64_t p : table.primes) {
    if (p > n) break;
    ++k;
    (k % 2 == 1 ? odd : even).add(1.0 / static_cast<double>(p));
  }
  MertensSums out;
  out.odd_index = odd.value();
  out.even_index = even.value();
  out.total = out.odd_index + out.even_index;
  return out;
}

/// entry[m] = number of distinct primes dividing m, for m in [1, N].
/// entry[0] is unused. An entry that is still zero when its index is reached
/// marks a prime, so no separate primality array is needed.
inline std::vector<std::uint8_t> omega_sieve(std::int64_t N) {
  if (N < 1) throw std::domain_error("omega_sieve: N must be positive");
  if (N > 100'000'000) {
    throw std::length_error("omega_sieve: N above the 10^8 memory budget");
  }
  std::vector<std::uint8_t> omega(static_cast<std::size_t>(N) + 1, 0);
  for (std::int64_t i = 2; i <= N; ++i) {
    if (omega[i] != 0) continue;  // i has a smaller prime factor
    for (std::int64_t m = i; m <= N; m += i) ++omega[m];
  }
  return omega;
}

}  // namespace ldparith

#endif  // LDPARITH_PRIMES_HPP
