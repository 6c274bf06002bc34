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

#ifndef LDPARITH_ADDITIVE_HPP
#define LDPARITH_ADDITIVE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ldparith/primes.hpp"
#include "ldparith/util.hpp"

namespace ldparith {

/// A strongly additive function, described by its values on primes.
/// Evaluation depends only on the set of distinct prime factors:
/// g(p^k) = g(p) and g(mn) = g(m) + g(n) for coprime m, n.
class AdditiveFunctionSpec {
 public:
  enum class Kind {
    kConstant,            // g(p) = lambda
    kTwoValueByIndex,     // g(p_k) = lambda1 for odd k, lambda2 for even k
    kIntervalOscillating, // alternates lambda1/lambda2 on breakpoint intervals
    kTable,               // explicit prime -> value map with a default
  };

  static AdditiveFunctionSpec constant(double lambda) {
    require_finite(lambda, "lambda");
    AdditiveFunctionSpec s;
    s.kind_ = Kind::kConstant;
    s.lambda1_ = lambda;
    return s;
  }

  static AdditiveFunctionSpec two_value_by_index(double lambda1, double lambda2) {
    require_finite(lambda1, "lambda1");
    require_finite(lambda2, "lambda2");
    AdditiveFunctionSpec s;
    s.kind_ = Kind::kTwoValueByIndex;
    s.lambda1_ = lambda1;
    s.lambda2_ = lambda2;
    return s;
  }

  static AdditiveFunctionSpec interval_oscillating(
      double lambda1, double lambda2, std::vector<std::int64_t> breakpoints) {
    require_finite(lambda1, "lambda1");
    require_finite(lambda2, "lambda2");
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
      if (breakpoints[i] <= breakpoints[i - 1]) {
        throw std::invalid_argument(
            "interval_oscillating: breakpoints must be strictly increasing");
      }
    }
    if (!breakpoints.empty() && breakpoints.front() < 1) {
      throw std::invalid_argument("interval_oscillating: breakpoints must be >= 1");
    }
    AdditiveFunctionSpec s;
    s.kind_ = Kind::kIntervalOscillating;
    s.lambda1_ = lambda1;
    s.lambda2_ = lambda2;
    s.breakpoints_ = std::move(breakpoints);
    return s;
  }

  static AdditiveFunctionSpec table(std::map<std::int64_t, double> values,
                                    double fallback) {
    require_finite(fallback, "default");
    for (const auto& [p, v] : values) {
      if (p < 2) {
        throw std::invalid_argument("table: keys must be primes >= 2");
      }
      require_finite(v, "value at " + std::to_string(p));
    }
    AdditiveFunctionSpec s;
    s.kind_ = Kind::kTable;
    s.table_ = std::move(values);
    s.default_ = fallback;
    return s;
  }

  Kind kind() const { return kind_; }
  double lambda() const { return lambda1_; }
  double lambda1() const { return lambda1_; }
  double lambda2() const { return lambda2_; }
  const std::vector<std::int64_t>& breakpoints() const { return breakpoints_; }
  const std::map<std::int64_t, double>& table_values() const { return table_; }
  double table_default() const { return default_; }

  /// Whether evaluation needs the 1-based prime index k.
  bool needs_index() const { return kind_ == Kind::kTwoValueByIndex; }

  /// g at prime p with 1-based index k (k is ignored unless needs_index()).
  double value_at(std::int64_t p, std::int64_t k = 0) const {
    switch (kind_) {
      case Kind::kConstant:
        return lambda1_;
      case Kind::kTwoValueByIndex:
        if (k < 1) {
          throw std::domain_error("value_at: prime index required");
        }
        return (k % 2 == 1) ? lambda1_ : lambda2_;
      case Kind::kIntervalOscillating: {
        // Segment s (1-based) covers (a_{s-1}, a_s] with an implicit a_0 = 0;
        // beyond the last breakpoint the alternation continues.
        const auto it = std::lower_bound(breakpoints_.begin(),
                                         breakpoints_.end(), p);
        const auto segment = (it - breakpoints_.begin()) + 1;
        return (segment % 2 == 1) ? lambda1_ : lambda2_;
      }
      case Kind::kTable: {
        const auto it = table_.find(p);
        return it == table_.end() ? default_ : it->second;
      }
    }
    throw std::logic_error("value_at: unreachable");
  }

  /// The distinct values g can take over primes (used for lattice detection).
  std::vector<double> distinct_values() const {
    std::vector<double> vals;
    switch (kind_) {
      case Kind::kConstant:
        vals = {lambda1_};
        break;
      case Kind::kTwoValueByIndex:
      case Kind::kIntervalOscillating:
        vals = {lambda1_, lambda2_};
        break;
      case Kind::kTable:
        vals.push_back(default_);
        for (const auto& [p, v] : table_) vals.push_back(v);
        break;
    }
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    return vals;
  }

 private:
  static void require_finite(double v, const std::string& name) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("additive spec: " + name + " must be finite");
    }
  }

  Kind kind_ = Kind::kConstant;
  double lambda1_ = 0.0;
  double lambda2_ = 0.0;
  std::vector<std::int64_t> breakpoints_;
  std::map<std::int64_t, double> table_;
  double default_ = 0.0;
};

/// g(m) = sum of g(p) over the distinct prime divisors p of m; g(1) = 0.
inline double g_eval(const AdditiveFunctionSpec& spec, std::int64_t m,
                     const PrimeTable& table) {
  double sum = 0.0;
  for (const Factor& f : factorize(m, table)) {
    const std::int64_t k = spec.needs_index() ? table.index_of(f.prime) : 0;
    sum += spec.value_at(f.prime, k);
  }
  return sum;
}

/// Prime-weighted empirical measure of g-values: weight of value v is
/// (sum of 1/p over primes p <= n with g(p) = v) / (sum of 1/p over p <= n).
struct EmpiricalMeasure {
  std::vector<std::pair<double, double>> atoms;  // (value, weight), ascending
  double normalizer = 0.0;                       // sum of 1/p over p <= n
};

inline EmpiricalMeasure empirical_rho(const AdditiveFunctionSpec& spec,
                                      const PrimeTable& table, std::int64_t n) {
  if (n > table.limit) {
    throw std::length_error("empirical_rho: n exceeds table limit");
  }
  if (n < 2) {
    throw std::domain_error("empirical_rho: no primes <= n");
  }

  EmpiricalMeasure out;
  KahanSum normalizer;
  if (spec.kind() == AdditiveFunctionSpec::Kind::kTable) {
    // Table values may carry representation noise; merge atoms within 1e-12.
    std::vector<std::pair<double, double>> raw;
    std::int64_t k = 0;
    for (const std::int64_t p : table.primes) {
      if (p > n) break;
      ++k;
      const double w = 1.0 / static_cast<double>(p);
      raw.emplace_back(spec.value_at(p, k), w);
      normalizer.add(w);
    }
    std::sort(raw.begin(), raw.end());
    for (const auto& [v, w] : raw) {
      if (!out.atoms.empty() && v - out.atoms.back().first <= 1e-12) {
        out.atoms.back().second += w;
      } else {
        out.atoms.emplace_back(v, w);
      }
    }
  } else {
    std::map<double, KahanSum> groups;  // parametric values merge exactly
    std::int64_t k = 0;
    for (const std::int64_t p : table.primes) {
      if (p > n) break;
      ++k;
      const double w = 1.0 / static_cast<double>(p);
      groups[spec.value_at(p, k)].add(w);
      normalizer.add(w);
    }
    for (const auto& [v, w] : groups) out.atoms.emplace_back(v, w.value());
  }

  out.normalizer = normalizer.value();
  for (auto& [v, w] : out.atoms) w /= out.normalizer;
  return out;
}

/// Centering and scaling constants of the moderate-deviation regime.
struct ModerateScaling {
  double mu_n = 0.0;      // sum of g(p)/p over p <= n
  double sigma2_n = 0.0;  // sum of g(p)^2/p
  double a_n = 0.0;
  double speed = 0.0;     // a_n^2 / sigma_n^2

  /// The regime asks for sigma_n << a_n << sigma_n^2; callers may warn
  /// when a_n falls outside [sigma_n, sigma_n^2].
  bool in_moderate_range() const {
    const double sigma = std::sqrt(sigma2_n);
    return sigma <= a_n && a_n <= sigma2_n;
  }
};

/// If a_n is not supplied, the default rule a_n = sigma_n^{3/2} places it
/// at the geometric midpoint of the admissible window.
inline ModerateScaling mu_sigma(const AdditiveFunctionSpec& spec,
                                const PrimeTable& table, std::int64_t n,
                                std::optional<double> a_n = std::nullopt) {
  if (n > table.limit) {
    throw std::length_error("mu_sigma: n exceeds table limit");
  }
  KahanSum mu, sigma2;
  std::int64_t k = 0;
  for (const std::int64_t p : table.primes) {
    if (p > n) break;
    ++k;
    const double g = spec.value_at(p, k);
    const double w = 1.0 / static_cast<double>(p);
    mu.add(g * w);
    sigma2.add(g * g * w);
  }
  ModerateScaling out;
  out.mu_n = mu.value();
  out.sigma2_n = sigma2.value();
  if (out.sigma2_n <= 0.0) {
    throw std::domain_error("mu_sigma: degenerate additive function (sigma2 = 0)");
  }
  out.a_n = a_n.value_or(std::pow(out.sigma2_n, 0.75));
  out.speed = out.a_n * out.a_n / out.sigma2_n;
  return out;
}

/// Breakpoints u_1 < ... < u_K in the Mertens coordinate u = sum of 1/p,
/// with the running normalized cumulant of the alternating piecewise g.
struct CounterexampleSchedule {
  std::vector<double> breakpoints;
  std::vector<double> cumulants;  // (1/u_k) * integral over [0, u_k]
  double lower_threshold = 0.0;   // (e^{theta*lambda1} - 1) + delta
  double upper_threshold = 0.0;   // (e^{theta*lambda2} - 1) - delta
};

/// Builds a schedule whose normalized cumulant dips below lower_threshold at
/// odd breakpoints and climbs above upper_threshold at even ones, witnessing
/// that the normalized cumulant has no limit. Works in the continuous
/// coordinate u because breakpoints grow geometrically by a factor around
/// (B - A)/delta per segment and leave every feasible sieve range at once.
inline CounterexampleSchedule counterexample_schedule(double lambda1,
                                                      double lambda2,
                                                      double delta, double theta,
                                                      int segments) {
  if (!(lambda1 > 0.0) || !(lambda2 > lambda1)) {
    throw std::invalid_argument(
        "counterexample_schedule: need 0 < lambda1 < lambda2");
  }
  if (!(delta > 0.0) || !(theta > 0.0)) {
    throw std::invalid_argument("counterexample_schedule: delta, theta must be > 0");
  }
  if (segments < 1) {
    throw std::invalid_argument("counterexample_schedule: need at least one segment");
  }
  const double low = std::expm1(theta * lambda1);   // A
  const double high = std::expm1(theta * lambda2);  // B
  if (delta >= (high - low) / 2.0) {
    throw std::invalid_argument(
        "counterexample_schedule: infeasible gap, delta >= (e^{theta*l2} - e^{theta*l1})/2");
  }

  // Overshooting the exact crossing point keeps the inequalities strict.
  constexpr double kMargin = 1.0 + 1e-6;

  CounterexampleSchedule out;
  out.lower_threshold = low + delta;
  out.upper_threshold = high - delta;

  double u = 1.0;
  double integral = low * u;  // integral of (e^{theta g} - 1) over [0, u]
  out.breakpoints.push_back(u);
  out.cumulants.push_back(integral / u);
  for (int k = 2; k <= segments; ++k) {
    double next;
    if (k % 2 == 0) {
      next = (high * u - integral) / delta * kMargin;
      integral += high * (next - u);
    } else {
      next = (integral - low * u) / delta * kMargin;
      integral += low * (next - u);
    }
    u = next;
    out.breakpoints.push_back(u);
    out.cumulants.push_back(integral / u);
  }
  return out;
}

}  // namespace ldparith

#endif  // LDPARITH_ADDITIVE_HPP
