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

#ifndef LDPARITH_VERIFY_HPP
#define LDPARITH_VERIFY_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "ldparith/primes.hpp"
#include "ldparith/ratefn.hpp"
#include "ldparith/simulate.hpp"

namespace ldparith {

/// One verification line: measured value, its bound, and the verdict.
/// relation "info" marks values that are reported but never asserted.
struct VerifyCheck {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  std::string relation;  // "<=", ">=", ">", "info"
  bool pass = true;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;

  bool all_pass() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }
};

namespace detail {

inline VerifyCheck check_le(std::string name, double measured, double bound) {
  return {std::move(name), measured, bound, "<=", measured <= bound};
}

inline VerifyCheck check_ge(std::string name, double measured, double bound) {
  return {std::move(name), measured, bound, ">=", measured >= bound};
}

inline VerifyCheck check_gt(std::string name, double measured, double bound) {
  return {std::move(name), measured, bound, ">",
          measured > bound && std::isfinite(measured)};
}

inline VerifyCheck info(std::string name, double measured, double reference) {
  return {std::move(name), measured, reference, "info", true};
}

/// Max |closed form - Legendre transform| over a uniform x grid.
inline double duality_gap(const ClosedForm& form, double x_lo, double x_hi,
                          int points) {
  const LimitMeasure rho = form.measure();
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    const double x = x_lo + (x_hi - x_lo) * i / (points - 1);
    const double a = closed_form_rate(form, x).value;
    const double b = legendre_rate(rho, x).value;
    worst = std::max(worst, std::abs(a - b));
  }
  return worst;
}

}  // namespace detail

/// Closed forms vs the numeric transform on family-specific grids.
inline VerifyReport verify_duality() {
  VerifyReport r;
  struct Row {
    const char* name;
    ClosedForm form;
    double mean;
  };
  const Row rows[] = {
      {"duality constant(1)", ClosedForm::constant(1.0), 1.0},
      {"duality constant(2.5)", ClosedForm::constant(2.5), 2.5},
      {"duality two_atom_ratio2(1)", ClosedForm::two_atom_ratio2(1.0), 1.5},
      {"duality poisson(1)", ClosedForm::poisson(1.0), 1.0},
      {"duality poisson(3)", ClosedForm::poisson(3.0), 3.0},
      {"duality binomial1(0.3)", ClosedForm::binomial1(0.3), 0.3},
  };
  for (const Row& row : rows) {
    r.checks.push_back(detail::check_le(
        row.name,
        detail::duality_gap(row.form, row.mean / 4.0, 4.0 * row.mean, 200),
        1e-8));
  }
  r.checks.push_back(detail::check_le(
      "duality gaussian",
      detail::duality_gap(ClosedForm::gaussian(), -4.0, 4.0, 200), 1e-8));

  // The n = 2 binomial formula is evaluated as printed and reported only;
  // the numeric transform is authoritative.
  const ClosedForm b2 = ClosedForm::binomial2(0.3);
  r.checks.push_back(detail::info(
      "binomial2(0.3) printed form vs transform (reported only)",
      detail::duality_gap(b2, 0.15, 2.4, 200), 0.0));
  return r;
}

/// Exact-law cross checks: frozen small laws, mean identities, and the
/// distribution-level moment agreement between the two models.
inline VerifyReport verify_oracle() {
  VerifyReport r;
  const auto g1 = AdditiveFunctionSpec::constant(1.0);

  {
    const DiscreteDistribution z10 = exact_z_distribution(10, g1);
    double worst = std::abs(z10.probs[0] - 1.0 / 10.0);
    worst = std::max(worst, std::abs(z10.probs[1] - 7.0 / 10.0));
    worst = std::max(worst, std::abs(z10.probs[2] - 2.0 / 10.0));
    r.checks.push_back(detail::check_le("z law at N=10 vs {1,7,2}/10", worst, 0.0));
  }

  {
    std::int64_t sum_omega = 0;
    const auto omega = omega_sieve(1000);
    for (std::int64_t m = 1; m <= 1000; ++m) sum_omega += omega[m];
    std::int64_t sum_floor = 0;
    for_each_prime(1000, [&](std::int64_t p, std::int64_t) { sum_floor += 1000 / p; });
    r.checks.push_back(detail::check_le(
        "z mean identity at n=1e3 (integer)",
        std::abs(static_cast<double>(sum_omega - sum_floor)), 0.0));
  }

  for (const std::int64_t Q : {std::int64_t{10'000}, std::int64_t{1'000'000}}) {
    const DiscreteDistribution y = exact_y_distribution(Q, g1);
    const double mert = mertens_sums(Q).total;
    r.checks.push_back(detail::check_le(
        "y mean identity at Q=" + std::to_string(Q),
        std::abs(y.mean() - mert), 1e-10));
    r.checks.push_back(detail::check_le(
        "y law mass at Q=" + std::to_string(Q),
        std::abs(y.total_mass() - 1.0), 1e-12));
  }

  {
    const std::int64_t N = 10'000;
    const DiscreteDistribution z = exact_z_distribution(N, g1);
    const DiscreteDistribution y = exact_y_distribution(N, g1);
    for (int rr = 1; rr <= 4; ++rr) {
      const double gap = std::abs(z.moment(rr) - y.moment(rr));
      const double bound =
          std::pow(static_cast<double>(N), rr) / static_cast<double>(N);
      r.checks.push_back(detail::check_le(
          "z/y moment gap r=" + std::to_string(rr) + " at N=1e4", gap, bound));
    }
  }
  return r;
}

/// Exhaustive finite-n moment bound on the canonical parameters.
inline VerifyReport verify_moments() {
  VerifyReport r;
  const auto rows = moment_gap_bound_check(100'000, 50, 1.0, 5,
                                           AdditiveFunctionSpec::constant(1.0));
  for (const auto& row : rows) {
    r.checks.push_back(detail::check_le(
        "moment gap r=" + std::to_string(row.r) + " (n=1e5, Q=50, C=1)",
        row.gap, row.bound));
  }
  return r;
}

/// Moderate-deviation shape checks on the exact independent-model law.
inline VerifyReport verify_mdp() {
  VerifyReport r;
  const auto g1 = AdditiveFunctionSpec::constant(1.0);
  const std::int64_t Q = 1'000'000;
  const DiscreteDistribution dist = exact_y_distribution(Q, g1);

  ModerateScaling sc;
  sc.mu_n = mertens_sums(Q).total;
  sc.sigma2_n = sc.mu_n;  // g = 1 makes both sums coincide
  sc.a_n = std::pow(sc.sigma2_n, 0.75);
  sc.speed = sc.a_n * sc.a_n / sc.sigma2_n;

  const double rate_half = deviation_rate_estimate(dist, sc, 0.5);
  const double rate_one = deviation_rate_estimate(dist, sc, 1.0);
  r.checks.push_back(detail::check_gt("mdp rate at x=0.5 positive", rate_half, 0.0));
  r.checks.push_back(detail::check_gt("mdp rate at x=1.0 positive", rate_one, 0.0));
  r.checks.push_back(
      detail::check_gt("mdp rate increasing in x", rate_one - rate_half, 0.0));

  std::vector<double> grid;
  for (int i = 1; i <= 200; ++i) grid.push_back(0.02 * i);
  for (const double x : {0.5, 1.0}) {
    const double threshold = sc.mu_n + x * sc.a_n;
    const double bound = chernoff_tail_bound(
        [&](double th) { return log_mgf(dist, th); }, threshold, grid);
    const double chernoff_rate = -std::log(bound) / sc.speed;
    const double rate = x == 0.5 ? rate_half : rate_one;
    r.checks.push_back(detail::check_ge(
        "mdp rate >= chernoff rate at x=" + std::to_string(x), rate,
        chernoff_rate));
    r.checks.push_back(detail::info(
        "mdp |rate - x^2/2| at x=" + std::to_string(x),
        std::abs(rate - mdp_rate(x)), 0.0));
  }
  return r;
}

/// Alternating-cumulant witness that the normalized cumulant has no limit.
inline VerifyReport verify_counterexample() {
  VerifyReport r;
  const CounterexampleSchedule s = counterexample_schedule(1.0, 2.0, 0.1, 1.0, 6);
  for (std::size_t k = 0; k < s.breakpoints.size(); ++k) {
    const bool odd = k % 2 == 0;  // k is 0-based; breakpoint 1 is odd
    if (odd) {
      r.checks.push_back(detail::check_le(
          "counterexample cumulant at breakpoint " + std::to_string(k + 1),
          s.cumulants[k], s.lower_threshold));
    } else {
      r.checks.push_back(detail::check_ge(
          "counterexample cumulant at breakpoint " + std::to_string(k + 1),
          s.cumulants[k], s.upper_threshold));
    }
    if (k > 0) {
      r.checks.push_back(detail::check_gt(
          "counterexample breakpoints increasing at " + std::to_string(k + 1),
          s.breakpoints[k] - s.breakpoints[k - 1], 0.0));
    }
  }
  return r;
}

inline VerifyReport verify_suite(const std::string& suite) {
  VerifyReport r;
  const auto append = [&r](const VerifyReport& part) {
    r.checks.insert(r.checks.end(), part.checks.begin(), part.checks.end());
  };
  if (suite == "duality") {
    append(verify_duality());
  } else if (suite == "oracle") {
    append(verify_oracle());
  } else if (suite == "moments") {
    append(verify_moments());
  } else if (suite == "mdp") {
    append(verify_mdp());
  } else if (suite == "counterexample") {
    append(verify_counterexample());
  } else if (suite == "all") {
    append(verify_duality());
    append(verify_oracle());
    append(verify_moments());
    append(verify_mdp());
    append(verify_counterexample());
  } else {
    throw std::invalid_argument(
        "unknown verify suite '" + suite +
        "' (expected all|duality|oracle|moments|mdp|counterexample)");
  }
  return r;
}

/// Renders one fixed-format line per check.
inline std::string format_report(const VerifyReport& report) {
  std::string out;
  char line[256];
  for (const auto& c : report.checks) {
    if (c.relation == "info") {
      std::snprintf(line, sizeof(line), "INFO %-58s measured=%.12g\n",
                    c.name.c_str(), c.measured);
    } else {
      std::snprintf(line, sizeof(line), "%s %-58s measured=%.12g %s bound=%.12g\n",
                    c.pass ? "PASS" : "FAIL", c.name.c_str(), c.measured,
                    c.relation.c_str(), c.bound);
    }
    out += line;
  }
  return out;
}

}  // namespace ldparith

#endif  // LDPARITH_VERIFY_HPP
