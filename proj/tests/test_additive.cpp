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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "ldparith/additive.hpp"
#include "ldparith/primes.hpp"

using Catch::Approx;
using namespace ldparith;

TEST_CASE("g_eval on small integers") {
  const PrimeTable table = build_prime_table(1000);
  const auto ones = AdditiveFunctionSpec::constant(1.0);
  REQUIRE(g_eval(ones, 60, table) == 3.0);
  REQUIRE(g_eval(ones, 8, table) == 1.0);  // exponents do not matter
  REQUIRE(g_eval(ones, 1, table) == 0.0);

  const auto two = AdditiveFunctionSpec::two_value_by_index(1.0, 2.0);
  REQUIRE(g_eval(two, 6, table) == 3.0);  // g(p_1) + g(p_2) = 1 + 2
  REQUIRE(g_eval(two, 4, table) == 1.0);
  REQUIRE(g_eval(two, 15, table) == 1.0 + 2.0);  // p_3 = 5 odd, p_4... 15 = 3*5
}

TEST_CASE("two_value_by_index follows prime index parity") {
  const auto two = AdditiveFunctionSpec::two_value_by_index(10.0, 20.0);
  REQUIRE(two.value_at(2, 1) == 10.0);
  REQUIRE(two.value_at(3, 2) == 20.0);
  REQUIRE(two.value_at(5, 3) == 10.0);
  REQUIRE_THROWS_AS(two.value_at(2, 0), std::domain_error);
}

TEST_CASE("interval oscillating segments") {
  const auto osc =
      AdditiveFunctionSpec::interval_oscillating(1.0, 2.0, {10, 100});
  REQUIRE(osc.value_at(7) == 1.0);     // (0, 10]
  REQUIRE(osc.value_at(10) == 1.0);    // boundary belongs to the left segment
  REQUIRE(osc.value_at(11) == 2.0);    // (10, 100]
  REQUIRE(osc.value_at(101) == 1.0);   // alternation continues past the list
  REQUIRE_THROWS_AS(
      AdditiveFunctionSpec::interval_oscillating(1.0, 2.0, {100, 10}),
      std::invalid_argument);
}

TEST_CASE("table spec with default") {
  const auto t = AdditiveFunctionSpec::table({{2, 5.0}}, 0.0);
  REQUIRE(t.value_at(2) == 5.0);
  REQUIRE(t.value_at(3) == 0.0);
}

TEST_CASE("non-finite values are rejected at construction") {
  REQUIRE_THROWS_AS(
      AdditiveFunctionSpec::constant(std::numeric_limits<double>::quiet_NaN()),
      std::invalid_argument);
  REQUIRE_THROWS_AS(
      AdditiveFunctionSpec::constant(std::numeric_limits<double>::infinity()),
      std::invalid_argument);
  REQUIRE_THROWS_AS(
      AdditiveFunctionSpec::table({{2, std::numeric_limits<double>::infinity()}}, 0.0),
      std::invalid_argument);
}

TEST_CASE("empirical measure of a constant function is a point mass") {
  const PrimeTable table = build_prime_table(1000);
  const EmpiricalMeasure em =
      empirical_rho(AdditiveFunctionSpec::constant(2.5), table, 100);
  REQUIRE(em.atoms.size() == 1);
  REQUIRE(em.atoms[0].first == 2.5);
  REQUIRE(em.atoms[0].second == Approx(1.0).margin(1e-12));
  REQUIRE(em.normalizer == Approx(1.802817201048871).epsilon(1e-14));
}

TEST_CASE("empirical measure of a table spec at n=10") {
  const PrimeTable table = build_prime_table(1000);
  const auto spec = AdditiveFunctionSpec::table({{2, 5.0}}, 0.0);
  const EmpiricalMeasure em = empirical_rho(spec, table, 10);
  REQUIRE(em.atoms.size() == 2);
  REQUIRE(em.atoms[0].first == 0.0);
  REQUIRE(em.atoms[1].first == 5.0);
  // weights (1/3 + 1/5 + 1/7) / (247/210) = 142/247 and (1/2) / (247/210)
  REQUIRE(em.atoms[0].second == Approx(142.0 / 247.0).epsilon(1e-14));
  REQUIRE(em.atoms[1].second == Approx(105.0 / 247.0).epsilon(1e-14));
}

TEST_CASE("empirical measure of the index-split function at 1e6") {
  const PrimeTable table = build_prime_table(1'000'000);
  const auto spec = AdditiveFunctionSpec::two_value_by_index(1.0, 2.0);
  const EmpiricalMeasure em = empirical_rho(spec, table, 1'000'000);
  REQUIRE(em.atoms.size() == 2);
  REQUIRE(std::abs(em.atoms[0].second - 0.5) < 0.1);
  REQUIRE(std::abs(em.atoms[1].second - 0.5) < 0.1);

  SECTION("weights sum to one and the first moment sits between the values") {
    for (std::int64_t n : {100, 10'000, 1'000'000}) {
      const EmpiricalMeasure m = empirical_rho(spec, table, n);
      double mass = 0.0, mean = 0.0;
      for (const auto& [v, w] : m.atoms) {
        REQUIRE(w > 0.0);
        mass += w;
        mean += v * w;
      }
      REQUIRE(std::abs(mass - 1.0) <= 1e-12);
      REQUIRE(mean >= 1.0);
      REQUIRE(mean <= 2.0);
    }
  }
}

TEST_CASE("empirical_rho error paths") {
  const PrimeTable table = build_prime_table(1000);
  const auto spec = AdditiveFunctionSpec::constant(1.0);
  REQUIRE_THROWS_AS(empirical_rho(spec, table, 5000), std::length_error);
  REQUIRE_THROWS_AS(empirical_rho(spec, table, 1), std::domain_error);
}

TEST_CASE("moderate scaling constants") {
  const PrimeTable table = build_prime_table(1000);

  SECTION("constant g makes mu and sigma2 the Mertens sum") {
    const ModerateScaling sc =
        mu_sigma(AdditiveFunctionSpec::constant(1.0), table, 100);
    const double mert = mertens_sums(table, 100).total;
    REQUIRE(sc.mu_n == Approx(mert).epsilon(1e-15));
    REQUIRE(sc.sigma2_n == Approx(mert).epsilon(1e-15));
    REQUIRE(sc.a_n == Approx(std::pow(mert, 0.75)).epsilon(1e-15));
    REQUIRE(sc.speed == Approx(sc.a_n * sc.a_n / sc.sigma2_n).epsilon(1e-15));
  }

  SECTION("scaling g by c scales mu by c and sigma2 by c^2") {
    const ModerateScaling one =
        mu_sigma(AdditiveFunctionSpec::constant(1.0), table, 100);
    const ModerateScaling two =
        mu_sigma(AdditiveFunctionSpec::constant(2.0), table, 100);
    REQUIRE(two.mu_n == Approx(2.0 * one.mu_n).epsilon(1e-14));
    REQUIRE(two.sigma2_n == Approx(4.0 * one.sigma2_n).epsilon(1e-14));
  }

  SECTION("single-prime table spec") {
    const ModerateScaling sc =
        mu_sigma(AdditiveFunctionSpec::table({{2, 1.0}}, 0.0), table, 10);
    REQUIRE(sc.mu_n == 0.5);
    REQUIRE(sc.sigma2_n == 0.5);
  }

  SECTION("degenerate function is an error") {
    REQUIRE_THROWS_AS(mu_sigma(AdditiveFunctionSpec::constant(0.0), table, 100),
                      std::domain_error);
  }

  SECTION("explicit a_n is honored") {
    const ModerateScaling sc =
        mu_sigma(AdditiveFunctionSpec::constant(1.0), table, 100, 3.0);
    REQUIRE(sc.a_n == 3.0);
  }
}

TEST_CASE("counterexample schedule") {
  SECTION("single segment is the constant cumulant") {
    const CounterexampleSchedule s = counterexample_schedule(1.0, 2.0, 0.1, 1.0, 1);
    REQUIRE(s.breakpoints.size() == 1);
    REQUIRE(s.cumulants[0] == std::expm1(1.0));
  }

  SECTION("infeasible gap") {
    const double half_gap = (std::expm1(2.0) - std::expm1(1.0)) / 2.0;
    REQUIRE_THROWS_AS(counterexample_schedule(1.0, 2.0, half_gap, 1.0, 4),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(counterexample_schedule(1.0, 1.0, 0.1, 1.0, 4),
                      std::invalid_argument);
  }

  SECTION("alternating inequalities hold and match a direct integral") {
    const CounterexampleSchedule s = counterexample_schedule(1.0, 2.0, 0.1, 1.0, 4);
    REQUIRE(s.breakpoints.size() == 4);
    const double low = std::expm1(1.0);
    const double high = std::expm1(2.0);

    // direct evaluation of the piecewise integral from the breakpoints
    double integral = 0.0, prev = 0.0;
    for (std::size_t k = 0; k < s.breakpoints.size(); ++k) {
      const double value = (k % 2 == 0) ? low : high;
      integral += value * (s.breakpoints[k] - prev);
      prev = s.breakpoints[k];
      const double phi = integral / s.breakpoints[k];
      REQUIRE(phi == Approx(s.cumulants[k]).epsilon(1e-12));
      if (k % 2 == 0) {
        REQUIRE(s.cumulants[k] <= s.lower_threshold);
      } else {
        REQUIRE(s.cumulants[k] >= s.upper_threshold);
      }
      if (k > 0) REQUIRE(s.breakpoints[k] > s.breakpoints[k - 1]);
    }
  }
}
