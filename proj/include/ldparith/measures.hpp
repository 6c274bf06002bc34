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

#ifndef LDPARITH_MEASURES_HPP
#define LDPARITH_MEASURES_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ldparith/additive.hpp"
#include "ldparith/util.hpp"

namespace ldparith {

namespace detail {

/// 64-node Gauss-Legendre rule on [-1, 1], nodes by Newton on P_64.
struct GaussLegendre64 {
  std::array<double, 64> node{};
  std::array<double, 64> weight{};

  GaussLegendre64() {
    constexpr int n = 64;
    for (int i = 0; i < n / 2; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double pn = 0.0, dpn = 0.0;
      for (int iter = 0; iter < 64; ++iter) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2 * j + 1) * x * p1 - j * p2) / (j + 1);
        }
        pn = p0;
        dpn = n * (x * p0 - p1) / (x * x - 1.0);
        const double dx = pn / dpn;
        x -= dx;
        if (std::abs(dx) < 1e-16) {
          // one clean evaluation at the converged node for the weight
          p0 = 1.0;
          p1 = 0.0;
          for (int j = 0; j < n; ++j) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2 * j + 1) * x * p1 - j * p2) / (j + 1);
          }
          dpn = n * (x * p0 - p1) / (x * x - 1.0);
          break;
        }
      }
      node[i] = -x;
      node[n - 1 - i] = x;
      weight[i] = weight[n - 1 - i] = 2.0 / ((1.0 - x * x) * dpn * dpn);
    }
  }
};

inline const GaussLegendre64& gl64() {
  static const GaussLegendre64 rule;
  return rule;
}

/// Composite 64-node Gauss-Legendre integral of f over [a, b].
template <typename F>
double gl_integrate(F&& f, double a, double b, int panels) {
  const auto& rule = gl64();
  panels = std::max(panels, 1);
  const double h = (b - a) / panels;
  KahanSum total;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    const double half = 0.5 * h;
    for (int i = 0; i < 64; ++i) {
      total.add(rule.weight[i] * half * f(mid + half * rule.node[i]));
    }
  }
  return total.value();
}

/// Integration window for exp(theta*y - y^2/2)-type integrands on [-C, C]:
/// everything outside [theta - 45, theta + 45] and [-45, 45] is below the
/// double underflow edge, so a huge C never spreads the panels over dead
/// regions.
struct GaussianWindow {
  double lo = 0.0;
  double hi = 0.0;
  int panels = 1;
};

inline GaussianWindow gaussian_window(double C, double theta) {
  GaussianWindow w;
  w.lo = std::max(-C, std::min(-45.0, theta - 45.0));
  w.hi = std::min(C, std::max(45.0, theta + 45.0));
  const double half = 0.5 * (w.hi - w.lo);
  const double scale = half * (std::abs(theta) + half);
  w.panels = std::clamp(static_cast<int>(scale / 40.0) + 1, 1, 512);
  return w;
}

inline double normal_pdf(double y) {
  return std::exp(-0.5 * y * y) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_mass(double C) {  // P(|N(0,1)| <= C)
  return std::erf(C / std::numbers::sqrt2);
}

}  // namespace detail

/// A limit law for the prime-weighted g-values: finitely many atoms, a
/// Poisson, binomial or standard Gaussian law, or an empirical measure
/// carried over verbatim. Every variant has finite exponential moments.
class LimitMeasure {
 public:
  enum class Kind { kAtoms, kPoisson, kBinomial, kGaussian, kEmpirical };

  static LimitMeasure atoms(std::vector<std::pair<double, double>> atom_list) {
    if (atom_list.empty()) {
      throw std::invalid_argument("atoms: need at least one atom");
    }
    std::sort(atom_list.begin(), atom_list.end());
    std::vector<std::pair<double, double>> merged;
    KahanSum mass;
    for (const auto& [v, w] : atom_list) {
      if (!std::isfinite(v) || !(w > 0.0)) {
        throw std::invalid_argument("atoms: values must be finite, weights > 0");
      }
      if (!merged.empty() && merged.back().first == v) {
        merged.back().second += w;
      } else {
        merged.emplace_back(v, w);
      }
      mass.add(w);
    }
    if (std::abs(mass.value() - 1.0) > 1e-12) {
      throw std::invalid_argument("atoms: weights must sum to 1 within 1e-12");
    }
    LimitMeasure m;
    m.kind_ = Kind::kAtoms;
    m.atoms_ = std::move(merged);
    return m;
  }

  static LimitMeasure poisson(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda) || lambda > 500.0) {
      throw std::invalid_argument("poisson: lambda must be in (0, 500]");
    }
    LimitMeasure m;
    m.kind_ = Kind::kPoisson;
    m.lambda_ = lambda;
    return m;
  }

  static LimitMeasure binomial(std::int64_t n, double beta) {
    if (n < 1 || n > 1'000'000) {
      throw std::invalid_argument("binomial: n must be in [1, 1e6]");
    }
    if (!(beta > 0.0) || !(beta < 1.0)) {
      throw std::invalid_argument("binomial: beta must be in (0, 1)");
    }
    LimitMeasure m;
    m.kind_ = Kind::kBinomial;
    m.binomial_n_ = n;
    m.beta_ = beta;
    return m;
  }

  static LimitMeasure gaussian() {
    LimitMeasure m;
    m.kind_ = Kind::kGaussian;
    return m;
  }

  static LimitMeasure empirical(EmpiricalMeasure em) {
    if (em.atoms.empty()) {
      throw std::invalid_argument("empirical: measure has no atoms");
    }
    LimitMeasure m;
    m.kind_ = Kind::kEmpirical;
    m.atoms_ = std::move(em.atoms);
    return m;
  }

  Kind kind() const { return kind_; }
  double poisson_lambda() const { return lambda_; }
  std::int64_t binomial_n() const { return binomial_n_; }
  double binomial_beta() const { return beta_; }
  const std::vector<std::pair<double, double>>& atom_list() const { return atoms_; }

 private:
  Kind kind_ = Kind::kAtoms;
  std::vector<std::pair<double, double>> atoms_;
  double lambda_ = 0.0;
  std::int64_t binomial_n_ = 0;
  double beta_ = 0.0;
};

/// Truncated cumulant functional and its first two theta-derivatives:
///   lambda   = integral of (e^{theta y} - 1) over |y| <= C
///   dlambda  = integral of y e^{theta y}
///   d2lambda = integral of y^2 e^{theta y}
struct CumulantValue {
  double lambda = 0.0;
  double dlambda = 0.0;
  double d2lambda = 0.0;
};

/// Safe theta interval for evaluating the cumulant without overflow.
struct ThetaRange {
  double lo = -kInfinity;
  double hi = kInfinity;

  bool contains(double theta) const { return theta >= lo && theta <= hi; }
};

inline ThetaRange theta_range(const LimitMeasure& rho, double C = kInfinity) {
  constexpr double kBudget = 700.0;  // exp stays below the double overflow edge
  constexpr double kHard = 1.0e6;
  ThetaRange r{-kHard, kHard};
  switch (rho.kind()) {
    case LimitMeasure::Kind::kAtoms:
    case LimitMeasure::Kind::kEmpirical: {
      for (const auto& [v, w] : rho.atom_list()) {
        if (std::abs(v) > C) continue;
        if (v > 0.0) r.hi = std::min(r.hi, kBudget / v);
        if (v < 0.0) r.lo = std::max(r.lo, kBudget / v);
      }
      return r;
    }
    case LimitMeasure::Kind::kPoisson: {
      const double lam = rho.poisson_lambda();
      if (C == kInfinity) {
        r.hi = std::log1p(kBudget / lam);
      } else {
        const double top = std::max(1.0, std::floor(C));
        r.hi = kBudget / top;
      }
      return r;
    }
    case LimitMeasure::Kind::kBinomial: {
      const double n = static_cast<double>(rho.binomial_n());
      if (C == kInfinity) {
        r.hi = std::log1p(std::expm1(kBudget / n) / rho.binomial_beta());
      } else {
        const double top = std::max(1.0, std::min(n, std::floor(C)));
        r.hi = kBudget / top;
      }
      return r;
    }
    case LimitMeasure::Kind::kGaussian: {
      const double cap = std::sqrt(2.0 * kBudget);
      if (C == kInfinity || C >= cap) {
        r.hi = cap;
      } else {
        r.hi = (kBudget + C * C / 2.0) / C;
      }
      r.lo = -r.hi;
      return r;
    }
  }
  return r;
}

namespace detail {

inline CumulantValue atom_cumulant(
    const std::vector<std::pair<double, double>>& atoms, double theta, double C) {
  KahanSum l, d1, d2;
  for (const auto& [v, w] : atoms) {
    if (std::abs(v) > C) continue;
    const double e = std::exp(theta * v);
    l.add(w * std::expm1(theta * v));
    d1.add(w * v * e);
    d2.add(w * v * v * e);
  }
  return {l.value(), d1.value(), d2.value()};
}

/// Truncated Poisson sums: terms pmf(k) e^{theta k} f(k) for k <= floor(C).
/// The series is cut once the tilted mass beyond k is below 1e-16 of the
/// total (the tilted law is Poisson with mean lambda e^theta).
inline CumulantValue poisson_truncated(double lambda, double theta, double C) {
  const double tilted_mean = lambda * std::exp(std::min(theta, 700.0));
  const double cut =
      tilted_mean + 60.0 * std::sqrt(tilted_mean + 1.0) + 60.0;
  const auto kmax = static_cast<std::int64_t>(
      std::min(std::floor(C), std::min(cut, 1.0e9)));
  const double log_lam = std::log(lambda);
  KahanSum l, d1, d2;
  for (std::int64_t k = 0; k <= kmax; ++k) {
    const double kd = static_cast<double>(k);
    const double log_pmf = -lambda + kd * log_lam - std::lgamma(kd + 1.0);
    const double pmf = std::exp(log_pmf);
    const double e = std::exp(theta * kd);
    l.add(pmf * std::expm1(theta * kd));
    d1.add(pmf * kd * e);
    d2.add(pmf * kd * kd * e);
  }
  return {l.value(), d1.value(), d2.value()};
}

inline CumulantValue binomial_truncated(std::int64_t n, double beta,
                                        double theta, double C) {
  const auto kmax = static_cast<std::int64_t>(
      std::min(static_cast<double>(n), std::floor(C)));
  const double lb = std::log(beta);
  const double l1b = std::log1p(-beta);
  const double nd = static_cast<double>(n);
  KahanSum l, d1, d2;
  for (std::int64_t k = 0; k <= kmax; ++k) {
    const double kd = static_cast<double>(k);
    const double log_pmf = std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) -
                           std::lgamma(nd - kd + 1.0) + kd * lb +
                           (nd - kd) * l1b;
    const double pmf = std::exp(log_pmf);
    const double e = std::exp(theta * kd);
    l.add(pmf * std::expm1(theta * kd));
    d1.add(pmf * kd * e);
    d2.add(pmf * kd * kd * e);
  }
  return {l.value(), d1.value(), d2.value()};
}

}  // namespace detail

/// Cumulant with truncation window |y| <= C (C = kInfinity for the full
/// measure). Atoms sitting exactly at |y| = C are included. Throws
/// std::range_error outside theta_range, reporting the safe bound.
inline CumulantValue cumulant(const LimitMeasure& rho, double theta,
                              double C = kInfinity) {
  if (!(C > 0.0)) throw std::domain_error("cumulant: C must be positive");
  if (!std::isfinite(theta)) throw std::domain_error("cumulant: theta not finite");
  const ThetaRange range = theta_range(rho, C);
  if (!range.contains(theta)) {
    throw std::range_error("cumulant: theta " + std::to_string(theta) +
                           " outside safe range [" + std::to_string(range.lo) +
                           ", " + std::to_string(range.hi) + "]");
  }

  switch (rho.kind()) {
    case LimitMeasure::Kind::kAtoms:
    case LimitMeasure::Kind::kEmpirical:
      return detail::atom_cumulant(rho.atom_list(), theta, C);

    case LimitMeasure::Kind::kPoisson: {
      const double lam = rho.poisson_lambda();
      if (C != kInfinity) return detail::poisson_truncated(lam, theta, C);
      const double lam_u = lam * std::expm1(theta);
      const double big = std::exp(lam_u);
      const double m = lam * std::exp(theta);
      return {std::expm1(lam_u), m * big, (m + m * m) * big};
    }

    case LimitMeasure::Kind::kBinomial: {
      const std::int64_t n = rho.binomial_n();
      const double beta = rho.binomial_beta();
      if (C != kInfinity) return detail::binomial_truncated(n, beta, theta, C);
      const double nd = static_cast<double>(n);
      const double lb = std::log1p(beta * std::expm1(theta));
      const double t = beta * std::exp(theta);
      const double m1 = std::exp((nd - 1.0) * lb);
      const double m2 = std::exp((nd - 2.0) * lb);
      return {std::expm1(nd * lb), nd * t * m1, nd * t * m1 + nd * (nd - 1.0) * t * t * m2};
    }

    case LimitMeasure::Kind::kGaussian: {
      if (C == kInfinity) {
        const double e = std::exp(0.5 * theta * theta);
        return {std::expm1(0.5 * theta * theta), theta * e,
                (1.0 + theta * theta) * e};
      }
      const detail::GaussianWindow w = detail::gaussian_window(C, theta);
      const double l = detail::gl_integrate(
          [theta](double y) { return std::expm1(theta * y) * detail::normal_pdf(y); },
          w.lo, w.hi, w.panels);
      const double d1 = detail::gl_integrate(
          [theta](double y) {
            return y * std::exp(theta * y) * detail::normal_pdf(y);
          },
          w.lo, w.hi, w.panels);
      const double d2 = detail::gl_integrate(
          [theta](double y) {
            return y * y * std::exp(theta * y) * detail::normal_pdf(y);
          },
          w.lo, w.hi, w.panels);
      return {l, d1, d2};
    }
  }
  throw std::logic_error("cumulant: unreachable");
}

/// Truncated k-th moment, k in {1, 2}.
inline double measure_moment(const LimitMeasure& rho, int k,
                             double C = kInfinity) {
  if (k != 1 && k != 2) {
    throw std::invalid_argument("measure_moment: k must be 1 or 2");
  }
  switch (rho.kind()) {
    case LimitMeasure::Kind::kAtoms:
    case LimitMeasure::Kind::kEmpirical: {
      KahanSum s;
      for (const auto& [v, w] : rho.atom_list()) {
        if (std::abs(v) > C) continue;
        s.add(w * (k == 1 ? v : v * v));
      }
      return s.value();
    }
    case LimitMeasure::Kind::kPoisson: {
      const double lam = rho.poisson_lambda();
      if (C == kInfinity) return k == 1 ? lam : lam + lam * lam;
      const CumulantValue cv = detail::poisson_truncated(lam, 0.0, C);
      return k == 1 ? cv.dlambda : cv.d2lambda;
    }
    case LimitMeasure::Kind::kBinomial: {
      const double nd = static_cast<double>(rho.binomial_n());
      const double beta = rho.binomial_beta();
      if (C == kInfinity) {
        return k == 1 ? nd * beta : nd * beta + nd * (nd - 1.0) * beta * beta;
      }
      const CumulantValue cv =
          detail::binomial_truncated(rho.binomial_n(), beta, 0.0, C);
      return k == 1 ? cv.dlambda : cv.d2lambda;
    }
    case LimitMeasure::Kind::kGaussian: {
      if (C == kInfinity) return k == 1 ? 0.0 : 1.0;
      const detail::GaussianWindow w = detail::gaussian_window(C, 0.0);
      return detail::gl_integrate(
          [k](double y) {
            return (k == 1 ? y : y * y) * detail::normal_pdf(y);
          },
          w.lo, w.hi, w.panels);
    }
  }
  throw std::logic_error("measure_moment: unreachable");
}

/// P(Poisson(lambda) <= floor(C)).
inline double poisson_cdf_mass(double lambda, double C) {
  const auto kmax = static_cast<std::int64_t>(
      std::min(std::floor(C),
               lambda + 60.0 * std::sqrt(lambda + 1.0) + 60.0));
  KahanSum s;
  double pmf = std::exp(-lambda);
  for (std::int64_t k = 0; k <= kmax; ++k) {
    s.add(pmf);
    pmf *= lambda / static_cast<double>(k + 1);
  }
  // anything beyond the cut is below 1e-16 relative
  return std::min(s.value(), 1.0);
}

inline double binomial_cdf_mass(std::int64_t n, double beta, double C) {
  const auto kmax = static_cast<std::int64_t>(
      std::min(static_cast<double>(n), std::floor(C)));
  const double nd = static_cast<double>(n);
  KahanSum s;
  for (std::int64_t k = 0; k <= kmax; ++k) {
    const double kd = static_cast<double>(k);
    s.add(std::exp(std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) -
                   std::lgamma(nd - kd + 1.0) + kd * std::log(beta) +
                   (nd - kd) * std::log1p(-beta)));
  }
  return std::min(s.value(), 1.0);
}

/// Shape of the truncated support, used to classify the Legendre transform
/// domain: boundary values at the edge of range(Lambda') and the masses that
/// appear in the theta -> -inf limits.
struct SupportInfo {
  double lo = 0.0;
  double hi = 0.0;
  double total_mass = 0.0;
  double nonzero_mass = 0.0;  // mass off the origin, within the truncation
  bool empty = false;
  bool single_point = false;
  double single_value = 0.0;
};

inline SupportInfo support_info(const LimitMeasure& rho, double C = kInfinity) {
  SupportInfo s;
  switch (rho.kind()) {
    case LimitMeasure::Kind::kAtoms:
    case LimitMeasure::Kind::kEmpirical: {
      bool first = true;
      for (const auto& [v, w] : rho.atom_list()) {
        if (std::abs(v) > C) continue;
        if (first) {
          s.lo = s.hi = v;
          first = false;
        } else {
          s.lo = std::min(s.lo, v);
          s.hi = std::max(s.hi, v);
        }
        s.total_mass += w;
        if (v != 0.0) s.nonzero_mass += w;
      }
      s.empty = first;
      s.single_point = !first && s.lo == s.hi;
      s.single_value = s.lo;
      return s;
    }
    case LimitMeasure::Kind::kPoisson: {
      const double lam = rho.poisson_lambda();
      s.lo = 0.0;
      if (C == kInfinity) {
        s.hi = kInfinity;
        s.total_mass = 1.0;
      } else {
        s.hi = std::floor(C);
        s.total_mass = poisson_cdf_mass(lam, C);
      }
      s.nonzero_mass = s.total_mass - std::exp(-lam);
      s.single_point = s.hi == 0.0;
      s.single_value = 0.0;
      return s;
    }
    case LimitMeasure::Kind::kBinomial: {
      const double nd = static_cast<double>(rho.binomial_n());
      const double beta = rho.binomial_beta();
      s.lo = 0.0;
      s.hi = C == kInfinity ? nd : std::min(nd, std::floor(C));
      s.total_mass = C == kInfinity || std::floor(C) >= nd
                         ? 1.0
                         : binomial_cdf_mass(rho.binomial_n(), beta, C);
      s.nonzero_mass = s.total_mass - std::exp(nd * std::log1p(-beta));
      s.single_point = s.hi == 0.0;
      s.single_value = 0.0;
      return s;
    }
    case LimitMeasure::Kind::kGaussian: {
      s.lo = C == kInfinity ? -kInfinity : -C;
      s.hi = C == kInfinity ? kInfinity : C;
      s.total_mass = C == kInfinity ? 1.0 : detail::normal_mass(C);
      s.nonzero_mass = s.total_mass;
      return s;
    }
  }
  throw std::logic_error("support_info: unreachable");
}

}  // namespace ldparith

#endif  // LDPARITH_MEASURES_HPP
