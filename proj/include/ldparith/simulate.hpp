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

#ifndef LDPARITH_SIMULATE_HPP
#define LDPARITH_SIMULATE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ldparith/additive.hpp"
#include "ldparith/primes.hpp"
#include "ldparith/rational.hpp"
#include "ldparith/rng.hpp"
#include "ldparith/util.hpp"

namespace ldparith {

/// Exact lattice-valued law: mass probs[i] at offset + i*step.
struct DiscreteDistribution {
  double offset = 0.0;
  double step = 1.0;
  std::vector<double> probs;

  double value_at(std::size_t i) const { return offset + step * static_cast<double>(i); }

  double total_mass() const {
    KahanSum s;
    for (const double p : probs) s.add(p);
    return s.value();
  }

  double mean() const { return moment(1); }

  double moment(int r) const {
    KahanSum s;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      double term = probs[i];
      const double v = value_at(i);
      for (int j = 0; j < r; ++j) term *= v;
      s.add(term);
    }
    return s.value();
  }

  /// P(S >= t). Lattice points within 1e-9*step of t count as >= t.
  double tail_ge(double t) const {
    const double pos = (t - offset) / step;
    auto k = static_cast<std::int64_t>(std::ceil(pos - 1e-9));
    k = std::max<std::int64_t>(k, 0);
    if (k >= static_cast<std::int64_t>(probs.size())) return 0.0;
    KahanSum s;  // top entries first: smallest masses accumulate first
    for (std::int64_t i = static_cast<std::int64_t>(probs.size()) - 1; i >= k; --i) {
      s.add(probs[i]);
    }
    return s.value();
  }

  /// P(S <= t).
  double tail_le(double t) const {
    const double pos = (t - offset) / step;
    auto k = static_cast<std::int64_t>(std::floor(pos + 1e-9));
    if (k < 0) return 0.0;
    k = std::min<std::int64_t>(k, static_cast<std::int64_t>(probs.size()) - 1);
    KahanSum s;
    for (std::int64_t i = 0; i <= k; ++i) s.add(probs[i]);
    return s.value();
  }
};

/// log E[e^{theta S}] of an exact lattice law, evaluated stably.
inline double log_mgf(const DiscreteDistribution& d, double theta) {
  double max_term = -kInfinity;
  for (std::size_t i = 0; i < d.probs.size(); ++i) {
    if (d.probs[i] <= 0.0) continue;
    max_term = std::max(max_term, theta * d.value_at(i) + std::log(d.probs[i]));
  }
  if (max_term == -kInfinity) return -kInfinity;
  KahanSum s;
  for (std::size_t i = 0; i < d.probs.size(); ++i) {
    if (d.probs[i] <= 0.0) continue;
    s.add(std::exp(theta * d.value_at(i) + std::log(d.probs[i]) - max_term));
  }
  return max_term + std::log(s.value());
}

namespace detail {

/// Common lattice of a finite value set: values v_i = shift_i * step with
/// integer shifts, via continued-fraction rationalization with denominators
/// up to 1e6. Values that do not sit on such a lattice are rejected.
struct Lattice {
  double step = 1.0;
  std::map<double, std::int64_t> shift;  // keyed by the exact double value

  std::int64_t shift_of(double v) const {
    const auto it = shift.find(v);
    if (it == shift.end()) {
      throw std::logic_error("lattice: unregistered value");
    }
    return it->second;
  }
};

inline bool rationalize(double v, std::int64_t& num, std::int64_t& den) {
  constexpr std::int64_t kMaxDen = 1'000'000;
  if (v == 0.0) {
    num = 0;
    den = 1;
    return true;
  }
  if (!std::isfinite(v) || std::abs(v) > 1e12) return false;
  const double target = std::abs(v);
  double x = target;
  std::int64_t p0 = 1, q0 = 0;
  std::int64_t p1 = static_cast<std::int64_t>(std::floor(x)), q1 = 1;
  for (int it = 0; it < 64; ++it) {
    const double err = std::abs(target - static_cast<double>(p1) / static_cast<double>(q1));
    if (err <= 1e-9 * std::max(1.0, target)) break;
    const double frac = x - std::floor(x);
    if (frac < 1e-15) break;
    x = 1.0 / frac;
    const auto a = static_cast<std::int64_t>(std::floor(x));
    const std::int64_t p2 = a * p1 + p0;
    const std::int64_t q2 = a * q1 + q0;
    if (q2 > kMaxDen || p2 < 0) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
  }
  if (std::abs(target - static_cast<double>(p1) / static_cast<double>(q1)) >
      1e-9 * std::max(1.0, target)) {
    return false;
  }
  num = v < 0.0 ? -p1 : p1;
  den = q1;
  return true;
}

inline Lattice lattice_for(const std::vector<double>& values) {
  constexpr std::int64_t kMaxDen = 1'000'000;
  std::vector<std::int64_t> nums(values.size()), dens(values.size());
  std::int64_t common = 1;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!rationalize(values[i], nums[i], dens[i])) {
      throw std::invalid_argument(
          "lattice: value " + std::to_string(values[i]) +
          " is not rational with denominator <= 1e6");
    }
    common = std::lcm(common, dens[i]);
    if (common > kMaxDen) {
      throw std::invalid_argument(
          "lattice: common denominator exceeds 1e6");
    }
  }
  std::int64_t g = 0;
  std::vector<std::int64_t> scaled(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    scaled[i] = nums[i] * (common / dens[i]);
    g = std::gcd(g, scaled[i]);
  }
  Lattice lat;
  if (g == 0) {  // every value is zero
    lat.step = 1.0;
    for (const double v : values) lat.shift[v] = 0;
    return lat;
  }
  lat.step = static_cast<double>(g) / static_cast<double>(common);
  for (std::size_t i = 0; i < values.size(); ++i) {
    lat.shift[values[i]] = scaled[i] / g;
  }
  return lat;
}

/// Growable DP buffer over lattice indices with room on both sides.
class ConvolutionBuffer {
 public:
  ConvolutionBuffer() : buf_(1, 1.0), lo_(0), hi_(0), base_(0) {}

  void apply_bernoulli(double q, std::int64_t s) {
    if (s == 0) return;
    if (s > 0) {
      ensure_back(s);
      double* b = buf_.data();
      for (std::int64_t k = hi_ + s; k >= lo_ + s; --k) {
        b[k] = b[k] * (1.0 - q) + b[k - s] * q;
      }
      for (std::int64_t k = std::min(hi_, lo_ + s - 1); k >= lo_; --k) {
        b[k] *= (1.0 - q);
      }
      hi_ += s;
    } else {
      const std::int64_t t = -s;
      ensure_front(t);
      double* b = buf_.data();
      for (std::int64_t k = lo_ - t; k <= hi_ - t; ++k) {
        b[k] = b[k] * (1.0 - q) + b[k + t] * q;
      }
      for (std::int64_t k = std::max(lo_, hi_ - t + 1); k <= hi_; ++k) {
        b[k] *= (1.0 - q);
      }
      lo_ -= t;
    }
    trim();
    if (hi_ - lo_ > 4'000'000) {
      throw std::length_error("exact distribution: lattice support exceeds 4e6");
    }
  }

  DiscreteDistribution finish(double step) const {
    DiscreteDistribution d;
    d.step = step;
    d.offset = static_cast<double>(base_ + lo_) * step;
    d.probs.assign(buf_.begin() + lo_, buf_.begin() + hi_ + 1);
    return d;
  }

 private:
  static constexpr double kTrim = 1e-300;

  void ensure_back(std::int64_t s) {
    if (hi_ + s >= static_cast<std::int64_t>(buf_.size())) {
      buf_.resize(static_cast<std::size_t>(hi_ + s + 1 + 256), 0.0);
    }
  }

  void ensure_front(std::int64_t t) {
    if (lo_ - t < 0) {
      const std::int64_t extra = t + 256;
      buf_.insert(buf_.begin(), static_cast<std::size_t>(extra), 0.0);
      lo_ += extra;
      hi_ += extra;
      base_ -= extra;
    }
  }

  void trim() {
    double* b = buf_.data();
    while (hi_ > lo_ && b[hi_] < kTrim) {
      b[hi_] = 0.0;
      --hi_;
    }
    while (lo_ < hi_ && b[lo_] < kTrim) {
      b[lo_] = 0.0;
      ++lo_;
    }
  }

  std::vector<double> buf_;
  std::int64_t lo_, hi_;   // active slot range
  std::int64_t base_;      // lattice index of slot 0
};

/// Static partition of [0, count) across the LDP_ARITH_THREADS-capped pool.
/// Work items are index-pure, so the partition does not affect results.
template <typename Fn>
void parallel_for_indices(std::int64_t count, Fn&& fn) {
  const unsigned workers =
      std::min<unsigned>(thread_cap(), static_cast<unsigned>(
          std::max<std::int64_t>(1, count / 4096)));
  if (workers <= 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) {
    const std::int64_t begin = count * t / workers;
    const std::int64_t end = count * (t + 1) / workers;
    pool.emplace_back([&fn, begin, end] {
      for (std::int64_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace detail

/// Exact law of the independent model restricted to primes p <= Q with
/// |g(p)| <= C: one Bernoulli(1/p) convolution per prime, sequentially,
/// with mass below 1e-300 trimmed at the support edges.
inline DiscreteDistribution exact_y_distribution(std::int64_t Q,
                                                 const AdditiveFunctionSpec& spec,
                                                 double C = kInfinity) {
  std::vector<double> values;
  for (const double v : spec.distinct_values()) {
    if (std::abs(v) <= C) values.push_back(v);
  }
  const detail::Lattice lat =
      values.empty() ? detail::Lattice{} : detail::lattice_for(values);

  detail::ConvolutionBuffer dp;
  for_each_prime(Q, [&](std::int64_t p, std::int64_t k) {
    const double v = spec.value_at(p, k);
    if (std::abs(v) > C) return;
    dp.apply_bernoulli(1.0 / static_cast<double>(p), lat.shift_of(v));
  });
  return dp.finish(lat.step);
}

/// Exact law of g over {1, ..., N} with mass 1/N each: full enumeration via
/// sieve. Distinct-prime-count path for constant g up to 1e8; general
/// lattice-valued g up to 1e7.
inline DiscreteDistribution exact_z_distribution(std::int64_t N,
                                                 const AdditiveFunctionSpec& spec) {
  if (N < 1) throw std::domain_error("exact_z_distribution: N must be positive");
  const detail::Lattice lat = detail::lattice_for(spec.distinct_values());
  const double nd = static_cast<double>(N);  // masses as count/N, correctly rounded

  if (spec.kind() == AdditiveFunctionSpec::Kind::kConstant) {
    const std::int64_t s0 = lat.shift_of(spec.lambda());
    const auto omega = omega_sieve(N);  // enforces the 1e8 budget
    std::vector<std::int64_t> counts(1, 0);
    for (std::int64_t m = 1; m <= N; ++m) {
      const std::size_t k = omega[m];
      if (k >= counts.size()) counts.resize(k + 1, 0);
      ++counts[k];
    }
    DiscreteDistribution d;
    if (s0 == 0) {
      d.step = 1.0;
      d.probs = {1.0};
      return d;
    }
    d.step = lat.step;
    d.probs.assign(counts.size(), 0.0);
    if (s0 > 0) {
      d.offset = 0.0;
      for (std::size_t k = 0; k < counts.size(); ++k) {
        d.probs[k] = static_cast<double>(counts[k]) / nd;
      }
    } else {
      d.offset = -static_cast<double>(counts.size() - 1) * lat.step;
      for (std::size_t k = 0; k < counts.size(); ++k) {
        d.probs[counts.size() - 1 - k] = static_cast<double>(counts[k]) / nd;
      }
    }
    return d;
  }

  if (N > 10'000'000) {
    throw std::length_error(
        "exact_z_distribution: N above the 1e7 budget for non-constant g");
  }
  std::vector<std::int32_t> acc(static_cast<std::size_t>(N) + 1, 0);
  for_each_prime(N, [&](std::int64_t p, std::int64_t k) {
    const auto s = static_cast<std::int32_t>(lat.shift_of(spec.value_at(p, k)));
    if (s == 0) return;
    for (std::int64_t m = p; m <= N; m += p) acc[m] += s;
  });
  std::int32_t lo = 0, hi = 0;
  for (std::int64_t m = 1; m <= N; ++m) {
    lo = std::min(lo, acc[m]);
    hi = std::max(hi, acc[m]);
  }
  std::vector<std::int64_t> counts(static_cast<std::size_t>(hi - lo) + 1, 0);
  for (std::int64_t m = 1; m <= N; ++m) ++counts[acc[m] - lo];
  DiscreteDistribution d;
  d.step = lat.step;
  d.offset = static_cast<double>(lo) * lat.step;
  d.probs.reserve(counts.size());
  for (const std::int64_t c : counts) {
    d.probs.push_back(static_cast<double>(c) / nd);
  }
  return d;
}

/// A reproducible batch of model samples. Identical (model, scale, seed)
/// always yields identical values; sample i draws only from stream i.
struct SampleBatch {
  enum class Model { kZ, kY };
  Model model = Model::kZ;
  std::int64_t scale = 0;  // n for the divisibility model, Q for the
                           // independent model
  std::uint64_t seed = 0;
  std::vector<double> values;
};

/// g(V) for V uniform on {1, ..., n}, factored through the spf table.
inline SampleBatch sample_z(std::int64_t n, const AdditiveFunctionSpec& spec,
                            std::int64_t count, std::uint64_t seed,
                            const PrimeTable& table) {
  if (n < 2) throw std::domain_error("sample_z: n must be >= 2");
  if (n > table.limit) {
    throw std::length_error("sample_z: n exceeds table limit");
  }
  SampleBatch batch;
  batch.model = SampleBatch::Model::kZ;
  batch.scale = n;
  batch.seed = seed;
  batch.values.resize(static_cast<std::size_t>(count));
  detail::parallel_for_indices(count, [&](std::int64_t i) {
    SplitMix64 rng = SplitMix64::for_stream(seed, static_cast<std::uint64_t>(i));
    std::int64_t m =
        1 + static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(n)));
    double sum = 0.0;
    while (m > 1) {
      const auto p = static_cast<std::int64_t>(table.spf[m]);
      while (m % p == 0) m /= p;
      const std::int64_t k = spec.needs_index() ? table.index_of(p) : 0;
      sum += spec.value_at(p, k);
    }
    batch.values[static_cast<std::size_t>(i)] = sum;
  });
  return batch;
}

/// Sum of g(p) Y_p over primes p <= Q with independent Y_p ~ Bernoulli(1/p).
/// Each prime consumes exactly one draw from the sample's stream.
inline SampleBatch sample_y(std::int64_t Q, const AdditiveFunctionSpec& spec,
                            std::int64_t count, std::uint64_t seed) {
  if (Q < 2) throw std::domain_error("sample_y: Q must be >= 2");
  std::vector<double> inv_p;
  std::vector<double> g;
  for_each_prime(Q, [&](std::int64_t p, std::int64_t k) {
    inv_p.push_back(1.0 / static_cast<double>(p));
    g.push_back(spec.value_at(p, k));
  });
  SampleBatch batch;
  batch.model = SampleBatch::Model::kY;
  batch.scale = Q;
  batch.seed = seed;
  batch.values.resize(static_cast<std::size_t>(count));
  detail::parallel_for_indices(count, [&](std::int64_t i) {
    SplitMix64 rng = SplitMix64::for_stream(seed, static_cast<std::uint64_t>(i));
    double sum = 0.0;
    for (std::size_t j = 0; j < inv_p.size(); ++j) {
      if (rng.next_unit() < inv_p[j]) sum += g[j];
    }
    batch.values[static_cast<std::size_t>(i)] = sum;
  });
  return batch;
}

/// Per-sample standardized values (value - log log n) / sqrt(log log n).
inline std::vector<double> clt_statistic(const SampleBatch& batch, std::int64_t n) {
  if (n < 16) {
    throw std::domain_error("clt_statistic: need n >= 16 so that log log n > 0");
  }
  const double lln = std::log(std::log(static_cast<double>(n)));
  const double scale = 1.0 / std::sqrt(lln);
  std::vector<double> out;
  out.reserve(batch.values.size());
  for (const double v : batch.values) out.push_back((v - lln) * scale);
  return out;
}

/// Prime cutoffs separating the dominant small primes from the negligible
/// tail, plus the value cutoff C.
struct TruncationSchedule {
  std::int64_t n = 0;
  double ldp_k_n = 0.0;  // n^{1/(log log n)^2}
  double mdp_k_n = 0.0;  // n^{a_n / sigma_n^2}
  double C = 0.0;
};

inline TruncationSchedule truncation_schedule(std::int64_t n,
                                              const ModerateScaling& scaling,
                                              double C) {
  if (n < 16) {
    throw std::domain_error("truncation_schedule: need n >= 16 so that log log n > 0");
  }
  const double nd = static_cast<double>(n);
  const double lln = std::log(std::log(nd));
  TruncationSchedule t;
  t.n = n;
  t.ldp_k_n = std::pow(nd, 1.0 / (lln * lln));
  t.mdp_k_n = std::pow(nd, scaling.a_n / scaling.sigma2_n);
  t.C = C;
  if (!std::isfinite(t.ldp_k_n) || !std::isfinite(t.mdp_k_n)) {
    throw std::range_error("truncation_schedule: cutoff not finite");
  }
  return t;
}

/// Exact joint moments of the two models over a distinct prime set:
/// z = floor(n/P)/n, y = 1/P, and their gap, all as exact rationals.
/// The gap is (n mod P) / (nP), hence always within [0, 1/n].
struct JointMomentGap {
  Rational z_moment;
  Rational y_moment;
  Rational gap;
};

inline JointMomentGap joint_moment_gap(std::int64_t n,
                                       const std::vector<std::int64_t>& primes) {
  if (n < 1) throw std::domain_error("joint_moment_gap: n must be positive");
  if (primes.empty()) {
    throw std::domain_error("joint_moment_gap: need at least one prime");
  }
  std::set<std::int64_t> seen;
  detail::int128 product = 1;
  for (const std::int64_t p : primes) {
    if (p < 2) throw std::domain_error("joint_moment_gap: entries must be >= 2");
    for (std::int64_t d = 2; d * d <= p; ++d) {
      if (p % d == 0) {
        throw std::domain_error("joint_moment_gap: " + std::to_string(p) +
                                " is not prime");
      }
    }
    if (!seen.insert(p).second) {
      throw std::domain_error("joint_moment_gap: primes must be distinct");
    }
    product *= p;
    if (product > detail::int128(INT64_MAX)) {
      throw std::length_error("joint_moment_gap: prime product overflows");
    }
  }
  JointMomentGap out;
  out.z_moment = Rational::make(static_cast<detail::int128>(n) / product, n);
  out.y_moment = Rational::make(1, product);
  out.gap = out.y_moment - out.z_moment;
  return out;
}

/// Moment comparison between the exact divisibility-model law (full
/// enumeration over 1..n) and the exact independent-model law, both
/// restricted to primes p <= Q with |g(p)| <= C, for r = 0..r_max. Each gap
/// is checked against (C*Q)^r / n.
struct MomentGapRow {
  int r = 0;
  double z_moment = 0.0;
  double y_moment = 0.0;
  double gap = 0.0;
  double bound = 0.0;
  bool pass = false;
};

inline std::vector<MomentGapRow> moment_gap_bound_check(
    std::int64_t n, std::int64_t Q, double C, int r_max,
    const AdditiveFunctionSpec& spec) {
  if (n < 2) throw std::domain_error("moment_gap_bound_check: n must be >= 2");
  if (n > 10'000'000) {
    throw std::length_error("moment_gap_bound_check: n above the 1e7 budget");
  }
  if (r_max < 0) throw std::domain_error("moment_gap_bound_check: r_max < 0");

  std::vector<double> values;
  for (const double v : spec.distinct_values()) {
    if (std::abs(v) <= C) values.push_back(v);
  }
  const detail::Lattice lat =
      values.empty() ? detail::Lattice{} : detail::lattice_for(values);

  // S_n(m) over m = 1..n on the lattice; primes beyond n never divide m.
  std::vector<std::int32_t> acc(static_cast<std::size_t>(n) + 1, 0);
  for_each_prime(std::min(n, Q), [&](std::int64_t p, std::int64_t k) {
    const double v = spec.value_at(p, k);
    if (std::abs(v) > C) return;
    const auto s = static_cast<std::int32_t>(lat.shift_of(v));
    if (s == 0) return;
    for (std::int64_t m = p; m <= n; m += p) acc[m] += s;
  });

  const DiscreteDistribution y_dist = exact_y_distribution(Q, spec, C);

  std::vector<MomentGapRow> rows;
  for (int r = 0; r <= r_max; ++r) {
    KahanSum z;
    for (std::int64_t m = 1; m <= n; ++m) {
      double term = 1.0;
      const double v = static_cast<double>(acc[m]) * lat.step;
      for (int j = 0; j < r; ++j) term *= v;
      z.add(term);
    }
    MomentGapRow row;
    row.r = r;
    row.z_moment = z.value() / static_cast<double>(n);
    row.y_moment = y_dist.moment(r);
    row.gap = std::abs(row.z_moment - row.y_moment);
    row.bound = std::pow(C * static_cast<double>(Q), r) / static_cast<double>(n);
    row.pass = row.gap <= row.bound;
    rows.push_back(row);
  }
  return rows;
}

/// min over the grid of exp(log_mgf(theta) - theta * threshold); an upper
/// bound on P(S >= threshold) for every positive theta in the grid.
template <typename CumulantFn>
double chernoff_tail_bound(CumulantFn&& log_mgf_fn, double threshold,
                           const std::vector<double>& theta_grid) {
  if (theta_grid.empty()) {
    throw std::invalid_argument("chernoff_tail_bound: empty theta grid");
  }
  double best = kInfinity;
  for (const double theta : theta_grid) {
    best = std::min(best, std::exp(log_mgf_fn(theta) - theta * threshold));
  }
  return best;
}

/// Empirical large-deviation rate: -(1/L_n) log P(S >= a * L_n).
/// Returns +infinity when the tail is empty (the infinite-rate flag).
inline double deviation_rate_estimate(const DiscreteDistribution& dist,
                                      double ldp_scale, double a) {
  if (!(ldp_scale > 0.0)) {
    throw std::invalid_argument("deviation_rate_estimate: scale must be > 0");
  }
  const double p = dist.tail_ge(a * ldp_scale);
  if (p <= 0.0) return kInfinity;
  return -std::log(p) / ldp_scale;
}

/// Empirical moderate-deviation rate at x: -(sigma_n^2/a_n^2) log of the
/// upper tail P(S - mu_n >= x a_n) for x >= 0, or of the matching lower
/// tail for x < 0.
inline double deviation_rate_estimate(const DiscreteDistribution& dist,
                                      const ModerateScaling& scaling, double x) {
  const double threshold = scaling.mu_n + x * scaling.a_n;
  const double p = x >= 0.0 ? dist.tail_ge(threshold) : dist.tail_le(threshold);
  if (p <= 0.0) return kInfinity;
  return -std::log(p) / scaling.speed;
}

}  // namespace ldparith

#endif  // LDPARITH_SIMULATE_HPP
