// Copyright 2026 The Halford Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HALFORD_NUMERIC_HPP
#define HALFORD_NUMERIC_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "halford/errors.hpp"

namespace halford {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// NaN is never a value in this library; it always signals a bug upstream.
inline double ensure_not_nan(double v, const char* context) {
  if (std::isnan(v)) {
    throw Error(std::string("NaN encountered in ") + context);
  }
  return v;
}

/// Streaming log-sum-exp with a running maximum.
///
/// add() accepts -inf (a zero term). +inf poisons the sum to +inf, which is
/// the extended-real convention for divergent contributions.
class LogSumExp {
 public:
  void add(double log_term) {
    ensure_not_nan(log_term, "LogSumExp::add");
    if (log_term == kInf) {
      saw_inf_ = true;
      return;
    }
    if (log_term == -kInf) {
      ++n_;
      return;
    }
    if (log_term > max_) {
      // Rescale the accumulated sum to the new maximum.
      if (max_ != -kInf) sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
      else sum_ = 1.0;
      max_ = log_term;
    } else {
      sum_ += std::exp(log_term - max_);
    }
    ++n_;
  }

  /// log(sum of exp terms); -inf when empty or all terms were zero.
  double log_sum() const {
    if (saw_inf_) return kInf;
    if (max_ == -kInf) return -kInf;
    return max_ + std::log(sum_);
  }

  double max_log_term() const { return max_; }
  std::int64_t count() const { return n_; }
  bool overflowed() const { return saw_inf_; }

 private:
  double max_ = -kInf;
  double sum_ = 0.0;
  std::int64_t n_ = 0;
  bool saw_inf_ = false;
};

inline double log_sum_exp(const std::vector<double>& log_terms) {
  LogSumExp acc;
  for (double v : log_terms) acc.add(v);
  return acc.log_sum();
}

/// Kahan compensated summation.
class KahanSum {
 public:
  void add(double v) {
    const double y = v - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

/// Type-7 quantile (linear interpolation between order statistics) of a
/// pre-sorted vector. p in [0, 1].
inline double quantile_type7_sorted(const std::vector<double>& sorted,
                                    double p) {
  if (sorted.empty()) throw ContractError("quantile of empty vector");
  if (p < 0.0 || p > 1.0) throw ParameterError("quantile p outside [0,1]");
  if (sorted.size() == 1) return sorted[0];
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double quantile_type7(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  return quantile_type7_sorted(values, p);
}

/// Inverse of the standard normal CDF.
///
/// Rational initial approximation refined by one Halley step against erfc;
/// absolute error is far below the 1e-9 contract on (0, 1).
inline double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ParameterError("inverse_normal_cdf requires p in (0,1)");
  }
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
          c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley refinement step: e = Phi(x) - p.
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  x = x - u / (1.0 + x * u / 2.0);
  return x;
}

/// log of the largest finite double, rounded down: exp of anything beyond
/// this is not representable and counts as a tail event.
inline constexpr double kTailLog = 709.0;

/// Largest log term for which direct (non-log) accumulation of means and
/// squared deviations stays comfortably inside double range.
inline constexpr double kDirectPathMaxLog = 300.0;

/// c * x under the convention that a zero coefficient kills the factor even
/// when x is infinite (x^0 = 1, so 0 * log x = 0).
inline double scaled_log(double c, double x) {
  if (c == 0.0) return 0.0;
  return c * x;
}

/// Summary moments of a positive sample supplied as logs.
///
/// Accumulation is direct (compensated) when every term is small enough,
/// log-domain otherwise, so log_mean stays finite whenever any term is;
/// mean and s_sq may round to +inf.
struct MomentStats {
  std::int64_t m = 0;
  double mean = 0.0;
  double log_mean = -kInf;
  double s_sq = 0.0;  ///< sample variance, (m-1) denominator; 0 when m == 1
  std::int64_t tail_events = 0;
  double max_term = -kInf;
  double min_term = kInf;
};

inline MomentStats moment_stats_from_log_terms(
    const std::vector<double>& terms) {
  if (terms.empty()) throw ContractError("moment stats of empty sample");
  MomentStats st;
  st.m = static_cast<std::int64_t>(terms.size());
  for (double term : terms) {
    ensure_not_nan(term, "log-domain sample term");
    st.max_term = std::max(st.max_term, term);
    st.min_term = std::min(st.min_term, term);
    if (term > kTailLog) ++st.tail_events;
  }
  const double md = static_cast<double>(st.m);
  if (st.max_term <= kDirectPathMaxLog) {
    KahanSum s1;
    for (double term : terms) s1.add(std::exp(term));
    st.mean = s1.value() / md;
    st.log_mean = std::log(st.mean);
    if (st.m > 1) {
      KahanSum s2;
      for (double term : terms) {
        const double d = std::exp(term) - st.mean;
        s2.add(d * d);
      }
      st.s_sq = s2.value() / (md - 1.0);
    }
  } else {
    LogSumExp l1;
    LogSumExp l2;
    for (double term : terms) {
      l1.add(term);
      l2.add(2.0 * term);
    }
    st.log_mean = l1.log_sum() - std::log(md);
    st.mean = std::exp(st.log_mean);
    const double log_second = l2.log_sum() - std::log(md);
    const double gap = 2.0 * st.log_mean - log_second;
    if (st.m > 1 && gap < 0.0) {
      const double log_var =
          log_second + std::log1p(-std::exp(gap)) + std::log(md / (md - 1.0));
      st.s_sq = std::exp(log_var);
    }
  }
  return st;
}

/// FNV-1a 64-bit content hash, used for output manifests.
inline std::uint64_t fnv1a64(const void* data, std::size_t len) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace halford

#endif  // HALFORD_NUMERIC_HPP
