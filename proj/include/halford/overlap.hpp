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

#ifndef HALFORD_OVERLAP_HPP
#define HALFORD_OVERLAP_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "halford/model_pair.hpp"

namespace halford {

enum class OverlapMethod {
  kAnalytic,
  kExactSum,
  kQuadrature,
  kMonteCarlo,
};

/// Evaluation method plus its knobs. budget/seed apply to Monte Carlo only.
struct Method {
  OverlapMethod kind = OverlapMethod::kAnalytic;
  std::int64_t budget = 100000;
  std::uint64_t seed = 1;

  static Method analytic() { return {OverlapMethod::kAnalytic, 0, 0}; }
  static Method exact_sum() { return {OverlapMethod::kExactSum, 0, 0}; }
  static Method quadrature() { return {OverlapMethod::kQuadrature, 0, 0}; }
  static Method monte_carlo(std::int64_t m, std::uint64_t seed) {
    return {OverlapMethod::kMonteCarlo, m, seed};
  }
};

/// A Monte Carlo moment estimate with its stability diagnostics.
///
/// The mean is accumulated in log space, so `estimate` only becomes +inf
/// when the true sample mean exceeds double range; such contributions are
/// counted as tail events and flagged as overflow contamination.
struct McEstimate {
  double estimate = 0.0;
  double se = 0.0;
  /// log of the sample mean; finite even when `estimate` overflows.
  double log_estimate = 0.0;
  std::int64_t m = 0;
  std::uint64_t seed = 0;
  std::int64_t tail_events = 0;
  bool overflow_contaminated = false;
  /// Largest and smallest log per-draw transform seen (log scale).
  double max_term_log = 0.0;
  double min_term_log = 0.0;
};

/// Divergence probe: running maxima of the per-draw transform and of the
/// prefix-mean estimate, recorded at two draw-count checkpoints. All values
/// are logs of the underlying quantities.
struct DivergenceProbe {
  std::int64_t m_first = 0;
  std::int64_t m_last = 0;
  double draw_max_log_first = 0.0;
  double draw_max_log_last = 0.0;
  double mean_max_log_first = 0.0;
  double mean_max_log_last = 0.0;
};

/// The order-t moment of the density ratio: the integral of p1^t * p2^(1-t).
///
/// exact-sum requires a finite-discrete pair, quadrature a continuous
/// unit-interval pair, analytic a family closed form. Returns +inf as a
/// first-class divergence marker; never NaN.
double hellinger_integral(const ModelPair& pair, double t,
                          const Method& method);

/// Monte Carlo version with standard error: the mean of exp(t * log B)
/// under m draws from model 2.
McEstimate hellinger_integral_mc(const ModelPair& pair, double t,
                                 std::int64_t m, std::uint64_t seed);

/// Streams m_last draws and records running maxima at both checkpoints.
DivergenceProbe mc_divergence_probe(const ModelPair& pair, double t,
                                    std::int64_t m_first, std::int64_t m_last,
                                    std::uint64_t seed);

/// The half-order overlap rho = I(1/2), always in (0, 1].
double overlap_rho(const ModelPair& pair, const Method& method);

struct VarianceIdentity {
  double t = 0.5;
  double var_side1 = 0.0;  ///< I(2t-1) - I(t)^2, +inf allowed
  double var_side2 = 0.0;  ///< I(2t)   - I(t)^2, +inf allowed
  double worst_side = 0.0;
};

/// Per-side variances of the order-t transforms. Throws DomainError when
/// I(t) itself diverges.
VarianceIdentity variance_identity(const ModelPair& pair, double t,
                                   const Method& method);

/// Order-t Renyi divergence log I(t) / (t-1), t > 0, t != 1.
/// +inf marks divergence; order 1 raises MethodError (use kl_limit).
double renyi_divergence(const ModelPair& pair, double t, const Method& method);

/// Numerical t -> 1 limit (Kullback-Leibler direction p1 vs p2) via a
/// central difference of log I at t = 1 with step h. Approximate by design.
double kl_limit(const ModelPair& pair, const Method& method, double h = 1e-4);

struct OverlapProfile {
  std::string pair_label;
  Method method;
  std::vector<double> grid;
  std::vector<double> values;  ///< I(t) per grid point, +inf allowed
  double rho = 1.0;            ///< I(1/2)
};

OverlapProfile make_overlap_profile(const ModelPair& pair,
                                    const std::vector<double>& grid,
                                    const Method& method);

struct ConvexityReport {
  std::int64_t triples_checked = 0;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Chord test of midpoint convexity of log I over every adjacent grid
/// triple. Default tolerance: 1e-10 for analytic/exact-sum, 1e-8 for
/// quadrature, 1e-2 for Monte Carlo profiles (noisy; pass an explicit
/// tolerance for tighter checks).
ConvexityReport convexity_certificate(
    const OverlapProfile& profile,
    std::optional<double> tolerance = std::nullopt);

}  // namespace halford

#endif  // HALFORD_OVERLAP_HPP
