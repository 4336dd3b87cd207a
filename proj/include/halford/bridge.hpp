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

#ifndef HALFORD_BRIDGE_HPP
#define HALFORD_BRIDGE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "halford/model_pair.hpp"
#include "halford/rng.hpp"

namespace halford {

/// Two unnormalized densities sharing a support, with samplers for the
/// normalized versions. log w(x) = log p~1(x) - log p~2(x) must be finite
/// on the common support.
///
/// scale_1 is a multiplicative prefactor on p~1 applied exactly once when
/// the ratio is assembled, so rescaling p~1 by c multiplies r_hat by the
/// exact factor c while every weight-level quantity (and rho_sq_hat) keeps
/// identical bits.
struct UnnormalizedPair {
  std::string label;
  std::function<double(double)> log_unnorm_1;
  std::function<double(double)> log_unnorm_2;
  std::function<double(RngStream&)> sampler_1;
  std::function<double(RngStream&)> sampler_2;
  double scale_1 = 1.0;
  std::optional<double> true_ratio;
};

/// Wraps a normalized pair as an unnormalized one for benchmarking: the
/// known ratio is embedded through scale_1 (default 1).
UnnormalizedPair embed_known_ratio(const ModelPair& pair,
                                   double true_ratio = 1.0);

/// Half-order geometric bridge estimate of Z1/Z2.
///
/// a2_hat is the mean of w^(1/2) under model-2 draws, a1_hat the mean of
/// w^(-1/2) under model-1 draws; r_hat = a2_hat / a1_hat recovers the ratio
/// and rho_sq_hat = a2_hat * a1_hat the squared overlap of the normalized
/// densities. var_hat is the first-order delta-method variance
/// r_hat^2 * ((1 - rho_sq_hat) / rho_sq_hat) * (1/m1 + 1/m2).
struct BridgeEstimate {
  double a2_hat = 0.0;
  double a1_hat = 0.0;
  double r_hat = 0.0;
  double log_r_hat = 0.0;
  double rho_sq_hat = 0.0;
  double var_hat = 0.0;
  double rsd_hat = 0.0;
  std::int64_t m1 = 0;
  std::int64_t m2 = 0;
  std::uint64_t seed = 0;
};

BridgeEstimate estimate_half_order_bridge(const UnnormalizedPair& pair,
                                          std::int64_t m1, std::int64_t m2,
                                          std::uint64_t seed);

/// One-sided importance-sampling estimate with its stability counters.
struct IsEstimate {
  double estimate = 0.0;
  double log_estimate = 0.0;
  double se = 0.0;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  std::int64_t tail_events = 0;
};

/// Forward one-sided estimator: mean of w under model-2 draws.
IsEstimate estimate_forward_is(const UnnormalizedPair& pair, std::int64_t n,
                               std::uint64_t seed);

/// Reverse (harmonic-style) estimator: reciprocal of the mean of w^(-1)
/// under model-1 draws; SE by first-order delta method on the inner mean,
/// unreliable by design when the inner second moment diverges.
IsEstimate estimate_reverse_is(const UnnormalizedPair& pair, std::int64_t n,
                               std::uint64_t seed);

/// Predicted relative standard deviation of the half-order bridge:
/// sqrt((rho^-2 - 1) * (1/m1 + 1/m2)).
double predict_bridge_rsd(double rho, std::int64_t m1, std::int64_t m2);

/// Overlap-floor check of a bridging chain: flags adjacent-step overlaps
/// below the floor. The planner judges a user-supplied chain; it does not
/// construct intermediate densities.
struct ChainReport {
  double floor = 0.5;
  std::vector<std::size_t> weak_steps;
  bool pass = false;
};

ChainReport check_chain_overlaps(const std::vector<double>& step_rhos,
                                 double floor = 0.5);

/// Predicted chain RSD when every step runs m draws per side: the step
/// variances of log r_hat add.
double predict_chain_rsd(const std::vector<double>& step_rhos,
                         std::int64_t m_per_side);

}  // namespace halford

#endif  // HALFORD_BRIDGE_HPP
