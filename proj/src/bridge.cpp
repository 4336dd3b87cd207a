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

#include "halford/bridge.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "halford/errors.hpp"
#include "halford/numeric.hpp"

namespace halford {

namespace {

void require_surface(const UnnormalizedPair& pair, bool need_side1,
                     bool need_side2) {
  if (!pair.log_unnorm_1 || !pair.log_unnorm_2) {
    throw ContractError("unnormalized pair needs both log densities");
  }
  if (need_side1 && !pair.sampler_1) {
    throw ContractError("unnormalized pair needs sampler_1");
  }
  if (need_side2 && !pair.sampler_2) {
    throw ContractError("unnormalized pair needs sampler_2");
  }
  if (!(pair.scale_1 > 0.0) || std::isinf(pair.scale_1)) {
    throw ParameterError("scale_1 must be positive and finite");
  }
}

double log_weight(const UnnormalizedPair& pair, double x) {
  const double l1 = pair.log_unnorm_1(x);
  const double l2 = pair.log_unnorm_2(x);
  if (std::isnan(l1) || std::isnan(l2)) {
    throw Error("log weight: NaN log density at x=" + std::to_string(x));
  }
  const double lw = l1 - l2;
  if (std::isinf(lw) || std::isnan(lw)) {
    throw AbsoluteContinuityError(
        "weight not positive and finite at draw x=" + std::to_string(x) +
        " (log w=" + std::to_string(lw) + ")");
  }
  return lw;
}

std::vector<double> draw_log_weights(const UnnormalizedPair& pair, int side,
                                     std::int64_t n, std::uint64_t seed) {
  const auto& sampler = (side == 1) ? pair.sampler_1 : pair.sampler_2;
  RngStream rng(seed);
  std::vector<double> lws;
  lws.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    lws.push_back(log_weight(pair, sampler(rng)));
  }
  return lws;
}

}  // namespace

UnnormalizedPair embed_known_ratio(const ModelPair& pair, double true_ratio) {
  if (!(true_ratio > 0.0) || std::isinf(true_ratio)) {
    throw ParameterError("true ratio must be positive and finite");
  }
  UnnormalizedPair out;
  out.label = pair.label_1 + " / " + pair.label_2;
  out.log_unnorm_1 = pair.log_density_1;
  out.log_unnorm_2 = pair.log_density_2;
  out.sampler_1 = pair.sampler_1;
  out.sampler_2 = pair.sampler_2;
  out.scale_1 = true_ratio;
  out.true_ratio = true_ratio;
  return out;
}

BridgeEstimate estimate_half_order_bridge(const UnnormalizedPair& pair,
                                          std::int64_t m1, std::int64_t m2,
                                          std::uint64_t seed) {
  if (m1 < 2 || m2 < 2) {
    throw ParameterError("bridge needs m1 >= 2 and m2 >= 2");
  }
  require_surface(pair, true, true);

  // Side streams mirror the checker's convention: index 1 and 2 off `seed`.
  LogSumExp acc1;
  for (double lw : draw_log_weights(pair, 1, m1, derive_seed(seed, 1))) {
    acc1.add(-0.5 * lw);
  }
  LogSumExp acc2;
  for (double lw : draw_log_weights(pair, 2, m2, derive_seed(seed, 2))) {
    acc2.add(0.5 * lw);
  }
  const double log_a1 = acc1.log_sum() - std::log(static_cast<double>(m1));
  const double log_a2 = acc2.log_sum() - std::log(static_cast<double>(m2));

  BridgeEstimate est;
  est.m1 = m1;
  est.m2 = m2;
  est.seed = seed;
  est.a1_hat = std::exp(log_a1);
  est.a2_hat = std::exp(log_a2);
  // Assembled in log space and scaled exactly once, so rho_sq_hat never
  // sees scale_1 and r_hat picks it up as one exact multiplication.
  est.r_hat = pair.scale_1 * std::exp(log_a2 - log_a1);
  est.log_r_hat = std::log(est.r_hat);
  est.rho_sq_hat = std::exp(log_a2 + log_a1);
  const double overlap_factor =
      std::max(0.0, (1.0 - est.rho_sq_hat) / est.rho_sq_hat);
  est.var_hat = est.r_hat * est.r_hat * overlap_factor *
                (1.0 / static_cast<double>(m1) +
                 1.0 / static_cast<double>(m2));
  est.rsd_hat = est.r_hat > 0.0 ? std::sqrt(est.var_hat) / est.r_hat : 0.0;
  return est;
}

IsEstimate estimate_forward_is(const UnnormalizedPair& pair, std::int64_t n,
                               std::uint64_t seed) {
  if (n < 2) throw ParameterError("forward estimator needs n >= 2");
  require_surface(pair, false, true);
  std::vector<double> lws = draw_log_weights(pair, 2, n, derive_seed(seed, 2));
  const MomentStats st = moment_stats_from_log_terms(lws);
  IsEstimate est;
  est.n = n;
  est.seed = seed;
  est.estimate = pair.scale_1 * st.mean;
  est.log_estimate = std::log(pair.scale_1) + st.log_mean;
  est.se = pair.scale_1 * std::sqrt(st.s_sq / static_cast<double>(n));
  est.tail_events = st.tail_events;
  return est;
}

IsEstimate estimate_reverse_is(const UnnormalizedPair& pair, std::int64_t n,
                               std::uint64_t seed) {
  if (n < 2) throw ParameterError("reverse estimator needs n >= 2");
  require_surface(pair, true, false);
  std::vector<double> lws = draw_log_weights(pair, 1, n, derive_seed(seed, 1));
  for (double& lw : lws) lw = -lw;
  const MomentStats inner = moment_stats_from_log_terms(lws);
  IsEstimate est;
  est.n = n;
  est.seed = seed;
  est.log_estimate = std::log(pair.scale_1) - inner.log_mean;
  est.estimate = pair.scale_1 * std::exp(-inner.log_mean);
  // d(1/x) = -1/x^2: the delta-method SE of the reciprocal.
  const double inner_se = std::sqrt(inner.s_sq / static_cast<double>(n));
  est.se = pair.scale_1 * inner_se * std::exp(-2.0 * inner.log_mean);
  est.tail_events = inner.tail_events;
  return est;
}

double predict_bridge_rsd(double rho, std::int64_t m1, std::int64_t m2) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw ParameterError("rho must lie in (0,1]");
  }
  if (m1 < 1 || m2 < 1) throw ParameterError("budgets must be >= 1");
  const double factor = 1.0 / (rho * rho) - 1.0;
  return std::sqrt(factor * (1.0 / static_cast<double>(m1) +
                             1.0 / static_cast<double>(m2)));
}

ChainReport check_chain_overlaps(const std::vector<double>& step_rhos,
                                 double floor) {
  if (step_rhos.empty()) throw ParameterError("chain has no steps");
  if (!(floor > 0.0 && floor <= 1.0)) {
    throw ParameterError("overlap floor must lie in (0,1]");
  }
  ChainReport report;
  report.floor = floor;
  for (std::size_t i = 0; i < step_rhos.size(); ++i) {
    if (!(step_rhos[i] > 0.0 && step_rhos[i] <= 1.0)) {
      throw ParameterError("step overlap must lie in (0,1]");
    }
    if (step_rhos[i] < floor) report.weak_steps.push_back(i);
  }
  report.pass = report.weak_steps.empty();
  return report;
}

double predict_chain_rsd(const std::vector<double>& step_rhos,
                         std::int64_t m_per_side) {
  if (m_per_side < 1) throw ParameterError("per-side budget must be >= 1");
  double var = 0.0;
  for (double rho : step_rhos) {
    const double rsd = predict_bridge_rsd(rho, m_per_side, m_per_side);
    var += rsd * rsd;
  }
  return std::sqrt(var);
}

}  // namespace halford
