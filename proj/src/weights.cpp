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

#include "halford/weights.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "halford/errors.hpp"
#include "halford/numeric.hpp"
#include "halford/rng.hpp"

namespace halford {

namespace {

void require_finite(const std::vector<double>& log_weights) {
  if (log_weights.empty()) throw ParameterError("weight vector is empty");
  for (double lw : log_weights) {
    if (!std::isfinite(lw)) {
      throw ContractError("weight vector entries must be finite logs");
    }
  }
}

std::size_t prefix_count(double p, std::int64_t n) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw ParameterError("concentration p must lie in (0,1]");
  }
  const auto k = static_cast<std::int64_t>(
      std::ceil(p * static_cast<double>(n)));
  return static_cast<std::size_t>(std::min(n, std::max<std::int64_t>(1, k)));
}

}  // namespace

std::vector<double> default_lorenz_grid() {
  constexpr int kPoints = 50;
  std::vector<double> grid;
  grid.reserve(kPoints);
  const double log_lo = std::log(1e-3);
  for (int i = 0; i < kPoints; ++i) {
    const double frac =
        static_cast<double>(i) / static_cast<double>(kPoints - 1);
    grid.push_back(std::exp(log_lo * (1.0 - frac)));
  }
  grid.back() = 1.0;
  return grid;
}

WeightDiagnostics normalize_and_diagnose(const WeightVector& wv,
                                         const std::vector<double>& p_grid,
                                         const std::vector<double>& top_p_list) {
  require_finite(wv.log_weights);

  // Descending sort first: permutations of the input then collapse to the
  // same array and every later rounding is shared bit-for-bit. Normalizing
  // against the max keeps exp in (0,1] regardless of the raw scale.
  std::vector<double> sorted = wv.log_weights;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  const double top = sorted.front();
  std::vector<double> w(sorted.size());
  KahanSum total;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    w[i] = std::exp(sorted[i] - top);
    total.add(w[i]);
  }
  const double t = total.value();
  std::vector<double> prefix(w.size());
  KahanSum run;
  KahanSum sq;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double wn = w[i] / t;
    run.add(wn);
    sq.add(wn * wn);
    prefix[i] = run.value();
  }

  const auto n = static_cast<std::int64_t>(w.size());
  const auto share = [&prefix, n](double p) {
    const std::size_t k = prefix_count(p, n);
    // The full prefix holds everything by construction.
    return k == prefix.size() ? 1.0 : prefix[k - 1];
  };

  WeightDiagnostics diag;
  diag.n = n;
  diag.lorenz.reserve(p_grid.size());
  for (double p : p_grid) diag.lorenz.push_back({p, share(p)});
  diag.kappa_n =
      std::min(1.0, 1.0 / (static_cast<double>(n) * sq.value()));
  diag.top_share.reserve(top_p_list.size());
  for (double p : top_p_list) diag.top_share.emplace_back(p, share(p));
  if (wv.transform_exponent == 0.5) {
    diag.cv_half_sq = 1.0 / diag.kappa_n - 1.0;
  }
  return diag;
}

HalfOrderSummary half_order_overlap_from_weights(const WeightVector& wv) {
  if (wv.transform_exponent != 0.5) {
    throw ContractError(
        "half-order overlap needs weights built at exponent 1/2");
  }
  require_finite(wv.log_weights);
  LogSumExp l1;
  LogSumExp l2;
  for (double lw : wv.log_weights) {
    l1.add(lw);
    l2.add(2.0 * lw);
  }
  const double logn = std::log(static_cast<double>(wv.log_weights.size()));
  const double log_mean = l1.log_sum() - logn;
  const double log_second = l2.log_sum() - logn;

  HalfOrderSummary summary;
  summary.n = static_cast<std::int64_t>(wv.log_weights.size());
  summary.rho_hat = std::exp(log_mean);
  summary.cv_half_sq =
      std::max(0.0, std::expm1(log_second - 2.0 * log_mean));
  summary.se = std::sqrt(
      std::max(0.0, 1.0 - summary.rho_hat * summary.rho_hat) /
      static_cast<double>(summary.n));
  return summary;
}

WeightVector build_weight_vector(const ModelPair& pair, double t,
                                 WeightOrigin side, std::int64_t n,
                                 std::uint64_t seed) {
  if (n < 1) throw ParameterError("weight vector needs n >= 1");
  ensure_not_nan(t, "weight transform exponent");
  const auto& sampler = (side == WeightOrigin::kProposalSide)
                            ? pair.sampler_2
                            : pair.sampler_1;
  if (!sampler || !pair.log_density_1 || !pair.log_density_2) {
    throw ContractError("weight builder needs sampler and both densities");
  }
  const double coeff = (side == WeightOrigin::kProposalSide) ? t : t - 1.0;
  RngStream rng(seed);
  WeightVector wv;
  wv.origin = side;
  wv.transform_exponent = t;
  wv.log_weights.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const double lb = log_bayes_factor(pair, sampler(rng));
    wv.log_weights.push_back(scaled_log(coeff, lb));
  }
  return wv;
}

WeightDiagnostics fragility_demo(const ModelPair& pair, double t,
                                 WeightOrigin side, std::int64_t n,
                                 std::uint64_t seed) {
  return normalize_and_diagnose(build_weight_vector(pair, t, side, n, seed));
}

const char* to_string(WeightOrigin origin) {
  return origin == WeightOrigin::kProposalSide ? "proposal-side"
                                               : "target-side";
}

WeightOrigin origin_from_string(const std::string& s) {
  if (s == "proposal-side" || s == "proposal") {
    return WeightOrigin::kProposalSide;
  }
  if (s == "target-side" || s == "target") return WeightOrigin::kTargetSide;
  throw ParameterError("unknown weight origin: " + s);
}

}  // namespace halford
