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

#ifndef HALFORD_WEIGHTS_HPP
#define HALFORD_WEIGHTS_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "halford/model_pair.hpp"

namespace halford {

enum class WeightOrigin {
  kProposalSide,  ///< draws from model 2, weights W^t
  kTargetSide,    ///< draws from model 1, weights W^(t-1)
};

/// Log-scale unnormalized weights plus their provenance. All entries must
/// be finite (overflow policy is applied upstream, where draws happen).
struct WeightVector {
  std::vector<double> log_weights;
  WeightOrigin origin = WeightOrigin::kProposalSide;
  double transform_exponent = 1.0;
};

struct LorenzPoint {
  double p = 0.0;
  double c = 0.0;  ///< share of total weight held by the top ceil(pN) entries
};

/// Concentration diagnostics of one weight vector.
///
/// kappa_n = 1/(N * sum of squared normalized weights), in (0,1] and often
/// reported as ESS/N; it is kept under its own name because the usual
/// effective-sample-size reading presumes variance finiteness this library
/// does not assume. cv_half_sq = 1/kappa_n - 1 is attached only for
/// half-order weight vectors, where it estimates the squared half-order
/// coefficient of variation.
struct WeightDiagnostics {
  std::int64_t n = 0;
  std::vector<LorenzPoint> lorenz;
  double kappa_n = 0.0;
  std::vector<std::pair<double, double>> top_share;  ///< (p, S_p)
  std::optional<double> cv_half_sq;
};

/// Default Lorenz grid: 50 log-spaced p values from 1e-3 to 1.
std::vector<double> default_lorenz_grid();

/// Sorts the normalized weights in decreasing order and evaluates the
/// concentration curve C(p) over ceil(pN)-element prefixes, kappa_n, and
/// the requested top shares. Sorting happens before normalization, so any
/// permutation of the input yields bit-identical output; diagnostics are
/// also invariant under a common shift of the log weights (bit-identical
/// whenever the shifted inputs are themselves exact).
WeightDiagnostics normalize_and_diagnose(
    const WeightVector& wv, const std::vector<double>& p_grid,
    const std::vector<double>& top_p_list = {0.01});

inline WeightDiagnostics normalize_and_diagnose(const WeightVector& wv) {
  return normalize_and_diagnose(wv, default_lorenz_grid());
}

struct HalfOrderSummary {
  double rho_hat = 0.0;
  double cv_half_sq = 0.0;
  double se = 0.0;
  std::int64_t n = 0;
};

/// Overlap read off half-order weights: the sample mean of the transforms
/// estimates rho whichever side generated them, with SE sqrt((1-rho^2)/N).
/// Requires normalized-ratio weights built at exponent 1/2.
HalfOrderSummary half_order_overlap_from_weights(const WeightVector& wv);

/// Reproduces the weight-degeneracy stress experiment: N draws from the
/// side's generating model, weights W^t or W^(t-1), full diagnostics.
WeightDiagnostics fragility_demo(const ModelPair& pair, double t,
                                 WeightOrigin side, std::int64_t n,
                                 std::uint64_t seed);

/// The weight vector behind fragility_demo, for callers that need both the
/// raw logs and the diagnostics.
WeightVector build_weight_vector(const ModelPair& pair, double t,
                                 WeightOrigin side, std::int64_t n,
                                 std::uint64_t seed);

const char* to_string(WeightOrigin origin);
WeightOrigin origin_from_string(const std::string& s);

}  // namespace halford

#endif  // HALFORD_WEIGHTS_HPP
