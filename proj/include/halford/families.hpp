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

#ifndef HALFORD_FAMILIES_HPP
#define HALFORD_FAMILIES_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "halford/model_pair.hpp"

namespace halford {

/// Binomial(n, theta) under a point null theta0 versus a Beta(alpha, beta)
/// prior on theta. Optional simulator shapes put sampler_1 in mismatch mode
/// while the evaluator densities stay bit-identical.
struct BinomialPointNullSpec {
  std::int64_t n = 10;
  double alpha = 1.0;
  double beta = 1.0;
  double theta0 = 0.5;
  std::optional<double> simulator_alpha;
  std::optional<double> simulator_beta;
};

/// Beta(a, 1) density a*x^(a-1) on (0,1) versus Uniform(0,1).
/// Overlap in closed form: rho(a) = 2*sqrt(a)/(a+1).
struct BetaUnitSpec {
  double a = 1.0;
};

enum class PowerBranch { kAboveHalf, kBelowHalf };

/// Power-law family stressing the order t_star != 1/2.
///
/// Above-half branch (t_star > 1/2, gamma = 1/(2 t_star)):
///   p1(x) = (1-gamma) x^(-gamma),  I(s) = (1-gamma)^s / (1-gamma*s)
///   finite iff gamma*s < 1.
/// Below-half branch (t_star < 1/2, gamma = 1/(1-2 t_star)):
///   p1(x) = (gamma+1) x^gamma,     I(s) = (gamma+1)^s / (gamma*s+1)
///   finite iff gamma*s > -1.
/// p2 is Uniform(0,1) in both branches.
struct PowerCounterexampleSpec {
  double t_star = 1.0;
  PowerBranch branch = PowerBranch::kAboveHalf;
};

ModelPair make_binomial_pair(const BinomialPointNullSpec& spec);
ModelPair make_beta_unit_pair(const BetaUnitSpec& spec);
ModelPair make_counterexample_pair(const PowerCounterexampleSpec& spec);

/// A user-supplied discrete pair on explicit atoms (default 0..K-1).
/// Probabilities must each sum to 1 within 1e-12 and be mutually absolutely
/// continuous (zero exactly where the other is zero).
ModelPair make_discrete_pair(const std::vector<double>& probs_1,
                             const std::vector<double>& probs_2,
                             std::vector<double> atoms = {});

/// The trivial p1 = p2 = Uniform(0,1) pair; log B is exactly 0 everywhere.
ModelPair make_identical_pair();

/// log C(n,k) via log-Gamma; stable for n up to at least 10^3.
double log_choose(std::int64_t n, std::int64_t k);

/// log Beta(a, b) via log-Gamma.
double log_beta(double a, double b);

}  // namespace halford

#endif  // HALFORD_FAMILIES_HPP
