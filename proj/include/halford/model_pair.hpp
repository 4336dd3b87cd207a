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

#ifndef HALFORD_MODEL_PAIR_HPP
#define HALFORD_MODEL_PAIR_HPP

#include <functional>
#include <string>
#include <vector>

#include "halford/rng.hpp"

namespace halford {

enum class SupportKind {
  kFiniteDiscrete,
  kContinuousUnitInterval,
  kAbstract,
};

/// A pair of competing models over a common support.
///
/// Observations are doubles: atom values for discrete supports, points of
/// (0,1) for the continuous unit interval. Log densities are natural-log.
/// Instances are immutable after construction and safe to share across
/// threads; samplers draw from an explicit per-call stream.
struct ModelPair {
  std::string label_1;
  std::string label_2;
  SupportKind support_kind = SupportKind::kAbstract;

  /// Atom values, ascending; only for finite-discrete supports.
  std::vector<double> atoms;

  std::function<double(RngStream&)> sampler_1;
  std::function<double(RngStream&)> sampler_2;
  std::function<double(double)> log_density_1;
  std::function<double(double)> log_density_2;

  /// Closed-form moment function of the log ratio, where the family has one:
  /// analytic_order_moment(t) = the order-t integral of p1^t * p2^(1-t).
  /// Returns +inf where the family declares divergence. Empty if unknown.
  std::function<double(double)> analytic_order_moment;
};

/// log B(x) = log p1(x) - log p2(x).
///
/// Throws SupportError for x outside the declared support and
/// AbsoluteContinuityError when either density vanishes at a support point
/// where the other does not (or both vanish: B is undefined there).
double log_bayes_factor(const ModelPair& pair, double x);

/// The same pair with the roles of model 1 and model 2 exchanged.
/// Satisfies log B'(x) = -log B(x) bit-exactly, and I'(s) = I(1-s).
ModelPair swap_labels(const ModelPair& pair);

}  // namespace halford

#endif  // HALFORD_MODEL_PAIR_HPP
