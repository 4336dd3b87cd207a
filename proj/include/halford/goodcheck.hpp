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

#ifndef HALFORD_GOODCHECK_HPP
#define HALFORD_GOODCHECK_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "halford/model_pair.hpp"

namespace halford {

enum class Sides {
  kTwoSided,
  kOneSidedFromH1,
  kOneSidedFromH2,
};

enum class ThresholdRule {
  kClt,
  kWorstCaseClt,
  kChebyshev,
};

enum class Verdict {
  kConsistent,
  kFlagged,
};

/// Plan for one diagnostic run. Side streams derive from `seed` (index 1 for
/// side 1, index 2 for side 2) unless explicitly overridden; the overrides
/// exist so a label-swapped rerun can reuse the original streams and land on
/// the exact mirrored result.
struct CheckPlan {
  double t = 0.5;
  Sides sides = Sides::kTwoSided;
  std::int64_t m1 = 0;
  std::int64_t m2 = 0;
  double alpha = 0.05;
  ThresholdRule threshold_rule = ThresholdRule::kClt;
  std::uint64_t seed = 1;
  bool keep_raw = false;
  std::optional<std::uint64_t> side1_seed;
  std::optional<std::uint64_t> side2_seed;

  /// Balanced split of a total budget: m1 = floor(N/2), m2 = ceil(N/2).
  static CheckPlan balanced(std::int64_t n_total, std::uint64_t seed);
};

/// Result of one run. Side 2 transforms are exp(t * log B) on draws from
/// model 2; side 1 transforms are exp((t-1) * log B) on draws from model 1.
/// Both target the same order-t moment, so two-sided delta targets zero.
/// One-sided runs fill only their own side; delta is mean minus the known
/// target when one resolves, else zero with target_known = false.
struct GoodCheckReport {
  double t = 0.5;
  Sides sides = Sides::kTwoSided;
  std::int64_t m1 = 0;
  std::int64_t m2 = 0;
  std::uint64_t seed = 0;

  double rho_hat_1 = 0.0;
  double rho_hat_2 = 0.0;
  double rho_hat_pooled = 0.0;
  double delta = 0.0;
  double s1_sq = 0.0;
  double s2_sq = 0.0;
  double se_hat = 0.0;
  double se_worst_case = 0.0;
  double alpha = 0.05;
  ThresholdRule threshold_rule = ThresholdRule::kClt;
  double epsilon = 0.0;
  Verdict verdict = Verdict::kConsistent;
  double t_stat = 0.0;

  /// Log-domain side means; finite even when the raw means overflow.
  double log_mean_1 = 0.0;
  double log_mean_2 = 0.0;
  /// Log-domain extremes of the per-draw transforms, per side; they record
  /// the dynamic range a run had to absorb (idle sides keep the defaults).
  double max_term_log_1 = 0.0;
  double min_term_log_1 = 0.0;
  double max_term_log_2 = 0.0;
  double min_term_log_2 = 0.0;
  std::int64_t tail_events_1 = 0;
  std::int64_t tail_events_2 = 0;
  bool overflow_contaminated = false;

  bool target_known = false;
  double target = 0.0;

  std::vector<double> raw_side1;
  std::vector<double> raw_side2;
};

struct BudgetComparison {
  std::int64_t n_total = 0;
  std::optional<double> rho;
  std::optional<double> v_one_sided;           ///< (I(2)-1)/N, +inf allowed
  std::optional<double> v_two_sided_balanced;  ///< (1/m1+1/m2)(1-rho^2)
  std::optional<double> relative_efficiency;
  std::optional<double> re_lower_bound;  ///< 1/(4 rho^2)
  bool dominance = false;                ///< true whenever rho <= 1/2
};

struct Allocation {
  std::int64_t m1 = 0;
  std::int64_t m2 = 0;
  BudgetComparison comparison;
};

/// Algorithm: draw per side, transform, compare means at the common order.
GoodCheckReport run_moment_check(const ModelPair& pair, const CheckPlan& plan);

/// The half-order special case: requires plan.t == 0.5 and two sides.
GoodCheckReport run_two_sided_half_order(const ModelPair& pair,
                                         const CheckPlan& plan);

struct RunningPoint {
  std::int64_t m = 0;
  double delta = 0.0;
};

/// Prefix discrepancies Delta(m) on an increasing budget grid, one pass over
/// the same streams the full run would use.
std::vector<RunningPoint> running_discrepancy(
    const ModelPair& pair, const CheckPlan& plan,
    const std::vector<std::int64_t>& grid);

/// Tolerance for the given rule: clt uses the report's se_hat, worst-case
/// uses the half-order variance bound, chebyshev inverts the tail bound at
/// the report's total budget.
double threshold_epsilon(const GoodCheckReport& partial, ThresholdRule rule,
                         double alpha);

/// Split a total budget between the two sides. Equal (or absent) unit costs
/// give the nearest-integer balanced split; unequal costs split inversely
/// proportional to sqrt(cost) under total cost = n_total. When rho (and
/// optionally the order-2 moment) is known, the attached comparison carries
/// the matched-budget variances and relative efficiency.
Allocation plan_budget(std::optional<double> rho, std::int64_t n_total,
                       std::optional<std::pair<double, double>> costs,
                       std::optional<double> order2_moment = std::nullopt);

const char* to_string(Sides sides);
const char* to_string(ThresholdRule rule);
const char* to_string(Verdict verdict);
Sides sides_from_string(const std::string& s);
ThresholdRule rule_from_string(const std::string& s);

}  // namespace halford

#endif  // HALFORD_GOODCHECK_HPP
