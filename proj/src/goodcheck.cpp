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

#include "halford/goodcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "halford/errors.hpp"
#include "halford/numeric.hpp"
#include "halford/overlap.hpp"
#include "halford/rng.hpp"

namespace halford {

namespace {

std::uint64_t side1_stream(const CheckPlan& plan) {
  return plan.side1_seed.value_or(derive_seed(plan.seed, 1));
}

std::uint64_t side2_stream(const CheckPlan& plan) {
  return plan.side2_seed.value_or(derive_seed(plan.seed, 2));
}

struct SideRun {
  MomentStats stats;
  std::vector<double> raw;
};

// One side of a check: m draws from the side's own model, each transformed
// to exp(coeff * log B). Side 2 uses coeff = t, side 1 uses coeff = t - 1;
// both expectations equal the order-t moment on its domain.
SideRun run_side(const ModelPair& pair, int side, double coeff,
                 std::int64_t m, std::uint64_t seed, bool keep_raw) {
  const auto& sampler = (side == 1) ? pair.sampler_1 : pair.sampler_2;
  if (!sampler) {
    throw PlanError("simulator missing on side " + std::to_string(side));
  }
  RngStream rng(seed);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(m));
  for (std::int64_t i = 0; i < m; ++i) {
    const double x = sampler(rng);
    const double lb = log_bayes_factor(pair, x);
    terms.push_back(scaled_log(coeff, lb));
  }
  SideRun run;
  run.stats = moment_stats_from_log_terms(terms);
  if (keep_raw) {
    run.raw.reserve(terms.size());
    for (double term : terms) run.raw.push_back(std::exp(term));
  }
  return run;
}

// The one-sided comparison target: the order-t moment itself. Densities in
// a ModelPair are normalized, so orders 0 and 1 are exactly 1.
std::optional<double> resolve_target(const ModelPair& pair, double t) {
  if (t == 0.0 || t == 1.0) return 1.0;
  if (pair.analytic_order_moment) return pair.analytic_order_moment(t);
  if (pair.support_kind == SupportKind::kFiniteDiscrete &&
      !pair.atoms.empty()) {
    return hellinger_integral(pair, t, Method::exact_sum());
  }
  return std::nullopt;
}

double safe_t_stat(double delta, double se) {
  if (delta == 0.0) return 0.0;
  if (se == 0.0) return std::copysign(kInf, delta);
  if (std::isinf(delta) && std::isinf(se)) return 0.0;
  return delta / se;
}

// r2 - r1 without NaN: when both sides overflow, the discrepancy scale is
// unknowable and is reported as +inf alongside the contamination flag.
double safe_delta(double r2, double r1) {
  if (std::isinf(r2) && std::isinf(r1)) return kInf;
  return r2 - r1;
}

}  // namespace

CheckPlan CheckPlan::balanced(std::int64_t n_total, std::uint64_t seed) {
  if (n_total < 4) throw BudgetError("total budget must be at least 4");
  CheckPlan plan;
  plan.m1 = n_total / 2;
  plan.m2 = n_total - plan.m1;
  plan.seed = seed;
  return plan;
}

GoodCheckReport run_moment_check(const ModelPair& pair,
                                 const CheckPlan& plan) {
  ensure_not_nan(plan.t, "check order t");
  if (!(plan.alpha > 0.0 && plan.alpha < 1.0)) {
    throw ParameterError("alpha must lie in (0,1)");
  }

  GoodCheckReport rep;
  rep.t = plan.t;
  rep.sides = plan.sides;
  rep.alpha = plan.alpha;
  rep.threshold_rule = plan.threshold_rule;
  rep.seed = plan.seed;

  const double c1 = plan.t - 1.0;
  const double c2 = plan.t;

  switch (plan.sides) {
    case Sides::kTwoSided: {
      if (plan.m1 < 2 || plan.m2 < 2) {
        throw PlanError("two-sided check needs m1 >= 2 and m2 >= 2");
      }
      SideRun side1 =
          run_side(pair, 1, c1, plan.m1, side1_stream(plan), plan.keep_raw);
      SideRun side2 =
          run_side(pair, 2, c2, plan.m2, side2_stream(plan), plan.keep_raw);
      rep.m1 = plan.m1;
      rep.m2 = plan.m2;
      rep.rho_hat_1 = side1.stats.mean;
      rep.rho_hat_2 = side2.stats.mean;
      rep.rho_hat_pooled = 0.5 * (rep.rho_hat_1 + rep.rho_hat_2);
      rep.delta = safe_delta(rep.rho_hat_2, rep.rho_hat_1);
      rep.s1_sq = side1.stats.s_sq;
      rep.s2_sq = side2.stats.s_sq;
      rep.se_hat = std::sqrt(rep.s2_sq / static_cast<double>(plan.m2) +
                             rep.s1_sq / static_cast<double>(plan.m1));
      rep.se_worst_case = std::sqrt(1.0 / static_cast<double>(plan.m1) +
                                    1.0 / static_cast<double>(plan.m2));
      rep.log_mean_1 = side1.stats.log_mean;
      rep.log_mean_2 = side2.stats.log_mean;
      rep.max_term_log_1 = side1.stats.max_term;
      rep.min_term_log_1 = side1.stats.min_term;
      rep.max_term_log_2 = side2.stats.max_term;
      rep.min_term_log_2 = side2.stats.min_term;
      rep.tail_events_1 = side1.stats.tail_events;
      rep.tail_events_2 = side2.stats.tail_events;
      rep.target_known = true;
      rep.target = 0.0;  // two-sided delta targets zero by construction
      rep.raw_side1 = std::move(side1.raw);
      rep.raw_side2 = std::move(side2.raw);
      break;
    }
    case Sides::kOneSidedFromH2: {
      if (plan.m2 < 2) throw PlanError("one-sided check needs m2 >= 2");
      SideRun side2 =
          run_side(pair, 2, c2, plan.m2, side2_stream(plan), plan.keep_raw);
      rep.m2 = plan.m2;
      rep.rho_hat_2 = side2.stats.mean;
      rep.rho_hat_pooled = rep.rho_hat_2;
      rep.s2_sq = side2.stats.s_sq;
      rep.se_hat = std::sqrt(rep.s2_sq / static_cast<double>(plan.m2));
      rep.se_worst_case = std::sqrt(1.0 / static_cast<double>(plan.m2));
      rep.log_mean_2 = side2.stats.log_mean;
      rep.log_mean_1 = -kInf;
      rep.max_term_log_2 = side2.stats.max_term;
      rep.min_term_log_2 = side2.stats.min_term;
      rep.tail_events_2 = side2.stats.tail_events;
      const auto target = resolve_target(pair, plan.t);
      if (target.has_value()) {
        rep.target_known = true;
        rep.target = *target;
        rep.delta = safe_delta(rep.rho_hat_2, *target);
      }
      rep.raw_side2 = std::move(side2.raw);
      break;
    }
    case Sides::kOneSidedFromH1: {
      if (plan.m1 < 2) throw PlanError("one-sided check needs m1 >= 2");
      SideRun side1 =
          run_side(pair, 1, c1, plan.m1, side1_stream(plan), plan.keep_raw);
      rep.m1 = plan.m1;
      rep.rho_hat_1 = side1.stats.mean;
      rep.rho_hat_pooled = rep.rho_hat_1;
      rep.s1_sq = side1.stats.s_sq;
      rep.se_hat = std::sqrt(rep.s1_sq / static_cast<double>(plan.m1));
      rep.se_worst_case = std::sqrt(1.0 / static_cast<double>(plan.m1));
      rep.log_mean_1 = side1.stats.log_mean;
      rep.log_mean_2 = -kInf;
      rep.max_term_log_1 = side1.stats.max_term;
      rep.min_term_log_1 = side1.stats.min_term;
      rep.tail_events_1 = side1.stats.tail_events;
      const auto target = resolve_target(pair, plan.t);
      if (target.has_value()) {
        rep.target_known = true;
        rep.target = *target;
        rep.delta = safe_delta(rep.rho_hat_1, *target);
      }
      rep.raw_side1 = std::move(side1.raw);
      break;
    }
  }

  rep.overflow_contaminated =
      rep.tail_events_1 + rep.tail_events_2 > 0 || std::isinf(rep.rho_hat_1) ||
      std::isinf(rep.rho_hat_2) || std::isinf(rep.s1_sq) ||
      std::isinf(rep.s2_sq);
  rep.epsilon = threshold_epsilon(rep, plan.threshold_rule, plan.alpha);
  rep.t_stat = safe_t_stat(rep.delta, rep.se_hat);
  if (rep.target_known && std::abs(rep.delta) > rep.epsilon) {
    rep.verdict = Verdict::kFlagged;
  } else {
    rep.verdict = Verdict::kConsistent;
  }
  return rep;
}

GoodCheckReport run_two_sided_half_order(const ModelPair& pair,
                                         const CheckPlan& plan) {
  if (plan.t != 0.5) {
    throw PlanError("half-order check requires t = 1/2 exactly");
  }
  if (plan.sides != Sides::kTwoSided) {
    throw PlanError("half-order check is two-sided by definition");
  }
  return run_moment_check(pair, plan);
}

std::vector<RunningPoint> running_discrepancy(
    const ModelPair& pair, const CheckPlan& plan,
    const std::vector<std::int64_t>& grid) {
  if (grid.empty()) throw PlanError("running-discrepancy grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 1 || (i > 0 && grid[i] <= grid[i - 1])) {
      throw PlanError("running-discrepancy grid must be strictly increasing");
    }
  }

  const bool two_sided = plan.sides == Sides::kTwoSided;
  const std::int64_t cap = grid.back();
  double target = 0.0;
  if (plan.sides == Sides::kOneSidedFromH2 ||
      plan.sides == Sides::kOneSidedFromH1) {
    const auto resolved = resolve_target(pair, plan.t);
    if (!resolved.has_value()) {
      throw PlanError("running discrepancy needs a resolvable target");
    }
    target = *resolved;
  }
  if (two_sided && (cap > plan.m1 || cap > plan.m2)) {
    throw PlanError("grid exceeds the per-side budgets");
  }
  if (plan.sides == Sides::kOneSidedFromH2 && cap > plan.m2) {
    throw PlanError("grid exceeds the side-2 budget");
  }
  if (plan.sides == Sides::kOneSidedFromH1 && cap > plan.m1) {
    throw PlanError("grid exceeds the side-1 budget");
  }

  const double c1 = plan.t - 1.0;
  const double c2 = plan.t;
  const bool use1 = two_sided || plan.sides == Sides::kOneSidedFromH1;
  const bool use2 = two_sided || plan.sides == Sides::kOneSidedFromH2;
  if (use1 && !pair.sampler_1) throw PlanError("simulator missing on side 1");
  if (use2 && !pair.sampler_2) throw PlanError("simulator missing on side 2");

  RngStream rng1(side1_stream(plan));
  RngStream rng2(side2_stream(plan));
  LogSumExp acc1;
  LogSumExp acc2;
  std::vector<RunningPoint> out;
  out.reserve(grid.size());
  std::size_t next = 0;
  for (std::int64_t i = 1; i <= cap; ++i) {
    if (use1) {
      const double lb = log_bayes_factor(pair, pair.sampler_1(rng1));
      acc1.add(scaled_log(c1, lb));
    }
    if (use2) {
      const double lb = log_bayes_factor(pair, pair.sampler_2(rng2));
      acc2.add(scaled_log(c2, lb));
    }
    if (i == grid[next]) {
      const double logm = std::log(static_cast<double>(i));
      double delta;
      if (two_sided) {
        delta = safe_delta(std::exp(acc2.log_sum() - logm),
                           std::exp(acc1.log_sum() - logm));
      } else if (use2) {
        delta = safe_delta(std::exp(acc2.log_sum() - logm), target);
      } else {
        delta = safe_delta(std::exp(acc1.log_sum() - logm), target);
      }
      out.push_back({i, delta});
      ++next;
      if (next >= grid.size()) break;
    }
  }
  return out;
}

double threshold_epsilon(const GoodCheckReport& partial, ThresholdRule rule,
                         double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ParameterError("alpha must lie in (0,1)");
  }
  switch (rule) {
    case ThresholdRule::kClt:
      return inverse_normal_cdf(1.0 - alpha / 2.0) * partial.se_hat;
    case ThresholdRule::kWorstCaseClt:
      return inverse_normal_cdf(1.0 - alpha / 2.0) * partial.se_worst_case;
    case ThresholdRule::kChebyshev: {
      if (partial.sides != Sides::kTwoSided) {
        throw PlanError("chebyshev threshold applies to two-sided checks");
      }
      const double n = static_cast<double>(partial.m1 + partial.m2);
      return std::sqrt(4.0 / (n * alpha));
    }
  }
  throw ContractError("unknown threshold rule");
}

Allocation plan_budget(std::optional<double> rho, std::int64_t n_total,
                       std::optional<std::pair<double, double>> costs,
                       std::optional<double> order2_moment) {
  if (n_total < 4) throw BudgetError("total budget must be at least 4");
  if (rho.has_value() && !(*rho > 0.0 && *rho <= 1.0)) {
    throw ParameterError("rho must lie in (0,1]");
  }

  Allocation alloc;
  if (costs.has_value()) {
    if (!(costs->first > 0.0) || !(costs->second > 0.0)) {
      throw ParameterError("unit costs must be positive");
    }
  }
  if (!costs.has_value() || costs->first == costs->second) {
    alloc.m1 = n_total / 2;
    alloc.m2 = n_total - alloc.m1;
  } else {
    // n_j proportional to 1/sqrt(c_j) under c1*n1 + c2*n2 = n_total.
    const double s1 = std::sqrt(costs->first);
    const double s2 = std::sqrt(costs->second);
    const double total = static_cast<double>(n_total);
    alloc.m1 = std::max<std::int64_t>(
        2, std::llround(total / (s1 * (s1 + s2))));
    alloc.m2 = std::max<std::int64_t>(
        2, std::llround(total / (s2 * (s1 + s2))));
  }

  BudgetComparison& comp = alloc.comparison;
  comp.n_total = n_total;
  comp.rho = rho;
  if (rho.has_value()) {
    const double rho_sq = *rho * *rho;
    comp.v_two_sided_balanced =
        (1.0 / static_cast<double>(alloc.m1) +
         1.0 / static_cast<double>(alloc.m2)) *
        (1.0 - rho_sq);
    comp.re_lower_bound = 1.0 / (4.0 * rho_sq);
    comp.dominance = *rho <= 0.5;
  }
  if (order2_moment.has_value()) {
    if (!(*order2_moment >= 1.0)) {
      throw ParameterError("order-2 moment must be >= 1");
    }
    comp.v_one_sided = (*order2_moment - 1.0) / static_cast<double>(n_total);
    if (comp.v_two_sided_balanced.has_value() &&
        *comp.v_two_sided_balanced > 0.0) {
      comp.relative_efficiency =
          *comp.v_one_sided / *comp.v_two_sided_balanced;
    }
  }
  return alloc;
}

const char* to_string(Sides sides) {
  switch (sides) {
    case Sides::kTwoSided:
      return "two-sided";
    case Sides::kOneSidedFromH1:
      return "one-sided-from-h1";
    case Sides::kOneSidedFromH2:
      return "one-sided-from-h2";
  }
  return "unknown";
}

const char* to_string(ThresholdRule rule) {
  switch (rule) {
    case ThresholdRule::kClt:
      return "clt";
    case ThresholdRule::kWorstCaseClt:
      return "worst-case-clt";
    case ThresholdRule::kChebyshev:
      return "chebyshev";
  }
  return "unknown";
}

const char* to_string(Verdict verdict) {
  return verdict == Verdict::kFlagged ? "flagged" : "consistent";
}

Sides sides_from_string(const std::string& s) {
  if (s == "two-sided" || s == "two") return Sides::kTwoSided;
  if (s == "one-sided-from-h1" || s == "from-h1" || s == "h1") {
    return Sides::kOneSidedFromH1;
  }
  if (s == "one-sided-from-h2" || s == "from-h2" || s == "h2") {
    return Sides::kOneSidedFromH2;
  }
  throw ParameterError("unknown sides value: " + s);
}

ThresholdRule rule_from_string(const std::string& s) {
  if (s == "clt") return ThresholdRule::kClt;
  if (s == "worst-case-clt" || s == "worst") return ThresholdRule::kWorstCaseClt;
  if (s == "chebyshev") return ThresholdRule::kChebyshev;
  throw ParameterError("unknown threshold rule: " + s);
}

}  // namespace halford
