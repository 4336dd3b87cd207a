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

#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "halford/errors.hpp"
#include "halford/families.hpp"
#include "halford/goodcheck.hpp"
#include "halford/numeric.hpp"
#include "halford/rng.hpp"

using namespace halford;

namespace {

ModelPair binomial(std::int64_t n) {
  BinomialPointNullSpec spec;
  spec.n = n;
  return make_binomial_pair(spec);
}

ModelPair mismatched_binomial(std::int64_t n) {
  BinomialPointNullSpec spec;
  spec.n = n;
  spec.simulator_alpha = 1.2;
  spec.simulator_beta = 1.2;
  return make_binomial_pair(spec);
}

}  // namespace

TEST_SUITE("goodcheck") {
  TEST_CASE("identical pair: delta is exactly zero and stays consistent") {
    CheckPlan plan;
    plan.m1 = 100;
    plan.m2 = 100;
    plan.seed = 11;
    const GoodCheckReport rep =
        run_two_sided_half_order(make_identical_pair(), plan);
    CHECK(rep.delta == 0.0);
    CHECK(rep.rho_hat_1 == 1.0);
    CHECK(rep.rho_hat_2 == 1.0);
    CHECK(rep.se_hat == 0.0);
    CHECK(rep.verdict == Verdict::kConsistent);
    CHECK(rep.t_stat == 0.0);
  }

  TEST_CASE("well-specified binomial run is consistent and on target") {
    CheckPlan plan;
    plan.m1 = 2000;
    plan.m2 = 2000;
    plan.seed = 7;
    const GoodCheckReport rep = run_two_sided_half_order(binomial(10), plan);
    CHECK(rep.verdict == Verdict::kConsistent);
    CHECK(std::abs(rep.delta) <= rep.epsilon);
    CHECK(rep.se_hat > 0.0);
    CHECK(rep.target_known);
    CHECK(rep.target == 0.0);
    // Both side means estimate rho = 0.8339...
    CHECK(std::abs(rep.rho_hat_pooled - 0.8339344631106924) <
          4.0 * rep.se_worst_case);
    CHECK(rep.max_term_log_2 >= rep.min_term_log_2);
  }

  TEST_CASE("mismatched simulator is flagged") {
    CheckPlan plan;
    plan.m1 = 2000;
    plan.m2 = 2000;
    plan.seed = 3;
    const GoodCheckReport rep =
        run_two_sided_half_order(mismatched_binomial(50), plan);
    CHECK(rep.verdict == Verdict::kFlagged);
    // Exact mean discrepancy is -0.0609; one run sits within a few SD.
    CHECK(rep.delta < -0.02);
  }

  TEST_CASE("label-swap antisymmetry is bit-exact") {
    const ModelPair pair = binomial(10);
    const ModelPair swapped = swap_labels(pair);
    CheckPlan plan;
    plan.m1 = 1500;
    plan.m2 = 700;  // unequal on purpose
    plan.seed = 99;

    CheckPlan mirrored;
    mirrored.m1 = plan.m2;
    mirrored.m2 = plan.m1;
    mirrored.seed = plan.seed;
    // The swapped run must consume the original streams with the roles
    // exchanged, not re-derive them from its own seed tree.
    mirrored.side1_seed = derive_seed(plan.seed, 2);
    mirrored.side2_seed = derive_seed(plan.seed, 1);

    const GoodCheckReport a = run_two_sided_half_order(pair, plan);
    const GoodCheckReport b = run_two_sided_half_order(swapped, mirrored);
    CHECK(b.delta == -a.delta);
    CHECK(b.rho_hat_1 == a.rho_hat_2);
    CHECK(b.rho_hat_2 == a.rho_hat_1);
    CHECK(b.rho_hat_pooled == a.rho_hat_pooled);
    CHECK(b.se_hat == a.se_hat);
    CHECK(b.epsilon == a.epsilon);
    CHECK(b.t_stat == -a.t_stat);
    CHECK(b.verdict == a.verdict);
  }

  TEST_CASE("one-sided targets resolve through the closed forms") {
    CheckPlan plan;
    plan.t = 2.0;
    plan.sides = Sides::kOneSidedFromH2;
    plan.m2 = 500;
    plan.seed = 5;
    const GoodCheckReport from_2 = run_moment_check(binomial(10), plan);
    CHECK(from_2.target_known);
    CHECK(from_2.target ==
          doctest::Approx(19.249534304079752).epsilon(1e-12));
    CHECK(from_2.delta == doctest::Approx(from_2.rho_hat_2 - from_2.target));

    CheckPlan plan1;
    plan1.t = 2.0;
    plan1.sides = Sides::kOneSidedFromH1;
    plan1.m1 = 500;
    plan1.seed = 5;
    const GoodCheckReport from_1 = run_moment_check(binomial(10), plan1);
    CHECK(from_1.target_known);
    CHECK(from_1.target == from_2.target);

    BetaUnitSpec bspec;
    bspec.a = 3.0;
    CheckPlan plan_beta;
    plan_beta.t = 0.3;
    plan_beta.sides = Sides::kOneSidedFromH2;
    plan_beta.m2 = 500;
    const GoodCheckReport beta =
        run_moment_check(make_beta_unit_pair(bspec), plan_beta);
    CHECK(beta.target ==
          doctest::Approx(0.8689932314474432).epsilon(1e-12));
  }

  TEST_CASE("unresolvable one-sided target stays consistent and unknown") {
    BetaUnitSpec bspec;
    bspec.a = 3.0;
    ModelPair pair = make_beta_unit_pair(bspec);
    pair.analytic_order_moment = nullptr;  // continuous and no closed form
    CheckPlan plan;
    plan.t = 0.3;
    plan.sides = Sides::kOneSidedFromH2;
    plan.m2 = 200;
    const GoodCheckReport rep = run_moment_check(pair, plan);
    CHECK_FALSE(rep.target_known);
    CHECK(rep.delta == 0.0);
    CHECK(rep.verdict == Verdict::kConsistent);
  }

  TEST_CASE("orders zero and one target the trivial moment") {
    BetaUnitSpec bspec;
    bspec.a = 3.0;
    ModelPair pair = make_beta_unit_pair(bspec);
    pair.analytic_order_moment = nullptr;
    CheckPlan plan;
    plan.t = 1.0;
    plan.sides = Sides::kOneSidedFromH2;
    plan.m2 = 200;
    const GoodCheckReport rep = run_moment_check(pair, plan);
    CHECK(rep.target_known);  // I(1) = 1 needs no closed form
    CHECK(rep.target == 1.0);
  }

  TEST_CASE("threshold rules") {
    CheckPlan plan;
    plan.m1 = 2000;
    plan.m2 = 2000;
    plan.seed = 21;
    const GoodCheckReport clt = run_two_sided_half_order(binomial(10), plan);
    // z for alpha = 0.05, two-sided.
    CHECK(clt.epsilon ==
          doctest::Approx(1.959963984540054 * clt.se_hat).epsilon(1e-9));

    plan.threshold_rule = ThresholdRule::kWorstCaseClt;
    const GoodCheckReport worst = run_two_sided_half_order(binomial(10), plan);
    CHECK(worst.epsilon ==
          doctest::Approx(1.959963984540054 *
                          std::sqrt(1.0 / 2000 + 1.0 / 2000))
              .epsilon(1e-9));
    CHECK(worst.se_worst_case >= worst.se_hat);

    plan.threshold_rule = ThresholdRule::kChebyshev;
    const GoodCheckReport cheb = run_two_sided_half_order(binomial(10), plan);
    CHECK(cheb.epsilon ==
          doctest::Approx(std::sqrt(4.0 / (4000 * 0.05))).epsilon(1e-12));

    // The Chebyshev bound is a two-sided variance bound; a one-sided run
    // cannot invoke it.
    GoodCheckReport partial;
    partial.sides = Sides::kOneSidedFromH2;
    partial.m2 = 100;
    CHECK_THROWS_AS(threshold_epsilon(partial, ThresholdRule::kChebyshev, 0.05),
                    PlanError);
  }

  TEST_CASE("running discrepancy tracks the full run") {
    const ModelPair pair = binomial(10);
    CheckPlan plan;
    plan.m1 = 1000;
    plan.m2 = 1000;
    plan.seed = 13;
    const std::vector<std::int64_t> grid = {10, 100, 1000};
    const auto points = running_discrepancy(pair, plan, grid);
    REQUIRE(points.size() == 3);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(points[i].m == grid[i]);
      CHECK(std::isfinite(points[i].delta));
    }
    const GoodCheckReport full = run_two_sided_half_order(pair, plan);
    CHECK(points.back().delta == doctest::Approx(full.delta).epsilon(1e-9));
  }

  TEST_CASE("budget planning") {
    const Allocation even = plan_budget(0.25, 2000, std::nullopt);
    CHECK(even.m1 == 1000);
    CHECK(even.m2 == 1000);
    REQUIRE(even.comparison.re_lower_bound.has_value());
    CHECK(*even.comparison.re_lower_bound == doctest::Approx(4.0));
    CHECK(even.comparison.dominance);
    REQUIRE(even.comparison.v_two_sided_balanced.has_value());
    CHECK(*even.comparison.v_two_sided_balanced ==
          doctest::Approx((1.0 - 0.0625) * 2.0 / 1000.0));

    const Allocation steep = plan_budget(0.9, 2000, std::nullopt);
    CHECK_FALSE(steep.comparison.dominance);

    // Costs (4, 1): the optimum puts twice as many draws on the cheap side;
    // the returned split must respect the cost budget.
    const Allocation costed =
        plan_budget(0.5, 2000, std::make_pair(4.0, 1.0));
    CHECK(costed.m1 >= 300);
    CHECK(costed.m1 <= 340);
    CHECK(4.0 * costed.m1 + 1.0 * costed.m2 <= 2000);
    CHECK(4.0 * costed.m1 + 1.0 * costed.m2 >= 1990);
    const double ratio =
        static_cast<double>(costed.m2) / static_cast<double>(costed.m1);
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.05));

    const Allocation with_moment =
        plan_budget(0.8339344631106924, 4000, std::nullopt,
                    19.249534304079752);
    REQUIRE(with_moment.comparison.v_one_sided.has_value());
    CHECK(*with_moment.comparison.v_one_sided ==
          doctest::Approx((19.249534304079752 - 1.0) / 4000.0));
    REQUIRE(with_moment.comparison.relative_efficiency.has_value());
    CHECK(*with_moment.comparison.relative_efficiency > 1.0);

    CHECK_THROWS_AS(plan_budget(0.5, 3, std::nullopt), BudgetError);
    CHECK_THROWS_AS(plan_budget(1.5, 100, std::nullopt), ParameterError);
    CHECK_THROWS_AS(plan_budget(0.0, 100, std::nullopt), ParameterError);
    CHECK_THROWS_AS(plan_budget(0.5, 100, std::make_pair(-1.0, 1.0)),
                    ParameterError);
    CHECK_THROWS_AS(plan_budget(0.5, 100, std::nullopt, 0.5), ParameterError);
  }

  TEST_CASE("balanced plan splits and validates") {
    const CheckPlan five = CheckPlan::balanced(5, 1);
    CHECK(five.m1 == 2);
    CHECK(five.m2 == 3);
    const CheckPlan four = CheckPlan::balanced(4, 1);
    CHECK(four.m1 == 2);
    CHECK(four.m2 == 2);
    CHECK_THROWS_AS(CheckPlan::balanced(3, 1), BudgetError);
  }

  TEST_CASE("plan validation") {
    CheckPlan plan;
    plan.m1 = 1;
    plan.m2 = 100;
    CHECK_THROWS_AS(run_two_sided_half_order(binomial(10), plan), PlanError);
    plan.m1 = 100;
    plan.alpha = 0.0;
    CHECK_THROWS_AS(run_two_sided_half_order(binomial(10), plan),
                    ParameterError);
    plan.alpha = 0.05;
    plan.t = 0.7;
    CHECK_THROWS_AS(run_two_sided_half_order(binomial(10), plan), PlanError);
    CheckPlan ok;
    ok.t = 0.7;
    ok.m1 = 100;
    ok.m2 = 100;
    CHECK_NOTHROW(run_moment_check(binomial(10), ok));
  }

  TEST_CASE("keep_raw returns the transformed draws") {
    CheckPlan plan;
    plan.m1 = 50;
    plan.m2 = 80;
    plan.seed = 2;
    plan.keep_raw = true;
    const GoodCheckReport rep = run_two_sided_half_order(binomial(10), plan);
    REQUIRE(rep.raw_side1.size() == 50);
    REQUIRE(rep.raw_side2.size() == 80);
    KahanSum acc;
    for (double v : rep.raw_side2) acc.add(v);
    CHECK(acc.value() / 80.0 == doctest::Approx(rep.rho_hat_2).epsilon(1e-12));
  }

  TEST_CASE("string round-trips") {
    CHECK(sides_from_string("two-sided") == Sides::kTwoSided);
    CHECK(sides_from_string("one-sided-from-h1") == Sides::kOneSidedFromH1);
    CHECK(sides_from_string("h2") == Sides::kOneSidedFromH2);
    CHECK(rule_from_string("worst") == ThresholdRule::kWorstCaseClt);
    CHECK(rule_from_string("chebyshev") == ThresholdRule::kChebyshev);
    CHECK_THROWS_AS(sides_from_string("sideways"), ParameterError);
    CHECK_THROWS_AS(rule_from_string("hope"), ParameterError);
    CHECK(std::string(to_string(Verdict::kFlagged)) == "flagged");
  }
}
