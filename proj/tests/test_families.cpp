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
#include <vector>

#include "doctest.h"
#include "halford/errors.hpp"
#include "halford/families.hpp"
#include "halford/model_pair.hpp"
#include "halford/rng.hpp"

using namespace halford;

namespace {

double atom_mass(const ModelPair& pair, int which) {
  double total = 0.0;
  for (double atom : pair.atoms) {
    total += std::exp(which == 1 ? pair.log_density_1(atom)
                                 : pair.log_density_2(atom));
  }
  return total;
}

}  // namespace

TEST_SUITE("families") {
  TEST_CASE("binomial log-densities normalize over the atoms") {
    for (std::int64_t n : {10, 50, 100}) {
      BinomialPointNullSpec spec;
      spec.n = n;
      const ModelPair pair = make_binomial_pair(spec);
      REQUIRE(pair.atoms.size() == static_cast<std::size_t>(n + 1));
      CHECK(atom_mass(pair, 1) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(atom_mass(pair, 2) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("binomial log Bayes factor at n=10, y=5 matches the closed form") {
    BinomialPointNullSpec spec;
    spec.n = 10;
    const ModelPair pair = make_binomial_pair(spec);
    // log(2^10 / (11 * C(10,5))) = log(1024/2772)
    CHECK(log_bayes_factor(pair, 5.0) ==
          doctest::Approx(-0.9958525547103407).epsilon(1e-12));
    CHECK(log_bayes_factor(pair, 5.0) ==
          doctest::Approx(std::log(1024.0 / 2772.0)).epsilon(1e-13));
  }

  TEST_CASE("binomial mismatch mode leaves the evaluators bit-identical") {
    BinomialPointNullSpec base;
    base.n = 50;
    BinomialPointNullSpec mismatched = base;
    mismatched.simulator_alpha = 1.2;
    mismatched.simulator_beta = 1.2;
    const ModelPair p0 = make_binomial_pair(base);
    const ModelPair p1 = make_binomial_pair(mismatched);
    for (double atom : p0.atoms) {
      CHECK(p0.log_density_1(atom) == p1.log_density_1(atom));
      CHECK(p0.log_density_2(atom) == p1.log_density_2(atom));
    }
  }

  TEST_CASE("binomial samplers land on atoms and respect theta0") {
    BinomialPointNullSpec spec;
    spec.n = 10;
    const ModelPair pair = make_binomial_pair(spec);
    RngStream stream(derive_seed(42, 0));
    double total = 0.0;
    const int m = 4000;
    for (int i = 0; i < m; ++i) {
      const double y = pair.sampler_2(stream);
      CHECK(y == std::floor(y));
      CHECK(y >= 0.0);
      CHECK(y <= 10.0);
      total += y;
    }
    // Binomial(10, 1/2) mean 5, sd ~1.58; 4 sigma band for the sample mean.
    CHECK(std::abs(total / m - 5.0) < 4.0 * 1.5811 / std::sqrt(m));
  }

  TEST_CASE("beta-unit closed forms") {
    for (double a : {0.5, 3.0}) {
      BetaUnitSpec spec;
      spec.a = a;
      const ModelPair pair = make_beta_unit_pair(spec);
      REQUIRE(pair.analytic_order_moment);
      CHECK(pair.analytic_order_moment(0.5) ==
            doctest::Approx(2.0 * std::sqrt(a) / (a + 1.0)).epsilon(1e-14));
      CHECK(pair.log_density_2(0.25) == 0.0);
      CHECK(pair.log_density_1(0.25) ==
            doctest::Approx(std::log(a) + (a - 1.0) * std::log(0.25))
                .epsilon(1e-14));
      RngStream stream(7);
      for (int i = 0; i < 100; ++i) {
        const double x = pair.sampler_1(stream);
        CHECK(x > 0.0);
        CHECK(x < 1.0);
      }
    }
    BetaUnitSpec half;
    half.a = 0.5;
    CHECK(make_beta_unit_pair(half).analytic_order_moment(0.5) ==
          doctest::Approx(0.9428090415820635).epsilon(1e-14));
  }

  TEST_CASE("counterexample family: finite below the divergence order") {
    PowerCounterexampleSpec spec;
    spec.t_star = 1.0;
    spec.branch = PowerBranch::kAboveHalf;  // gamma = 1/2
    const ModelPair pair = make_counterexample_pair(spec);
    REQUIRE(pair.analytic_order_moment);
    CHECK(pair.analytic_order_moment(1.0) == doctest::Approx(1.0));
    CHECK(pair.analytic_order_moment(0.5) ==
          doctest::Approx(0.9428090415820635).epsilon(1e-14));
    CHECK(std::isinf(pair.analytic_order_moment(2.0)));
    CHECK(pair.analytic_order_moment(2.0) > 0.0);
    CHECK(std::isfinite(pair.analytic_order_moment(1.9)));
  }

  TEST_CASE("counterexample below-half branch") {
    PowerCounterexampleSpec spec;
    spec.t_star = 0.25;  // gamma = 1/(1-0.5) = 2
    spec.branch = PowerBranch::kBelowHalf;
    const ModelPair pair = make_counterexample_pair(spec);
    REQUIRE(pair.analytic_order_moment);
    // I(s) = 3^s / (2s+1), finite iff s > -1/2.
    CHECK(pair.analytic_order_moment(1.0) == doctest::Approx(1.0));
    CHECK(pair.analytic_order_moment(0.5) ==
          doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-14));
    CHECK(std::isinf(pair.analytic_order_moment(-0.5)));
  }

  TEST_CASE("identical pair: log B is exactly zero") {
    const ModelPair pair = make_identical_pair();
    for (double x : {0.01, 0.5, 0.99}) {
      CHECK(log_bayes_factor(pair, x) == 0.0);
    }
    REQUIRE(pair.analytic_order_moment);
    for (double t : {-1.0, 0.0, 0.5, 1.0, 3.0}) {
      CHECK(pair.analytic_order_moment(t) == 1.0);
    }
  }

  TEST_CASE("discrete pair validates its inputs") {
    CHECK_THROWS_AS(make_discrete_pair({0.5, 0.4}, {0.5, 0.5}),
                    ParameterError);
    // Mutual absolute continuity: a one-sided zero is rejected.
    CHECK_THROWS_AS(make_discrete_pair({0.5, 0.5, 0.0}, {0.25, 0.25, 0.5}),
                    AbsoluteContinuityError);
    const ModelPair pair = make_discrete_pair({0.2, 0.8}, {0.6, 0.4});
    CHECK(log_bayes_factor(pair, 0.0) ==
          doctest::Approx(std::log(0.2 / 0.6)).epsilon(1e-14));
    CHECK(log_bayes_factor(pair, 1.0) ==
          doctest::Approx(std::log(0.8 / 0.4)).epsilon(1e-14));
  }

  TEST_CASE("discrete pair accepts shared structural zeros") {
    // A zero atom on both sides stays out of the support product.
    const ModelPair pair =
        make_discrete_pair({0.5, 0.0, 0.5}, {0.25, 0.0, 0.75});
    CHECK(pair.atoms.size() == 3);
    CHECK_THROWS_AS(log_bayes_factor(pair, 1.0), AbsoluteContinuityError);
  }

  TEST_CASE("support errors outside the declared support") {
    BinomialPointNullSpec spec;
    spec.n = 10;
    const ModelPair binom = make_binomial_pair(spec);
    CHECK_THROWS_AS(log_bayes_factor(binom, -1.0), SupportError);
    CHECK_THROWS_AS(log_bayes_factor(binom, 5.5), SupportError);
    BetaUnitSpec bspec;
    bspec.a = 3.0;
    const ModelPair beta = make_beta_unit_pair(bspec);
    CHECK_THROWS_AS(log_bayes_factor(beta, 0.0), SupportError);
    CHECK_THROWS_AS(log_bayes_factor(beta, 1.0), SupportError);
  }

  TEST_CASE("swap_labels negates log B bit-exactly and mirrors the moments") {
    BinomialPointNullSpec spec;
    spec.n = 10;
    const ModelPair pair = make_binomial_pair(spec);
    const ModelPair swapped = swap_labels(pair);
    CHECK(swapped.label_1 == pair.label_2);
    CHECK(swapped.label_2 == pair.label_1);
    for (double atom : pair.atoms) {
      CHECK(log_bayes_factor(swapped, atom) == -log_bayes_factor(pair, atom));
    }
    BetaUnitSpec bspec;
    bspec.a = 3.0;
    const ModelPair beta = make_beta_unit_pair(bspec);
    const ModelPair beta_swapped = swap_labels(beta);
    REQUIRE(beta_swapped.analytic_order_moment);
    for (double t : {0.0, 0.25, 0.5, 0.8, 1.0}) {
      CHECK(beta_swapped.analytic_order_moment(t) ==
            doctest::Approx(beta.analytic_order_moment(1.0 - t))
                .epsilon(1e-14));
    }
  }

  TEST_CASE("parameter validation") {
    BinomialPointNullSpec bad_n;
    bad_n.n = 0;
    CHECK_THROWS_AS(make_binomial_pair(bad_n), ParameterError);
    BinomialPointNullSpec bad_theta;
    bad_theta.theta0 = 1.0;
    CHECK_THROWS_AS(make_binomial_pair(bad_theta), ParameterError);
    BinomialPointNullSpec half_sim;
    half_sim.simulator_alpha = 1.2;  // beta left unset
    CHECK_THROWS_AS(make_binomial_pair(half_sim), ParameterError);
    BetaUnitSpec bad_a;
    bad_a.a = 0.0;
    CHECK_THROWS_AS(make_beta_unit_pair(bad_a), ParameterError);
    PowerCounterexampleSpec bad_branch;
    bad_branch.t_star = 0.25;
    bad_branch.branch = PowerBranch::kAboveHalf;  // needs t_star > 1/2
    CHECK_THROWS_AS(make_counterexample_pair(bad_branch), ParameterError);
  }

  TEST_CASE("log_choose and log_beta helpers") {
    CHECK(log_choose(10, 5) == doctest::Approx(std::log(252.0)).epsilon(1e-14));
    CHECK(log_choose(10, 0) == doctest::Approx(0.0));
    CHECK(log_beta(1.0, 1.0) == doctest::Approx(0.0));
    CHECK(log_beta(2.0, 3.0) ==
          doctest::Approx(std::log(1.0 / 12.0)).epsilon(1e-13));
  }
}
