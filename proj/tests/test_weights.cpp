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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "halford/errors.hpp"
#include "halford/families.hpp"
#include "halford/numeric.hpp"
#include "halford/rng.hpp"
#include "halford/weights.hpp"

using namespace halford;

namespace {

ModelPair beta_unit(double a) {
  BetaUnitSpec spec;
  spec.a = a;
  return make_beta_unit_pair(spec);
}

bool diagnostics_identical(const WeightDiagnostics& a,
                           const WeightDiagnostics& b) {
  if (a.n != b.n || a.kappa_n != b.kappa_n) return false;
  if (a.lorenz.size() != b.lorenz.size()) return false;
  for (std::size_t i = 0; i < a.lorenz.size(); ++i) {
    if (a.lorenz[i].p != b.lorenz[i].p || a.lorenz[i].c != b.lorenz[i].c) {
      return false;
    }
  }
  if (a.top_share != b.top_share) return false;
  if (a.cv_half_sq.has_value() != b.cv_half_sq.has_value()) return false;
  if (a.cv_half_sq && *a.cv_half_sq != *b.cv_half_sq) return false;
  return true;
}

}  // namespace

TEST_SUITE("weights") {
  TEST_CASE("permutation of the log weights is bit-invisible") {
    WeightVector wv;
    wv.transform_exponent = 0.5;
    RngStream stream(31);
    for (int i = 0; i < 500; ++i) {
      wv.log_weights.push_back(2.0 * stream.uniform() - 1.0);
    }
    WeightVector shuffled = wv;
    std::mt19937 gen(17);
    std::shuffle(shuffled.log_weights.begin(), shuffled.log_weights.end(),
                 gen);
    CHECK(diagnostics_identical(normalize_and_diagnose(wv),
                                normalize_and_diagnose(shuffled)));
  }

  TEST_CASE("dyadic shifts of the log weights are bit-invisible") {
    // Dyadic inputs keep the shifted values exactly representable, which is
    // the contract under which shift invariance is bitwise.
    WeightVector wv;
    wv.transform_exponent = 0.5;
    for (int i = 0; i < 400; ++i) {
      wv.log_weights.push_back(static_cast<double>(i % 37) * 0.125 - 2.0);
    }
    for (double shift : {8.0, -41.5, 1024.0}) {
      WeightVector moved = wv;
      for (double& lw : moved.log_weights) lw += shift;
      CHECK(diagnostics_identical(normalize_and_diagnose(wv),
                                  normalize_and_diagnose(moved)));
    }
  }

  TEST_CASE("kappa ranges and edge shapes") {
    WeightVector equal;
    equal.log_weights.assign(64, -3.25);
    const WeightDiagnostics eq = normalize_and_diagnose(equal);
    CHECK(eq.kappa_n == 1.0);
    CHECK(eq.lorenz.back().c == 1.0);

    WeightVector spike;
    spike.log_weights.assign(100, -700.0);
    spike.log_weights[50] = 0.0;  // one weight carries everything
    const WeightDiagnostics sp = normalize_and_diagnose(spike);
    CHECK(sp.kappa_n == doctest::Approx(0.01).epsilon(1e-10));
    CHECK(sp.top_share.front().second == doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("Lorenz curve is monotone and ends at one") {
    const WeightVector wv =
        build_weight_vector(beta_unit(3.0), 0.5,
                            WeightOrigin::kProposalSide, 2000, 5);
    const WeightDiagnostics diag = normalize_and_diagnose(wv);
    REQUIRE(diag.lorenz.size() == default_lorenz_grid().size());
    for (std::size_t i = 1; i < diag.lorenz.size(); ++i) {
      CHECK(diag.lorenz[i].p > diag.lorenz[i - 1].p);
      CHECK(diag.lorenz[i].c >= diag.lorenz[i - 1].c);
    }
    CHECK(diag.lorenz.back().p == 1.0);
    CHECK(diag.lorenz.back().c == 1.0);
    CHECK(diag.kappa_n > 0.0);
    CHECK(diag.kappa_n <= 1.0);
  }

  TEST_CASE("cv_half_sq rides along only at the half order") {
    const WeightVector half =
        build_weight_vector(beta_unit(3.0), 0.5,
                            WeightOrigin::kProposalSide, 500, 3);
    CHECK(half.transform_exponent == 0.5);
    const WeightDiagnostics hd = normalize_and_diagnose(half);
    REQUIRE(hd.cv_half_sq.has_value());
    CHECK(*hd.cv_half_sq ==
          doctest::Approx(1.0 / hd.kappa_n - 1.0).epsilon(1e-12));

    const WeightVector full =
        build_weight_vector(beta_unit(3.0), 1.0,
                            WeightOrigin::kProposalSide, 500, 3);
    CHECK(full.transform_exponent == 1.0);
    CHECK_FALSE(normalize_and_diagnose(full).cv_half_sq.has_value());

    // The target side applies coefficient t-1 internally but still records
    // the order t, so its half-order diagnostics carry cv_half_sq too.
    const WeightVector target =
        build_weight_vector(beta_unit(3.0), 0.5, WeightOrigin::kTargetSide,
                            500, 3);
    CHECK(target.transform_exponent == 0.5);
    CHECK(target.origin == WeightOrigin::kTargetSide);
    CHECK(normalize_and_diagnose(target).cv_half_sq.has_value());
  }

  TEST_CASE("overlap read off half-order weights") {
    WeightVector flat;
    flat.transform_exponent = 0.5;
    flat.log_weights.assign(1000, 0.0);
    const HalfOrderSummary unit = half_order_overlap_from_weights(flat);
    CHECK(unit.rho_hat == 1.0);
    CHECK(unit.cv_half_sq == 0.0);
    CHECK(unit.se == 0.0);

    const WeightVector wv =
        build_weight_vector(beta_unit(3.0), 0.5,
                            WeightOrigin::kProposalSide, 20000, 11);
    const HalfOrderSummary ho = half_order_overlap_from_weights(wv);
    CHECK(ho.se > 0.0);
    CHECK(std::abs(ho.rho_hat - 0.8660254037844386) < 4.0 * ho.se);

    WeightVector wrong = wv;
    wrong.transform_exponent = 1.0;
    CHECK_THROWS_AS(half_order_overlap_from_weights(wrong), ContractError);
  }

  TEST_CASE("fragility regression: stressed order concentrates the weight") {
    const ModelPair pair = beta_unit(0.5);
    const int reps = 200;
    std::vector<double> s01_full, s01_half, kappa_half;
    for (int r = 0; r < reps; ++r) {
      const std::uint64_t seed = derive_seed(2024, r);
      const WeightDiagnostics full =
          fragility_demo(pair, 1.0, WeightOrigin::kProposalSide, 2000, seed);
      const WeightDiagnostics half =
          fragility_demo(pair, 0.5, WeightOrigin::kProposalSide, 2000, seed);
      s01_full.push_back(full.top_share.front().second);
      s01_half.push_back(half.top_share.front().second);
      kappa_half.push_back(half.kappa_n);
    }
    const double med_full = quantile_type7(s01_full, 0.5);
    const double med_half = quantile_type7(s01_half, 0.5);
    CHECK(med_full > 0.07);
    CHECK(med_half < 0.04);
    CHECK(med_full > 2.0 * med_half);
    // Half-order kappa estimates rho^2 = 8/9.
    CHECK(std::abs(quantile_type7(kappa_half, 0.5) - 8.0 / 9.0) < 0.05);
  }

  TEST_CASE("input validation") {
    WeightVector empty;
    CHECK_THROWS_AS(normalize_and_diagnose(empty), ParameterError);
    WeightVector poisoned;
    poisoned.log_weights = {0.0, std::numeric_limits<double>::infinity()};
    CHECK_THROWS_AS(normalize_and_diagnose(poisoned), ContractError);
    WeightVector ok;
    ok.log_weights = {0.0, 1.0};
    CHECK_THROWS_AS(normalize_and_diagnose(ok, {0.5, 1.5}), ParameterError);
    CHECK_THROWS_AS(
        build_weight_vector(beta_unit(1.0), 0.5,
                            WeightOrigin::kProposalSide, 0, 1),
        ParameterError);
  }

  TEST_CASE("default grid shape") {
    const std::vector<double> grid = default_lorenz_grid();
    REQUIRE(grid.size() == 50);
    CHECK(grid.front() == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(grid.back() == 1.0);
    CHECK(std::is_sorted(grid.begin(), grid.end()));
  }

  TEST_CASE("origin strings") {
    CHECK(origin_from_string("proposal-side") == WeightOrigin::kProposalSide);
    CHECK(origin_from_string("target-side") == WeightOrigin::kTargetSide);
    CHECK(std::string(to_string(WeightOrigin::kTargetSide)) == "target-side");
    CHECK_THROWS_AS(origin_from_string("left"), ParameterError);
  }
}
