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

#include "halford/families.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "halford/errors.hpp"
#include "halford/numeric.hpp"

namespace halford {

namespace {

/// Shared immutable table for a discrete pair: log densities plus a sampler
/// CDF (which may come from different shapes than the evaluator in mismatch
/// mode).
struct DiscreteTables {
  std::vector<double> atoms;
  std::vector<double> log_p1;
  std::vector<double> log_p2;
  std::vector<double> sampler_cdf_1;
  std::vector<double> sampler_cdf_2;
};

std::vector<double> cdf_from_log_probs(const std::vector<double>& log_p) {
  std::vector<double> cdf(log_p.size());
  KahanSum acc;
  for (std::size_t i = 0; i < log_p.size(); ++i) {
    acc.add(std::exp(log_p[i]));
    cdf[i] = acc.value();
  }
  // Pin the last step to 1 so a uniform draw can never fall past the end.
  cdf.back() = 1.0;
  return cdf;
}

double sample_from_cdf(const std::vector<double>& atoms,
                       const std::vector<double>& cdf, RngStream& stream) {
  const double u = stream.uniform();
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  const auto idx = static_cast<std::size_t>(it - cdf.begin());
  return atoms[idx];
}

std::size_t atom_index(const DiscreteTables& t, double x) {
  const auto it = std::lower_bound(t.atoms.begin(), t.atoms.end(), x);
  if (it == t.atoms.end() || *it != x) {
    throw SupportError("observation " + std::to_string(x) +
                       " is not an atom of the discrete support");
  }
  return static_cast<std::size_t>(it - t.atoms.begin());
}

ModelPair pair_from_tables(std::shared_ptr<const DiscreteTables> t,
                           std::string label_1, std::string label_2) {
  ModelPair pair;
  pair.label_1 = std::move(label_1);
  pair.label_2 = std::move(label_2);
  pair.support_kind = SupportKind::kFiniteDiscrete;
  pair.atoms = t->atoms;
  pair.sampler_1 = [t](RngStream& s) {
    return sample_from_cdf(t->atoms, t->sampler_cdf_1, s);
  };
  pair.sampler_2 = [t](RngStream& s) {
    return sample_from_cdf(t->atoms, t->sampler_cdf_2, s);
  };
  pair.log_density_1 = [t](double x) { return t->log_p1[atom_index(*t, x)]; };
  pair.log_density_2 = [t](double x) { return t->log_p2[atom_index(*t, x)]; };
  return pair;
}

void check_unit_interval(double x) {
  if (!(x > 0.0 && x < 1.0)) {
    throw SupportError("observation " + std::to_string(x) +
                       " is outside the open unit interval");
  }
}

std::vector<double> binomial_log_pmf(std::int64_t n, double theta) {
  std::vector<double> lp(static_cast<std::size_t>(n) + 1);
  const double lt = std::log(theta);
  const double l1t = std::log1p(-theta);
  for (std::int64_t y = 0; y <= n; ++y) {
    lp[static_cast<std::size_t>(y)] = log_choose(n, y) +
                                      static_cast<double>(y) * lt +
                                      static_cast<double>(n - y) * l1t;
  }
  return lp;
}

std::vector<double> beta_binomial_log_pmf(std::int64_t n, double a, double b) {
  std::vector<double> lp(static_cast<std::size_t>(n) + 1);
  const double lb0 = log_beta(a, b);
  for (std::int64_t y = 0; y <= n; ++y) {
    lp[static_cast<std::size_t>(y)] =
        log_choose(n, y) +
        log_beta(static_cast<double>(y) + a, static_cast<double>(n - y) + b) -
        lb0;
  }
  return lp;
}

}  // namespace

double log_choose(std::int64_t n, std::int64_t k) {
  if (n < 0 || k < 0 || k > n) throw ParameterError("log_choose: bad (n,k)");
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

double log_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw ParameterError("log_beta: shapes must be positive");
  }
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double log_bayes_factor(const ModelPair& pair, double x) {
  const double l1 = pair.log_density_1(x);
  const double l2 = pair.log_density_2(x);
  ensure_not_nan(l1, "log_density_1");
  ensure_not_nan(l2, "log_density_2");
  if (std::isinf(l1) || std::isinf(l2)) {
    throw AbsoluteContinuityError(
        "log Bayes factor undefined at x = " + std::to_string(x) +
        ": log densities are " + std::to_string(l1) + " and " +
        std::to_string(l2));
  }
  return l1 - l2;
}

ModelPair swap_labels(const ModelPair& pair) {
  ModelPair out = pair;
  std::swap(out.label_1, out.label_2);
  std::swap(out.sampler_1, out.sampler_2);
  std::swap(out.log_density_1, out.log_density_2);
  if (pair.analytic_order_moment) {
    auto inner = pair.analytic_order_moment;
    out.analytic_order_moment = [inner](double s) { return inner(1.0 - s); };
  }
  return out;
}

ModelPair make_binomial_pair(const BinomialPointNullSpec& spec) {
  if (spec.n < 1) throw ParameterError("binomial: n must be >= 1");
  if (!(spec.alpha > 0.0) || !(spec.beta > 0.0)) {
    throw ParameterError("binomial: prior shapes must be positive");
  }
  if (!(spec.theta0 > 0.0 && spec.theta0 < 1.0)) {
    throw ParameterError("binomial: theta0 must lie in (0,1)");
  }
  if (spec.simulator_alpha.has_value() != spec.simulator_beta.has_value()) {
    throw ParameterError("binomial: simulator shapes must be given together");
  }
  if (spec.simulator_alpha &&
      (!(*spec.simulator_alpha > 0.0) || !(*spec.simulator_beta > 0.0))) {
    throw ParameterError("binomial: simulator shapes must be positive");
  }

  auto tables = std::make_shared<DiscreteTables>();
  tables->atoms.resize(static_cast<std::size_t>(spec.n) + 1);
  for (std::int64_t y = 0; y <= spec.n; ++y) {
    tables->atoms[static_cast<std::size_t>(y)] = static_cast<double>(y);
  }
  tables->log_p1 = beta_binomial_log_pmf(spec.n, spec.alpha, spec.beta);
  tables->log_p2 = binomial_log_pmf(spec.n, spec.theta0);
  // The simulator marginal equals the evaluator marginal unless mismatch
  // shapes are set; the evaluator tables above never depend on them.
  tables->sampler_cdf_1 = cdf_from_log_probs(
      spec.simulator_alpha
          ? beta_binomial_log_pmf(spec.n, *spec.simulator_alpha,
                                  *spec.simulator_beta)
          : tables->log_p1);
  tables->sampler_cdf_2 = cdf_from_log_probs(tables->log_p2);

  return pair_from_tables(
      std::move(tables),
      "binomial-beta(n=" + std::to_string(spec.n) + ")",
      "binomial-point(n=" + std::to_string(spec.n) + ")");
}

ModelPair make_beta_unit_pair(const BetaUnitSpec& spec) {
  const double a = spec.a;
  if (!(a > 0.0)) throw ParameterError("beta-unit: a must be positive");

  ModelPair pair;
  pair.label_1 = "beta(" + std::to_string(a) + ",1)";
  pair.label_2 = "uniform";
  pair.support_kind = SupportKind::kContinuousUnitInterval;
  const double log_a = std::log(a);
  pair.sampler_1 = [a](RngStream& s) {
    return std::pow(s.uniform(), 1.0 / a);
  };
  pair.sampler_2 = [](RngStream& s) { return s.uniform(); };
  pair.log_density_1 = [a, log_a](double x) {
    check_unit_interval(x);
    return log_a + (a - 1.0) * std::log(x);
  };
  pair.log_density_2 = [](double x) {
    check_unit_interval(x);
    return 0.0;
  };
  pair.analytic_order_moment = [a](double t) {
    const double denom = t * (a - 1.0) + 1.0;
    if (denom <= 0.0) return kInf;
    return std::pow(a, t) / denom;
  };
  return pair;
}

ModelPair make_counterexample_pair(const PowerCounterexampleSpec& spec) {
  if (spec.t_star == 0.5) {
    throw ParameterError("counterexample: t_star must differ from 1/2");
  }
  double gamma;
  double coef;   // leading constant of p1
  double expo;   // exponent of x in p1
  if (spec.branch == PowerBranch::kAboveHalf) {
    if (!(spec.t_star > 0.5)) {
      throw ParameterError("counterexample: above-half needs t_star > 1/2");
    }
    gamma = 1.0 / (2.0 * spec.t_star);
    coef = 1.0 - gamma;
    expo = -gamma;
  } else {
    if (!(spec.t_star < 0.5)) {
      throw ParameterError("counterexample: below-half needs t_star < 1/2");
    }
    gamma = 1.0 / (1.0 - 2.0 * spec.t_star);
    coef = gamma + 1.0;
    expo = gamma;
  }

  ModelPair pair;
  pair.label_1 = "power(t_star=" + std::to_string(spec.t_star) + ")";
  pair.label_2 = "uniform";
  pair.support_kind = SupportKind::kContinuousUnitInterval;
  const double log_coef = std::log(coef);
  // CDF of p1 is x^(expo+1); the inverse transform is exact for both
  // branches since expo + 1 = coef.
  const double inv_cdf_power = 1.0 / (expo + 1.0);
  pair.sampler_1 = [inv_cdf_power](RngStream& s) {
    return std::pow(s.uniform(), inv_cdf_power);
  };
  pair.sampler_2 = [](RngStream& s) { return s.uniform(); };
  pair.log_density_1 = [log_coef, expo](double x) {
    check_unit_interval(x);
    return log_coef + expo * std::log(x);
  };
  pair.log_density_2 = [](double x) {
    check_unit_interval(x);
    return 0.0;
  };
  const bool above = spec.branch == PowerBranch::kAboveHalf;
  pair.analytic_order_moment = [gamma, coef, above](double s) {
    if (above) {
      if (gamma * s >= 1.0) return kInf;
      return std::pow(coef, s) / (1.0 - gamma * s);
    }
    if (gamma * s <= -1.0) return kInf;
    return std::pow(coef, s) / (gamma * s + 1.0);
  };
  return pair;
}

ModelPair make_discrete_pair(const std::vector<double>& probs_1,
                             const std::vector<double>& probs_2,
                             std::vector<double> atoms) {
  if (probs_1.empty() || probs_1.size() != probs_2.size()) {
    throw ParameterError("discrete pair: probability vectors must be "
                         "non-empty and of equal length");
  }
  if (atoms.empty()) {
    atoms.resize(probs_1.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      atoms[i] = static_cast<double>(i);
    }
  }
  if (atoms.size() != probs_1.size() ||
      !std::is_sorted(atoms.begin(), atoms.end())) {
    throw ParameterError("discrete pair: atoms must match the probability "
                         "vectors and be ascending");
  }
  KahanSum s1, s2;
  for (std::size_t i = 0; i < probs_1.size(); ++i) {
    if (probs_1[i] < 0.0 || probs_2[i] < 0.0) {
      throw ParameterError("discrete pair: negative probability");
    }
    if ((probs_1[i] == 0.0) != (probs_2[i] == 0.0)) {
      throw AbsoluteContinuityError(
          "discrete pair: atom " + std::to_string(atoms[i]) +
          " has zero mass under exactly one model");
    }
    s1.add(probs_1[i]);
    s2.add(probs_2[i]);
  }
  if (std::abs(s1.value() - 1.0) > 1e-12 ||
      std::abs(s2.value() - 1.0) > 1e-12) {
    throw ParameterError("discrete pair: probabilities must sum to 1 "
                         "within 1e-12");
  }

  auto tables = std::make_shared<DiscreteTables>();
  tables->atoms = std::move(atoms);
  tables->log_p1.resize(probs_1.size());
  tables->log_p2.resize(probs_2.size());
  for (std::size_t i = 0; i < probs_1.size(); ++i) {
    tables->log_p1[i] = std::log(probs_1[i]);
    tables->log_p2[i] = std::log(probs_2[i]);
  }
  std::vector<double> cdf1(probs_1.size()), cdf2(probs_2.size());
  KahanSum a1, a2;
  for (std::size_t i = 0; i < probs_1.size(); ++i) {
    a1.add(probs_1[i]);
    a2.add(probs_2[i]);
    cdf1[i] = a1.value();
    cdf2[i] = a2.value();
  }
  cdf1.back() = 1.0;
  cdf2.back() = 1.0;
  tables->sampler_cdf_1 = std::move(cdf1);
  tables->sampler_cdf_2 = std::move(cdf2);
  return pair_from_tables(std::move(tables), "discrete-1", "discrete-2");
}

ModelPair make_identical_pair() {
  ModelPair pair;
  pair.label_1 = "uniform";
  pair.label_2 = "uniform";
  pair.support_kind = SupportKind::kContinuousUnitInterval;
  pair.sampler_1 = [](RngStream& s) { return s.uniform(); };
  pair.sampler_2 = [](RngStream& s) { return s.uniform(); };
  pair.log_density_1 = [](double x) {
    check_unit_interval(x);
    return 0.0;
  };
  pair.log_density_2 = [](double x) {
    check_unit_interval(x);
    return 0.0;
  };
  pair.analytic_order_moment = [](double) { return 1.0; };
  return pair;
}

}  // namespace halford
