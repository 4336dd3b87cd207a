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

#include "halford/overlap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "halford/errors.hpp"
#include "halford/numeric.hpp"
#include "halford/rng.hpp"

namespace halford {

namespace {

constexpr std::int64_t kQuadEvalBudget = std::int64_t{1} << 20;
constexpr int kQuadDepthCap = 48;
constexpr double kQuadTol = 1e-10;

double order_exponent(const ModelPair& pair, double t, double x) {
  const double lp1 = pair.log_density_1(x);
  const double lp2 = pair.log_density_2(x);
  if (std::isnan(lp1) || std::isnan(lp2)) {
    throw Error("order_exponent: log density returned NaN at x=" +
                std::to_string(x));
  }
  return scaled_log(t, lp1) + scaled_log(1.0 - t, lp2);
}

double hellinger_exact_sum(const ModelPair& pair, double t) {
  if (pair.support_kind != SupportKind::kFiniteDiscrete || pair.atoms.empty()) {
    throw MethodError("exact-sum requires a finite-discrete pair with atoms");
  }
  LogSumExp lse;
  for (double atom : pair.atoms) {
    const double lp1 = pair.log_density_1(atom);
    const double lp2 = pair.log_density_2(atom);
    if (std::isinf(lp1) && lp1 < 0 && std::isinf(lp2) && lp2 < 0) {
      continue;  // null atom: contributes nothing at any order
    }
    const double term = scaled_log(t, lp1) + scaled_log(1.0 - t, lp2);
    if (std::isnan(term)) {
      throw Error("exact-sum: indeterminate term at atom " +
                  std::to_string(atom));
    }
    lse.add(term);
  }
  const double ls = lse.log_sum();
  if (ls > kTailLog) return kInf;
  return std::exp(ls);
}

struct QuadCtx {
  const std::function<double(double)>* f = nullptr;
  std::int64_t evals = 0;
  bool saw_inf = false;
};

double quad_eval(QuadCtx& ctx, double x) {
  ++ctx.evals;
  const double v = (*ctx.f)(x);
  if (std::isnan(v)) {
    throw Error("quadrature: integrand returned NaN at x=" +
                std::to_string(x));
  }
  if (std::isinf(v)) ctx.saw_inf = true;
  return v;
}

// Adaptive midpoint rule on [lo, lo+h]. Each node reuses three previously
// evaluated interior points (midpoint and the two quarter points) and buys
// four new eighth points per refinement test. Acceptance compares the two
// Richardson-extrapolated levels r12 and r24, which scale as h^5, and the
// accepted value gets one further extrapolation. Children inherit tol/2 so
// the absolute error budget is preserved under splitting.
double quad_node(QuadCtx& ctx, double lo, double h, double fm, double fl,
                 double fr, double tol, int depth) {
  const double c1 = h * fm;
  const double c2 = 0.5 * h * (fl + fr);
  if (ctx.evals + 4 > kQuadEvalBudget) {
    return c2 + (c2 - c1) / 3.0;  // budget floor: best available level
  }
  const double q1 = quad_eval(ctx, lo + h / 8.0);
  const double q2 = quad_eval(ctx, lo + 3.0 * h / 8.0);
  const double q3 = quad_eval(ctx, lo + 5.0 * h / 8.0);
  const double q4 = quad_eval(ctx, lo + 7.0 * h / 8.0);
  if (ctx.saw_inf) return kInf;
  const double c4 = 0.25 * h * (q1 + q2 + q3 + q4);
  const double r12 = c2 + (c2 - c1) / 3.0;
  const double r24 = c4 + (c4 - c2) / 3.0;
  if (std::abs(r24 - r12) <= tol || depth >= kQuadDepthCap) {
    return r24 + (r24 - r12) / 15.0;
  }
  const double hh = 0.5 * h;
  const double left =
      quad_node(ctx, lo, hh, fl, q1, q2, 0.5 * tol, depth + 1);
  if (ctx.saw_inf) return kInf;
  const double right =
      quad_node(ctx, lo + hh, hh, fr, q3, q4, 0.5 * tol, depth + 1);
  if (ctx.saw_inf) return kInf;
  return left + right;
}

double integrate_unit_interval(const std::function<double(double)>& f) {
  QuadCtx ctx;
  ctx.f = &f;
  const double fm = quad_eval(ctx, 0.5);
  const double fl = quad_eval(ctx, 0.25);
  const double fr = quad_eval(ctx, 0.75);
  if (ctx.saw_inf) return kInf;
  const double v = quad_node(ctx, 0.0, 1.0, fm, fl, fr, kQuadTol, 0);
  if (ctx.saw_inf || v > 1e300) return kInf;
  return v;
}

double hellinger_quadrature(const ModelPair& pair, double t) {
  if (pair.support_kind != SupportKind::kContinuousUnitInterval) {
    throw MethodError("quadrature requires a continuous unit-interval pair");
  }
  const auto f = [&pair, t](double x) {
    const double e = order_exponent(pair, t, x);
    if (e > kTailLog) return kInf;
    return std::exp(e);
  };
  return integrate_unit_interval(f);
}

double hellinger_analytic(const ModelPair& pair, double t) {
  if (!pair.analytic_order_moment) {
    throw MethodError("pair has no analytic order-moment closed form");
  }
  const double v = pair.analytic_order_moment(t);
  ensure_not_nan(v, "analytic order moment");
  return v;
}

void require_mc_surface(const ModelPair& pair) {
  if (!pair.sampler_2 || !pair.log_density_1 || !pair.log_density_2) {
    throw ContractError(
        "Monte Carlo requires sampler_2 and both log densities");
  }
}

}  // namespace

McEstimate hellinger_integral_mc(const ModelPair& pair, double t,
                                 std::int64_t m, std::uint64_t seed) {
  if (m < 2) throw ParameterError("Monte Carlo draw count must be >= 2");
  ensure_not_nan(t, "order t");
  require_mc_surface(pair);

  RngStream rng(seed);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(m));
  for (std::int64_t i = 0; i < m; ++i) {
    const double x = pair.sampler_2(rng);
    const double lb = log_bayes_factor(pair, x);
    terms.push_back(scaled_log(t, lb));
  }
  const MomentStats st = moment_stats_from_log_terms(terms);

  McEstimate out;
  out.m = m;
  out.seed = seed;
  out.estimate = st.mean;
  out.log_estimate = st.log_mean;
  out.se = std::sqrt(st.s_sq / static_cast<double>(m));
  out.tail_events = st.tail_events;
  out.max_term_log = st.max_term;
  out.min_term_log = st.min_term;
  out.overflow_contaminated = std::isinf(out.estimate);
  ensure_not_nan(out.se, "Monte Carlo standard error");
  return out;
}

DivergenceProbe mc_divergence_probe(const ModelPair& pair, double t,
                                    std::int64_t m_first, std::int64_t m_last,
                                    std::uint64_t seed) {
  if (m_first < 1 || m_last < m_first) {
    throw ParameterError("probe checkpoints must satisfy 1 <= first <= last");
  }
  ensure_not_nan(t, "order t");
  require_mc_surface(pair);

  RngStream rng(seed);
  LogSumExp acc;
  DivergenceProbe probe;
  probe.m_first = m_first;
  probe.m_last = m_last;
  double draw_max = -kInf;
  double mean_max = -kInf;
  for (std::int64_t i = 1; i <= m_last; ++i) {
    const double x = pair.sampler_2(rng);
    const double lb = log_bayes_factor(pair, x);
    const double term = scaled_log(t, lb);
    draw_max = std::max(draw_max, term);
    acc.add(term);
    const double log_mean = acc.log_sum() - std::log(static_cast<double>(i));
    mean_max = std::max(mean_max, log_mean);
    if (i == m_first) {
      probe.draw_max_log_first = draw_max;
      probe.mean_max_log_first = mean_max;
    }
  }
  probe.draw_max_log_last = draw_max;
  probe.mean_max_log_last = mean_max;
  return probe;
}

double hellinger_integral(const ModelPair& pair, double t,
                          const Method& method) {
  ensure_not_nan(t, "order t");
  switch (method.kind) {
    case OverlapMethod::kAnalytic:
      return hellinger_analytic(pair, t);
    case OverlapMethod::kExactSum:
      return hellinger_exact_sum(pair, t);
    case OverlapMethod::kQuadrature:
      return hellinger_quadrature(pair, t);
    case OverlapMethod::kMonteCarlo:
      return hellinger_integral_mc(pair, t, method.budget, method.seed)
          .estimate;
  }
  throw ContractError("unknown overlap method");
}

double overlap_rho(const ModelPair& pair, const Method& method) {
  const double rho = hellinger_integral(pair, 0.5, method);
  if (!(rho > 0.0)) {
    throw DomainError("half-order overlap must be positive; got " +
                      std::to_string(rho));
  }
  return rho;
}

VarianceIdentity variance_identity(const ModelPair& pair, double t,
                                   const Method& method) {
  const double it = hellinger_integral(pair, t, method);
  if (std::isinf(it)) {
    throw DomainError("variance identity undefined: order moment diverges");
  }
  const double i_lo = hellinger_integral(pair, 2.0 * t - 1.0, method);
  const double i_hi = hellinger_integral(pair, 2.0 * t, method);
  VarianceIdentity v;
  v.t = t;
  v.var_side1 = i_lo - it * it;
  v.var_side2 = i_hi - it * it;
  // A true variance is nonnegative; shave numerical dust, keep real signal.
  if (v.var_side1 < 0.0 && v.var_side1 > -1e-9) v.var_side1 = 0.0;
  if (v.var_side2 < 0.0 && v.var_side2 > -1e-9) v.var_side2 = 0.0;
  v.worst_side = std::max(v.var_side1, v.var_side2);
  return v;
}

double renyi_divergence(const ModelPair& pair, double t,
                        const Method& method) {
  if (!(t > 0.0)) throw ParameterError("Renyi order must be positive");
  if (t == 1.0) {
    throw MethodError("order 1 is the KL limit; use kl_limit instead");
  }
  const double it = hellinger_integral(pair, t, method);
  if (std::isinf(it)) return kInf;
  return std::log(it) / (t - 1.0);
}

double kl_limit(const ModelPair& pair, const Method& method, double h) {
  if (!(h > 0.0) || h >= 0.5) {
    throw ParameterError("central-difference step must lie in (0, 0.5)");
  }
  const double up = hellinger_integral(pair, 1.0 + h, method);
  const double dn = hellinger_integral(pair, 1.0 - h, method);
  if (std::isinf(up) || std::isinf(dn) || !(up > 0.0) || !(dn > 0.0)) {
    throw DomainError("KL limit needs finite positive moments at 1 +/- h");
  }
  return (std::log(up) - std::log(dn)) / (2.0 * h);
}

OverlapProfile make_overlap_profile(const ModelPair& pair,
                                    const std::vector<double>& grid,
                                    const Method& method) {
  if (grid.empty()) throw ParameterError("profile grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw ParameterError("profile grid must be strictly increasing");
    }
  }
  OverlapProfile profile;
  profile.pair_label = pair.label_1 + " vs " + pair.label_2;
  profile.method = method;
  profile.grid = grid;
  profile.values.reserve(grid.size());
  // Monte Carlo methods reseed per call, so every grid point sees the same
  // draws (common random numbers): the profile stays smooth in t.
  for (double t : grid) {
    profile.values.push_back(hellinger_integral(pair, t, method));
  }
  profile.rho = overlap_rho(pair, method);
  return profile;
}

ConvexityReport convexity_certificate(const OverlapProfile& profile,
                                      std::optional<double> tolerance) {
  if (profile.grid.size() != profile.values.size()) {
    throw ContractError("profile grid/value size mismatch");
  }
  double tol;
  if (tolerance.has_value()) {
    tol = *tolerance;
  } else {
    switch (profile.method.kind) {
      case OverlapMethod::kQuadrature:
        tol = 1e-8;
        break;
      case OverlapMethod::kMonteCarlo:
        tol = 1e-2;
        break;
      default:
        tol = 1e-10;
        break;
    }
  }

  ConvexityReport report;
  report.tolerance = tol;
  report.max_violation = -kInf;
  const std::size_t n = profile.grid.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double va = profile.values[i - 1];
    const double vm = profile.values[i];
    const double vb = profile.values[i + 1];
    if (std::isinf(va) || std::isinf(vb)) {
      continue;  // an infinite endpoint makes the chord vacuous
    }
    ++report.triples_checked;
    if (std::isinf(vm)) {
      report.max_violation = kInf;
      continue;
    }
    const double ta = profile.grid[i - 1];
    const double tm = profile.grid[i];
    const double tb = profile.grid[i + 1];
    const double pa = std::log(va);
    const double pm = std::log(vm);
    const double pb = std::log(vb);
    const double chord = pa + (pb - pa) * (tm - ta) / (tb - ta);
    report.max_violation = std::max(report.max_violation, pm - chord);
  }
  if (report.triples_checked < 1) {
    throw GridError("convexity check needs at least one finite triple");
  }
  report.pass = report.max_violation <= tol;
  return report;
}

}  // namespace halford
