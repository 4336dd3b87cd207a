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

#include "halford/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <thread>
#include <utility>

#include "json.hpp"

#include "halford/bridge.hpp"
#include "halford/errors.hpp"
#include "halford/families.hpp"
#include "halford/goodcheck.hpp"
#include "halford/io.hpp"
#include "halford/numeric.hpp"
#include "halford/overlap.hpp"
#include "halford/rng.hpp"
#include "halford/version.hpp"

namespace halford {

namespace {

// Work-stealing by atomic index into preallocated slots: scheduling order
// varies, the slot contents (and thus every aggregate) do not.
void parallel_for(std::int64_t count, int threads,
                  const std::function<void(std::int64_t)>& body) {
  if (threads <= 1 || count <= 1) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&]() {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int k = static_cast<int>(
      std::min<std::int64_t>(threads, count));
  pool.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

double mean_of(const std::vector<double>& v) {
  bool pos = false;
  bool neg = false;
  for (double x : v) {
    if (std::isinf(x)) (x > 0 ? pos : neg) = true;
  }
  if (pos && neg) {
    throw ContractError("cell aggregation mixes opposite infinities");
  }
  if (pos) return kInf;
  if (neg) return -kInf;
  KahanSum s;
  for (double x : v) s.add(x);
  return s.value() / static_cast<double>(v.size());
}

std::optional<double> sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return std::nullopt;
  for (double x : v) {
    if (std::isinf(x)) return kInf;  // unbounded spread, honestly reported
  }
  const double m = mean_of(v);
  KahanSum s;
  for (double x : v) {
    const double d = x - m;
    s.add(d * d);
  }
  return std::sqrt(s.value() / (static_cast<double>(v.size()) - 1.0));
}

std::vector<std::int64_t> log_spaced_grid(std::int64_t lo, std::int64_t hi,
                                          std::int64_t points) {
  if (hi < 1 || points < 2) {
    throw ParameterError("fan grid needs hi >= 1 and points >= 2");
  }
  lo = std::max<std::int64_t>(1, std::min(lo, hi));
  std::vector<std::int64_t> grid;
  const double llo = std::log(static_cast<double>(lo));
  const double lhi = std::log(static_cast<double>(hi));
  for (std::int64_t k = 0; k < points; ++k) {
    const double frac =
        static_cast<double>(k) / static_cast<double>(points - 1);
    auto v = static_cast<std::int64_t>(
        std::llround(std::exp(llo + (lhi - llo) * frac)));
    v = std::max<std::int64_t>(1, std::min(v, hi));
    if (grid.empty() || v > grid.back()) grid.push_back(v);
  }
  if (grid.back() != hi) grid.push_back(hi);
  return grid;
}

std::string sanitize_name(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '-' || ch == '.' ||
                    ch == '_';
    out += ok ? ch : '_';
  }
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return std::string(buf);
}

// ---------------------------------------------------------------------------
// Check studies (sim1a / sim1b / custom)
// ---------------------------------------------------------------------------

struct ColumnSpec {
  std::string name;
  double t = 0.5;
  bool reverse = false;
  bool two_sided = false;
};

std::vector<ColumnSpec> check_columns(const std::vector<double>& exponents) {
  std::vector<ColumnSpec> cols;
  for (double t : exponents) {
    if (t == 0.5) {
      cols.push_back({"half-order", t, false, true});
      continue;
    }
    std::string base;
    if (t == 1.0) {
      base = "turing";
    } else if (t == 2.0) {
      base = "good2";
    } else {
      base = "t=" + format_double(t);
    }
    cols.push_back({base + "-forward", t, false, false});
    cols.push_back({base + "-reverse", t, true, false});
  }
  if (cols.empty()) throw ParameterError("check study needs exponents");
  return cols;
}

struct RepOutcome {
  double delta = 0.0;
  double max_term_log = 0.0;  // per-draw transform extremes, active side
  double min_term_log = 0.0;
  std::int64_t tail_events = 0;
  bool contaminated = false;
};

void run_check_study(const StudyConfig& config, StudyResult& result) {
  if (config.n_list.empty()) {
    throw ParameterError("check study needs a nonempty n list");
  }
  const std::vector<ColumnSpec> cols = check_columns(config.exponents);
  const std::int64_t reps = config.replications;

  std::int64_t cell_index = 0;
  std::vector<std::uint64_t> half_order_cell_seeds;
  for (std::int64_t n : config.n_list) {
    BinomialPointNullSpec spec;
    spec.n = n;
    spec.simulator_alpha = config.simulator_alpha;
    spec.simulator_beta = config.simulator_beta;
    const ModelPair pair = make_binomial_pair(spec);
    const ModelPair swapped = swap_labels(pair);

    for (const ColumnSpec& col : cols) {
      const std::uint64_t cell_seed =
          derive_seed(config.root_seed, static_cast<std::uint64_t>(cell_index));
      if (col.two_sided) half_order_cell_seeds.push_back(cell_seed);
      ++cell_index;

      std::vector<RepOutcome> slots(static_cast<std::size_t>(reps));
      parallel_for(reps, config.threads, [&](std::int64_t r) {
        const std::uint64_t rep_seed =
            derive_seed(cell_seed, static_cast<std::uint64_t>(r));
        try {
          CheckPlan plan;
          plan.t = col.t;
          plan.sides =
              col.two_sided ? Sides::kTwoSided : Sides::kOneSidedFromH2;
          plan.m1 = config.m;
          plan.m2 = config.m;
          plan.seed = rep_seed;
          const GoodCheckReport rep =
              run_moment_check(col.reverse ? swapped : pair, plan);
          RepOutcome& out = slots[static_cast<std::size_t>(r)];
          out.delta = rep.delta;
          out.max_term_log = col.two_sided ? 0.0 : rep.max_term_log_2;
          out.min_term_log = col.two_sided ? 0.0 : rep.min_term_log_2;
          out.tail_events = rep.tail_events_1 + rep.tail_events_2;
          out.contaminated = rep.overflow_contaminated;
        } catch (const std::exception& e) {
          throw Error("replication " + std::to_string(r) + " (seed " +
                      std::to_string(rep_seed) + "): " + e.what());
        }
      });

      CheckCell cell;
      cell.row = "n=" + std::to_string(n);
      cell.column = col.name;
      cell.replications = reps;
      std::vector<double> deltas;
      deltas.reserve(slots.size());
      double log_lo = kInf;
      double log_hi = -kInf;
      for (const RepOutcome& out : slots) {
        deltas.push_back(out.delta);
        cell.tail_events += out.tail_events;
        if (out.contaminated) ++cell.overflow_runs;
        if (!col.two_sided) {
          log_lo = std::min(log_lo, out.min_term_log);
          log_hi = std::max(log_hi, out.max_term_log);
        }
      }
      cell.mean = mean_of(deltas);
      cell.sd = sd_of(deltas);
      if (!col.two_sided && log_hi > log_lo) {
        cell.span_log10 = (log_hi - log_lo) / std::log(10.0);
      }
      result.cells.push_back(std::move(cell));
    }
  }

  // Fan charts trace the half-order panel per n on the same streams the
  // table cells consumed, so the last grid point matches the cell's delta.
  if (half_order_cell_seeds.size() != config.n_list.size()) return;
  const std::vector<std::int64_t> grid =
      log_spaced_grid(10, config.m, config.fan_points);
  for (std::size_t ni = 0; ni < config.n_list.size(); ++ni) {
    BinomialPointNullSpec spec;
    spec.n = config.n_list[ni];
    spec.simulator_alpha = config.simulator_alpha;
    spec.simulator_beta = config.simulator_beta;
    const ModelPair pair = make_binomial_pair(spec);
    const std::string panel =
        "n=" + std::to_string(config.n_list[ni]) + " half-order";
    result.fan_panels.push_back(panel);

    std::vector<std::vector<double>> deltas(
        grid.size(), std::vector<double>(static_cast<std::size_t>(reps)));
    const std::uint64_t cell_seed = half_order_cell_seeds.at(ni);
    parallel_for(reps, config.threads, [&](std::int64_t r) {
      CheckPlan plan;
      plan.t = 0.5;
      plan.sides = Sides::kTwoSided;
      plan.m1 = config.m;
      plan.m2 = config.m;
      plan.seed = derive_seed(cell_seed, static_cast<std::uint64_t>(r));
      const auto points = running_discrepancy(pair, plan, grid);
      for (std::size_t g = 0; g < grid.size(); ++g) {
        deltas[g][static_cast<std::size_t>(r)] = points[g].delta;
      }
    });
    for (std::size_t g = 0; g < grid.size(); ++g) {
      std::vector<double> sorted = deltas[g];
      std::sort(sorted.begin(), sorted.end());
      FanBand band;
      band.panel = panel;
      band.m = grid[g];
      band.mean = mean_of(deltas[g]);
      band.lo50 = quantile_type7_sorted(sorted, 0.25);
      band.hi50 = quantile_type7_sorted(sorted, 0.75);
      band.lo90 = quantile_type7_sorted(sorted, 0.05);
      band.hi90 = quantile_type7_sorted(sorted, 0.95);
      result.fans.push_back(band);
    }
  }
  for (const std::string& panel : result.fan_panels) {
    result.detection_time[panel] = detection_time_scan(result, panel);
  }
}

// ---------------------------------------------------------------------------
// sim3: ratio estimators on BetaUnit
// ---------------------------------------------------------------------------

void run_bridge_study(const StudyConfig& config, StudyResult& result) {
  if (config.a_list.empty()) {
    throw ParameterError("bridge study needs a nonempty a list");
  }
  const std::int64_t reps = config.replications;
  const std::int64_t m = config.bridge_m;
  std::int64_t arm_index = 0;
  for (double a : config.a_list) {
    BetaUnitSpec bspec;
    bspec.a = a;
    const ModelPair mp = make_beta_unit_pair(bspec);
    const UnnormalizedPair up = embed_known_ratio(mp, 1.0);
    const double rho = 2.0 * std::sqrt(a) / (a + 1.0);

    for (const char* estimator : {"bridge", "forward", "reverse"}) {
      const std::uint64_t arm_seed =
          derive_seed(config.root_seed, static_cast<std::uint64_t>(arm_index));
      ++arm_index;
      std::vector<double> ln_r(static_cast<std::size_t>(reps));
      std::vector<std::int64_t> tails(static_cast<std::size_t>(reps), 0);
      const std::string est_name = estimator;
      parallel_for(reps, config.threads, [&](std::int64_t r) {
        const std::uint64_t seed =
            derive_seed(arm_seed, static_cast<std::uint64_t>(r));
        double value;
        if (est_name == "bridge") {
          value = estimate_half_order_bridge(up, m, m, seed).log_r_hat;
        } else if (est_name == "forward") {
          const IsEstimate est = estimate_forward_is(up, 2 * m, seed);
          value = est.log_estimate;
          tails[static_cast<std::size_t>(r)] = est.tail_events;
        } else {
          const IsEstimate est = estimate_reverse_is(up, 2 * m, seed);
          value = est.log_estimate;
          tails[static_cast<std::size_t>(r)] = est.tail_events;
        }
        ln_r[static_cast<std::size_t>(r)] = value;
      });

      BridgeArmSummary arm;
      arm.a = a;
      arm.estimator = est_name;
      arm.arm = est_name + "-a=" + format_double(a);
      arm.sd_log_r = sd_of(ln_r).value_or(0.0);
      if (est_name == "bridge") {
        arm.predicted_rsd = predict_bridge_rsd(rho, m, m);
      }
      std::vector<double> log10_r(ln_r.size());
      for (std::size_t i = 0; i < ln_r.size(); ++i) {
        log10_r[i] = ln_r[i] / std::log(10.0);
      }
      std::vector<double> sorted = log10_r;
      std::sort(sorted.begin(), sorted.end());
      arm.p01_log10 = quantile_type7_sorted(sorted, 0.01);
      arm.p99_log10 = quantile_type7_sorted(sorted, 0.99);
      arm.mean_log10 = mean_of(log10_r);
      arm.median_log10 = quantile_type7_sorted(sorted, 0.5);
      for (std::int64_t tc : tails) arm.tail_events += tc;
      result.bridge_arms.push_back(arm);

      constexpr int kBins = 40;
      const double lo = sorted.front();
      const double hi = sorted.back();
      if (hi > lo) {
        const double width = (hi - lo) / kBins;
        std::vector<std::int64_t> counts(kBins, 0);
        for (double v : log10_r) {
          auto b = static_cast<std::int64_t>((v - lo) / width);
          b = std::max<std::int64_t>(0, std::min<std::int64_t>(kBins - 1, b));
          ++counts[static_cast<std::size_t>(b)];
        }
        for (int b = 0; b < kBins; ++b) {
          result.histograms.push_back({arm.arm, lo + b * width,
                                       lo + (b + 1) * width,
                                       counts[static_cast<std::size_t>(b)]});
        }
      } else {
        result.histograms.push_back(
            {arm.arm, lo, hi, static_cast<std::int64_t>(log10_r.size())});
      }
    }
  }
}

// ---------------------------------------------------------------------------
// sim-weights: degeneracy stress arms
// ---------------------------------------------------------------------------

void run_weights_study(const StudyConfig& config, StudyResult& result) {
  if (config.a_list.empty()) {
    throw ParameterError("weights study needs a nonempty a list");
  }
  const std::int64_t reps = config.replications;
  const std::vector<double> p_grid = default_lorenz_grid();
  std::int64_t arm_index = 0;
  for (double a : config.a_list) {
    BetaUnitSpec bspec;
    bspec.a = a;
    const ModelPair mp = make_beta_unit_pair(bspec);
    // Stress arm plus the half-order reference, matching the published
    // experiment: proposals suffer at t=1 when a < 1; target-side weights
    // suffer at low orders when a > 1.
    const WeightOrigin side = a < 1.0 ? WeightOrigin::kProposalSide
                                      : WeightOrigin::kTargetSide;
    const double stress_t = a < 1.0 ? 1.0 : 0.25;
    for (double t : {stress_t, 0.5}) {
      const std::uint64_t arm_seed =
          derive_seed(config.root_seed, static_cast<std::uint64_t>(arm_index));
      ++arm_index;
      const std::string arm = "a=" + format_double(a) + "-" +
                              to_string(side) + "-t=" + format_double(t);

      std::vector<double> kappas(static_cast<std::size_t>(reps));
      std::vector<double> s01(static_cast<std::size_t>(reps));
      std::vector<std::vector<double>> lorenz(
          p_grid.size(), std::vector<double>(static_cast<std::size_t>(reps)));
      parallel_for(reps, config.threads, [&](std::int64_t r) {
        const WeightDiagnostics diag = fragility_demo(
            mp, t, side, config.weights_n,
            derive_seed(arm_seed, static_cast<std::uint64_t>(r)));
        kappas[static_cast<std::size_t>(r)] = diag.kappa_n;
        s01[static_cast<std::size_t>(r)] = diag.top_share.front().second;
        for (std::size_t g = 0; g < p_grid.size(); ++g) {
          lorenz[g][static_cast<std::size_t>(r)] = diag.lorenz[g].c;
        }
      });

      WeightArmSummary summary;
      summary.arm = arm;
      summary.a = a;
      summary.t = t;
      summary.origin = side;
      summary.kappa_median = quantile_type7(kappas, 0.5);
      summary.kappa_mean = mean_of(kappas);
      summary.s01_median = quantile_type7(s01, 0.5);
      result.weight_arms.push_back(summary);

      for (std::size_t g = 0; g < p_grid.size(); ++g) {
        std::vector<double> sorted = lorenz[g];
        std::sort(sorted.begin(), sorted.end());
        LorenzBand band;
        band.arm = arm;
        band.p = p_grid[g];
        band.median = quantile_type7_sorted(sorted, 0.5);
        band.lo10 = quantile_type7_sorted(sorted, 0.10);
        band.hi90 = quantile_type7_sorted(sorted, 0.90);
        result.lorenz_bands.push_back(band);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

using NamedFile = std::pair<std::string, std::string>;  // rel path, content

std::vector<NamedFile> table_files(const StudyResult& result) {
  std::vector<NamedFile> files;
  if (!result.cells.empty()) {
    CsvTable t;
    t.header = {"row",       "column",        "mean",
                "sd",        "tail_events",   "overflow_runs",
                "span_log10", "replications"};
    for (const CheckCell& c : result.cells) {
      t.rows.push_back({c.row, c.column, format_double(c.mean),
                        format_optional(c.sd), std::to_string(c.tail_events),
                        std::to_string(c.overflow_runs),
                        format_double(c.span_log10),
                        std::to_string(c.replications)});
    }
    files.emplace_back("tables/check_cells.csv", render_csv(t));
  }
  if (!result.detection_time.empty()) {
    CsvTable t;
    t.header = {"panel", "detection_m"};
    for (const auto& [panel, m] : result.detection_time) {
      t.rows.push_back(
          {panel, m.has_value() ? std::to_string(*m) : std::string()});
    }
    files.emplace_back("tables/detection_time.csv", render_csv(t));
  }
  if (!result.bridge_arms.empty()) {
    CsvTable t;
    t.header = {"arm",        "a",           "estimator",  "sd_log_r",
                "predicted_rsd", "p01_log10", "p99_log10",  "mean_log10",
                "median_log10",  "tail_events"};
    for (const BridgeArmSummary& b : result.bridge_arms) {
      t.rows.push_back({b.arm, format_double(b.a), b.estimator,
                        format_double(b.sd_log_r),
                        format_optional(b.predicted_rsd),
                        format_double(b.p01_log10), format_double(b.p99_log10),
                        format_double(b.mean_log10),
                        format_double(b.median_log10),
                        std::to_string(b.tail_events)});
    }
    files.emplace_back("tables/bridge_arms.csv", render_csv(t));
  }
  if (!result.weight_arms.empty()) {
    CsvTable t;
    t.header = {"arm", "a", "t", "origin", "kappa_median", "kappa_mean",
                "s01_median"};
    for (const WeightArmSummary& w : result.weight_arms) {
      t.rows.push_back({w.arm, format_double(w.a), format_double(w.t),
                        to_string(w.origin), format_double(w.kappa_median),
                        format_double(w.kappa_mean),
                        format_double(w.s01_median)});
    }
    files.emplace_back("tables/weight_arms.csv", render_csv(t));
  }
  return files;
}

std::vector<NamedFile> plot_csv_files(const StudyResult& result) {
  std::vector<NamedFile> files;
  if (!result.fans.empty()) {
    CsvTable t;
    t.header = {"panel", "m", "mean", "lo50", "hi50", "lo90", "hi90"};
    for (const FanBand& f : result.fans) {
      t.rows.push_back({f.panel, std::to_string(f.m), format_double(f.mean),
                        format_double(f.lo50), format_double(f.hi50),
                        format_double(f.lo90), format_double(f.hi90)});
    }
    files.emplace_back("fans.csv", render_csv(t));
  }
  if (!result.lorenz_bands.empty()) {
    CsvTable t;
    t.header = {"arm", "p", "median", "lo10", "hi90"};
    for (const LorenzBand& b : result.lorenz_bands) {
      t.rows.push_back({b.arm, format_double(b.p), format_double(b.median),
                        format_double(b.lo10), format_double(b.hi90)});
    }
    files.emplace_back("lorenz.csv", render_csv(t));
  }
  if (!result.histograms.empty()) {
    CsvTable t;
    t.header = {"arm", "bin_lo", "bin_hi", "count"};
    for (const HistRow& h : result.histograms) {
      t.rows.push_back({h.arm, format_double(h.lo), format_double(h.hi),
                        std::to_string(h.count)});
    }
    files.emplace_back("histogram.csv", render_csv(t));
  }
  return files;
}

// --- minimal self-contained SVG rendering ---

struct Frame {
  double width = 720, height = 440;
  double left = 70, right = 20, top = 24, bottom = 50;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;  // data ranges

  double px(double x) const {
    return left + (x - x0) / (x1 - x0) * (width - left - right);
  }
  double py(double y) const {
    return height - bottom -
           (y - y0) / (y1 - y0) * (height - top - bottom);
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return std::string(buf);
}

void svg_open(std::string& s, const Frame& f, const std::string& title) {
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(f.width) +
       "\" height=\"" + num(f.height) + "\" viewBox=\"0 0 " + num(f.width) +
       " " + num(f.height) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(f.width / 2) +
       "\" y=\"16\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"13\">" +
       title + "</text>\n";
}

void svg_axes(std::string& s, const Frame& f, const std::string& xlabel,
              const std::string& ylabel,
              const std::vector<std::pair<double, std::string>>& xticks,
              const std::vector<std::pair<double, std::string>>& yticks) {
  s += "<g stroke=\"black\" stroke-width=\"1\">";
  s += "<line x1=\"" + num(f.left) + "\" y1=\"" + num(f.height - f.bottom) +
       "\" x2=\"" + num(f.width - f.right) + "\" y2=\"" +
       num(f.height - f.bottom) + "\"/>";
  s += "<line x1=\"" + num(f.left) + "\" y1=\"" + num(f.top) + "\" x2=\"" +
       num(f.left) + "\" y2=\"" + num(f.height - f.bottom) + "\"/>";
  s += "</g>\n";
  for (const auto& [x, label] : xticks) {
    const double px = f.px(x);
    s += "<line x1=\"" + num(px) + "\" y1=\"" + num(f.height - f.bottom) +
         "\" x2=\"" + num(px) + "\" y2=\"" + num(f.height - f.bottom + 5) +
         "\" stroke=\"black\"/>";
    s += "<text x=\"" + num(px) + "\" y=\"" + num(f.height - f.bottom + 18) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"11\">" +
         label + "</text>\n";
  }
  for (const auto& [y, label] : yticks) {
    const double py = f.py(y);
    s += "<line x1=\"" + num(f.left - 5) + "\" y1=\"" + num(py) + "\" x2=\"" +
         num(f.left) + "\" y2=\"" + num(py) + "\" stroke=\"black\"/>";
    s += "<text x=\"" + num(f.left - 8) + "\" y=\"" + num(py + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" "
         "font-size=\"11\">" +
         label + "</text>\n";
  }
  s += "<text x=\"" + num((f.left + f.width - f.right) / 2) + "\" y=\"" +
       num(f.height - 12) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"12\">" +
       xlabel + "</text>\n";
  s += "<text x=\"16\" y=\"" + num((f.top + f.height - f.bottom) / 2) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"12\" transform=\"rotate(-90 16 " +
       num((f.top + f.height - f.bottom) / 2) + ")\">" + ylabel +
       "</text>\n";
}

std::string svg_band_polygon(const Frame& f, const std::vector<double>& xs,
                             const std::vector<double>& lo,
                             const std::vector<double>& hi,
                             const std::string& fill) {
  std::string pts;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    pts += num(f.px(xs[i])) + "," + num(f.py(lo[i])) + " ";
  }
  for (std::size_t i = xs.size(); i-- > 0;) {
    pts += num(f.px(xs[i])) + "," + num(f.py(hi[i])) + " ";
  }
  return "<polygon points=\"" + pts + "\" fill=\"" + fill +
         "\" stroke=\"none\"/>\n";
}

std::string svg_polyline(const Frame& f, const std::vector<double>& xs,
                         const std::vector<double>& ys,
                         const std::string& stroke, const std::string& dash) {
  std::string pts;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    pts += num(f.px(xs[i])) + "," + num(f.py(ys[i])) + " ";
  }
  std::string attrs = " fill=\"none\" stroke=\"" + stroke +
                      "\" stroke-width=\"1.5\"";
  if (!dash.empty()) attrs += " stroke-dasharray=\"" + dash + "\"";
  return "<polyline points=\"" + pts + "\"" + attrs + "/>\n";
}

std::vector<std::pair<double, std::string>> nice_ticks(double lo, double hi,
                                                       int want) {
  std::vector<std::pair<double, std::string>> ticks;
  if (!(hi > lo)) {
    ticks.emplace_back(lo, num(lo));
    return ticks;
  }
  const double raw = (hi - lo) / want;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double c : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * c >= raw) {
      step = mag * c;
      break;
    }
  }
  for (double v = std::ceil(lo / step) * step; v <= hi + step * 1e-9;
       v += step) {
    ticks.emplace_back(v, num(std::abs(v) < step * 1e-9 ? 0.0 : v));
  }
  return ticks;
}

std::string render_fan_svg(const std::vector<FanBand>& series,
                           const std::string& title) {
  Frame f;
  std::vector<double> xs, mean, lo50, hi50, lo90, hi90;
  for (const FanBand& b : series) {
    xs.push_back(std::log10(static_cast<double>(b.m)));
    mean.push_back(b.mean);
    lo50.push_back(b.lo50);
    hi50.push_back(b.hi50);
    lo90.push_back(b.lo90);
    hi90.push_back(b.hi90);
  }
  f.x0 = xs.front();
  f.x1 = xs.back();
  double ylo = 0.0, yhi = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ylo = std::min(ylo, lo90[i]);
    yhi = std::max(yhi, hi90[i]);
  }
  const double pad = 0.05 * (yhi - ylo + 1e-12);
  f.y0 = ylo - pad;
  f.y1 = yhi + pad;

  std::string s;
  svg_open(s, f, title);
  s += svg_band_polygon(f, xs, lo90, hi90, "#c6dbef");
  s += svg_band_polygon(f, xs, lo50, hi50, "#6baed6");
  s += svg_polyline(f, {xs.front(), xs.back()}, {0.0, 0.0}, "#888888", "4 3");
  s += svg_polyline(f, xs, mean, "#08519c", "");
  std::vector<std::pair<double, std::string>> xticks;
  for (double e = std::ceil(f.x0); e <= f.x1 + 1e-9; e += 1.0) {
    xticks.emplace_back(e, "1e" + num(e));
  }
  svg_axes(s, f, "draws per side (log scale)", "discrepancy", xticks,
           nice_ticks(f.y0, f.y1, 5));
  s += "</svg>\n";
  return s;
}

std::string render_lorenz_svg(const std::vector<LorenzBand>& series,
                              const std::string& title) {
  Frame f;
  std::vector<double> xs, med, lo, hi;
  for (const LorenzBand& b : series) {
    xs.push_back(std::log10(b.p));
    med.push_back(b.median);
    lo.push_back(b.lo10);
    hi.push_back(b.hi90);
  }
  f.x0 = xs.front();
  f.x1 = xs.back();
  f.y0 = 0.0;
  f.y1 = 1.0;
  std::string s;
  svg_open(s, f, title);
  s += svg_band_polygon(f, xs, lo, hi, "#c7e9c0");
  s += svg_polyline(f, xs, med, "#006d2c", "");
  std::vector<std::pair<double, std::string>> xticks;
  for (double e = std::ceil(f.x0); e <= f.x1 + 1e-9; e += 1.0) {
    xticks.emplace_back(e, "1e" + num(e));
  }
  svg_axes(s, f, "top share p (log scale)", "C(p)", xticks,
           nice_ticks(0.0, 1.0, 5));
  s += "</svg>\n";
  return s;
}

std::string render_hist_svg(const std::vector<HistRow>& rows,
                            const std::string& title) {
  Frame f;
  double xlo = kInf, xhi = -kInf;
  std::int64_t cmax = 1;
  for (const HistRow& h : rows) {
    xlo = std::min(xlo, h.lo);
    xhi = std::max(xhi, h.hi);
    cmax = std::max(cmax, h.count);
  }
  if (!(xhi > xlo)) xhi = xlo + 1.0;
  f.x0 = xlo;
  f.x1 = xhi;
  f.y0 = 0.0;
  f.y1 = static_cast<double>(cmax) * 1.05;
  std::string s;
  svg_open(s, f, title);
  for (const HistRow& h : rows) {
    const double x = f.px(h.lo);
    const double w = std::max(0.5, f.px(h.hi) - f.px(h.lo));
    const double y = f.py(static_cast<double>(h.count));
    const double hgt = f.py(0.0) - y;
    s += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
         "\" height=\"" + num(hgt) +
         "\" fill=\"#9ecae1\" stroke=\"#3182bd\" stroke-width=\"0.5\"/>\n";
  }
  svg_axes(s, f, "log10(ratio estimate / truth)", "count",
           nice_ticks(f.x0, f.x1, 5), nice_ticks(0.0, f.y1, 4));
  s += "</svg>\n";
  return s;
}

std::vector<NamedFile> plot_svg_files(const StudyResult& result) {
  std::vector<NamedFile> files;
  for (const std::string& panel : result.fan_panels) {
    std::vector<FanBand> series;
    for (const FanBand& b : result.fans) {
      if (b.panel == panel) series.push_back(b);
    }
    if (series.empty()) continue;
    files.emplace_back("fan_" + sanitize_name(panel) + ".svg",
                       render_fan_svg(series, panel));
  }
  if (!result.lorenz_bands.empty()) {
    std::vector<std::string> arms;
    for (const LorenzBand& b : result.lorenz_bands) {
      if (arms.empty() || arms.back() != b.arm) arms.push_back(b.arm);
    }
    for (const std::string& arm : arms) {
      std::vector<LorenzBand> series;
      for (const LorenzBand& b : result.lorenz_bands) {
        if (b.arm == arm) series.push_back(b);
      }
      files.emplace_back("lorenz_" + sanitize_name(arm) + ".svg",
                         render_lorenz_svg(series, arm));
    }
  }
  if (!result.histograms.empty()) {
    std::vector<std::string> arms;
    for (const HistRow& h : result.histograms) {
      if (arms.empty() || arms.back() != h.arm) arms.push_back(h.arm);
    }
    for (const std::string& arm : arms) {
      std::vector<HistRow> series;
      for (const HistRow& h : result.histograms) {
        if (h.arm == arm) series.push_back(h);
      }
      files.emplace_back("hist_" + sanitize_name(arm) + ".svg",
                         render_hist_svg(series, arm));
    }
  }
  return files;
}

nlohmann::json config_to_json(const StudyConfig& c) {
  nlohmann::json j;
  j["study_id"] = to_string(c.study_id);
  j["replications"] = c.replications;
  j["m"] = c.m;
  j["n_list"] = c.n_list;
  j["exponents"] = c.exponents;
  if (c.simulator_alpha.has_value()) {
    j["simulator_alpha"] = *c.simulator_alpha;
    j["simulator_beta"] = *c.simulator_beta;
  } else {
    j["simulator_alpha"] = nullptr;
    j["simulator_beta"] = nullptr;
  }
  j["a_list"] = c.a_list;
  j["bridge_m"] = c.bridge_m;
  j["weights_n"] = c.weights_n;
  j["root_seed"] = c.root_seed;
  j["out_dir"] = c.out_dir;
  j["threads"] = c.threads;
  j["emit_svg"] = c.emit_svg;
  j["fan_points"] = c.fan_points;
  return j;
}

void emit_study_tree(StudyResult& result) {
  namespace fs = std::filesystem;
  const fs::path base =
      fs::path(result.config.out_dir) / to_string(result.config.study_id);

  std::vector<NamedFile> files = table_files(result);
  for (NamedFile& f : plot_csv_files(result)) {
    files.emplace_back("fans/" + f.first, std::move(f.second));
  }
  if (result.config.emit_svg) {
    for (NamedFile& f : plot_svg_files(result)) {
      files.emplace_back("plots/" + f.first, std::move(f.second));
    }
  }

  nlohmann::json manifest;
  manifest["library"] = kLibraryName;
  manifest["version"] = kVersion;
  manifest["config"] = config_to_json(result.config);
  manifest["runtime_seconds"] = result.runtime_seconds;
  manifest["files"] = nlohmann::json::array();
  for (const NamedFile& f : files) {
    write_text_file((base / f.first).string(), f.second);
    result.emitted_files.push_back(f.first);
    manifest["files"].push_back(
        {{"path", f.first},
         {"fnv1a64", hex64(fnv1a64(f.second.data(), f.second.size()))}});
  }
  write_text_file((base / "manifest.json").string(), manifest.dump(2) + "\n");
  result.emitted_files.push_back("manifest.json");
}

}  // namespace

StudyConfig StudyConfig::defaults(StudyId id) {
  StudyConfig c;
  c.study_id = id;
  switch (id) {
    case StudyId::kSim1b:
      c.simulator_alpha = 1.2;
      c.simulator_beta = 1.2;
      break;
    case StudyId::kSim3:
      c.replications = 2000;
      break;
    case StudyId::kSim1a:
    case StudyId::kSimWeights:
    case StudyId::kCustom:
      break;
  }
  return c;
}

StudyResult run_study(const StudyConfig& config) {
  if (config.replications < 1) {
    throw ParameterError("study needs at least one replication");
  }
  if (config.m < 2 || config.bridge_m < 2 || config.weights_n < 1) {
    throw ParameterError("study budgets are too small");
  }
  if (config.threads < 1) throw ParameterError("threads must be >= 1");
  if (config.study_id == StudyId::kSim1a &&
      config.simulator_alpha.has_value()) {
    throw ParameterError("sim1a runs the correct simulator; use sim1b/custom");
  }

  const auto start = std::chrono::steady_clock::now();
  StudyResult result;
  result.config = config;
  switch (config.study_id) {
    case StudyId::kSim1a:
    case StudyId::kSim1b:
    case StudyId::kCustom:
      run_check_study(config, result);
      break;
    case StudyId::kSim3:
      run_bridge_study(config, result);
      break;
    case StudyId::kSimWeights:
      run_weights_study(config, result);
      break;
  }
  result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (!config.out_dir.empty()) emit_study_tree(result);
  return result;
}

std::optional<std::int64_t> detection_time_scan(const StudyResult& result,
                                                const std::string& panel) {
  bool seen = false;
  for (const FanBand& b : result.fans) {
    if (b.panel != panel) continue;
    seen = true;
    if (b.lo90 > 0.0 || b.hi90 < 0.0) return b.m;
  }
  if (!seen) throw ParameterError("unknown fan panel: " + panel);
  return std::nullopt;
}

std::vector<std::string> emit_plot_data(const StudyResult& result,
                                        PlotFormat format,
                                        const std::string& out_dir) {
  std::vector<NamedFile> files = format == PlotFormat::kCsv
                                     ? plot_csv_files(result)
                                     : plot_svg_files(result);
  std::vector<std::string> paths;
  for (const NamedFile& f : files) {
    const std::string path =
        (std::filesystem::path(out_dir) / f.first).string();
    write_text_file(path, f.second);
    paths.push_back(path);
  }
  return paths;
}

PlotFormat plot_format_from_string(const std::string& s) {
  if (s == "csv") return PlotFormat::kCsv;
  if (s == "svg") return PlotFormat::kSvg;
  throw FormatError("unknown plot format: " + s);
}

const char* to_string(StudyId id) {
  switch (id) {
    case StudyId::kSim1a:
      return "sim1a";
    case StudyId::kSim1b:
      return "sim1b";
    case StudyId::kSim3:
      return "sim3";
    case StudyId::kSimWeights:
      return "sim-weights";
    case StudyId::kCustom:
      return "custom";
  }
  return "unknown";
}

StudyId study_id_from_string(const std::string& s) {
  if (s == "sim1a") return StudyId::kSim1a;
  if (s == "sim1b") return StudyId::kSim1b;
  if (s == "sim3") return StudyId::kSim3;
  if (s == "sim-weights" || s == "sim_weights") return StudyId::kSimWeights;
  if (s == "custom") return StudyId::kCustom;
  throw ParameterError("unknown study id: " + s);
}

}  // namespace halford
