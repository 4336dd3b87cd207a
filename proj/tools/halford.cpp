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

// Command-line front-end. Every run echoes its fully resolved configuration
// so output files are self-describing; exit codes are 0 = consistent/ok,
// 2 = flagged, 1 = error, which lets CI pipelines gate on verdicts.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "halford/bridge.hpp"
#include "halford/errors.hpp"
#include "halford/families.hpp"
#include "halford/goodcheck.hpp"
#include "halford/harness.hpp"
#include "halford/io.hpp"
#include "halford/model_pair.hpp"
#include "halford/numeric.hpp"
#include "halford/overlap.hpp"
#include "halford/version.hpp"
#include "halford/weights.hpp"

namespace {

using halford::kInf;
using nlohmann::json;

// JSON carries non-finite doubles as the strings "inf" / "-inf" / "nan";
// plain JSON numbers cannot represent them and silently become null.
json json_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double num_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw halford::FormatError("not a numeric field: " + j.dump());
}

std::string fmt(const json& j) {
  if (j.is_null()) return "NA";
  if (j.is_string()) return j.get<std::string>();
  if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
  if (j.is_number_integer()) return std::to_string(j.get<std::int64_t>());
  if (j.is_number_unsigned()) return std::to_string(j.get<std::uint64_t>());
  return halford::format_double(j.get<double>());
}

void kv(std::ostream& os, const std::string& key, const std::string& value) {
  os << "  " << key;
  for (std::size_t i = key.size(); i < 22; ++i) os << ' ';
  os << value << "\n";
}

void kv_section(std::ostream& os, const std::string& name, const json& obj) {
  os << name << ":\n";
  for (const auto& [key, value] : obj.items()) {
    if (value.is_array() || value.is_object()) continue;
    kv(os, key, fmt(value));
  }
}

// ---------------------------------------------------------------------------
// Model-pair resolution shared by check / overlap / bridge / weights
// ---------------------------------------------------------------------------

struct FamilyCli {
  std::string family = "binomial";
  std::int64_t n = 10;
  double prior_alpha = 1.0;
  double prior_beta = 1.0;
  double theta0 = 0.5;
  double sim_alpha = 1.2;
  double sim_beta = 1.2;
  double a = 1.0;
  double t_star = 1.0;
  std::string branch = "above-half";
  std::vector<double> probs1;
  std::vector<double> probs2;
  std::vector<double> atoms;
  bool reverse = false;
};

void add_family_flags(CLI::App* cmd, FamilyCli& fam) {
  cmd->add_option("--family", fam.family,
                  "binomial | binomial-mismatch | beta-unit | counterexample "
                  "| identical | discrete")
      ->capture_default_str();
  cmd->add_option("--n", fam.n, "binomial trial count")
      ->capture_default_str();
  cmd->add_option("--prior-alpha", fam.prior_alpha,
                  "binomial Beta-prior shape alpha")
      ->capture_default_str();
  cmd->add_option("--prior-beta", fam.prior_beta,
                  "binomial Beta-prior shape beta")
      ->capture_default_str();
  cmd->add_option("--theta0", fam.theta0, "binomial point-null probability")
      ->capture_default_str();
  cmd->add_option("--sim-alpha", fam.sim_alpha,
                  "mismatched simulator shape alpha (binomial-mismatch)")
      ->capture_default_str();
  cmd->add_option("--sim-beta", fam.sim_beta,
                  "mismatched simulator shape beta (binomial-mismatch)")
      ->capture_default_str();
  cmd->add_option("--a", fam.a, "beta-unit shape parameter")
      ->capture_default_str();
  cmd->add_option("--t-star", fam.t_star, "counterexample stressed order")
      ->capture_default_str();
  cmd->add_option("--branch", fam.branch,
                  "counterexample branch: above-half | below-half")
      ->capture_default_str();
  cmd->add_option("--probs1", fam.probs1, "discrete model-1 probabilities");
  cmd->add_option("--probs2", fam.probs2, "discrete model-2 probabilities");
  cmd->add_option("--atoms", fam.atoms, "discrete atom values");
  cmd->add_flag("--reverse", fam.reverse,
                "swap the two model labels before running");
}

halford::ModelPair resolve_pair(const FamilyCli& fam, json& echo) {
  halford::ModelPair pair;
  echo["family"] = fam.family;
  if (fam.family == "binomial" || fam.family == "binomial-mismatch") {
    halford::BinomialPointNullSpec spec;
    spec.n = fam.n;
    spec.alpha = fam.prior_alpha;
    spec.beta = fam.prior_beta;
    spec.theta0 = fam.theta0;
    echo["n"] = fam.n;
    echo["prior_alpha"] = fam.prior_alpha;
    echo["prior_beta"] = fam.prior_beta;
    echo["theta0"] = fam.theta0;
    if (fam.family == "binomial-mismatch") {
      spec.simulator_alpha = fam.sim_alpha;
      spec.simulator_beta = fam.sim_beta;
      echo["sim_alpha"] = fam.sim_alpha;
      echo["sim_beta"] = fam.sim_beta;
    }
    pair = halford::make_binomial_pair(spec);
  } else if (fam.family == "beta-unit") {
    halford::BetaUnitSpec spec;
    spec.a = fam.a;
    echo["a"] = fam.a;
    pair = halford::make_beta_unit_pair(spec);
  } else if (fam.family == "counterexample") {
    halford::PowerCounterexampleSpec spec;
    spec.t_star = fam.t_star;
    if (fam.branch == "above-half") {
      spec.branch = halford::PowerBranch::kAboveHalf;
    } else if (fam.branch == "below-half") {
      spec.branch = halford::PowerBranch::kBelowHalf;
    } else {
      throw halford::ParameterError("unknown branch: " + fam.branch);
    }
    echo["t_star"] = fam.t_star;
    echo["branch"] = fam.branch;
    pair = halford::make_counterexample_pair(spec);
  } else if (fam.family == "identical") {
    pair = halford::make_identical_pair();
  } else if (fam.family == "discrete") {
    echo["probs1"] = fam.probs1;
    echo["probs2"] = fam.probs2;
    pair = halford::make_discrete_pair(fam.probs1, fam.probs2, fam.atoms);
  } else {
    throw halford::ParameterError("unknown family: " + fam.family);
  }
  echo["reverse"] = fam.reverse;
  if (fam.reverse) pair = halford::swap_labels(pair);
  echo["label_1"] = pair.label_1;
  echo["label_2"] = pair.label_2;
  return pair;
}

halford::Method resolve_method(const std::string& name, std::int64_t budget,
                               std::uint64_t seed, json& echo) {
  echo["method"] = name;
  if (name == "analytic") return halford::Method::analytic();
  if (name == "exact-sum") return halford::Method::exact_sum();
  if (name == "quadrature") return halford::Method::quadrature();
  if (name == "mc" || name == "monte-carlo") {
    echo["budget"] = budget;
    echo["seed"] = seed;
    return halford::Method::monte_carlo(budget, seed);
  }
  throw halford::ParameterError("unknown method: " + name);
}

void deliver(const std::string& text, const std::string& out_path) {
  std::cout << text;
  if (!out_path.empty()) halford::write_text_file(out_path, text);
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

json report_to_json(const halford::GoodCheckReport& r) {
  json j;
  j["t"] = r.t;
  j["sides"] = halford::to_string(r.sides);
  j["m1"] = r.m1;
  j["m2"] = r.m2;
  j["seed"] = r.seed;
  j["rho_hat_1"] = json_num(r.rho_hat_1);
  j["rho_hat_2"] = json_num(r.rho_hat_2);
  j["rho_hat_pooled"] = json_num(r.rho_hat_pooled);
  j["delta"] = json_num(r.delta);
  j["s1_sq"] = json_num(r.s1_sq);
  j["s2_sq"] = json_num(r.s2_sq);
  j["se_hat"] = json_num(r.se_hat);
  j["se_worst_case"] = json_num(r.se_worst_case);
  j["alpha"] = r.alpha;
  j["rule"] = halford::to_string(r.threshold_rule);
  j["epsilon"] = json_num(r.epsilon);
  j["t_stat"] = json_num(r.t_stat);
  j["log_mean_1"] = json_num(r.log_mean_1);
  j["log_mean_2"] = json_num(r.log_mean_2);
  j["tail_events_1"] = r.tail_events_1;
  j["tail_events_2"] = r.tail_events_2;
  j["overflow_contaminated"] = r.overflow_contaminated;
  j["target_known"] = r.target_known;
  j["target"] = r.target_known ? json_num(r.target) : json(nullptr);
  j["verdict"] = halford::to_string(r.verdict);
  return j;
}

std::string render_check_table(const json& doc) {
  std::ostringstream os;
  os << "check\n";
  kv_section(os, "config", doc.at("config"));
  kv_section(os, "report", doc.at("report"));
  return os.str();
}

int cmd_check(const FamilyCli& fam, halford::CheckPlan plan,
              std::int64_t budget, const std::string& sides,
              const std::string& rule, bool as_json,
              const std::string& from_report, const std::string& out_path) {
  json doc;
  if (!from_report.empty()) {
    std::ifstream in(from_report);
    if (!in) throw halford::IoError("cannot open " + from_report);
    in >> doc;
  } else {
    json config;
    const halford::ModelPair pair = resolve_pair(fam, config);
    if (budget > 0) {
      const auto split = halford::CheckPlan::balanced(budget, plan.seed);
      plan.m1 = split.m1;
      plan.m2 = split.m2;
    }
    plan.sides = halford::sides_from_string(sides);
    plan.threshold_rule = halford::rule_from_string(rule);
    config["t"] = plan.t;
    config["sides"] = halford::to_string(plan.sides);
    config["m1"] = plan.m1;
    config["m2"] = plan.m2;
    config["alpha"] = plan.alpha;
    config["rule"] = halford::to_string(plan.threshold_rule);
    config["seed"] = plan.seed;
    doc["command"] = "check";
    doc["config"] = config;
    doc["report"] = report_to_json(halford::run_moment_check(pair, plan));
  }
  deliver(as_json ? doc.dump(2) + "\n" : render_check_table(doc), out_path);
  const std::string verdict = doc.at("report").at("verdict");
  return verdict == "flagged" ? 2 : 0;
}

// ---------------------------------------------------------------------------
// overlap
// ---------------------------------------------------------------------------

int cmd_overlap(const FamilyCli& fam, std::vector<double> grid,
                const std::string& method_name, std::int64_t budget,
                std::uint64_t seed, bool as_json,
                const std::string& out_path) {
  json config;
  const halford::ModelPair pair = resolve_pair(fam, config);
  const halford::Method method =
      resolve_method(method_name, budget, seed, config);
  if (grid.empty()) {
    for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
  }
  config["grid"] = grid;

  const halford::OverlapProfile profile =
      halford::make_overlap_profile(pair, grid, method);

  json doc;
  doc["command"] = "overlap";
  doc["config"] = config;
  json values = json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    json row;
    row["t"] = grid[i];
    row["integral"] = json_num(profile.values[i]);
    json renyi(nullptr);
    try {
      renyi = json_num(grid[i] == 1.0
                           ? halford::kl_limit(pair, method)
                           : halford::renyi_divergence(pair, grid[i], method));
    } catch (const halford::Error&) {
      // order outside the divergence domain; reported as NA
    }
    row["renyi"] = renyi;
    values.push_back(row);
  }
  doc["values"] = values;
  doc["rho"] = json_num(profile.rho);
  try {
    const auto vi = halford::variance_identity(pair, 0.5, method);
    doc["variance_identity"] = {{"t", vi.t},
                                {"var_side1", json_num(vi.var_side1)},
                                {"var_side2", json_num(vi.var_side2)},
                                {"worst_side", json_num(vi.worst_side)}};
  } catch (const halford::Error&) {
    doc["variance_identity"] = nullptr;
  }
  if (grid.size() >= 3) {
    const auto cert = halford::convexity_certificate(profile);
    doc["convexity"] = {{"triples_checked", cert.triples_checked},
                        {"max_violation", json_num(cert.max_violation)},
                        {"tolerance", cert.tolerance},
                        {"pass", cert.pass}};
  } else {
    doc["convexity"] = nullptr;
  }

  if (as_json) {
    deliver(doc.dump(2) + "\n", out_path);
    return 0;
  }
  std::ostringstream os;
  os << "overlap\n";
  kv_section(os, "config", doc["config"]);
  os << "values:\n";
  os << "  " << "t           I(t)                    D_t\n";
  for (const json& row : doc["values"]) {
    std::string t = fmt(row["t"]);
    std::string it = fmt(row["integral"]);
    t.resize(12, ' ');
    it.resize(24, ' ');
    os << "  " << t << it << fmt(row["renyi"]) << "\n";
  }
  kv(os, "rho", fmt(doc["rho"]));
  if (!doc["variance_identity"].is_null()) {
    kv_section(os, "variance_identity", doc["variance_identity"]);
  }
  if (!doc["convexity"].is_null()) {
    kv_section(os, "convexity", doc["convexity"]);
  }
  deliver(os.str(), out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// bridge
// ---------------------------------------------------------------------------

int cmd_bridge(const FamilyCli& fam, std::int64_t m1, std::int64_t m2,
               std::uint64_t seed, double true_ratio, bool as_json,
               const std::string& out_path) {
  json config;
  const halford::ModelPair pair = resolve_pair(fam, config);
  const halford::UnnormalizedPair up =
      halford::embed_known_ratio(pair, true_ratio);
  config["m1"] = m1;
  config["m2"] = m2;
  config["seed"] = seed;
  config["true_ratio"] = true_ratio;

  const halford::BridgeEstimate est =
      halford::estimate_half_order_bridge(up, m1, m2, seed);
  json doc;
  doc["command"] = "bridge";
  doc["config"] = config;
  json e;
  e["a2_hat"] = json_num(est.a2_hat);
  e["a1_hat"] = json_num(est.a1_hat);
  e["r_hat"] = json_num(est.r_hat);
  e["log_r_hat"] = json_num(est.log_r_hat);
  e["rho_sq_hat"] = json_num(est.rho_sq_hat);
  e["var_hat"] = json_num(est.var_hat);
  e["rsd_hat"] = json_num(est.rsd_hat);
  if (pair.analytic_order_moment) {
    const double rho = pair.analytic_order_moment(0.5);
    e["predicted_rsd"] = json_num(halford::predict_bridge_rsd(rho, m1, m2));
  } else {
    e["predicted_rsd"] = nullptr;
  }
  doc["estimate"] = e;

  if (as_json) {
    deliver(doc.dump(2) + "\n", out_path);
    return 0;
  }
  std::ostringstream os;
  os << "bridge\n";
  kv_section(os, "config", doc["config"]);
  kv_section(os, "estimate", doc["estimate"]);
  deliver(os.str(), out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// weights
// ---------------------------------------------------------------------------

int cmd_weights(const FamilyCli& fam, double t, const std::string& origin,
                std::int64_t n, std::uint64_t seed,
                std::vector<double> top_p, bool as_json,
                const std::string& out_path) {
  json config;
  const halford::ModelPair pair = resolve_pair(fam, config);
  const halford::WeightOrigin side = halford::origin_from_string(origin);
  if (top_p.empty()) top_p = {0.01};
  config["t"] = t;
  config["origin"] = halford::to_string(side);
  config["draws"] = n;
  config["seed"] = seed;
  config["top_p"] = top_p;

  const halford::WeightVector wv =
      halford::build_weight_vector(pair, t, side, n, seed);
  const halford::WeightDiagnostics diag =
      halford::normalize_and_diagnose(wv, halford::default_lorenz_grid(),
                                      top_p);

  json doc;
  doc["command"] = "weights";
  doc["config"] = config;
  json d;
  d["n"] = diag.n;
  d["kappa_n"] = json_num(diag.kappa_n);
  d["cv_half_sq"] = diag.cv_half_sq.has_value()
                        ? json_num(*diag.cv_half_sq)
                        : json(nullptr);
  json shares = json::array();
  for (const auto& [p, share] : diag.top_share) {
    shares.push_back({{"p", p}, {"share", json_num(share)}});
  }
  d["top_share"] = shares;
  json lorenz = json::array();
  for (const auto& pt : diag.lorenz) {
    lorenz.push_back({{"p", pt.p}, {"c", json_num(pt.c)}});
  }
  d["lorenz"] = lorenz;
  if (t == 0.5) {
    const auto ho = halford::half_order_overlap_from_weights(wv);
    d["half_order"] = {{"rho_hat", json_num(ho.rho_hat)},
                       {"cv_half_sq", json_num(ho.cv_half_sq)},
                       {"se", json_num(ho.se)}};
  } else {
    d["half_order"] = nullptr;
  }
  doc["diagnostics"] = d;

  if (as_json) {
    deliver(doc.dump(2) + "\n", out_path);
    return 0;
  }
  std::ostringstream os;
  os << "weights\n";
  kv_section(os, "config", doc["config"]);
  kv_section(os, "diagnostics", doc["diagnostics"]);
  for (const json& row : doc["diagnostics"]["top_share"]) {
    kv(os, "S_" + fmt(row["p"]), fmt(row["share"]));
  }
  if (!doc["diagnostics"]["half_order"].is_null()) {
    kv_section(os, "half_order", doc["diagnostics"]["half_order"]);
  }
  os << "lorenz (selected):\n";
  const json& lz = doc["diagnostics"]["lorenz"];
  for (std::size_t i : {std::size_t{0}, lz.size() / 4, lz.size() / 2,
                        3 * lz.size() / 4, lz.size() - 1}) {
    kv(os, "C(" + fmt(lz[i]["p"]) + ")", fmt(lz[i]["c"]));
  }
  deliver(os.str(), out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// plan
// ---------------------------------------------------------------------------

int cmd_plan(std::optional<double> rho, std::int64_t budget,
             std::optional<double> cost1, std::optional<double> cost2,
             std::optional<double> order2, bool as_json,
             const std::string& out_path) {
  std::optional<std::pair<double, double>> costs;
  if (cost1.has_value() != cost2.has_value()) {
    throw halford::ParameterError("--cost1 and --cost2 go together");
  }
  if (cost1.has_value()) costs = std::make_pair(*cost1, *cost2);
  const halford::Allocation alloc =
      halford::plan_budget(rho, budget, costs, order2);

  auto opt_num = [](const std::optional<double>& v) {
    return v.has_value() ? json_num(*v) : json(nullptr);
  };
  json doc;
  doc["command"] = "plan";
  doc["config"] = {{"rho", opt_num(rho)},
                   {"budget", budget},
                   {"cost1", opt_num(cost1)},
                   {"cost2", opt_num(cost2)},
                   {"order2_moment", opt_num(order2)}};
  doc["allocation"] = {
      {"m1", alloc.m1},
      {"m2", alloc.m2},
      {"v_one_sided", opt_num(alloc.comparison.v_one_sided)},
      {"v_two_sided_balanced",
       opt_num(alloc.comparison.v_two_sided_balanced)},
      {"relative_efficiency", opt_num(alloc.comparison.relative_efficiency)},
      {"re_lower_bound", opt_num(alloc.comparison.re_lower_bound)},
      {"dominance", alloc.comparison.dominance}};

  if (as_json) {
    deliver(doc.dump(2) + "\n", out_path);
    return 0;
  }
  std::ostringstream os;
  os << "plan\n";
  kv_section(os, "config", doc["config"]);
  kv_section(os, "allocation", doc["allocation"]);
  deliver(os.str(), out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// study
// ---------------------------------------------------------------------------

int cmd_study(const halford::StudyConfig& config, bool as_json,
              const std::string& out_path) {
  const halford::StudyResult result = halford::run_study(config);

  json doc;
  doc["command"] = "study";
  doc["config"] = {{"study_id", halford::to_string(config.study_id)},
                   {"replications", config.replications},
                   {"m", config.m},
                   {"bridge_m", config.bridge_m},
                   {"weights_n", config.weights_n},
                   {"root_seed", config.root_seed},
                   {"out_dir", config.out_dir},
                   {"threads", config.threads},
                   {"emit_svg", config.emit_svg},
                   {"fan_points", config.fan_points}};
  doc["config"]["n_list"] = config.n_list;
  doc["config"]["exponents"] = config.exponents;
  doc["config"]["a_list"] = config.a_list;
  if (config.simulator_alpha.has_value()) {
    doc["config"]["simulator_alpha"] = *config.simulator_alpha;
    doc["config"]["simulator_beta"] = *config.simulator_beta;
  }
  json cells = json::array();
  for (const auto& c : result.cells) {
    cells.push_back({{"row", c.row},
                     {"column", c.column},
                     {"mean", json_num(c.mean)},
                     {"sd", c.sd.has_value() ? json_num(*c.sd) : json(nullptr)},
                     {"tail_events", c.tail_events},
                     {"overflow_runs", c.overflow_runs},
                     {"span_log10", json_num(c.span_log10)}});
  }
  doc["cells"] = cells;
  json detect = json::object();
  for (const auto& [panel, m] : result.detection_time) {
    detect[panel] = m.has_value() ? json(*m) : json(nullptr);
  }
  doc["detection_time"] = detect;
  json arms = json::array();
  for (const auto& b : result.bridge_arms) {
    arms.push_back({{"arm", b.arm},
                    {"sd_log_r", json_num(b.sd_log_r)},
                    {"predicted_rsd", b.predicted_rsd.has_value()
                                          ? json_num(*b.predicted_rsd)
                                          : json(nullptr)},
                    {"p01_log10", json_num(b.p01_log10)},
                    {"p99_log10", json_num(b.p99_log10)},
                    {"median_log10", json_num(b.median_log10)},
                    {"tail_events", b.tail_events}});
  }
  doc["bridge_arms"] = arms;
  json warms = json::array();
  for (const auto& w : result.weight_arms) {
    warms.push_back({{"arm", w.arm},
                     {"kappa_median", json_num(w.kappa_median)},
                     {"kappa_mean", json_num(w.kappa_mean)},
                     {"s01_median", json_num(w.s01_median)}});
  }
  doc["weight_arms"] = warms;
  doc["runtime_seconds"] = result.runtime_seconds;
  doc["emitted_files"] = result.emitted_files;

  if (as_json) {
    deliver(doc.dump(2) + "\n", out_path);
    return 0;
  }
  std::ostringstream os;
  os << "study\n";
  kv_section(os, "config", doc["config"]);
  if (!result.cells.empty()) {
    os << "cells:\n";
    for (const json& c : doc["cells"]) {
      std::string row = fmt(c["row"]);
      std::string col = fmt(c["column"]);
      std::string mean = fmt(c["mean"]);
      row.resize(10, ' ');
      col.resize(18, ' ');
      mean.resize(24, ' ');
      os << "  " << row << col << "mean=" << mean << "sd=" << fmt(c["sd"])
         << "\n";
    }
    os << "detection_time:\n";
    for (const auto& [panel, m] : doc["detection_time"].items()) {
      kv(os, panel, fmt(m));
    }
  }
  for (const json& b : doc["bridge_arms"]) {
    std::string arm = fmt(b["arm"]);
    arm.resize(24, ' ');
    os << "  " << arm << "sd_log_r=" << fmt(b["sd_log_r"])
       << " predicted_rsd=" << fmt(b["predicted_rsd"]) << "\n";
  }
  for (const json& w : doc["weight_arms"]) {
    std::string arm = fmt(w["arm"]);
    arm.resize(34, ' ');
    os << "  " << arm << "kappa_median=" << fmt(w["kappa_median"]) << "\n";
  }
  kv(os, "runtime_seconds", halford::format_double(result.runtime_seconds));
  for (const auto& f : result.emitted_files) kv(os, "file", f);
  deliver(os.str(), out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Good-check diagnostics for simulation-based Bayes factors"};
  app.set_version_flag("--version", std::string(halford::kVersion));
  app.set_config("--config", "",
                 "read options from a key=value file with [subcommand] "
                 "sections");
  app.require_subcommand(1);

  // --- check ---
  auto* check = app.add_subcommand(
      "check", "run a moment check and gate on its verdict");
  FamilyCli check_fam;
  add_family_flags(check, check_fam);
  halford::CheckPlan plan;
  plan.m1 = 2000;
  plan.m2 = 2000;
  std::int64_t check_budget = 0;
  std::string check_sides = "two-sided";
  std::string check_rule = "clt";
  bool check_json = false;
  std::string check_from;
  std::string check_out;
  check->add_option("--t", plan.t, "moment order")->capture_default_str();
  check->add_option("--sides", check_sides,
                    "two-sided | one-sided-from-h1 | one-sided-from-h2")
      ->capture_default_str();
  check->add_option("--m1", plan.m1, "side-1 draws")->capture_default_str();
  check->add_option("--m2", plan.m2, "side-2 draws")->capture_default_str();
  auto* budget_opt =
      check->add_option("--budget", check_budget,
                        "total draws, split evenly across the two sides");
  budget_opt->excludes(check->get_option("--m1"));
  budget_opt->excludes(check->get_option("--m2"));
  check->add_option("--alpha", plan.alpha, "significance level")
      ->capture_default_str();
  check->add_option("--rule", check_rule, "clt | worst | chebyshev")
      ->capture_default_str();
  check->add_option("--seed", plan.seed, "root seed")
      ->envname("HALFORD_SEED")
      ->capture_default_str();
  check->add_flag("--json", check_json, "emit JSON instead of a table");
  check->add_option("--from-report", check_from,
                    "re-render a previously saved --json report");
  check->add_option("--out", check_out, "also write the output to this file");

  // --- overlap ---
  auto* overlap = app.add_subcommand(
      "overlap", "evaluate the moment function, overlap, and divergences");
  FamilyCli overlap_fam;
  add_family_flags(overlap, overlap_fam);
  std::vector<double> overlap_grid;
  std::string overlap_method = "exact-sum";
  std::int64_t overlap_budget = 100000;
  std::uint64_t overlap_seed = 1;
  bool overlap_json = false;
  std::string overlap_out;
  overlap->add_option("--t", overlap_grid,
                      "orders to evaluate (default: 21-point grid on [0,1])");
  overlap->add_option("--method", overlap_method,
                      "analytic | exact-sum | quadrature | mc")
      ->capture_default_str();
  overlap->add_option("--budget", overlap_budget, "Monte Carlo draws")
      ->capture_default_str();
  overlap->add_option("--seed", overlap_seed, "Monte Carlo seed")
      ->envname("HALFORD_SEED")
      ->capture_default_str();
  overlap->add_flag("--json", overlap_json, "emit JSON instead of a table");
  overlap->add_option("--out", overlap_out,
                      "also write the output to this file");

  // --- bridge ---
  auto* bridge = app.add_subcommand(
      "bridge", "estimate a normalizing-constant ratio at half order");
  FamilyCli bridge_fam;
  bridge_fam.family = "beta-unit";
  add_family_flags(bridge, bridge_fam);
  std::int64_t bridge_m1 = 1000;
  std::int64_t bridge_m2 = 1000;
  std::uint64_t bridge_seed = 1;
  double bridge_ratio = 1.0;
  bool bridge_json = false;
  std::string bridge_out;
  bridge->add_option("--m1", bridge_m1, "side-1 draws")->capture_default_str();
  bridge->add_option("--m2", bridge_m2, "side-2 draws")->capture_default_str();
  bridge->add_option("--seed", bridge_seed, "root seed")
      ->envname("HALFORD_SEED")
      ->capture_default_str();
  bridge->add_option("--true-ratio", bridge_ratio,
                     "embedded known ratio for calibration runs")
      ->capture_default_str();
  bridge->add_flag("--json", bridge_json, "emit JSON instead of a table");
  bridge->add_option("--out", bridge_out, "also write the output to this file");

  // --- weights ---
  auto* weights = app.add_subcommand(
      "weights", "weight-degeneracy diagnostics for one weight vector");
  FamilyCli weights_fam;
  weights_fam.family = "beta-unit";
  add_family_flags(weights, weights_fam);
  double weights_t = 0.5;
  std::string weights_origin = "proposal-side";
  std::int64_t weights_n = 2000;
  std::uint64_t weights_seed = 1;
  std::vector<double> weights_top_p;
  bool weights_json = false;
  std::string weights_out;
  weights->add_option("--t", weights_t, "transform order")
      ->capture_default_str();
  weights->add_option("--origin", weights_origin,
                      "proposal-side | target-side")
      ->capture_default_str();
  // --n already names the binomial trial count above, so the weight-vector
  // length gets its own flag.
  weights->add_option("--draws", weights_n, "number of weight draws")
      ->capture_default_str();
  weights->add_option("--seed", weights_seed, "root seed")
      ->envname("HALFORD_SEED")
      ->capture_default_str();
  weights->add_option("--top-p", weights_top_p,
                      "top-share fractions to report (default 0.01)");
  weights->add_flag("--json", weights_json, "emit JSON instead of a table");
  weights->add_option("--out", weights_out,
                      "also write the output to this file");

  // --- study ---
  auto* study = app.add_subcommand(
      "study", "run a replication study and write its file tree");
  std::string study_id = "sim1a";
  std::int64_t study_reps = 0;
  std::int64_t study_m = 0;
  std::vector<std::int64_t> study_n_list;
  std::vector<double> study_exponents;
  double study_sim_alpha = 0.0;
  double study_sim_beta = 0.0;
  std::vector<double> study_a_list;
  std::int64_t study_bridge_m = 0;
  std::int64_t study_weights_n = 0;
  std::uint64_t study_seed = 1;
  std::string study_out_dir = "out";
  int study_threads = 1;
  bool study_no_svg = false;
  std::int64_t study_fan_points = 0;
  bool study_json = false;
  std::string study_out;
  study->add_option("--id", study_id,
                    "sim1a | sim1b | sim3 | sim-weights | custom")
      ->capture_default_str();
  study->add_option("--replications", study_reps, "replication count");
  study->add_option("--m", study_m, "per-side draws for check studies");
  study->add_option("--n", study_n_list, "binomial n values");
  study->add_option("--exponent", study_exponents, "moment orders");
  study->add_option("--sim-alpha", study_sim_alpha,
                    "mismatched simulator shape alpha");
  study->add_option("--sim-beta", study_sim_beta,
                    "mismatched simulator shape beta");
  study->add_option("--a", study_a_list, "beta-unit shape values");
  study->add_option("--bridge-m", study_bridge_m, "bridge per-side draws");
  study->add_option("--weights-n", study_weights_n, "weights per replication");
  study->add_option("--seed", study_seed, "root seed")
      ->envname("HALFORD_SEED")
      ->capture_default_str();
  study->add_option("--out-dir", study_out_dir,
                    "output tree root (empty: compute only)")
      ->capture_default_str();
  study->add_option("--threads", study_threads, "worker thread count")
      ->capture_default_str();
  study->add_flag("--no-svg", study_no_svg, "skip SVG plot emission");
  study->add_option("--fan-points", study_fan_points, "fan grid size");
  study->add_flag("--json", study_json, "emit a JSON summary");
  study->add_option("--out", study_out, "also write the summary to this file");

  // --- plan ---
  auto* planner = app.add_subcommand(
      "plan", "allocate a draw budget and compare estimator variances");
  double plan_rho = 0.0;
  std::int64_t plan_budget_n = 0;
  double plan_cost1 = 0.0;
  double plan_cost2 = 0.0;
  double plan_order2 = 0.0;
  bool plan_json = false;
  std::string plan_out;
  planner->add_option("--rho", plan_rho, "known or estimated overlap");
  planner->add_option("--budget", plan_budget_n, "total draw budget")
      ->required();
  planner->add_option("--cost1", plan_cost1, "per-draw cost on side 1");
  planner->add_option("--cost2", plan_cost2, "per-draw cost on side 2");
  planner->add_option("--order2", plan_order2,
                      "order-2 moment for the one-sided variance");
  planner->add_flag("--json", plan_json, "emit JSON instead of a table");
  planner->add_option("--out", plan_out, "also write the output to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (check->parsed()) {
      return cmd_check(check_fam, plan, check_budget, check_sides, check_rule,
                       check_json, check_from, check_out);
    }
    if (overlap->parsed()) {
      return cmd_overlap(overlap_fam, overlap_grid, overlap_method,
                         overlap_budget, overlap_seed, overlap_json,
                         overlap_out);
    }
    if (bridge->parsed()) {
      return cmd_bridge(bridge_fam, bridge_m1, bridge_m2, bridge_seed,
                        bridge_ratio, bridge_json, bridge_out);
    }
    if (weights->parsed()) {
      return cmd_weights(weights_fam, weights_t, weights_origin, weights_n,
                         weights_seed, weights_top_p, weights_json,
                         weights_out);
    }
    if (study->parsed()) {
      halford::StudyConfig config = halford::StudyConfig::defaults(
          halford::study_id_from_string(study_id));
      if (study->count("--replications")) config.replications = study_reps;
      if (study->count("--m")) config.m = study_m;
      if (study->count("--n")) config.n_list = study_n_list;
      if (study->count("--exponent")) config.exponents = study_exponents;
      if (study->count("--sim-alpha")) config.simulator_alpha = study_sim_alpha;
      if (study->count("--sim-beta")) config.simulator_beta = study_sim_beta;
      if (study->count("--a")) config.a_list = study_a_list;
      if (study->count("--bridge-m")) config.bridge_m = study_bridge_m;
      if (study->count("--weights-n")) config.weights_n = study_weights_n;
      if (study->count("--fan-points")) config.fan_points = study_fan_points;
      config.root_seed = study_seed;
      config.out_dir = study_out_dir;
      config.threads = study_threads;
      config.emit_svg = !study_no_svg;
      return cmd_study(config, study_json, study_out);
    }
    if (planner->parsed()) {
      auto opt_of = [&](const CLI::App* cmd, const char* flag, double value) {
        return cmd->count(flag) ? std::optional<double>(value) : std::nullopt;
      };
      return cmd_plan(opt_of(planner, "--rho", plan_rho), plan_budget_n,
                      opt_of(planner, "--cost1", plan_cost1),
                      opt_of(planner, "--cost2", plan_cost2),
                      opt_of(planner, "--order2", plan_order2), plan_json,
                      plan_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: no subcommand\n";
  return 1;
}
