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

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "halford/errors.hpp"
#include "halford/harness.hpp"
#include "halford/numeric.hpp"
#include "json.hpp"

using namespace halford;
namespace fs = std::filesystem;

namespace {

// Scratch directory wiped on both ends so reruns start clean.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           ("halford_harness_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

StudyConfig tiny_check_config() {
  StudyConfig c = StudyConfig::defaults(StudyId::kCustom);
  c.replications = 8;
  c.m = 60;
  c.n_list = {10};
  c.exponents = {0.5, 1.0};
  c.fan_points = 4;
  c.root_seed = 42;
  return c;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("emitted bytes do not depend on the thread count") {
    TempDir one("t1");
    TempDir four("t4");
    StudyConfig c = tiny_check_config();
    c.out_dir = one.path.string();
    c.threads = 1;
    const StudyResult r1 = run_study(c);
    c.out_dir = four.path.string();
    c.threads = 4;
    const StudyResult r4 = run_study(c);

    REQUIRE(r1.emitted_files == r4.emitted_files);
    for (const std::string& rel : r1.emitted_files) {
      if (rel == "manifest.json") continue;  // carries the wall-clock time
      CHECK_MESSAGE(slurp(one.path / "custom" / rel) ==
                        slurp(four.path / "custom" / rel),
                    rel);
    }

    REQUIRE(r1.cells.size() == r4.cells.size());
    for (std::size_t i = 0; i < r1.cells.size(); ++i) {
      CHECK(r1.cells[i].mean == r4.cells[i].mean);
      CHECK(r1.cells[i].sd == r4.cells[i].sd);
      CHECK(r1.cells[i].span_log10 == r4.cells[i].span_log10);
      CHECK(r1.cells[i].tail_events == r4.cells[i].tail_events);
    }
    REQUIRE(r1.fans.size() == r4.fans.size());
    for (std::size_t i = 0; i < r1.fans.size(); ++i) {
      CHECK(r1.fans[i].mean == r4.fans[i].mean);
      CHECK(r1.fans[i].lo90 == r4.fans[i].lo90);
      CHECK(r1.fans[i].hi90 == r4.fans[i].hi90);
    }
  }

  TEST_CASE("check-study layout") {
    StudyConfig c = StudyConfig::defaults(StudyId::kSim1a);
    c.replications = 5;
    c.m = 50;
    c.n_list = {10, 50};
    c.fan_points = 4;
    const StudyResult r = run_study(c);

    // Exponents {0.5, 1, 2} give one two-sided column plus forward and
    // reverse one-sided columns at the integer orders.
    REQUIRE(r.cells.size() == 10);
    std::set<std::string> columns;
    for (const CheckCell& cell : r.cells) columns.insert(cell.column);
    CHECK(columns == std::set<std::string>{"half-order", "turing-forward",
                                           "turing-reverse", "good2-forward",
                                           "good2-reverse"});
    CHECK(r.cells.front().row == "n=10");
    for (const CheckCell& cell : r.cells) {
      CHECK(cell.replications == 5);
      REQUIRE(cell.sd.has_value());
      CHECK(*cell.sd >= 0.0);
      if (cell.column == "half-order") {
        CHECK(cell.span_log10 == 0.0);
      } else {
        CHECK(cell.span_log10 >= 0.0);
      }
    }

    REQUIRE(r.fan_panels ==
            std::vector<std::string>{"n=10 half-order", "n=50 half-order"});
    for (const std::string& panel : r.fan_panels) {
      std::vector<std::int64_t> ms;
      for (const FanBand& b : r.fans) {
        if (b.panel == panel) ms.push_back(b.m);
      }
      REQUIRE(ms.size() == 4);
      CHECK(ms.front() == 10);
      CHECK(ms.back() == 50);
      CHECK(std::is_sorted(ms.begin(), ms.end()));
      for (const FanBand& b : r.fans) {
        if (b.panel != panel) continue;
        CHECK(b.lo90 <= b.lo50);
        CHECK(b.lo50 <= b.hi50);
        CHECK(b.hi50 <= b.hi90);
      }
      CHECK(r.detection_time.count(panel) == 1);
    }
  }

  TEST_CASE("bridge-study layout") {
    StudyConfig c = StudyConfig::defaults(StudyId::kSim3);
    c.replications = 12;
    c.bridge_m = 40;
    const StudyResult r = run_study(c);

    REQUIRE(r.bridge_arms.size() == 6);
    CHECK(r.bridge_arms[0].arm == "bridge-a=0.5");
    CHECK(r.bridge_arms[3].arm == "bridge-a=3");
    for (const BridgeArmSummary& arm : r.bridge_arms) {
      CHECK(arm.predicted_rsd.has_value() == (arm.estimator == "bridge"));
      CHECK(arm.p01_log10 <= arm.median_log10);
      CHECK(arm.median_log10 <= arm.p99_log10);
      CHECK(arm.sd_log_r >= 0.0);
      std::int64_t count = 0;
      for (const HistRow& h : r.histograms) {
        if (h.arm == arm.arm) count += h.count;
      }
      CHECK(count == 12);  // every replication lands in some bin
    }
  }

  TEST_CASE("weights-study layout") {
    StudyConfig c = StudyConfig::defaults(StudyId::kSimWeights);
    c.replications = 10;
    c.weights_n = 50;
    const StudyResult r = run_study(c);

    REQUIRE(r.weight_arms.size() == 4);
    CHECK(r.weight_arms[0].arm == "a=0.5-proposal-side-t=1");
    CHECK(r.weight_arms[1].arm == "a=0.5-proposal-side-t=0.5");
    CHECK(r.weight_arms[2].arm == "a=3-target-side-t=0.25");
    CHECK(r.weight_arms[3].arm == "a=3-target-side-t=0.5");
    for (const WeightArmSummary& arm : r.weight_arms) {
      CHECK(arm.kappa_median > 0.0);
      CHECK(arm.kappa_median <= 1.0);
      CHECK(arm.s01_median > 0.0);
      CHECK(arm.s01_median <= 1.0);
    }
    CHECK(r.lorenz_bands.size() == 4 * 50);
    for (const LorenzBand& b : r.lorenz_bands) {
      CHECK(b.lo10 <= b.median);
      CHECK(b.median <= b.hi90);
    }
  }

  TEST_CASE("study tree and manifest") {
    TempDir dir("tree");
    StudyConfig c = StudyConfig::defaults(StudyId::kSimWeights);
    c.replications = 6;
    c.weights_n = 40;
    c.out_dir = dir.path.string();
    const StudyResult r = run_study(c);

    const fs::path base = dir.path / "sim-weights";
    REQUIRE_FALSE(r.emitted_files.empty());
    CHECK(std::count(r.emitted_files.begin(), r.emitted_files.end(),
                     "tables/weight_arms.csv") == 1);
    CHECK(std::count(r.emitted_files.begin(), r.emitted_files.end(),
                     "fans/lorenz.csv") == 1);
    CHECK(r.emitted_files.back() == "manifest.json");
    for (const std::string& rel : r.emitted_files) {
      CHECK_MESSAGE(fs::exists(base / rel), rel);
    }

    const nlohmann::json manifest =
        nlohmann::json::parse(slurp(base / "manifest.json"));
    CHECK(manifest.contains("library"));
    CHECK(manifest.contains("version"));
    CHECK(manifest["config"]["study_id"] == "sim-weights");
    REQUIRE(manifest["files"].is_array());
    // The manifest describes every other emitted file and pins its content.
    CHECK(manifest["files"].size() == r.emitted_files.size() - 1);
    for (const auto& entry : manifest["files"]) {
      const std::string rel = entry["path"].get<std::string>();
      const std::string hash = entry["fnv1a64"].get<std::string>();
      REQUIRE(hash.size() == 16);
      const std::string content = slurp(base / rel);
      char buf[17];
      std::snprintf(buf, sizeof(buf), "%016llx",
                    static_cast<unsigned long long>(
                        fnv1a64(content.data(), content.size())));
      CHECK(hash == std::string(buf));
    }

    const std::string csv = slurp(base / "tables" / "weight_arms.csv");
    CHECK(csv.rfind("arm,a,t,origin,kappa_median,kappa_mean,s01_median",
                    0) == 0);
  }

  TEST_CASE("plot emission without a study tree") {
    TempDir dir("plots");
    StudyConfig c = tiny_check_config();
    const StudyResult r = run_study(c);

    const std::vector<std::string> csvs =
        emit_plot_data(r, PlotFormat::kCsv, dir.path.string());
    REQUIRE_FALSE(csvs.empty());
    for (const std::string& p : csvs) CHECK(fs::exists(p));

    const std::vector<std::string> svgs =
        emit_plot_data(r, PlotFormat::kSvg, dir.path.string());
    REQUIRE_FALSE(svgs.empty());
    for (const std::string& p : svgs) {
      CHECK(fs::exists(p));
      CHECK(slurp(p).rfind("<svg", 0) == 0);
    }
  }

  TEST_CASE("detection-time scan") {
    StudyResult r;
    r.fan_panels = {"p"};
    r.fans.push_back({"p", 10, 0.0, -0.1, 0.1, -0.2, 0.2});
    r.fans.push_back({"p", 30, 0.1, 0.0, 0.2, -0.05, 0.25});
    r.fans.push_back({"p", 90, 0.1, 0.05, 0.2, 0.01, 0.25});
    r.fans.push_back({"p", 270, 0.1, 0.05, 0.2, 0.02, 0.25});
    const auto hit = detection_time_scan(r, "p");
    REQUIRE(hit.has_value());
    CHECK(*hit == 90);

    r.fans[2].lo90 = -0.01;
    r.fans[3].lo90 = -0.02;
    CHECK_FALSE(detection_time_scan(r, "p").has_value());
    CHECK_THROWS_AS(detection_time_scan(r, "nope"), ParameterError);
  }

  TEST_CASE("configuration validation") {
    StudyConfig bad = tiny_check_config();
    bad.replications = 0;
    CHECK_THROWS_AS(run_study(bad), ParameterError);

    bad = tiny_check_config();
    bad.m = 1;
    CHECK_THROWS_AS(run_study(bad), ParameterError);

    bad = tiny_check_config();
    bad.threads = 0;
    CHECK_THROWS_AS(run_study(bad), ParameterError);

    StudyConfig sim1a = StudyConfig::defaults(StudyId::kSim1a);
    sim1a.simulator_alpha = 2.0;
    sim1a.simulator_beta = 2.0;
    CHECK_THROWS_AS(run_study(sim1a), ParameterError);
  }

  TEST_CASE("preset defaults") {
    const StudyConfig a = StudyConfig::defaults(StudyId::kSim1a);
    CHECK_FALSE(a.simulator_alpha.has_value());
    const StudyConfig b = StudyConfig::defaults(StudyId::kSim1b);
    REQUIRE(b.simulator_alpha.has_value());
    CHECK(*b.simulator_alpha == 1.2);
    CHECK(*b.simulator_beta == 1.2);
    CHECK(StudyConfig::defaults(StudyId::kSim3).replications == 2000);
  }

  TEST_CASE("string round-trips") {
    for (StudyId id : {StudyId::kSim1a, StudyId::kSim1b, StudyId::kSim3,
                       StudyId::kSimWeights, StudyId::kCustom}) {
      CHECK(study_id_from_string(to_string(id)) == id);
    }
    CHECK(study_id_from_string("sim_weights") == StudyId::kSimWeights);
    CHECK_THROWS_AS(study_id_from_string("sim9"), ParameterError);
    CHECK(plot_format_from_string("csv") == PlotFormat::kCsv);
    CHECK(plot_format_from_string("svg") == PlotFormat::kSvg);
    CHECK_THROWS_AS(plot_format_from_string("png"), FormatError);
  }
}
