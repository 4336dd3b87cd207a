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

#ifndef HALFORD_HARNESS_HPP
#define HALFORD_HARNESS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "halford/weights.hpp"

namespace halford {

enum class StudyId {
  kSim1a,       ///< correct-specification check study on binomial pairs
  kSim1b,       ///< same layout with a mismatched side-1 simulator
  kSim3,        ///< ratio-estimator comparison on BetaUnit pairs
  kSimWeights,  ///< weight-degeneracy stress arms
  kCustom,      ///< check study with caller-supplied knobs
};

/// Full description of one study run. Study-specific fields are ignored by
/// the studies that do not use them; defaults(id) fills the preset shapes.
struct StudyConfig {
  StudyId study_id = StudyId::kSim1a;
  std::int64_t replications = 500;
  std::int64_t m = 2000;  ///< per-side draw budget for check studies
  std::vector<std::int64_t> n_list = {10, 50, 100};
  std::vector<double> exponents = {0.5, 1.0, 2.0};
  std::optional<double> simulator_alpha;  ///< side-1 simulator prior shape
  std::optional<double> simulator_beta;
  std::vector<double> a_list = {0.5, 3.0};
  std::int64_t bridge_m = 1000;  ///< per-side budget of the bridge arm
  std::int64_t weights_n = 2000;
  std::uint64_t root_seed = 1;
  std::string out_dir;  ///< empty: compute only, write nothing
  int threads = 1;
  bool emit_svg = true;
  std::int64_t fan_points = 30;

  static StudyConfig defaults(StudyId id);
};

/// One table cell of a check study: replication Mean/SD of the discrepancy
/// plus the stability counters that make overflow regimes reportable.
struct CheckCell {
  std::string row;
  std::string column;
  double mean = 0.0;
  std::optional<double> sd;  ///< absent when replications == 1
  std::int64_t tail_events = 0;
  std::int64_t overflow_runs = 0;
  /// Orders of magnitude spanned by the per-draw transform magnitudes
  /// across the cell's replications (one-sided cells; 0 for two-sided).
  double span_log10 = 0.0;
  std::int64_t replications = 0;
};

struct FanBand {
  std::string panel;
  std::int64_t m = 0;
  double mean = 0.0;
  double lo50 = 0.0;
  double hi50 = 0.0;
  double lo90 = 0.0;
  double hi90 = 0.0;
};

struct BridgeArmSummary {
  std::string arm;
  double a = 0.0;
  std::string estimator;  ///< "bridge" | "forward" | "reverse"
  double sd_log_r = 0.0;  ///< natural-log scale
  std::optional<double> predicted_rsd;  ///< bridge arm only
  double p01_log10 = 0.0;
  double p99_log10 = 0.0;
  double mean_log10 = 0.0;
  double median_log10 = 0.0;
  std::int64_t tail_events = 0;
};

struct WeightArmSummary {
  std::string arm;
  double a = 0.0;
  double t = 0.0;
  WeightOrigin origin = WeightOrigin::kProposalSide;
  double kappa_median = 0.0;
  double kappa_mean = 0.0;
  double s01_median = 0.0;
};

struct LorenzBand {
  std::string arm;
  double p = 0.0;
  double median = 0.0;
  double lo10 = 0.0;
  double hi90 = 0.0;
};

struct HistRow {
  std::string arm;
  double lo = 0.0;
  double hi = 0.0;
  std::int64_t count = 0;
};

struct StudyResult {
  StudyConfig config;
  std::vector<CheckCell> cells;
  std::vector<std::string> fan_panels;
  std::vector<FanBand> fans;  ///< grouped by panel, m ascending
  std::map<std::string, std::optional<std::int64_t>> detection_time;
  std::vector<BridgeArmSummary> bridge_arms;
  std::vector<WeightArmSummary> weight_arms;
  std::vector<LorenzBand> lorenz_bands;
  std::vector<HistRow> histograms;
  double runtime_seconds = 0.0;
  std::vector<std::string> emitted_files;  ///< relative to the study dir
};

/// Runs the configured study: replications seeded independently off the
/// root seed, aggregation in replication-index order (thread-count
/// independent), file tree written when out_dir is set.
StudyResult run_study(const StudyConfig& config);

/// First fan-grid m at which the panel's central 90% band excludes zero.
std::optional<std::int64_t> detection_time_scan(const StudyResult& result,
                                                const std::string& panel);

enum class PlotFormat { kCsv, kSvg };

/// Writes the result's plottable series (fan bands, Lorenz bands,
/// histograms) into out_dir; returns the created file paths.
std::vector<std::string> emit_plot_data(const StudyResult& result,
                                        PlotFormat format,
                                        const std::string& out_dir);

PlotFormat plot_format_from_string(const std::string& s);
const char* to_string(StudyId id);
StudyId study_id_from_string(const std::string& s);

}  // namespace halford

#endif  // HALFORD_HARNESS_HPP
