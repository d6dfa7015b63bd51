/*
 * Copyright 2026 The Hearthcast Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Two-regime benchmark of the five model families.
//
// Regime A trains on the full training split, regime B on its inliers only.
// Both are scored on the same unfiltered test split. The legacy table is not
// trained and is identical in both regimes.

#ifndef HEARTHCAST_BENCH_HPP_
#define HEARTHCAST_BENCH_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hearthcast/baseline.hpp"
#include "hearthcast/constrained_tree.hpp"
#include "hearthcast/dataset.hpp"
#include "hearthcast/ensemble.hpp"
#include "hearthcast/metrics.hpp"
#include "hearthcast/synthgen.hpp"
#include "json.hpp"

namespace hearthcast {

struct BenchModel {
  std::string_view id;
  std::string_view display_name;
  ModelKind kind;
};

// Table column order.
inline constexpr std::array<BenchModel, 5> kBenchModels = {{
    {"legacy", "Legacy", ModelKind::kLegacy},
    {"gradient_boosting", "Gradient Boosting", ModelKind::kGradientBoosting},
    {"random_forest", "Random Forest", ModelKind::kRandomForest},
    {"linear_regression", "Linear Regression", ModelKind::kLinearRegression},
    {"new_tree", "New tree", ModelKind::kConstrainedTree},
}};

enum class Regime { kWithOutliers, kFiltered };

// "a" / "b".
std::string_view RegimeId(Regime regime);
// "with outliers" / "filtered".
std::string_view RegimeLabel(Regime regime);

struct BenchmarkSpec {
  // CSV input; when unset the synthetic generator is used.
  std::optional<std::filesystem::path> data_path;
  GeneratorConfig generator;
  // Master seed. Generator, split, forest and boosting seeds are derived
  // from it as DeriveSeed(seed, 1..4).
  std::uint64_t seed = 7;
  double test_fraction = 1.0 / 3.0;
  OutlierPolicy outliers;
  LegacyTable legacy = LegacyTable::Default();
  double ridge_epsilon = 1e-8;
  ForestConfig forest;
  BoostConfig boost;
  ConstrainedTreeConfig tree;
  LowConsumptionRule rule = LowConsumptionRule::Default();
  PriceConfig price;

  // Throws ConfigError.
  void Validate() const;
  nlohmann::json ToJson() const;
  // Missing keys keep their defaults; a relative data path is resolved
  // against `base_dir`.
  static BenchmarkSpec FromJson(const nlohmann::json& json,
                                const std::filesystem::path& base_dir = {});
};

struct ModelRegimeResult {
  std::string model;
  Regime regime = Regime::kWithOutliers;
  std::size_t train_size = 0;
  MetricsReport test;
  // Same metrics restricted to the inlier part of the test split.
  MetricsReport inlier_test;
  // RmsdDelta of this regime against regime A on the full test split.
  double rmsd_delta = 0.0;
  DistributionSummary absolute_gaps;
  // Absent when a test target is 0.
  std::optional<DistributionSummary> relative_gaps;
  DistributionSummary monetary_gaps;
  std::vector<double> predictions;

  bool operator==(const ModelRegimeResult&) const = default;
};

struct BenchmarkReport {
  nlohmann::json spec;
  std::uint64_t seed = 0;
  std::size_t dataset_size = 0;
  std::size_t train_size = 0;
  std::size_t train_inliers = 0;
  std::vector<double> test_targets;
  std::vector<bool> test_inlier;
  // kBenchModels order, regime A then B for each model.
  std::vector<ModelRegimeResult> results;
  // Regime A split-gain importance, keyed by model id.
  std::map<std::string, FeatureImportance> importance;
  std::vector<std::string> constrained_levels;

  const ModelRegimeResult& Find(std::string_view model, Regime regime) const;

  nlohmann::json ToJson() const;
  static BenchmarkReport FromJson(const nlohmann::json& json);

  bool operator==(const BenchmarkReport&) const = default;
};

// Throws ConfigError on an invalid spec and DataError when a training split
// is empty.
BenchmarkReport RunBenchmark(const BenchmarkSpec& spec);

enum class ReportFormat { kJson, kCsv, kAll };

// Writes the report bundle into `dir`:
//   report.json
//   metrics_regime_a.csv, metrics_regime_b.csv
//   gaps_{model}_{regime}.csv
//   importance_{model}.csv
// Throws ConfigError on an empty path and Error when writing fails.
void EmitReport(const BenchmarkReport& report, const std::filesystem::path& dir,
                ReportFormat format = ReportFormat::kAll);

// Metrics table of one regime: rows MSD, RMSD, MAD, MAE, RMSD difference (%).
std::string MetricsTableCsv(const BenchmarkReport& report, Regime regime);

}  // namespace hearthcast

#endif  // HEARTHCAST_BENCH_HPP_
