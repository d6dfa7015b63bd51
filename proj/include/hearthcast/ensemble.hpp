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

// Random forest and gradient boosting over CartTree base learners.

#ifndef HEARTHCAST_ENSEMBLE_HPP_
#define HEARTHCAST_ENSEMBLE_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hearthcast/cart.hpp"
#include "hearthcast/dataset.hpp"
#include "hearthcast/features.hpp"
#include "hearthcast/model.hpp"

namespace hearthcast {

struct ForestConfig {
  // Sentinel for "all columns at every split".
  static constexpr std::size_t kAllFeatures =
      std::numeric_limits<std::size_t>::max();

  std::size_t n_trees = 200;
  bool bootstrap = true;
  // 0 means ceil(sqrt(columns)).
  std::size_t features_per_split = 0;
  int max_depth = 16;
  std::size_t min_leaf = 5;
  std::uint64_t seed = 0;
  // Worker threads for tree construction; 0 uses the hardware concurrency.
  // Results do not depend on it and it is not serialized.
  unsigned n_threads = 0;

  void Validate(std::size_t num_columns) const;
  std::size_t ResolvedFeaturesPerSplit(std::size_t num_columns) const;
  nlohmann::json ToJson() const;
  static ForestConfig FromJson(const nlohmann::json& json);
};

struct BoostConfig {
  std::size_t n_stages = 300;
  double learning_rate = 0.1;
  int max_depth = 3;
  std::size_t min_leaf = 10;
  std::uint64_t seed = 0;

  void Validate() const;
  nlohmann::json ToJson() const;
  static BoostConfig FromJson(const nlohmann::json& json);
};

// Tree t is grown from the stream DeriveSeed(config.seed, t): its first child
// stream draws the bootstrap sample, its second samples split columns. Trees
// are therefore independent of construction order.
class Forest {
 public:
  static Forest Fit(const FeatureMatrix& matrix,
                    std::span<const double> targets,
                    const ForestConfig& config);

  // Mean of the tree predictions.
  double Predict(std::span<const double> features) const;

  std::vector<CartTree>& trees() { return trees_; }
  const std::vector<CartTree>& trees() const { return trees_; }

 private:
  std::vector<CartTree> trees_;
};

// F0 = mean(y); stage m fits a tree to y - F_{m-1} and
// F_m = F_{m-1} + learning_rate * h_m.
class BoostedEnsemble {
 public:
  // When `training_mse` is non-null it receives the training MSE of F_0..F_M.
  static BoostedEnsemble Fit(const FeatureMatrix& matrix,
                             std::span<const double> targets,
                             const BoostConfig& config,
                             std::vector<double>* training_mse = nullptr);

  // F0 + learning_rate * sum of stage predictions.
  double Predict(std::span<const double> features) const;

  double base() const { return base_; }
  double learning_rate() const { return learning_rate_; }
  const std::vector<CartTree>& stages() const { return stages_; }

  BoostedEnsemble() = default;
  BoostedEnsemble(double base, double learning_rate,
                  std::vector<CartTree> stages)
      : base_(base), learning_rate_(learning_rate), stages_(std::move(stages)) {}

 private:
  double base_ = 0.0;
  double learning_rate_ = 0.1;
  std::vector<CartTree> stages_;
};

// Normalized split-gain importance per column.
struct FeatureImportance {
  std::vector<std::string> names;
  std::vector<double> weights;  // Sum to 1, or all zero without splits.

  // (name, weight) sorted by descending weight, ties by column order.
  std::vector<std::pair<std::string, double>> Ranked() const;
  // "slot_name,weight" CSV in Ranked() order.
  std::string ToCsv() const;

  bool operator==(const FeatureImportance&) const = default;
};

FeatureImportance ImportanceFromTrees(std::span<const CartTree> trees,
                                      std::span<const ColumnSpec> specs);

class ForestModel final : public ForecastModel {
 public:
  ForestModel(Forest forest, ForestConfig config, LowConsumptionRule rule);

  static std::unique_ptr<ForestModel> Fit(
      const Dataset& train, const ForestConfig& config,
      const LowConsumptionRule& rule = LowConsumptionRule::Default());

  ModelKind kind() const override { return ModelKind::kRandomForest; }
  double Predict(const HouseholdRecord& record) const override;
  nlohmann::json Body() const override;
  static std::unique_ptr<ForestModel> FromBody(const nlohmann::json& body);

  FeatureImportance Importance() const;
  const Forest& forest() const { return forest_; }

 private:
  Forest forest_;
  ForestConfig config_;
  LowConsumptionRule rule_;
};

class BoostedModel final : public ForecastModel {
 public:
  BoostedModel(BoostedEnsemble ensemble, BoostConfig config,
               LowConsumptionRule rule);

  static std::unique_ptr<BoostedModel> Fit(
      const Dataset& train, const BoostConfig& config,
      const LowConsumptionRule& rule = LowConsumptionRule::Default());

  ModelKind kind() const override { return ModelKind::kGradientBoosting; }
  double Predict(const HouseholdRecord& record) const override;
  nlohmann::json Body() const override;
  static std::unique_ptr<BoostedModel> FromBody(const nlohmann::json& body);

  FeatureImportance Importance() const;
  const BoostedEnsemble& ensemble() const { return ensemble_; }

 private:
  BoostedEnsemble ensemble_;
  BoostConfig config_;
  LowConsumptionRule rule_;
};

}  // namespace hearthcast

#endif  // HEARTHCAST_ENSEMBLE_HPP_
