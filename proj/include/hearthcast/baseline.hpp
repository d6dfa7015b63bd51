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

// Comparison models: the legacy lookup table, ridge-stabilized ordinary least
// squares, and the CART regression tree.

#ifndef HEARTHCAST_BASELINE_HPP_
#define HEARTHCAST_BASELINE_HPP_

#include <optional>
#include <span>
#include <vector>

#include "hearthcast/cart.hpp"
#include "hearthcast/dataset.hpp"
#include "hearthcast/features.hpp"
#include "hearthcast/model.hpp"

namespace hearthcast {

// One band of the legacy table. Occupant bands are closed integer ranges;
// surface bands are (surface_min, surface_max], so a surface exactly on an
// edge belongs to the lower band. A missing maximum means unbounded.
struct LegacyEntry {
  HeatingType heating_type = HeatingType::kElectric;
  int occupants_min = 1;
  std::optional<int> occupants_max;
  double surface_min = 0.0;
  std::optional<double> surface_max;
  double car_kwh = 0.0;

  bool operator==(const LegacyEntry&) const = default;
};

class LegacyTable {
 public:
  // Throws ConfigError unless, for every heating type, the occupant bands tile
  // [1, inf) and each occupant band's surface bands tile (0, inf).
  explicit LegacyTable(std::vector<LegacyEntry> entries);

  // Coarse table deliberately biased upwards. Non-normative.
  static LegacyTable Default();

  const LegacyEntry& Lookup(const HouseholdRecord& record) const;
  const std::vector<LegacyEntry>& entries() const { return entries_; }

  // JSON array of band entries.
  nlohmann::json ToJson() const;
  static LegacyTable FromJson(const nlohmann::json& json);

  bool operator==(const LegacyTable&) const = default;

 private:
  std::vector<LegacyEntry> entries_;
};

class LegacyModel final : public ForecastModel {
 public:
  explicit LegacyModel(LegacyTable table) : table_(std::move(table)) {}

  ModelKind kind() const override { return ModelKind::kLegacy; }
  double Predict(const HouseholdRecord& record) const override {
    return table_.Lookup(record).car_kwh;
  }
  nlohmann::json Body() const override;
  static std::unique_ptr<LegacyModel> FromBody(const nlohmann::json& body);

  const LegacyTable& table() const { return table_; }

 private:
  LegacyTable table_;
};

struct LinearFit {
  double intercept = 0.0;
  std::vector<double> coefficients;
};

// Minimizes sum (y - b0 - w.x)^2 + ridge_epsilon * |w|^2 through the normal
// equations on centered columns; the intercept is not penalized.
LinearFit FitOls(const FeatureMatrix& matrix, std::span<const double> targets,
                 double ridge_epsilon = 1e-8);

class LinearModel final : public ForecastModel {
 public:
  LinearModel(LinearFit fit, double ridge_epsilon, LowConsumptionRule rule);

  static std::unique_ptr<LinearModel> Fit(
      const Dataset& train, double ridge_epsilon = 1e-8,
      const LowConsumptionRule& rule = LowConsumptionRule::Default());

  ModelKind kind() const override { return ModelKind::kLinearRegression; }
  double Predict(const HouseholdRecord& record) const override;
  nlohmann::json Body() const override;
  static std::unique_ptr<LinearModel> FromBody(const nlohmann::json& body);

  double intercept() const { return fit_.intercept; }
  const std::vector<double>& coefficients() const { return fit_.coefficients; }

 private:
  LinearFit fit_;
  double ridge_epsilon_;
  LowConsumptionRule rule_;
};

class CartModel final : public ForecastModel {
 public:
  CartModel(CartTree tree, CartConfig config, LowConsumptionRule rule);

  // Throws DataError on an empty training set.
  static std::unique_ptr<CartModel> Fit(
      const Dataset& train, const CartConfig& config,
      const LowConsumptionRule& rule = LowConsumptionRule::Default());

  ModelKind kind() const override { return ModelKind::kCart; }
  double Predict(const HouseholdRecord& record) const override;
  nlohmann::json Body() const override;
  static std::unique_ptr<CartModel> FromBody(const nlohmann::json& body);

  const CartTree& tree() const { return tree_; }

 private:
  CartTree tree_;
  CartConfig config_;
  LowConsumptionRule rule_;
};

}  // namespace hearthcast

#endif  // HEARTHCAST_BASELINE_HPP_
