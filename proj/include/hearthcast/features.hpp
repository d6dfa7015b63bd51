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

// Numeric encoding of household records.
//
// A FeatureVector has one slot per predictor plus the derived low-consumption
// flag. Categorical slots carry the category code (alphabetical rank).
// reading_days describes the metering window, not the household, and is not a
// predictor.

#ifndef HEARTHCAST_FEATURES_HPP_
#define HEARTHCAST_FEATURES_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hearthcast/household.hpp"
#include "json.hpp"

namespace hearthcast {

enum class Slot : int {
  kSurface = 0,
  kHeatingType,
  kWaterHeatingType,
  kCookingType,
  kOccupants,
  kHouseType,
  kTariffIndex,
  kMaxPower,
  kLowConsumption,
};

inline constexpr std::size_t kNumSlots = 9;

using FeatureVector = std::array<double, kNumSlots>;

constexpr int SlotIndex(Slot slot) { return static_cast<int>(slot); }

// Describes one column of a feature matrix.
struct ColumnSpec {
  std::string name;
  bool categorical = false;
  // Category names indexed by code; empty for numeric columns.
  std::vector<std::string> categories;

  bool operator==(const ColumnSpec&) const = default;
};

// The published household feature schema, in slot order.
const std::vector<ColumnSpec>& HouseholdSchema();

std::string_view SlotName(Slot slot);
std::optional<Slot> SlotByName(std::string_view name);

// Schema with code tables, as shipped in config/feature_schema.json.
nlohmann::json HouseholdSchemaJson();

// One clause of a LowConsumptionRule: `field op value`.
// Numeric fields: surface_m2, occupants, max_power_kva.
// Categorical fields accept only == and !=.
struct RuleClause {
  enum class Op { kEq, kNe, kLt, kLe, kGt, kGe };

  std::string field;
  Op op = Op::kEq;
  std::variant<double, std::string> value;

  bool operator==(const RuleClause&) const = default;
};

// Conjunction of clauses flagging a low-consumption profile.
class LowConsumptionRule {
 public:
  LowConsumptionRule() = default;
  // Throws ConfigError on unknown fields, operators or category values.
  explicit LowConsumptionRule(std::vector<RuleClause> clauses);

  // heating_type != electric AND water_heating_type != electric AND
  // occupants <= 2 AND surface_m2 <= 50.
  static LowConsumptionRule Default();

  bool Evaluate(const HouseholdRecord& record) const;

  const std::vector<RuleClause>& clauses() const { return clauses_; }

  // [{"field": ..., "op": "<=", "value": ...}, ...]
  nlohmann::json ToJson() const;
  static LowConsumptionRule FromJson(const nlohmann::json& json);

  bool operator==(const LowConsumptionRule&) const = default;

 private:
  std::vector<RuleClause> clauses_;
};

std::string_view OpSymbol(RuleClause::Op op);

FeatureVector Encode(const HouseholdRecord& record,
                     const LowConsumptionRule& rule);

}  // namespace hearthcast

#endif  // HEARTHCAST_FEATURES_HPP_
