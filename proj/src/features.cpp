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

#include "hearthcast/features.hpp"

#include <string>
#include <utility>

#include "hearthcast/errors.hpp"

namespace hearthcast {
namespace {

template <typename E>
ColumnSpec CategoricalSpec(std::string name) {
  ColumnSpec spec{std::move(name), true, {}};
  for (auto n : CategoryTraits<E>::kNames) spec.categories.emplace_back(n);
  return spec;
}

enum class FieldKind { kNumeric, kCategorical, kUnknown };

FieldKind KindOfField(std::string_view field) {
  if (field == "surface_m2" || field == "occupants" ||
      field == "max_power_kva") {
    return FieldKind::kNumeric;
  }
  if (field == "heating_type" || field == "water_heating_type" ||
      field == "cooking_type" || field == "house_type" ||
      field == "tariff_index") {
    return FieldKind::kCategorical;
  }
  return FieldKind::kUnknown;
}

template <typename E>
bool IsCategoryOf(const std::string& name) {
  return ParseCategory<E>(name).has_value();
}

bool IsValidCategory(std::string_view field, const std::string& name) {
  if (field == "heating_type") return IsCategoryOf<HeatingType>(name);
  if (field == "water_heating_type") return IsCategoryOf<WaterHeatingType>(name);
  if (field == "cooking_type") return IsCategoryOf<CookingType>(name);
  if (field == "house_type") return IsCategoryOf<HouseType>(name);
  return IsCategoryOf<TariffIndex>(name);
}

double NumericValue(const HouseholdRecord& r, std::string_view field) {
  if (field == "surface_m2") return r.surface_m2;
  if (field == "occupants") return r.occupants;
  return r.max_power_kva;
}

std::string_view CategoricalValue(const HouseholdRecord& r,
                                  std::string_view field) {
  if (field == "heating_type") return CategoryName(r.heating_type);
  if (field == "water_heating_type") return CategoryName(r.water_heating_type);
  if (field == "cooking_type") return CategoryName(r.cooking_type);
  if (field == "house_type") return CategoryName(r.house_type);
  return CategoryName(r.tariff_index);
}

constexpr std::pair<RuleClause::Op, std::string_view> kOps[] = {
    {RuleClause::Op::kEq, "=="}, {RuleClause::Op::kNe, "!="},
    {RuleClause::Op::kLt, "<"},  {RuleClause::Op::kLe, "<="},
    {RuleClause::Op::kGt, ">"},  {RuleClause::Op::kGe, ">="},
};

}  // namespace

const std::vector<ColumnSpec>& HouseholdSchema() {
  static const std::vector<ColumnSpec> schema = {
      {"surface", false, {}},
      CategoricalSpec<HeatingType>("heating_type"),
      CategoricalSpec<WaterHeatingType>("water_heating_type"),
      CategoricalSpec<CookingType>("cooking_type"),
      {"occupants", false, {}},
      CategoricalSpec<HouseType>("house_type"),
      CategoricalSpec<TariffIndex>("tariff_index"),
      {"max_power", false, {}},
      {"low_consumption", false, {}},
  };
  return schema;
}

std::string_view SlotName(Slot slot) {
  return HouseholdSchema()[static_cast<std::size_t>(slot)].name;
}

std::optional<Slot> SlotByName(std::string_view name) {
  const auto& schema = HouseholdSchema();
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (schema[i].name == name) return static_cast<Slot>(i);
  }
  return std::nullopt;
}

nlohmann::json HouseholdSchemaJson() {
  nlohmann::json slots = nlohmann::json::array();
  const auto& schema = HouseholdSchema();
  for (std::size_t i = 0; i < schema.size(); ++i) {
    nlohmann::json slot = {{"slot", i},
                           {"name", schema[i].name},
                           {"type", schema[i].categorical ? "categorical"
                                                          : "numeric"}};
    if (schema[i].categorical) {
      nlohmann::json codes = nlohmann::json::object();
      for (std::size_t c = 0; c < schema[i].categories.size(); ++c) {
        codes[schema[i].categories[c]] = c;
      }
      slot["codes"] = codes;
    }
    slots.push_back(slot);
  }
  return {{"schema_version", "household-v1"}, {"slots", slots}};
}

std::string_view OpSymbol(RuleClause::Op op) {
  for (const auto& [o, symbol] : kOps) {
    if (o == op) return symbol;
  }
  return "?";
}

LowConsumptionRule::LowConsumptionRule(std::vector<RuleClause> clauses)
    : clauses_(std::move(clauses)) {
  for (const auto& c : clauses_) {
    switch (KindOfField(c.field)) {
      case FieldKind::kUnknown:
        throw ConfigError("low-consumption rule: unknown field '" + c.field +
                          "'");
      case FieldKind::kNumeric:
        if (!std::holds_alternative<double>(c.value)) {
          throw ConfigError("low-consumption rule: field '" + c.field +
                            "' needs a numeric value");
        }
        break;
      case FieldKind::kCategorical:
        if (!std::holds_alternative<std::string>(c.value) ||
            !IsValidCategory(c.field, std::get<std::string>(c.value))) {
          throw ConfigError("low-consumption rule: invalid category for '" +
                            c.field + "'");
        }
        if (c.op != RuleClause::Op::kEq && c.op != RuleClause::Op::kNe) {
          throw ConfigError("low-consumption rule: categorical field '" +
                            c.field + "' supports only == and !=");
        }
        break;
    }
  }
}

LowConsumptionRule LowConsumptionRule::Default() {
  using Op = RuleClause::Op;
  return LowConsumptionRule({
      {"heating_type", Op::kNe, std::string("electric")},
      {"water_heating_type", Op::kNe, std::string("electric")},
      {"occupants", Op::kLe, 2.0},
      {"surface_m2", Op::kLe, 50.0},
  });
}

bool LowConsumptionRule::Evaluate(const HouseholdRecord& record) const {
  using Op = RuleClause::Op;
  for (const auto& c : clauses_) {
    bool holds = false;
    if (const auto* target = std::get_if<std::string>(&c.value)) {
      const bool equal = CategoricalValue(record, c.field) == *target;
      holds = (c.op == Op::kEq) == equal;
    } else {
      const double v = NumericValue(record, c.field);
      const double t = std::get<double>(c.value);
      switch (c.op) {
        case Op::kEq: holds = v == t; break;
        case Op::kNe: holds = v != t; break;
        case Op::kLt: holds = v < t; break;
        case Op::kLe: holds = v <= t; break;
        case Op::kGt: holds = v > t; break;
        case Op::kGe: holds = v >= t; break;
      }
    }
    if (!holds) return false;
  }
  return true;
}

nlohmann::json LowConsumptionRule::ToJson() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : clauses_) {
    nlohmann::json clause = {{"field", c.field}, {"op", OpSymbol(c.op)}};
    std::visit([&](const auto& v) { clause["value"] = v; }, c.value);
    out.push_back(clause);
  }
  return out;
}

LowConsumptionRule LowConsumptionRule::FromJson(const nlohmann::json& json) {
  if (!json.is_array()) {
    throw ConfigError("low-consumption rule must be a JSON array of clauses");
  }
  std::vector<RuleClause> clauses;
  for (const auto& item : json) {
    if (!item.is_object() || !item.contains("field") || !item.contains("op") ||
        !item.contains("value")) {
      throw ConfigError("rule clause needs field, op and value");
    }
    RuleClause clause;
    clause.field = item["field"].get<std::string>();
    const auto symbol = item["op"].get<std::string>();
    bool found = false;
    for (const auto& [op, s] : kOps) {
      if (s == symbol) {
        clause.op = op;
        found = true;
      }
    }
    if (!found) throw ConfigError("unknown rule operator '" + symbol + "'");
    if (item["value"].is_number()) {
      clause.value = item["value"].get<double>();
    } else if (item["value"].is_string()) {
      clause.value = item["value"].get<std::string>();
    } else {
      throw ConfigError("rule value must be a number or a string");
    }
    clauses.push_back(std::move(clause));
  }
  return LowConsumptionRule(std::move(clauses));
}

FeatureVector Encode(const HouseholdRecord& record,
                     const LowConsumptionRule& rule) {
  FeatureVector v{};
  v[SlotIndex(Slot::kSurface)] = record.surface_m2;
  v[SlotIndex(Slot::kHeatingType)] = CategoryCode(record.heating_type);
  v[SlotIndex(Slot::kWaterHeatingType)] =
      CategoryCode(record.water_heating_type);
  v[SlotIndex(Slot::kCookingType)] = CategoryCode(record.cooking_type);
  v[SlotIndex(Slot::kOccupants)] = record.occupants;
  v[SlotIndex(Slot::kHouseType)] = CategoryCode(record.house_type);
  v[SlotIndex(Slot::kTariffIndex)] = CategoryCode(record.tariff_index);
  v[SlotIndex(Slot::kMaxPower)] = record.max_power_kva;
  v[SlotIndex(Slot::kLowConsumption)] = rule.Evaluate(record) ? 1.0 : 0.0;
  return v;
}

}  // namespace hearthcast
