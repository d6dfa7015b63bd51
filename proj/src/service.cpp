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

#include "hearthcast/service.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include <fmt/format.h>

#include "hearthcast/constrained_tree.hpp"
#include "hearthcast/dataset.hpp"
#include "hearthcast/errors.hpp"

namespace hearthcast {
namespace {

const nlohmann::json& Field(const nlohmann::json& json, const char* name) {
  const auto it = json.find(name);
  if (it == json.end() || it->is_null()) {
    throw DataError(fmt::format("missing field: {}", name));
  }
  return *it;
}

double NumberField(const nlohmann::json& json, const char* name) {
  const auto& v = Field(json, name);
  if (!v.is_number()) throw DataError(fmt::format("non-numeric field: {}", name));
  return v.get<double>();
}

int IntegerField(const nlohmann::json& json, const char* name) {
  const double v = NumberField(json, name);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw DataError(fmt::format("invalid value: {} must be an integer", name));
  }
  return static_cast<int>(v);
}

template <typename E>
E CategoryField(const nlohmann::json& json) {
  const char* name = CategoryTraits<E>::kField.data();
  const auto& v = Field(json, name);
  if (!v.is_string()) {
    throw DataError(fmt::format("invalid value: {} must be a string", name));
  }
  const auto parsed = ParseCategory<E>(v.get<std::string>());
  if (!parsed) {
    throw DataError(fmt::format("unknown category: {}={}", name,
                                v.get<std::string>()));
  }
  return *parsed;
}

struct ParsedBody {
  std::optional<HouseholdRecord> record;
  std::optional<ApiResponse> error;
};

ApiResponse ErrorResponse(int status, std::string message) {
  return {status, {{"error", std::move(message)}}};
}

ParsedBody ParseHousehold(std::string_view body) {
  nlohmann::json json;
  try {
    json = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    return {std::nullopt, ErrorResponse(400, std::string("malformed JSON: ") + e.what())};
  }
  if (!json.is_object()) {
    return {std::nullopt, ErrorResponse(400, "body must be a JSON object")};
  }
  try {
    return {RecordFromJson(json), std::nullopt};
  } catch (const DataError& e) {
    return {std::nullopt, ErrorResponse(422, e.what())};
  }
}

}  // namespace

PriceConfig PriceFromEnvironment(PriceConfig base) {
  const char* raw = std::getenv(std::string(kUnitPriceEnv).c_str());
  if (raw == nullptr || *raw == '\0') return base;
  const std::string_view text(raw);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(fmt::format("{} is not a number: '{}'", kUnitPriceEnv, text));
  }
  base.unit_price = value;
  base.Validate();
  return base;
}

double MonthlyInstallment(double car_kwh, const PriceConfig& price) {
  const double monthly = car_kwh * price.unit_price / 12.0;
  return std::floor(monthly * 100.0 + 0.5) / 100.0;
}

HouseholdRecord RecordFromJson(const nlohmann::json& json) {
  if (!json.is_object()) throw DataError("household must be a JSON object");
  HouseholdRecord r;
  r.surface_m2 = NumberField(json, "surface_m2");
  r.heating_type = CategoryField<HeatingType>(json);
  r.water_heating_type = CategoryField<WaterHeatingType>(json);
  r.cooking_type = CategoryField<CookingType>(json);
  r.occupants = IntegerField(json, "occupants");
  r.house_type = CategoryField<HouseType>(json);
  r.tariff_index = CategoryField<TariffIndex>(json);
  r.max_power_kva = IntegerField(json, "max_power_kva");
  r.reading_days = 0;
  if (json.contains("reading_days") && !json.at("reading_days").is_null()) {
    r.reading_days = IntegerField(json, "reading_days");
  }
  ValidateRecord(r);
  return r;
}

nlohmann::json RecordToJson(const HouseholdRecord& r) {
  return {{"surface_m2", r.surface_m2},
          {"heating_type", CategoryName(r.heating_type)},
          {"water_heating_type", CategoryName(r.water_heating_type)},
          {"cooking_type", CategoryName(r.cooking_type)},
          {"occupants", r.occupants},
          {"house_type", CategoryName(r.house_type)},
          {"tariff_index", CategoryName(r.tariff_index)},
          {"max_power_kva", r.max_power_kva},
          {"reading_days", r.reading_days}};
}

ModelHolder::ModelHolder(std::shared_ptr<const ServeState> state)
    : state_(std::move(state)) {}

std::shared_ptr<const ServeState> ModelHolder::Get() const {
  std::lock_guard lock(mutex_);
  return state_;
}

void ModelHolder::Set(std::shared_ptr<const ServeState> state) {
  std::lock_guard lock(mutex_);
  state_ = std::move(state);
}

void ModelHolder::Reload() {
  const auto current = Get();
  Set(LoadServeState(current->model_path, current->price));
}

std::shared_ptr<const ServeState> LoadServeState(
    const std::filesystem::path& model_path, const PriceConfig& price) {
  auto state = std::make_shared<ServeState>();
  state->model = LoadModel(model_path);
  state->price = price;
  state->model_path = model_path;
  return state;
}

nlohmann::json PredictionJson(const ForecastModel& model,
                              const HouseholdRecord& record,
                              const PriceConfig& price) {
  const double car = ModelPredict(&model, record);
  return {{"car_kwh", car},
          {"monthly_installment_eur", MonthlyInstallment(car, price)}};
}

nlohmann::json ExplanationJson(const ConstrainedTreeModel& model,
                               const HouseholdRecord& record,
                               const PriceConfig& price) {
  ValidateRecord(record);
  const ExplanationTrace trace = model.Explain(record);
  return {{"car_kwh", trace.prediction},
          {"monthly_installment_eur", MonthlyInstallment(trace.prediction, price)},
          {"trace", trace.ToJson()},
          {"text", trace.Text()}};
}

ApiResponse HandlePredict(const ServeState& state, std::string_view body) {
  auto parsed = ParseHousehold(body);
  if (parsed.error) return *parsed.error;
  return {200, PredictionJson(*state.model, *parsed.record, state.price)};
}

ApiResponse HandleExplain(const ServeState& state, std::string_view body) {
  const auto* tree = dynamic_cast<const ConstrainedTreeModel*>(state.model.get());
  if (tree == nullptr) {
    return ErrorResponse(
        409, fmt::format("model kind '{}' does not produce explanations",
                         ModelKindName(state.model->kind())));
  }
  auto parsed = ParseHousehold(body);
  if (parsed.error) return *parsed.error;
  return {200, ExplanationJson(*tree, *parsed.record, state.price)};
}

ApiResponse HandleModelInfo(const ServeState& state) {
  return {200,
          {{"kind", ModelKindName(state.model->kind())},
           {"version", kModelFormatVersion},
           {"schema", kSchemaVersion},
           {"format", kModelFormat}}};
}

}  // namespace hearthcast
