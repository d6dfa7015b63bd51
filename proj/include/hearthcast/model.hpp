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

// Common contract of every forecasting model and the versioned model file.
//
// Model file (JSON):
//   {
//     "format": "hearthcast-model",
//     "version": 1,
//     "kind": "legacy" | "linear_regression" | "cart" | "random_forest" |
//             "gradient_boosting" | "constrained_tree",
//     "schema": "household-v1",
//     ... kind-specific body ...
//   }
// Field names of each body are documented in docs/model_format.md.

#ifndef HEARTHCAST_MODEL_HPP_
#define HEARTHCAST_MODEL_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "hearthcast/household.hpp"
#include "json.hpp"

namespace hearthcast {

struct Dataset;

inline constexpr std::string_view kModelFormat = "hearthcast-model";
inline constexpr int kModelFormatVersion = 1;

enum class ModelKind {
  kLegacy,
  kLinearRegression,
  kCart,
  kRandomForest,
  kGradientBoosting,
  kConstrainedTree,
};

std::string_view ModelKindName(ModelKind kind);
std::optional<ModelKind> ParseModelKind(std::string_view name);

// Fitted models are immutable; Predict is const, deterministic and safe to
// call concurrently.
class ForecastModel {
 public:
  virtual ~ForecastModel() = default;

  virtual ModelKind kind() const = 0;
  // Annual consumption in kWh. The record is assumed valid.
  virtual double Predict(const HouseholdRecord& record) const = 0;
  // Kind-specific part of the model file.
  virtual nlohmann::json Body() const = 0;
};

nlohmann::json ModelToJson(const ForecastModel& model);
std::unique_ptr<ForecastModel> ModelFromJson(const nlohmann::json& json);

std::string SerializeModel(const ForecastModel& model);
// Throws ModelError on malformed or unsupported files.
std::unique_ptr<ForecastModel> DeserializeModel(std::string_view text);

void SaveModel(const ForecastModel& model, const std::filesystem::path& path);
std::unique_ptr<ForecastModel> LoadModel(const std::filesystem::path& path);

// Validates the record and dispatches to the model. Throws ModelError when
// `model` is null (unfitted) and DataError on an invalid record.
double ModelPredict(const ForecastModel* model, const HouseholdRecord& record);

// Fits a model of `kind` from a per-kind config object. Unknown keys are
// ignored; "low_consumption_rule" applies to every learned kind and
// "legacy_table" replaces the default legacy table. `seed` overrides the
// configured seed of cart, random_forest and gradient_boosting.
std::unique_ptr<ForecastModel> TrainModel(
    ModelKind kind, const Dataset& train,
    const nlohmann::json& config = nlohmann::json::object(),
    std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace hearthcast

#endif  // HEARTHCAST_MODEL_HPP_
