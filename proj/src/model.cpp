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

#include "hearthcast/model.hpp"

#include <array>
#include <fstream>
#include <sstream>
#include <utility>

#include <fmt/format.h>

#include "hearthcast/baseline.hpp"
#include "hearthcast/constrained_tree.hpp"
#include "hearthcast/dataset.hpp"
#include "hearthcast/ensemble.hpp"
#include "hearthcast/errors.hpp"

namespace hearthcast {
namespace {

constexpr std::array<std::pair<ModelKind, std::string_view>, 6> kKindNames = {{
    {ModelKind::kLegacy, "legacy"},
    {ModelKind::kLinearRegression, "linear_regression"},
    {ModelKind::kCart, "cart"},
    {ModelKind::kRandomForest, "random_forest"},
    {ModelKind::kGradientBoosting, "gradient_boosting"},
    {ModelKind::kConstrainedTree, "constrained_tree"},
}};

std::unique_ptr<ForecastModel> BodyToModel(ModelKind kind,
                                           const nlohmann::json& body) {
  switch (kind) {
    case ModelKind::kLegacy: return LegacyModel::FromBody(body);
    case ModelKind::kLinearRegression: return LinearModel::FromBody(body);
    case ModelKind::kCart: return CartModel::FromBody(body);
    case ModelKind::kRandomForest: return ForestModel::FromBody(body);
    case ModelKind::kGradientBoosting: return BoostedModel::FromBody(body);
    case ModelKind::kConstrainedTree: return ConstrainedTreeModel::FromBody(body);
  }
  throw ModelError("unsupported model kind");
}

LowConsumptionRule RuleFromConfig(const nlohmann::json& config) {
  if (config.is_object() && config.contains("low_consumption_rule")) {
    return LowConsumptionRule::FromJson(config.at("low_consumption_rule"));
  }
  return LowConsumptionRule::Default();
}

std::unique_ptr<ForecastModel> TrainModelUnchecked(
    ModelKind kind, const Dataset& train, const nlohmann::json& config,
    std::optional<std::uint64_t> seed) {
  if (!config.is_object()) throw ConfigError("model config must be an object");
  const LowConsumptionRule rule = RuleFromConfig(config);
  switch (kind) {
    case ModelKind::kLegacy:
      if (config.contains("legacy_table")) {
        return std::make_unique<LegacyModel>(
            LegacyTable::FromJson(config.at("legacy_table")));
      }
      return std::make_unique<LegacyModel>(LegacyTable::Default());
    case ModelKind::kLinearRegression:
      return LinearModel::Fit(train, config.value("ridge_epsilon", 1e-8), rule);
    case ModelKind::kCart: {
      auto c = CartConfig::FromJson(config);
      if (seed) c.seed = *seed;
      return CartModel::Fit(train, c, rule);
    }
    case ModelKind::kRandomForest: {
      auto c = ForestConfig::FromJson(config);
      if (seed) c.seed = *seed;
      return ForestModel::Fit(train, c, rule);
    }
    case ModelKind::kGradientBoosting: {
      auto c = BoostConfig::FromJson(config);
      if (seed) c.seed = *seed;
      return BoostedModel::Fit(train, c, rule);
    }
    case ModelKind::kConstrainedTree:
      return ConstrainedTreeModel::Fit(
          train, ConstrainedTreeConfig::FromJson(config), rule);
  }
  throw ConfigError("unknown model kind");
}

}  // namespace

std::string_view ModelKindName(ModelKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<ModelKind> ParseModelKind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

nlohmann::json ModelToJson(const ForecastModel& model) {
  nlohmann::json json = {{"format", kModelFormat},
                         {"version", kModelFormatVersion},
                         {"kind", ModelKindName(model.kind())},
                         {"schema", kSchemaVersion}};
  json["body"] = model.Body();
  return json;
}

std::unique_ptr<ForecastModel> ModelFromJson(const nlohmann::json& json) {
  try {
    if (!json.is_object() || json.value("format", "") != kModelFormat) {
      throw ModelError("not a hearthcast model file");
    }
    const int version = json.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw ModelError("unsupported model file version " +
                       std::to_string(version));
    }
    const auto schema = json.at("schema").get<std::string>();
    if (schema != kSchemaVersion) {
      throw ModelError("model was trained on schema '" + schema +
                       "', expected '" + std::string(kSchemaVersion) + "'");
    }
    const auto kind_name = json.at("kind").get<std::string>();
    const auto kind = ParseModelKind(kind_name);
    if (!kind) throw ModelError("unknown model kind '" + kind_name + "'");
    return BodyToModel(*kind, json.at("body"));
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("malformed model file: ") + e.what());
  } catch (const ModelError&) {
    throw;
  } catch (const Error& e) {
    throw ModelError(std::string("invalid model file: ") + e.what());
  }
}

std::string SerializeModel(const ForecastModel& model) {
  return ModelToJson(model).dump(2) + "\n";
}

std::unique_ptr<ForecastModel> DeserializeModel(std::string_view text) {
  nlohmann::json json;
  try {
    json = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelError(std::string("model file is not JSON: ") + e.what());
  }
  return ModelFromJson(json);
}

void SaveModel(const ForecastModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ModelError("cannot write " + path.string());
  out << SerializeModel(model);
  if (!out) throw ModelError("failed writing " + path.string());
}

std::unique_ptr<ForecastModel> LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return DeserializeModel(buffer.str());
}

double ModelPredict(const ForecastModel* model, const HouseholdRecord& record) {
  if (model == nullptr) throw ModelError("model is not fitted");
  ValidateRecord(record);
  return model->Predict(record);
}

std::unique_ptr<ForecastModel> TrainModel(ModelKind kind, const Dataset& train,
                                          const nlohmann::json& config,
                                          std::optional<std::uint64_t> seed) {
  try {
    return TrainModelUnchecked(kind, train, config, seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("model config: {}", e.what()));
  }
}

}  // namespace hearthcast
