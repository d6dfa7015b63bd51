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

#include "hearthcast/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include <Eigen/Dense>

#include "hearthcast/errors.hpp"
#include "hearthcast/matrix.hpp"

namespace hearthcast {
namespace {

constexpr std::size_t kNumHeatingTypes =
    CategoryTraits<HeatingType>::kNames.size();

bool Contains(const LegacyEntry& e, const HouseholdRecord& r) {
  return e.heating_type == r.heating_type && r.occupants >= e.occupants_min &&
         (!e.occupants_max || r.occupants <= *e.occupants_max) &&
         r.surface_m2 > e.surface_min &&
         (!e.surface_max || r.surface_m2 <= *e.surface_max);
}

void CheckTiling(const std::vector<LegacyEntry>& entries) {
  using Band = std::pair<int, std::optional<int>>;
  for (std::size_t h = 0; h < kNumHeatingTypes; ++h) {
    const auto heating = static_cast<HeatingType>(h);
    const std::string heating_name{CategoryName(heating)};
    std::map<Band, std::vector<std::pair<double, std::optional<double>>>>
        bands;
    for (const auto& e : entries) {
      if (e.heating_type != heating) continue;
      if (e.occupants_max && *e.occupants_max < e.occupants_min) {
        throw ConfigError("legacy table: empty occupant band");
      }
      if (e.surface_max && *e.surface_max <= e.surface_min) {
        throw ConfigError("legacy table: empty surface band");
      }
      bands[{e.occupants_min, e.occupants_max}].emplace_back(e.surface_min,
                                                             e.surface_max);
    }
    if (bands.empty()) {
      throw ConfigError("legacy table: no entry for heating_type " +
                        heating_name);
    }
    int next_occupants = 1;
    bool open_ended = false;
    for (auto& [band, surfaces] : bands) {
      if (open_ended || band.first != next_occupants) {
        throw ConfigError("legacy table: occupant bands of " + heating_name +
                          " do not tile [1, inf)");
      }
      if (band.second) {
        next_occupants = *band.second + 1;
      } else {
        open_ended = true;
      }
      std::sort(surfaces.begin(), surfaces.end());
      double next_surface = 0.0;
      bool surface_open = false;
      for (const auto& [lo, hi] : surfaces) {
        if (surface_open || lo != next_surface) {
          throw ConfigError("legacy table: surface bands of " + heating_name +
                            " do not tile (0, inf)");
        }
        if (hi) {
          next_surface = *hi;
        } else {
          surface_open = true;
        }
      }
      if (!surface_open) {
        throw ConfigError("legacy table: surface bands of " + heating_name +
                          " are bounded");
      }
    }
    if (!open_ended) {
      throw ConfigError("legacy table: occupant bands of " + heating_name +
                        " are bounded");
    }
  }
}

std::vector<double> ColumnMeans(const FeatureMatrix& m) {
  std::vector<double> means;
  for (const auto& col : m.columns) {
    double s = 0.0;
    for (double v : col) s += v;
    means.push_back(col.empty() ? 0.0 : s / static_cast<double>(col.size()));
  }
  return means;
}

}  // namespace

LegacyTable::LegacyTable(std::vector<LegacyEntry> entries)
    : entries_(std::move(entries)) {
  for (const auto& e : entries_) {
    if (!std::isfinite(e.car_kwh) || e.car_kwh < 0.0) {
      throw ConfigError("legacy table: car_kwh must be finite and >= 0");
    }
  }
  CheckTiling(entries_);
}

LegacyTable LegacyTable::Default() {
  // Per-m2 heating intensity assumed by the table, by heating type code.
  constexpr std::array<double, kNumHeatingTypes> kPerM2 = {8, 60, 8, 8, 20, 8};
  struct OccupantBand {
    int lo;
    std::optional<int> hi;
    double assumed;
  };
  const OccupantBand occupant_bands[] = {
      {1, 2, 2.0}, {3, 4, 4.0}, {5, std::nullopt, 6.0}};
  struct SurfaceBand {
    double lo;
    std::optional<double> hi;
    double assumed;
  };
  const SurfaceBand surface_bands[] = {{0.0, 40.0, 40.0},
                                       {40.0, 80.0, 80.0},
                                       {80.0, 120.0, 120.0},
                                       {120.0, std::nullopt, 170.0}};
  std::vector<LegacyEntry> entries;
  for (std::size_t h = 0; h < kNumHeatingTypes; ++h) {
    for (const auto& ob : occupant_bands) {
      for (const auto& sb : surface_bands) {
        const double estimate =
            1.25 * (500.0 + 1150.0 * ob.assumed + kPerM2[h] * sb.assumed);
        entries.push_back({static_cast<HeatingType>(h), ob.lo, ob.hi, sb.lo,
                           sb.hi, std::round(estimate / 100.0) * 100.0});
      }
    }
  }
  return LegacyTable(std::move(entries));
}

const LegacyEntry& LegacyTable::Lookup(const HouseholdRecord& record) const {
  for (const auto& e : entries_) {
    if (Contains(e, record)) return e;
  }
  throw DataError("record outside the legacy table bands");
}

nlohmann::json LegacyTable::ToJson() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : entries_) {
    out.push_back({{"heating_type", CategoryName(e.heating_type)},
                   {"occupants_min", e.occupants_min},
                   {"occupants_max", e.occupants_max
                                         ? nlohmann::json(*e.occupants_max)
                                         : nlohmann::json(nullptr)},
                   {"surface_min", e.surface_min},
                   {"surface_max", e.surface_max
                                       ? nlohmann::json(*e.surface_max)
                                       : nlohmann::json(nullptr)},
                   {"car_kwh", e.car_kwh}});
  }
  return out;
}

LegacyTable LegacyTable::FromJson(const nlohmann::json& json) {
  if (!json.is_array()) throw ConfigError("legacy table must be a JSON array");
  std::vector<LegacyEntry> entries;
  try {
    for (const auto& item : json) {
      LegacyEntry e;
      const auto heating =
          ParseCategory<HeatingType>(item.at("heating_type").get<std::string>());
      if (!heating) throw ConfigError("legacy table: unknown heating_type");
      e.heating_type = *heating;
      e.occupants_min = item.at("occupants_min").get<int>();
      if (!item.at("occupants_max").is_null()) {
        e.occupants_max = item.at("occupants_max").get<int>();
      }
      e.surface_min = item.at("surface_min").get<double>();
      if (!item.at("surface_max").is_null()) {
        e.surface_max = item.at("surface_max").get<double>();
      }
      e.car_kwh = item.at("car_kwh").get<double>();
      entries.push_back(e);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("legacy table: ") + e.what());
  }
  return LegacyTable(std::move(entries));
}

nlohmann::json LegacyModel::Body() const { return {{"table", table_.ToJson()}}; }

std::unique_ptr<LegacyModel> LegacyModel::FromBody(const nlohmann::json& body) {
  return std::make_unique<LegacyModel>(LegacyTable::FromJson(body.at("table")));
}

LinearFit FitOls(const FeatureMatrix& matrix, std::span<const double> targets,
                 double ridge_epsilon) {
  const std::size_t n = matrix.num_rows();
  const std::size_t p = matrix.num_columns();
  if (n == 0 || targets.size() != n) {
    throw DataError("least squares needs a non-empty, aligned training set");
  }
  if (!(ridge_epsilon > 0.0)) throw ConfigError("ridge_epsilon must be > 0");

  const std::vector<double> x_mean = ColumnMeans(matrix);
  double y_mean = 0.0;
  for (double y : targets) y_mean += y;
  y_mean /= static_cast<double>(n);

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd row(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < p; ++c) row[c] = matrix.at(i, c) - x_mean[c];
    gram.selfadjointView<Eigen::Lower>().rankUpdate(row);
    rhs += row * (targets[i] - y_mean);
  }
  gram = gram.selfadjointView<Eigen::Lower>();
  gram.diagonal().array() += ridge_epsilon;
  const Eigen::VectorXd w = gram.ldlt().solve(rhs);

  LinearFit fit;
  fit.coefficients.assign(w.data(), w.data() + p);
  fit.intercept = y_mean;
  for (std::size_t c = 0; c < p; ++c) fit.intercept -= w[c] * x_mean[c];
  for (double v : fit.coefficients) {
    if (!std::isfinite(v)) throw DataError("least squares diverged");
  }
  return fit;
}

LinearModel::LinearModel(LinearFit fit, double ridge_epsilon,
                         LowConsumptionRule rule)
    : fit_(std::move(fit)), ridge_epsilon_(ridge_epsilon), rule_(std::move(rule)) {
  if (fit_.coefficients.size() != kNumSlots) {
    throw ModelError("linear model needs one coefficient per feature slot");
  }
}

std::unique_ptr<LinearModel> LinearModel::Fit(const Dataset& train,
                                              double ridge_epsilon,
                                              const LowConsumptionRule& rule) {
  if (train.empty()) throw DataError("cannot fit on an empty dataset");
  const FeatureMatrix m = EncodeDataset(train, rule);
  return std::make_unique<LinearModel>(FitOls(m, Targets(train), ridge_epsilon),
                                       ridge_epsilon, rule);
}

double LinearModel::Predict(const HouseholdRecord& record) const {
  const FeatureVector x = Encode(record, rule_);
  double y = fit_.intercept;
  for (std::size_t c = 0; c < kNumSlots; ++c) y += fit_.coefficients[c] * x[c];
  return y;
}

nlohmann::json LinearModel::Body() const {
  nlohmann::json coefficients = nlohmann::json::object();
  for (std::size_t c = 0; c < kNumSlots; ++c) {
    coefficients[std::string(SlotName(static_cast<Slot>(c)))] =
        fit_.coefficients[c];
  }
  return {{"intercept", fit_.intercept},
          {"coefficients", coefficients},
          {"ridge_epsilon", ridge_epsilon_},
          {"low_consumption_rule", rule_.ToJson()}};
}

std::unique_ptr<LinearModel> LinearModel::FromBody(const nlohmann::json& body) {
  LinearFit fit;
  fit.intercept = body.at("intercept").get<double>();
  const auto& coefficients = body.at("coefficients");
  for (std::size_t c = 0; c < kNumSlots; ++c) {
    fit.coefficients.push_back(
        coefficients.at(std::string(SlotName(static_cast<Slot>(c))))
            .get<double>());
  }
  return std::make_unique<LinearModel>(
      std::move(fit), body.at("ridge_epsilon").get<double>(),
      LowConsumptionRule::FromJson(body.at("low_consumption_rule")));
}

CartModel::CartModel(CartTree tree, CartConfig config, LowConsumptionRule rule)
    : tree_(std::move(tree)), config_(config), rule_(std::move(rule)) {}

std::unique_ptr<CartModel> CartModel::Fit(const Dataset& train,
                                          const CartConfig& config,
                                          const LowConsumptionRule& rule) {
  if (train.empty()) throw DataError("cannot fit on an empty dataset");
  const FeatureMatrix m = EncodeDataset(train, rule);
  const std::vector<double> y = Targets(train);
  return std::make_unique<CartModel>(CartTree::Fit(m, y, {}, config), config,
                                     rule);
}

double CartModel::Predict(const HouseholdRecord& record) const {
  return tree_.Predict(Encode(record, rule_));
}

nlohmann::json CartModel::Body() const {
  return {{"config", config_.ToJson()},
          {"low_consumption_rule", rule_.ToJson()},
          {"tree", tree_.ToJson(HouseholdSchema())}};
}

std::unique_ptr<CartModel> CartModel::FromBody(const nlohmann::json& body) {
  return std::make_unique<CartModel>(
      CartTree::FromJson(body.at("tree"), HouseholdSchema()),
      CartConfig::FromJson(body.at("config")),
      LowConsumptionRule::FromJson(body.at("low_consumption_rule")));
}

}  // namespace hearthcast
