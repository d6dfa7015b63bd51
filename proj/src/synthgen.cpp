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

#include "hearthcast/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>

#include <fmt/format.h>

#include "hearthcast/errors.hpp"
#include "hearthcast/random.hpp"

namespace hearthcast {
namespace {

void CheckWeights(std::span<const double> weights, std::string_view what) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ConfigError(fmt::format("{} weights must be finite and >= 0", what));
    }
    total += w;
  }
  if (!(total > 0.0)) throw ConfigError(fmt::format("{} weights sum to 0", what));
}

std::size_t Draw(SplitMix64& rng, std::span<const double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double u = rng.Uniform() * total;
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

template <typename E, std::size_t N>
nlohmann::json ByName(const std::array<double, N>& values) {
  nlohmann::json out = nlohmann::json::object();
  for (std::size_t i = 0; i < N; ++i) {
    out[std::string(CategoryTraits<E>::kNames[i])] = values[i];
  }
  return out;
}

template <typename E, std::size_t N>
void ReadByName(const nlohmann::json& json, std::string_view key,
                std::array<double, N>& values) {
  if (!json.contains(key)) return;
  for (const auto& [name, value] : json.at(std::string(key)).items()) {
    const auto code = ParseCategory<E>(name);
    if (!code) {
      throw ConfigError(fmt::format("{}: unknown category '{}'", key, name));
    }
    values[static_cast<std::size_t>(*code)] = value.template get<double>();
  }
}

template <typename T>
void ReadValue(const nlohmann::json& json, std::string_view key, T& value) {
  if (json.contains(key)) value = json.at(std::string(key)).template get<T>();
}

nlohmann::json MarginalsToJson(const Marginals& m) {
  nlohmann::json power = nlohmann::json::object();
  for (std::size_t i = 0; i < kMaxPowerLevels.size(); ++i) {
    power[std::to_string(kMaxPowerLevels[i])] = m.max_power[i];
  }
  return {{"heating_type", ByName<HeatingType>(m.heating)},
          {"water_heating_type", ByName<WaterHeatingType>(m.water_heating)},
          {"cooking_type", ByName<CookingType>(m.cooking)},
          {"house_type", ByName<HouseType>(m.house)},
          {"tariff_index", ByName<TariffIndex>(m.tariff)},
          {"occupants", m.occupants},
          {"max_power_kva", power},
          {"surface_median", ByName<HouseType>(m.surface_median)},
          {"surface_log_sigma", m.surface_log_sigma},
          {"surface_min", m.surface_min},
          {"surface_max", m.surface_max},
          {"reading_days_min", m.reading_days_min},
          {"reading_days_max", m.reading_days_max}};
}

Marginals MarginalsFromJson(const nlohmann::json& json) {
  Marginals m;
  ReadByName<HeatingType>(json, "heating_type", m.heating);
  ReadByName<WaterHeatingType>(json, "water_heating_type", m.water_heating);
  ReadByName<CookingType>(json, "cooking_type", m.cooking);
  ReadByName<HouseType>(json, "house_type", m.house);
  ReadByName<TariffIndex>(json, "tariff_index", m.tariff);
  ReadValue(json, "occupants", m.occupants);
  if (json.contains("max_power_kva")) {
    for (const auto& [key, value] : json.at("max_power_kva").items()) {
      const auto it = std::find(kMaxPowerLevels.begin(), kMaxPowerLevels.end(),
                                std::stoi(key));
      if (it == kMaxPowerLevels.end() || std::to_string(*it) != key) {
        throw ConfigError("max_power_kva: invalid level '" + key + "'");
      }
      m.max_power[static_cast<std::size_t>(it - kMaxPowerLevels.begin())] =
          value.get<double>();
    }
  }
  ReadByName<HouseType>(json, "surface_median", m.surface_median);
  ReadValue(json, "surface_log_sigma", m.surface_log_sigma);
  ReadValue(json, "surface_min", m.surface_min);
  ReadValue(json, "surface_max", m.surface_max);
  ReadValue(json, "reading_days_min", m.reading_days_min);
  ReadValue(json, "reading_days_max", m.reading_days_max);
  return m;
}

HouseholdRecord DrawRecord(SplitMix64& rng, const Marginals& m) {
  HouseholdRecord r;
  r.house_type = static_cast<HouseType>(Draw(rng, m.house));
  const double median = m.surface_median[static_cast<std::size_t>(r.house_type)];
  const double surface =
      std::exp(std::log(median) + m.surface_log_sigma * rng.Normal());
  r.surface_m2 =
      std::clamp(std::round(surface * 10.0) / 10.0, m.surface_min, m.surface_max);
  r.heating_type = static_cast<HeatingType>(Draw(rng, m.heating));
  r.water_heating_type = static_cast<WaterHeatingType>(Draw(rng, m.water_heating));
  r.cooking_type = static_cast<CookingType>(Draw(rng, m.cooking));
  r.occupants = static_cast<int>(Draw(rng, m.occupants)) + 1;
  r.tariff_index = static_cast<TariffIndex>(Draw(rng, m.tariff));
  r.max_power_kva = kMaxPowerLevels[Draw(rng, m.max_power)];
  const auto span = static_cast<std::uint64_t>(m.reading_days_max -
                                               m.reading_days_min + 1);
  r.reading_days = m.reading_days_min + static_cast<int>(rng.Below(span));
  return r;
}

}  // namespace

void GeneratorConfig::Validate() const {
  if (n == 0) throw ConfigError("n must be >= 1");
  auto probability = [](double p, std::string_view name) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError(fmt::format("{} must be in [0, 1]", name));
    }
  };
  probability(p_low_outlier, "p_low_outlier");
  probability(p_high_outlier, "p_high_outlier");
  if (!(p_low_outlier + p_high_outlier < 1.0)) {
    throw ConfigError("p_low_outlier + p_high_outlier must be < 1");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw ConfigError("noise_sigma must be finite and >= 0");
  }
  auto nonnegative = [](double v, std::string_view name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError(fmt::format("{} must be finite and >= 0", name));
    }
  };
  nonnegative(base_kwh, "base_kwh");
  nonnegative(per_occupant_kwh, "per_occupant_kwh");
  for (double v : heating_kwh_per_m2) nonnegative(v, "heating_kwh_per_m2");
  for (double v : water_kwh_per_occupant) nonnegative(v, "water_kwh_per_occupant");

  const Marginals& m = marginals;
  CheckWeights(m.heating, "heating_type");
  CheckWeights(m.water_heating, "water_heating_type");
  CheckWeights(m.cooking, "cooking_type");
  CheckWeights(m.house, "house_type");
  CheckWeights(m.tariff, "tariff_index");
  CheckWeights(m.occupants, "occupants");
  CheckWeights(m.max_power, "max_power_kva");
  for (double s : m.surface_median) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw ConfigError("surface_median must be > 0");
    }
  }
  if (!(m.surface_log_sigma >= 0.0) || !(m.surface_min > 0.0) ||
      !(m.surface_min <= m.surface_max) || !std::isfinite(m.surface_max)) {
    throw ConfigError("invalid surface distribution");
  }
  if (m.reading_days_min < kMinReadingDays ||
      m.reading_days_max < m.reading_days_min) {
    throw ConfigError(fmt::format("reading days must satisfy {} <= min <= max",
                                  kMinReadingDays));
  }
}

nlohmann::json GeneratorConfig::ToJson() const {
  return {{"n", n},
          {"seed", seed},
          {"base_kwh", base_kwh},
          {"per_occupant_kwh", per_occupant_kwh},
          {"heating_kwh_per_m2", ByName<HeatingType>(heating_kwh_per_m2)},
          {"water_heating_kwh_per_occupant",
           ByName<WaterHeatingType>(water_kwh_per_occupant)},
          {"noise_sigma", noise_sigma},
          {"p_low_outlier", p_low_outlier},
          {"p_high_outlier", p_high_outlier},
          {"marginals", MarginalsToJson(marginals)}};
}

GeneratorConfig GeneratorConfig::FromJson(const nlohmann::json& json) {
  GeneratorConfig c;
  try {
    if (!json.is_object()) throw ConfigError("generator config must be an object");
    ReadValue(json, "n", c.n);
    ReadValue(json, "seed", c.seed);
    ReadValue(json, "base_kwh", c.base_kwh);
    ReadValue(json, "per_occupant_kwh", c.per_occupant_kwh);
    ReadByName<HeatingType>(json, "heating_kwh_per_m2", c.heating_kwh_per_m2);
    ReadByName<WaterHeatingType>(json, "water_heating_kwh_per_occupant",
                                 c.water_kwh_per_occupant);
    ReadValue(json, "noise_sigma", c.noise_sigma);
    ReadValue(json, "p_low_outlier", c.p_low_outlier);
    ReadValue(json, "p_high_outlier", c.p_high_outlier);
    if (json.contains("marginals")) {
      c.marginals = MarginalsFromJson(json.at("marginals"));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("generator config: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw ConfigError("generator config: invalid number");
  }
  c.Validate();
  return c;
}

double OracleMean(const HouseholdRecord& record, const GeneratorConfig& config) {
  const double occupants = record.occupants;
  return config.base_kwh + config.per_occupant_kwh * occupants +
         config.heating_kwh_per_m2[static_cast<std::size_t>(record.heating_type)] *
             record.surface_m2 +
         config.water_kwh_per_occupant[static_cast<std::size_t>(
             record.water_heating_type)] *
             occupants;
}

GeneratedData Generate(const GeneratorConfig& config) {
  config.Validate();
  GeneratedData out;
  out.dataset.examples.reserve(config.n);
  out.labels.reserve(config.n);
  out.oracle_mean.reserve(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    SplitMix64 rng(DeriveSeed(config.seed, i));
    const HouseholdRecord record = DrawRecord(rng, config.marginals);
    const double mu = OracleMean(record, config);
    // Every record consumes the same number of draws.
    const double noise = rng.Normal();
    const double u = rng.Uniform();
    const double v = rng.Uniform();
    double target = config.noise_sigma == 0.0
                        ? mu
                        : mu * std::exp(config.noise_sigma * noise);
    Contamination label = Contamination::kNone;
    if (u < config.p_low_outlier) {
      target = 100.0 + 900.0 * v;
      label = Contamination::kLow;
    } else if (u < config.p_low_outlier + config.p_high_outlier) {
      target = 25000.0 - 15000.0 * v;
      label = Contamination::kHigh;
    }
    out.dataset.examples.push_back({record, AnnualConsumption(target)});
    out.labels.push_back(label);
    out.oracle_mean.push_back(mu);
  }
  return out;
}

}  // namespace hearthcast
