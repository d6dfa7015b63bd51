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

// Synthetic household populations with a known mean function.
//
// Each record is drawn from configurable marginals, its target is the oracle
// mean
//
//   mu = base + per_occupant * occupants + heating_coeff[heating] * surface
//        + water_coeff[water_heating] * occupants
//
// times lognormal noise exp(sigma * N(0, 1)). A fraction of targets is then
// replaced by "second home" lows in [100, 1000) or highs in (10000, 25000].
// Record i depends only on (seed, i).

#ifndef HEARTHCAST_SYNTHGEN_HPP_
#define HEARTHCAST_SYNTHGEN_HPP_

#include <array>
#include <cstdint>
#include <vector>

#include "hearthcast/dataset.hpp"
#include "hearthcast/household.hpp"
#include "json.hpp"

namespace hearthcast {

struct Marginals {
  std::array<double, 6> heating = {0.05, 0.35, 0.06, 0.38, 0.12, 0.04};
  std::array<double, 4> water_heating = {0.55, 0.25, 0.08, 0.12};
  std::array<double, 3> cooking = {0.60, 0.15, 0.25};
  std::array<double, 2> house = {0.5, 0.5};
  std::array<double, 2> tariff = {0.6, 0.4};
  // Weights for 1, 2, ... occupants.
  std::vector<double> occupants = {0.30, 0.30, 0.17, 0.15, 0.06, 0.02};
  // Weights aligned with kMaxPowerLevels.
  std::array<double, 9> max_power = {0.05, 0.35, 0.30, 0.15, 0.07,
                                     0.04, 0.02, 0.01, 0.01};
  // Surface is lognormal by house type, rounded to 0.1 m² and clamped.
  std::array<double, 2> surface_median = {60.0, 110.0};
  double surface_log_sigma = 0.35;
  double surface_min = 10.0;
  double surface_max = 300.0;
  int reading_days_min = 70;
  int reading_days_max = 365;

  bool operator==(const Marginals&) const = default;
};

struct GeneratorConfig {
  std::size_t n = 20000;
  std::uint64_t seed = 0;
  double base_kwh = 500.0;
  double per_occupant_kwh = 600.0;
  // By heating code: district, electric, fuel, gas, heat_pump, other.
  std::array<double, 6> heating_kwh_per_m2 = {6.0, 55.0, 6.0, 6.0, 18.0, 6.0};
  // By water heating code: electric, gas, other, thermodynamic.
  std::array<double, 4> water_kwh_per_occupant = {800.0, 0.0, 0.0, 300.0};
  double noise_sigma = 0.15;
  double p_low_outlier = 0.04;
  double p_high_outlier = 0.02;
  Marginals marginals;

  // Throws ConfigError.
  void Validate() const;
  nlohmann::json ToJson() const;
  // Missing keys keep their defaults. Validates.
  static GeneratorConfig FromJson(const nlohmann::json& json);

  bool operator==(const GeneratorConfig&) const = default;
};

double OracleMean(const HouseholdRecord& record, const GeneratorConfig& config);

enum class Contamination : std::uint8_t { kNone, kLow, kHigh };

struct GeneratedData {
  Dataset dataset;
  std::vector<Contamination> labels;
  std::vector<double> oracle_mean;
};

// Throws ConfigError on an invalid config or n = 0.
GeneratedData Generate(const GeneratorConfig& config);

}  // namespace hearthcast

#endif  // HEARTHCAST_SYNTHGEN_HPP_
