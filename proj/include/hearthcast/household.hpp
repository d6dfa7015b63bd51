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

// Household attributes known when a customer subscribes, and the yearly
// reference consumption (CAR) that is forecast from them.

#ifndef HEARTHCAST_HOUSEHOLD_HPP_
#define HEARTHCAST_HOUSEHOLD_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace hearthcast {

// Category codes are the alphabetical rank of the name within each closed set.
// The code tables are published in config/feature_schema.json.

enum class HeatingType : std::uint8_t {
  kDistrict = 0,
  kElectric,
  kFuel,
  kGas,
  kHeatPump,
  kOther,
};

enum class WaterHeatingType : std::uint8_t {
  kElectric = 0,
  kGas,
  kOther,
  kThermodynamic,
};

enum class CookingType : std::uint8_t {
  kElectric = 0,
  kGas,
  kMixed,
};

enum class HouseType : std::uint8_t {
  kApartment = 0,
  kHouse,
};

enum class TariffIndex : std::uint8_t {
  kBase = 0,
  kPeakOffPeak,
};

template <typename E>
struct CategoryTraits;

template <>
struct CategoryTraits<HeatingType> {
  static constexpr std::string_view kField = "heating_type";
  static constexpr std::array<std::string_view, 6> kNames = {
      "district", "electric", "fuel", "gas", "heat_pump", "other"};
};

template <>
struct CategoryTraits<WaterHeatingType> {
  static constexpr std::string_view kField = "water_heating_type";
  static constexpr std::array<std::string_view, 4> kNames = {
      "electric", "gas", "other", "thermodynamic"};
};

template <>
struct CategoryTraits<CookingType> {
  static constexpr std::string_view kField = "cooking_type";
  static constexpr std::array<std::string_view, 3> kNames = {"electric", "gas",
                                                             "mixed"};
};

template <>
struct CategoryTraits<HouseType> {
  static constexpr std::string_view kField = "house_type";
  static constexpr std::array<std::string_view, 2> kNames = {"apartment",
                                                             "house"};
};

template <>
struct CategoryTraits<TariffIndex> {
  static constexpr std::string_view kField = "tariff_index";
  static constexpr std::array<std::string_view, 2> kNames = {"base",
                                                             "peak_offpeak"};
};

template <typename E>
constexpr std::string_view CategoryName(E value) {
  return CategoryTraits<E>::kNames[static_cast<std::size_t>(value)];
}

template <typename E>
constexpr int CategoryCode(E value) {
  return static_cast<int>(value);
}

template <typename E>
constexpr std::optional<E> ParseCategory(std::string_view name) {
  const auto& names = CategoryTraits<E>::kNames;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<E>(i);
  }
  return std::nullopt;
}

// Subscribed meter capacities in kVA.
inline constexpr std::array<int, 9> kMaxPowerLevels = {3,  6,  9,  12, 15,
                                                       18, 24, 30, 36};

constexpr bool IsValidMaxPower(int kva) {
  for (int level : kMaxPowerLevels) {
    if (level == kva) return true;
  }
  return false;
}

struct HouseholdRecord {
  double surface_m2 = 50.0;
  HeatingType heating_type = HeatingType::kElectric;
  WaterHeatingType water_heating_type = WaterHeatingType::kElectric;
  CookingType cooking_type = CookingType::kElectric;
  int occupants = 1;
  HouseType house_type = HouseType::kApartment;
  TariffIndex tariff_index = TariffIndex::kBase;
  int max_power_kva = 6;
  int reading_days = 0;

  bool operator==(const HouseholdRecord&) const = default;
};

// Throws DataError naming the first violated invariant.
void ValidateRecord(const HouseholdRecord& record);

// Yearly reference consumption in kWh. Finite and non-negative.
class AnnualConsumption {
 public:
  // Throws DataError on negative or non-finite input.
  explicit AnnualConsumption(double kwh);

  double kwh() const { return kwh_; }

  bool operator==(const AnnualConsumption&) const = default;

 private:
  double kwh_;
};

// Minimum observation window for annualization.
inline constexpr int kMinReadingDays = 70;

// Scales a consumption observed over `reading_days` to one year
// (observed * 365 / days). No seasonal correction is applied.
// Throws InsufficientWindowError when reading_days < kMinReadingDays.
AnnualConsumption AnnualizeCar(double observed_kwh, int reading_days);

}  // namespace hearthcast

#endif  // HEARTHCAST_HOUSEHOLD_HPP_
