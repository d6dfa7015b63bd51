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

#include "hearthcast/household.hpp"

#include <cmath>
#include <string>

#include "hearthcast/errors.hpp"

namespace hearthcast {

void ValidateRecord(const HouseholdRecord& record) {
  if (!std::isfinite(record.surface_m2) || record.surface_m2 <= 0.0) {
    throw DataError("surface_m2 must be > 0");
  }
  if (record.occupants < 1) throw DataError("occupants must be >= 1");
  if (!IsValidMaxPower(record.max_power_kva)) {
    throw DataError("max_power_kva " + std::to_string(record.max_power_kva) +
                    " is not a subscribed capacity");
  }
  if (record.reading_days < 0) throw DataError("reading_days must be >= 0");
  if (static_cast<std::size_t>(record.heating_type) >=
          CategoryTraits<HeatingType>::kNames.size() ||
      static_cast<std::size_t>(record.water_heating_type) >=
          CategoryTraits<WaterHeatingType>::kNames.size() ||
      static_cast<std::size_t>(record.cooking_type) >=
          CategoryTraits<CookingType>::kNames.size() ||
      static_cast<std::size_t>(record.house_type) >=
          CategoryTraits<HouseType>::kNames.size() ||
      static_cast<std::size_t>(record.tariff_index) >=
          CategoryTraits<TariffIndex>::kNames.size()) {
    throw DataError("unknown category");
  }
}

AnnualConsumption::AnnualConsumption(double kwh) : kwh_(kwh) {
  if (!std::isfinite(kwh) || kwh < 0.0) {
    throw DataError("annual consumption must be finite and >= 0");
  }
}

AnnualConsumption AnnualizeCar(double observed_kwh, int reading_days) {
  if (reading_days < kMinReadingDays) {
    throw InsufficientWindowError(
        "annualization needs at least " + std::to_string(kMinReadingDays) +
        " reading days, got " + std::to_string(reading_days));
  }
  return AnnualConsumption(observed_kwh * 365.0 / reading_days);
}

}  // namespace hearthcast
