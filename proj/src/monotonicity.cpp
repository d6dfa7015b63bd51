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

#include "hearthcast/monotonicity.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "hearthcast/errors.hpp"
#include "hearthcast/random.hpp"

namespace hearthcast {
namespace {

void SetFeature(HouseholdRecord& record, AuditFeature feature, double value) {
  switch (feature) {
    case AuditFeature::kOccupants:
      record.occupants = static_cast<int>(value);
      break;
    case AuditFeature::kSurface:
      record.surface_m2 = value;
      break;
    case AuditFeature::kMaxPower:
      record.max_power_kva = static_cast<int>(value);
      break;
  }
}

std::string LadderText(const std::vector<double>& ladder) {
  return fmt::format("[{}]", fmt::join(ladder, ", "));
}

}  // namespace

std::string_view AuditFeatureName(AuditFeature feature) {
  switch (feature) {
    case AuditFeature::kOccupants: return "occupants";
    case AuditFeature::kSurface: return "surface";
    case AuditFeature::kMaxPower: return "max_power";
  }
  return "?";
}

std::vector<AuditDirection> DefaultDirections() {
  return {{AuditFeature::kOccupants, Direction::kIncreasing},
          {AuditFeature::kSurface, Direction::kIncreasing},
          {AuditFeature::kMaxPower, Direction::kIncreasing}};
}

const std::vector<double>& ProbeGrid::Ladder(AuditFeature feature) const {
  switch (feature) {
    case AuditFeature::kOccupants: return occupants;
    case AuditFeature::kSurface: return surface;
    case AuditFeature::kMaxPower: return max_power;
  }
  return surface;
}

void ProbeGrid::Validate() const {
  if (bases.empty()) throw ConfigError("probe grid has no base records");
  for (auto f : {AuditFeature::kOccupants, AuditFeature::kSurface,
                 AuditFeature::kMaxPower}) {
    const auto& ladder = Ladder(f);
    if (ladder.empty()) {
      throw ConfigError(fmt::format("empty {} ladder", AuditFeatureName(f)));
    }
    if (std::adjacent_find(ladder.begin(), ladder.end(),
                           std::greater_equal<>()) != ladder.end()) {
      throw ConfigError(
          fmt::format("{} ladder must be strictly ascending", AuditFeatureName(f)));
    }
    for (double v : ladder) {
      HouseholdRecord probe = bases.front();
      SetFeature(probe, f, v);
      ValidateRecord(probe);
    }
  }
}

std::string ProbeGrid::Describe() const {
  return fmt::format("{} bases; occupants {}; surface {}; max_power {}",
                     bases.size(), LadderText(occupants), LadderText(surface),
                     LadderText(max_power));
}

ProbeGrid SampleProbeGrid(const Dataset& source, std::size_t n_bases,
                          std::uint64_t seed) {
  std::vector<std::size_t> order(source.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(seed);
  const std::size_t take = std::min(n_bases, order.size());
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + rng.Below(order.size() - i);
    std::swap(order[i], order[j]);
  }
  ProbeGrid grid;
  for (std::size_t i = 0; i < take; ++i) {
    grid.bases.push_back(source.examples[order[i]].record);
  }
  return grid;
}

const FeatureAudit* MonotonicityReport::Find(AuditFeature feature) const {
  for (const auto& f : features) {
    if (f.feature == feature) return &f;
  }
  return nullptr;
}

nlohmann::json MonotonicityReport::ToJson() const {
  nlohmann::json audits = nlohmann::json::array();
  for (const auto& f : features) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& v : f.violations) {
      pairs.push_back({{"base_index", v.base_index},
                       {"lower_value", v.lower_value},
                       {"upper_value", v.upper_value},
                       {"lower_prediction", v.lower_prediction},
                       {"upper_prediction", v.upper_prediction}});
    }
    audits.push_back(
        {{"feature", AuditFeatureName(f.feature)},
         {"direction",
          f.direction == Direction::kIncreasing ? "increasing" : "decreasing"},
         {"probes", f.probes},
         {"pairs", f.pairs},
         {"violation_count", f.violation_count()},
         {"violations", pairs}});
  }
  return {{"grid", grid}, {"tolerance", tolerance}, {"features", audits}};
}

MonotonicityReport AuditMonotonicity(const ForecastModel& model,
                                     const ProbeGrid& grid,
                                     std::span<const AuditDirection> directions,
                                     double tolerance) {
  grid.Validate();
  const auto defaults = DefaultDirections();
  if (directions.empty()) directions = defaults;
  MonotonicityReport report;
  report.grid = grid.Describe();
  report.tolerance = tolerance;
  for (const auto& d : directions) {
    FeatureAudit audit;
    audit.feature = d.feature;
    audit.direction = d.direction;
    const auto& ladder = grid.Ladder(d.feature);
    for (std::size_t b = 0; b < grid.bases.size(); ++b) {
      HouseholdRecord probe = grid.bases[b];
      double previous = 0.0;
      for (std::size_t j = 0; j < ladder.size(); ++j) {
        SetFeature(probe, d.feature, ladder[j]);
        const double prediction = model.Predict(probe);
        ++audit.probes;
        if (j > 0) {
          ++audit.pairs;
          const bool bad = d.direction == Direction::kIncreasing
                               ? prediction < previous - tolerance
                               : prediction > previous + tolerance;
          if (bad) {
            audit.violations.push_back(
                {b, ladder[j - 1], ladder[j], previous, prediction});
          }
        }
        previous = prediction;
      }
    }
    report.features.push_back(std::move(audit));
  }
  return report;
}

}  // namespace hearthcast
