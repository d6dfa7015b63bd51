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

// Black-box monotonicity audit of a fitted model.
//
// For every base record and audited feature, the feature is moved along an
// ascending ladder with everything else fixed. An adjacent pair violates an
// increasing expectation when pred[j + 1] < pred[j] - tolerance (and the
// mirror condition for decreasing).

#ifndef HEARTHCAST_MONOTONICITY_HPP_
#define HEARTHCAST_MONOTONICITY_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hearthcast/dataset.hpp"
#include "hearthcast/model.hpp"
#include "json.hpp"

namespace hearthcast {

enum class AuditFeature { kOccupants, kSurface, kMaxPower };
enum class Direction { kIncreasing, kDecreasing };

std::string_view AuditFeatureName(AuditFeature feature);

struct AuditDirection {
  AuditFeature feature = AuditFeature::kSurface;
  Direction direction = Direction::kIncreasing;
};

// occupants, surface and max_power, all increasing.
std::vector<AuditDirection> DefaultDirections();

struct ProbeGrid {
  std::vector<HouseholdRecord> bases;
  std::vector<double> occupants = {1, 2, 3, 4, 5};
  std::vector<double> surface = {20, 45, 70, 110, 180};
  std::vector<double> max_power = {3, 6, 9, 12, 18};

  const std::vector<double>& Ladder(AuditFeature feature) const;
  // Throws ConfigError on empty bases, empty or non-ascending ladders.
  void Validate() const;
  std::string Describe() const;
};

// `n_bases` records drawn without replacement from `source` by a seeded
// shuffle (all of them when the source is smaller).
ProbeGrid SampleProbeGrid(const Dataset& source, std::size_t n_bases,
                          std::uint64_t seed);

struct ProbePair {
  std::size_t base_index = 0;
  double lower_value = 0.0;
  double upper_value = 0.0;
  double lower_prediction = 0.0;
  double upper_prediction = 0.0;
};

struct FeatureAudit {
  AuditFeature feature = AuditFeature::kSurface;
  Direction direction = Direction::kIncreasing;
  std::size_t probes = 0;
  std::size_t pairs = 0;
  std::vector<ProbePair> violations;

  std::size_t violation_count() const { return violations.size(); }
  double violation_rate() const {
    return pairs == 0 ? 0.0 : static_cast<double>(violations.size()) /
                                  static_cast<double>(pairs);
  }
};

struct MonotonicityReport {
  std::string grid;
  double tolerance = 1e-6;
  std::vector<FeatureAudit> features;

  // Null when the feature was not audited.
  const FeatureAudit* Find(AuditFeature feature) const;
  nlohmann::json ToJson() const;
};

// Throws ConfigError when the grid is empty or invalid.
MonotonicityReport AuditMonotonicity(
    const ForecastModel& model, const ProbeGrid& grid,
    std::span<const AuditDirection> directions = {}, double tolerance = 1e-6);

}  // namespace hearthcast

#endif  // HEARTHCAST_MONOTONICITY_HPP_
