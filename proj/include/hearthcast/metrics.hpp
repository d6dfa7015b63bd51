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

// Error metrics over gap series (gap = prediction - target, in kWh).
//
//   msd  = mean(gap^2)          rmsd = sqrt(msd)
//   mae  = mean(|gap|)          mad  = median(|gap - median(gap)|)
//
// The median of an even-length series is the mean of the two central order
// statistics.

#ifndef HEARTHCAST_METRICS_HPP_
#define HEARTHCAST_METRICS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"

namespace hearthcast {

struct GapSeries {
  std::vector<double> gaps;

  std::size_t size() const { return gaps.size(); }
};

struct MetricsReport {
  double msd = 0.0;
  double rmsd = 0.0;
  double mad = 0.0;
  double mae = 0.0;
  std::size_t n = 0;

  bool operator==(const MetricsReport&) const = default;
};

void to_json(nlohmann::json& json, const MetricsReport& report);
void from_json(const nlohmann::json& json, MetricsReport& report);

struct PriceConfig {
  double unit_price = 0.2516;  // EUR per kWh.

  // Throws ConfigError unless unit_price > 0.
  void Validate() const;

  bool operator==(const PriceConfig&) const = default;
};

// Throws DataError on an empty series or non-finite entries.
MetricsReport ComputeMetrics(const GapSeries& series);

// Percentage change of the filtered-training RMSD against the baseline:
// 100 * (filtered - baseline) / baseline. Throws DataError when baseline <= 0.
double RmsdDelta(double rmsd_filtered, double rmsd_baseline);

// Rounds half away from zero to `decimals` places.
double RoundToPrecision(double value, int decimals);

struct GapViews {
  GapSeries absolute;
  std::vector<double> relative;  // gap / target
  std::vector<double> monetary;  // gap * unit_price
};

// Throws DataError on length mismatch, empty input or a zero target.
GapViews ComputeGapViews(std::span<const double> targets,
                         std::span<const double> predictions,
                         const PriceConfig& price);

// Absolute and monetary views only; never fails on zero targets.
GapSeries ComputeGaps(std::span<const double> targets,
                      std::span<const double> predictions);

struct DistributionSummary {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  // 10th, 20th, ..., 90th percentiles.
  std::vector<double> deciles;
  std::size_t n = 0;

  bool operator==(const DistributionSummary&) const = default;
};

void to_json(nlohmann::json& json, const DistributionSummary& summary);
void from_json(const nlohmann::json& json, DistributionSummary& summary);

// Median of the sorted series with the even-n rule above.
double Median(std::vector<double> values);

// Quantile q in [0, 1] of sorted values, interpolating linearly between the
// order statistics around position q * (n - 1). At q = 1/2 this is the
// even-n median rule.
double SortedQuantile(std::span<const double> sorted, double q);

// Throws DataError on empty input.
DistributionSummary Summarize(std::span<const double> values);

}  // namespace hearthcast

#endif  // HEARTHCAST_METRICS_HPP_
