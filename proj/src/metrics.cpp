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

#include "hearthcast/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "hearthcast/errors.hpp"

namespace hearthcast {

void to_json(nlohmann::json& json, const MetricsReport& r) {
  json = {{"n", r.n}, {"msd", r.msd}, {"rmsd", r.rmsd}, {"mad", r.mad},
          {"mae", r.mae}};
}

void from_json(const nlohmann::json& json, MetricsReport& r) {
  json.at("n").get_to(r.n);
  json.at("msd").get_to(r.msd);
  json.at("rmsd").get_to(r.rmsd);
  json.at("mad").get_to(r.mad);
  json.at("mae").get_to(r.mae);
}

void PriceConfig::Validate() const {
  if (!(unit_price > 0.0) || !std::isfinite(unit_price)) {
    throw ConfigError("unit_price must be > 0");
  }
}

double SortedQuantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw DataError("quantile of an empty series");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  if (frac == 0.5) return (sorted[lo] + sorted[hi]) / 2.0;
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double Median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return SortedQuantile(values, 0.5);
}

MetricsReport ComputeMetrics(const GapSeries& series) {
  const auto& g = series.gaps;
  if (g.empty()) throw DataError("metrics of an empty gap series");
  MetricsReport r;
  r.n = g.size();
  double sq = 0.0;
  double abs_sum = 0.0;
  for (double x : g) {
    if (!std::isfinite(x)) throw DataError("non-finite gap");
    sq += x * x;
    abs_sum += std::abs(x);
  }
  const auto n = static_cast<double>(g.size());
  r.msd = sq / n;
  r.rmsd = std::sqrt(r.msd);
  r.mae = abs_sum / n;
  const double center = Median(g);
  std::vector<double> deviations;
  deviations.reserve(g.size());
  for (double x : g) deviations.push_back(std::abs(x - center));
  r.mad = Median(std::move(deviations));
  return r;
}

double RmsdDelta(double rmsd_filtered, double rmsd_baseline) {
  if (!(rmsd_baseline > 0.0)) {
    throw DataError("RMSD delta needs a positive baseline");
  }
  return 100.0 * (rmsd_filtered - rmsd_baseline) / rmsd_baseline;
}

double RoundToPrecision(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(value * scale) / scale;
}

GapSeries ComputeGaps(std::span<const double> targets,
                      std::span<const double> predictions) {
  if (targets.size() != predictions.size()) {
    throw DataError("targets and predictions differ in length");
  }
  if (targets.empty()) throw DataError("empty gap series");
  GapSeries s;
  s.gaps.reserve(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    s.gaps.push_back(predictions[i] - targets[i]);
  }
  return s;
}

GapViews ComputeGapViews(std::span<const double> targets,
                         std::span<const double> predictions,
                         const PriceConfig& price) {
  price.Validate();
  GapViews v;
  v.absolute = ComputeGaps(targets, predictions);
  v.relative.reserve(targets.size());
  v.monetary.reserve(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] == 0.0) {
      throw DataError("relative gap undefined for a zero target");
    }
    v.relative.push_back(v.absolute.gaps[i] / targets[i]);
    v.monetary.push_back(v.absolute.gaps[i] * price.unit_price);
  }
  return v;
}

void to_json(nlohmann::json& json, const DistributionSummary& s) {
  json = {{"n", s.n},        {"min", s.min}, {"q1", s.q1},
          {"median", s.median}, {"q3", s.q3}, {"max", s.max},
          {"deciles", s.deciles}};
}

void from_json(const nlohmann::json& json, DistributionSummary& s) {
  json.at("n").get_to(s.n);
  json.at("min").get_to(s.min);
  json.at("q1").get_to(s.q1);
  json.at("median").get_to(s.median);
  json.at("q3").get_to(s.q3);
  json.at("max").get_to(s.max);
  json.at("deciles").get_to(s.deciles);
}

DistributionSummary Summarize(std::span<const double> values) {
  if (values.empty()) throw DataError("summary of an empty series");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  DistributionSummary s;
  s.n = sorted.size();
  s.min = sorted.front();
  s.max = sorted.back();
  s.q1 = SortedQuantile(sorted, 0.25);
  s.median = SortedQuantile(sorted, 0.5);
  s.q3 = SortedQuantile(sorted, 0.75);
  for (int d = 1; d <= 9; ++d) {
    s.deciles.push_back(SortedQuantile(sorted, d / 10.0));
  }
  return s;
}

}  // namespace hearthcast
