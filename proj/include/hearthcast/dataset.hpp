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

#ifndef HEARTHCAST_DATASET_HPP_
#define HEARTHCAST_DATASET_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hearthcast/household.hpp"

namespace hearthcast {

inline constexpr std::string_view kSchemaVersion = "household-v1";

struct LabeledExample {
  HouseholdRecord record;
  AnnualConsumption target{0.0};

  bool operator==(const LabeledExample&) const = default;
};

// Ordered collection of examples. Order is the ingestion order and is
// preserved by every operation below.
struct Dataset {
  std::vector<LabeledExample> examples;
  std::string schema_version{kSchemaVersion};

  std::size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }

  bool operator==(const Dataset&) const = default;
};

// Column names of the household CSV layout. The header must list the first
// ten columns in this order; `car_kwh` may be appended as an eleventh column.
struct CsvSchema {
  std::array<std::string, 11> columns = {
      "surface_m2",    "heating_type",  "water_heating_type", "cooking_type",
      "occupants",     "house_type",    "tariff_index",       "max_power_kva",
      "reading_days",  "observed_kwh",  "car_kwh"};

  static constexpr std::size_t kRequiredColumns = 10;
};

struct RowRejection {
  std::size_t row_number;  // 1-based, header excluded.
  std::string reason;

  bool operator==(const RowRejection&) const = default;
};

struct IngestResult {
  Dataset dataset;
  std::vector<RowRejection> rejections;
};

// Reads a household CSV. Rows that fail validation are reported in
// `rejections` and skipped; a header that does not match `schema` throws
// SchemaError. When the car_kwh column is absent or empty the target is
// derived with AnnualizeCar(observed_kwh, reading_days).
IngestResult IngestCsv(const std::filesystem::path& path,
                       const CsvSchema& schema = {});
IngestResult IngestCsv(std::istream& in, const CsvSchema& schema = {});

// Household predictors without targets, e.g. records to score. The header
// must start with the nine predictor columns; further columns are ignored.
inline constexpr std::size_t kPredictorColumns = 9;

struct RecordIngestResult {
  std::vector<HouseholdRecord> records;
  std::vector<RowRejection> rejections;
};

RecordIngestResult IngestRecordsCsv(std::istream& in, const CsvSchema& schema = {});

// Writes the dataset with all eleven columns. observed_kwh is reconstructed as
// car_kwh * reading_days / 365.
void WriteCsv(const Dataset& dataset, std::ostream& out);
void WriteCsv(const Dataset& dataset, const std::filesystem::path& path);

// Rejection report as "row_number,reason" lines under a header.
void WriteRejections(const std::vector<RowRejection>& rejections,
                     std::ostream& out);

struct OutlierPolicy {
  double low_bound = 1000.0;
  double high_bound = 10000.0;

  // Throws ConfigError unless 0 <= low_bound < high_bound.
  void Validate() const;
  // Bounds are inclusive on the inlier side.
  bool IsInlier(double car_kwh) const {
    return car_kwh >= low_bound && car_kwh <= high_bound;
  }

  bool operator==(const OutlierPolicy&) const = default;
};

struct OutlierPartition {
  Dataset inliers;
  Dataset outliers;
};

OutlierPartition PartitionOutliers(const Dataset& dataset,
                                   const OutlierPolicy& policy);

struct TrainTestSplit {
  Dataset train;
  Dataset test;
  // Positions in the input dataset, ascending.
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

// Deterministic shuffle split.
//
// A SplitMix64 stream seeded with `seed` drives a Fisher-Yates shuffle of
// 0..n-1 (j drawn uniformly in [0, i] for i = n-1 down to 1). For
// test_fraction <= 1/2 the test set is the first round(n * test_fraction)
// shuffled positions; for test_fraction > 1/2 it is the complement of the
// test set for 1 - test_fraction, so swapping f and 1 - f yields
// complementary sets. Both outputs keep the input order.
TrainTestSplit SplitTrainTest(const Dataset& dataset, double test_fraction,
                              std::uint64_t seed);

}  // namespace hearthcast

#endif  // HEARTHCAST_DATASET_HPP_
