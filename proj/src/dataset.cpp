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

#include "hearthcast/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include <fmt/format.h>

#include "hearthcast/errors.hpp"
#include "hearthcast/random.hpp"

namespace hearthcast {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(Trim(line.substr(start)));
      return fields;
    }
    fields.push_back(Trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::optional<double> ParseDouble(std::string_view text) {
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [end, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() ||
      !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

// Row-level failure carrying the rejection reason.
struct RowError {
  std::string reason;
};

double NumericField(std::string_view text, std::string_view name) {
  const auto value = ParseDouble(text);
  if (!value) {
    throw RowError{fmt::format("non-numeric field: {}='{}'", name, text)};
  }
  return *value;
}

int IntegerField(std::string_view text, std::string_view name) {
  const double value = NumericField(text, name);
  if (value != std::floor(value) || std::abs(value) > 1e9) {
    throw RowError{fmt::format("invalid value: {} must be an integer", name)};
  }
  return static_cast<int>(value);
}

template <typename E>
E CategoryField(std::string_view text) {
  const auto value = ParseCategory<E>(text);
  if (!value) {
    throw RowError{fmt::format("unknown category: {}={}",
                               CategoryTraits<E>::kField, text)};
  }
  return *value;
}

HouseholdRecord ParseRecord(const std::vector<std::string_view>& f) {
  HouseholdRecord r;
  r.surface_m2 = NumericField(f[0], "surface_m2");
  r.heating_type = CategoryField<HeatingType>(f[1]);
  r.water_heating_type = CategoryField<WaterHeatingType>(f[2]);
  r.cooking_type = CategoryField<CookingType>(f[3]);
  r.occupants = IntegerField(f[4], "occupants");
  r.house_type = CategoryField<HouseType>(f[5]);
  r.tariff_index = CategoryField<TariffIndex>(f[6]);
  r.max_power_kva = IntegerField(f[7], "max_power_kva");
  r.reading_days = IntegerField(f[8], "reading_days");
  try {
    ValidateRecord(r);
  } catch (const DataError& e) {
    throw RowError{fmt::format("invalid value: {}", e.what())};
  }
  return r;
}

LabeledExample ParseRow(const std::vector<std::string_view>& f,
                        bool has_car_column) {
  const HouseholdRecord r = ParseRecord(f);
  const bool car_given = has_car_column && !f[10].empty();
  try {
    if (car_given) {
      return {r, AnnualConsumption(NumericField(f[10], "car_kwh"))};
    }
    if (f[9].empty()) throw RowError{"missing target: observed_kwh"};
    return {r, AnnualizeCar(NumericField(f[9], "observed_kwh"),
                            r.reading_days)};
  } catch (const InsufficientWindowError& e) {
    throw RowError{fmt::format("insufficient window: {}", e.what())};
  } catch (const DataError& e) {
    throw RowError{fmt::format("invalid value: {}", e.what())};
  }
}

bool CheckHeader(const std::vector<std::string_view>& header,
                 const CsvSchema& schema) {
  for (std::size_t i = 0; i < CsvSchema::kRequiredColumns; ++i) {
    if (i >= header.size()) {
      throw SchemaError("missing column: " + schema.columns[i]);
    }
    if (header[i] != schema.columns[i]) {
      throw SchemaError(fmt::format("expected column '{}' at position {}, "
                                    "found '{}'",
                                    schema.columns[i], i + 1, header[i]));
    }
  }
  if (header.size() == CsvSchema::kRequiredColumns) return false;
  if (header.size() == schema.columns.size() &&
      header.back() == schema.columns.back()) {
    return true;
  }
  throw SchemaError(fmt::format("unexpected column '{}'",
                                header[CsvSchema::kRequiredColumns]));
}

std::string FormatNumber(double value) { return fmt::format("{}", value); }

}  // namespace

IngestResult IngestCsv(std::istream& in, const CsvSchema& schema) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty file: no header");
  std::string_view header_line = line;
  if (header_line.starts_with("\xEF\xBB\xBF")) header_line.remove_prefix(3);
  const bool has_car_column = CheckHeader(SplitFields(header_line), schema);
  const std::size_t expected_fields = has_car_column
                                          ? schema.columns.size()
                                          : CsvSchema::kRequiredColumns;

  IngestResult result;
  std::size_t row_number = 0;
  while (std::getline(in, line)) {
    ++row_number;
    if (Trim(line).empty()) continue;
    const auto fields = SplitFields(line);
    if (fields.size() != expected_fields) {
      result.rejections.push_back(
          {row_number, fmt::format("wrong column count: expected {}, got {}",
                                   expected_fields, fields.size())});
      continue;
    }
    try {
      result.dataset.examples.push_back(ParseRow(fields, has_car_column));
    } catch (const RowError& e) {
      result.rejections.push_back({row_number, e.reason});
    }
  }
  return result;
}

RecordIngestResult IngestRecordsCsv(std::istream& in, const CsvSchema& schema) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty file: no header");
  std::string_view header_line = line;
  if (header_line.starts_with("\xEF\xBB\xBF")) header_line.remove_prefix(3);
  const auto header = SplitFields(header_line);
  for (std::size_t i = 0; i < kPredictorColumns; ++i) {
    if (i >= header.size() || header[i] != schema.columns[i]) {
      throw SchemaError(fmt::format("expected column '{}' at position {}",
                                    schema.columns[i], i + 1));
    }
  }
  RecordIngestResult result;
  std::size_t row_number = 0;
  while (std::getline(in, line)) {
    ++row_number;
    if (Trim(line).empty()) continue;
    const auto fields = SplitFields(line);
    if (fields.size() != header.size()) {
      result.rejections.push_back(
          {row_number, fmt::format("wrong column count: expected {}, got {}",
                                   header.size(), fields.size())});
      continue;
    }
    try {
      result.records.push_back(ParseRecord(fields));
    } catch (const RowError& e) {
      result.rejections.push_back({row_number, e.reason});
    }
  }
  return result;
}

IngestResult IngestCsv(const std::filesystem::path& path,
                       const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path.string());
  return IngestCsv(in, schema);
}

void WriteCsv(const Dataset& dataset, std::ostream& out) {
  const CsvSchema schema;
  for (std::size_t i = 0; i < schema.columns.size(); ++i) {
    out << (i ? "," : "") << schema.columns[i];
  }
  out << '\n';
  for (const auto& ex : dataset.examples) {
    const auto& r = ex.record;
    out << FormatNumber(r.surface_m2) << ',' << CategoryName(r.heating_type)
        << ',' << CategoryName(r.water_heating_type) << ','
        << CategoryName(r.cooking_type) << ',' << r.occupants << ','
        << CategoryName(r.house_type) << ',' << CategoryName(r.tariff_index)
        << ',' << r.max_power_kva << ',' << r.reading_days << ',';
    if (r.reading_days > 0) {
      out << FormatNumber(ex.target.kwh() * r.reading_days / 365.0);
    }
    out << ',' << FormatNumber(ex.target.kwh()) << '\n';
  }
}

void WriteCsv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  WriteCsv(dataset, out);
}

void WriteRejections(const std::vector<RowRejection>& rejections,
                     std::ostream& out) {
  out << "row_number,reason\n";
  for (const auto& r : rejections) {
    std::string reason = r.reason;
    std::replace(reason.begin(), reason.end(), ',', ';');
    out << r.row_number << ',' << reason << '\n';
  }
}

void OutlierPolicy::Validate() const {
  if (!(low_bound >= 0.0 && low_bound < high_bound) ||
      !std::isfinite(high_bound)) {
    throw ConfigError("outlier policy requires 0 <= low_bound < high_bound");
  }
}

OutlierPartition PartitionOutliers(const Dataset& dataset,
                                   const OutlierPolicy& policy) {
  policy.Validate();
  OutlierPartition out;
  out.inliers.schema_version = dataset.schema_version;
  out.outliers.schema_version = dataset.schema_version;
  for (const auto& ex : dataset.examples) {
    (policy.IsInlier(ex.target.kwh()) ? out.inliers : out.outliers)
        .examples.push_back(ex);
  }
  return out;
}

TrainTestSplit SplitTrainTest(const Dataset& dataset, double test_fraction,
                              std::uint64_t seed) {
  if (dataset.empty()) throw DataError("cannot split an empty dataset");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test_fraction must lie in (0, 1)");
  }
  const std::size_t n = dataset.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(order[i], order[rng.Below(i + 1)]);
  }

  const bool complement = test_fraction > 0.5;
  const double head_fraction = complement ? 1.0 - test_fraction : test_fraction;
  const auto head = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * head_fraction));
  std::vector<bool> in_head(n, false);
  for (std::size_t i = 0; i < head; ++i) in_head[order[i]] = true;

  TrainTestSplit split;
  split.train.schema_version = dataset.schema_version;
  split.test.schema_version = dataset.schema_version;
  for (std::size_t i = 0; i < n; ++i) {
    const bool is_test = in_head[i] != complement;
    (is_test ? split.test_indices : split.train_indices).push_back(i);
    (is_test ? split.test : split.train)
        .examples.push_back(dataset.examples[i]);
  }
  return split;
}

}  // namespace hearthcast
