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

#ifndef HEARTHCAST_MATRIX_HPP_
#define HEARTHCAST_MATRIX_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "hearthcast/dataset.hpp"
#include "hearthcast/features.hpp"

namespace hearthcast {

// Column-major training matrix. Tree learners work on any column layout, the
// household schema is only one instance of it.
struct FeatureMatrix {
  std::vector<ColumnSpec> specs;
  std::vector<std::vector<double>> columns;

  std::size_t num_columns() const { return columns.size(); }
  std::size_t num_rows() const {
    return columns.empty() ? 0 : columns.front().size();
  }
  double at(std::size_t row, std::size_t column) const {
    return columns[column][row];
  }
  // Copies one row into `out` (size num_columns()).
  void Row(std::size_t row, std::span<double> out) const;
};

// Encodes every example of `dataset` with the household schema.
FeatureMatrix EncodeDataset(const Dataset& dataset,
                            const LowConsumptionRule& rule);

std::vector<double> Targets(const Dataset& dataset);

}  // namespace hearthcast

#endif  // HEARTHCAST_MATRIX_HPP_
