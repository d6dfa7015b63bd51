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

#include "hearthcast/matrix.hpp"

namespace hearthcast {

void FeatureMatrix::Row(std::size_t row, std::span<double> out) const {
  for (std::size_t c = 0; c < columns.size(); ++c) out[c] = columns[c][row];
}

FeatureMatrix EncodeDataset(const Dataset& dataset,
                            const LowConsumptionRule& rule) {
  FeatureMatrix m;
  m.specs = HouseholdSchema();
  m.columns.assign(kNumSlots, std::vector<double>(dataset.size()));
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const FeatureVector v = Encode(dataset.examples[i].record, rule);
    for (std::size_t c = 0; c < kNumSlots; ++c) m.columns[c][i] = v[c];
  }
  return m;
}

std::vector<double> Targets(const Dataset& dataset) {
  std::vector<double> y;
  y.reserve(dataset.size());
  for (const auto& ex : dataset.examples) y.push_back(ex.target.kwh());
  return y;
}

}  // namespace hearthcast
