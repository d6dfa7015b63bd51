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

// Variance-reduction (squared error) regression trees.
//
// Split search rules, shared by every tree learner in the project:
//   - Numeric columns: candidate thresholds are the midpoints between
//     consecutive distinct values of the node. When the node holds more than
//     kMaxNumericCuts distinct values, only quantile cuts are kept: for
//     j = 1..kMaxNumericCuts, with r = ceil(j * n / (kMaxNumericCuts + 1)),
//     the cut lies after the smallest distinct value whose cumulative count
//     reaches r (duplicates and cuts after the last value are dropped).
//     A value goes left when value <= threshold.
//   - Categorical columns: categories present in the node are ordered by mean
//     target (ties by code) and every proper prefix of that order is a
//     candidate left set. Absent categories go right.
//   - The split minimizing the children SSE wins; ties go to the lowest
//     column, then the lowest threshold (shortest prefix). A split is only
//     valid when both children hold at least min_leaf rows and the SSE drops.

#ifndef HEARTHCAST_CART_HPP_
#define HEARTHCAST_CART_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hearthcast/matrix.hpp"
#include "json.hpp"

namespace hearthcast {

inline constexpr std::size_t kMaxNumericCuts = 64;

struct SplitRule {
  int column = -1;
  bool categorical = false;
  double threshold = 0.0;
  // Bit c set when category code c goes left.
  std::uint64_t left_categories = 0;

  bool GoesLeft(double value) const {
    if (!categorical) return value <= threshold;
    const auto code = static_cast<std::uint64_t>(value);
    return code < 64 && ((left_categories >> code) & 1U) != 0;
  }

  // "occupants ≤ 2.5" or "heating_type ∈ {gas, fuel}".
  std::string Describe(const ColumnSpec& spec) const;

  nlohmann::json ToJson(const ColumnSpec& spec) const;
  static SplitRule FromJson(const nlohmann::json& json,
                            std::span<const ColumnSpec> specs);

  bool operator==(const SplitRule&) const = default;
};

struct SplitDecision {
  SplitRule rule;
  double sse_before = 0.0;
  double sse_after = 0.0;
  std::size_t left_count = 0;
  std::size_t right_count = 0;
};

// Sum of squared deviations from the mean over `rows`.
double NodeSse(std::span<const double> targets,
               std::span<const std::size_t> rows);

// Best split of `rows` over `columns` (all columns when empty), or nullopt when
// no candidate satisfies min_leaf on both sides and reduces the SSE.
std::optional<SplitDecision> FindBestSplit(
    const FeatureMatrix& matrix, std::span<const double> targets,
    std::span<const std::size_t> rows, std::size_t min_leaf,
    std::span<const int> columns = {});

// Stable partition of `rows` by `rule`; returns the number of left rows.
std::size_t PartitionRows(const FeatureMatrix& matrix, const SplitRule& rule,
                          std::span<std::size_t> rows);

struct CartConfig {
  int max_depth = -1;  // Negative means unlimited.
  std::size_t min_leaf = 1;
  // Columns sampled per split; 0 means all columns.
  std::size_t features_per_split = 0;
  std::uint64_t seed = 0;

  void Validate() const;
  nlohmann::json ToJson() const;
  static CartConfig FromJson(const nlohmann::json& json);

  bool operator==(const CartConfig&) const = default;
};

struct CartNode {
  SplitRule rule;
  int left = -1;
  int right = -1;
  double value = 0.0;  // Mean target of the node's rows.
  double gain = 0.0;   // SSE decrease of the split; 0 for leaves.
  std::size_t count = 0;

  bool is_leaf() const { return left < 0; }
};

class CartTree {
 public:
  CartTree() = default;

  // Greedy recursive induction on `rows` (all rows when empty). Throws
  // DataError when there are no rows.
  static CartTree Fit(const FeatureMatrix& matrix,
                      std::span<const double> targets,
                      std::span<const std::size_t> rows,
                      const CartConfig& config);

  double Predict(std::span<const double> features) const;

  const std::vector<CartNode>& nodes() const { return nodes_; }
  int Depth() const;
  std::size_t NumLeaves() const;

  // Adds each split's gain to importance[column].
  void AccumulateGains(std::span<double> importance) const;

  // Nested {"leaf": v, "count": n} / {"split": ..., "gain", "left", "right"}.
  nlohmann::json ToJson(std::span<const ColumnSpec> specs) const;
  static CartTree FromJson(const nlohmann::json& json,
                           std::span<const ColumnSpec> specs);

  bool operator==(const CartTree&) const;

 private:
  std::vector<CartNode> nodes_;
};

}  // namespace hearthcast

#endif  // HEARTHCAST_CART_HPP_
