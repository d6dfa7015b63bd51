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

// Level-uniform regression tree with linear-in-surface leaves.
//
// All internal nodes at depth d split on the same feature, schedule[d]; each
// node picks its own threshold (or category subset) with the CART split rules
// of cart.hpp, subject to a minimum bucket size on both children. A node
// without a valid split becomes a leaf early, its siblings keep growing.
// Depth never exceeds kMaxScheduleLength.
//
// Leaves predict alpha + beta * surface with beta >= 0, so the estimate moves
// continuously with the surface inside a bucket and never decreases with it.
// Unless monotone_surface is turned off, leaves on either side of a surface
// split are fitted under bounds that keep this true across buckets as well.

#ifndef HEARTHCAST_CONSTRAINED_TREE_HPP_
#define HEARTHCAST_CONSTRAINED_TREE_HPP_

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hearthcast/cart.hpp"
#include "hearthcast/dataset.hpp"
#include "hearthcast/features.hpp"
#include "hearthcast/model.hpp"

namespace hearthcast {

inline constexpr std::size_t kMaxScheduleLength = 7;

enum class LeafModelKind {
  kMean,           // beta = 0, alpha = leaf mean.
  kSurfaceLinear,  // Per-leaf least squares on surface, slope clamped at 0.
  kGlobalSurface,  // One pooled within-leaf slope shared by all leaves.
};

enum class ThresholdMode {
  kPerNode,  // Each node chooses its own threshold.
  kShared,   // One threshold (or subset) per level, for ablation studies.
};

enum class SearchMode { kGreedy, kExhaustive };

struct LeafLinear {
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t support = 0;

  double Predict(double surface) const { return alpha + beta * surface; }

  bool operator==(const LeafLinear&) const = default;
};

// Least squares of target on surface over `rows`. When the slope is negative
// or the surface is constant, beta = 0 and alpha = mean target.
// Throws DataError on empty rows.
LeafLinear FitLeafLinear(std::span<const double> surface,
                         std::span<const double> targets,
                         std::span<const std::size_t> rows);

// Binary column that is 1 only when the surface lies in
// (lower_edge, upper_edge], e.g. a low-consumption flag with a surface clause.
// Crossing an edge can flip the flag, so splits on it are bounded like
// surface splits.
struct SurfaceIndicator {
  int column = -1;
  double lower_edge = -std::numeric_limits<double>::infinity();
  double upper_edge = std::numeric_limits<double>::infinity();
};

// Options of the generic level-wise learner.
struct LevelwiseOptions {
  std::size_t min_bucket = 50;
  LeafModelKind leaf_model = LeafModelKind::kSurfaceLinear;
  ThresholdMode threshold_mode = ThresholdMode::kPerNode;
  // Column holding the surface, or -1 when leaves are constant.
  int surface_column = -1;
  // Keeps predictions non-decreasing in surface across buckets: leaves on
  // either side of a surface split or indicator edge are fitted under point
  // bounds that meet at the boundary. Leaf lines then differ from
  // FitLeafLinear where neighbouring buckets conflict.
  bool monotone_surface = true;
  std::vector<SurfaceIndicator> surface_indicators;
};

struct LevelNode {
  SplitRule rule;
  int level = 0;
  int left = -1;
  int right = -1;
  std::size_t support = 0;
  LeafLinear leaf;  // Valid for leaves only.

  bool is_leaf() const { return left < 0; }
};

struct TraceStep {
  int level = 0;
  std::string feature;
  std::string rule;  // Node test, e.g. "occupants ≤ 2.5".
  bool went_left = true;

  // "occupants ≤ 2.5 → left"
  std::string Text() const;
};

struct ExplanationTrace {
  std::vector<TraceStep> steps;
  int leaf_id = -1;
  double alpha = 0.0;
  double beta = 0.0;
  double surface = 0.0;
  double surface_contribution = 0.0;  // beta * surface
  double prediction = 0.0;            // alpha + surface_contribution

  nlohmann::json ToJson() const;
  // One line per step followed by the leaf line.
  std::string Text() const;
};

// Generic level-uniform tree over a FeatureMatrix; schedule entries are column
// indexes.
class LevelwiseTree {
 public:
  LevelwiseTree() = default;

  // Throws DataError when there are fewer rows than min_bucket and ConfigError
  // when the schedule is longer than kMaxScheduleLength.
  // Fitting is deterministic: nodes are expanded breadth-first in a fixed
  // order.
  static LevelwiseTree Fit(const FeatureMatrix& matrix,
                           std::span<const double> targets,
                           std::span<const int> schedule,
                           const LevelwiseOptions& options);

  double Predict(std::span<const double> features) const;
  ExplanationTrace Explain(std::span<const double> features,
                           std::span<const ColumnSpec> specs) const;

  const std::vector<int>& schedule() const { return schedule_; }
  const std::vector<LevelNode>& nodes() const { return nodes_; }
  const LevelwiseOptions& options() const { return options_; }
  // Sum of squared residuals of the leaf models on the training rows.
  double training_sse() const { return training_sse_; }
  int Depth() const;
  std::size_t NumLeaves() const;

  nlohmann::json ToJson(std::span<const ColumnSpec> specs) const;
  static LevelwiseTree FromJson(const nlohmann::json& json,
                                std::span<const ColumnSpec> specs,
                                const LevelwiseOptions& options);

 private:
  std::vector<int> schedule_;
  std::vector<LevelNode> nodes_;
  LevelwiseOptions options_;
  double training_sse_ = 0.0;
};

struct ScheduleCandidate {
  int column = 0;
  int max_uses = 1;
};

struct ScheduleSearchResult {
  std::vector<int> schedule;
  LevelwiseTree tree;
  std::size_t schedules_evaluated = 0;
};

// Number of distinct schedules of length 1..kMaxScheduleLength drawn from the
// candidates within their use limits.
std::size_t CountSchedules(std::span<const ScheduleCandidate> candidates);

// Greedy: at each level, picks the candidate minimizing the training SSE of
// the configured leaf model after splitting every frontier node, and stops
// when no candidate lowers it. Exhaustive: fits every schedule and keeps the lowest training
// SSE under the configured leaf model; earlier schedules in depth-first
// candidate order win ties. Throws ConfigError when exhaustive search would
// exceed `exhaustive_cap` schedules or candidates are empty.
ScheduleSearchResult SearchSchedule(const FeatureMatrix& matrix,
                                    std::span<const double> targets,
                                    std::span<const ScheduleCandidate> candidates,
                                    const LevelwiseOptions& options,
                                    SearchMode mode,
                                    std::size_t exhaustive_cap = 100000);

// low_consumption, tariff_index, occupants, heating_type, water_heating_type,
// surface, surface.
std::vector<Slot> DefaultSchedule();
// Features a schedule may use; surface may appear twice.
std::vector<Slot> ScheduleCandidates();

struct ConstrainedTreeConfig {
  std::size_t min_bucket = 50;
  // Features by level. Used unless `search` is set.
  std::vector<Slot> schedule = DefaultSchedule();
  bool search = false;
  std::vector<Slot> candidates = ScheduleCandidates();
  SearchMode search_mode = SearchMode::kGreedy;
  std::size_t exhaustive_cap = 100000;
  LeafModelKind leaf_model = LeafModelKind::kSurfaceLinear;
  ThresholdMode threshold_mode = ThresholdMode::kPerNode;
  bool monotone_surface = true;

  void Validate() const;
  nlohmann::json ToJson() const;
  static ConstrainedTreeConfig FromJson(const nlohmann::json& json);
};

class ConstrainedTreeModel final : public ForecastModel {
 public:
  ConstrainedTreeModel(LevelwiseTree tree, ConstrainedTreeConfig config,
                       LowConsumptionRule rule);

  // Fits with config.schedule, or searches a schedule when config.search.
  static std::unique_ptr<ConstrainedTreeModel> Fit(
      const Dataset& train, const ConstrainedTreeConfig& config,
      const LowConsumptionRule& rule = LowConsumptionRule::Default());

  ModelKind kind() const override { return ModelKind::kConstrainedTree; }
  double Predict(const HouseholdRecord& record) const override;
  nlohmann::json Body() const override;
  static std::unique_ptr<ConstrainedTreeModel> FromBody(
      const nlohmann::json& body);

  ExplanationTrace Explain(const HouseholdRecord& record) const;

  const LevelwiseTree& tree() const { return tree_; }
  const ConstrainedTreeConfig& config() const { return config_; }
  std::vector<Slot> Levels() const;

 private:
  LevelwiseTree tree_;
  ConstrainedTreeConfig config_;
  LowConsumptionRule rule_;
};

}  // namespace hearthcast

#endif  // HEARTHCAST_CONSTRAINED_TREE_HPP_
