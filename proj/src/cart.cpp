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

#include "hearthcast/cart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include <fmt/format.h>

#include "hearthcast/errors.hpp"
#include "hearthcast/random.hpp"

namespace hearthcast {
namespace {

// Running sums of centered targets.
struct Moments {
  std::size_t count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void Add(double d) {
    ++count;
    sum += d;
    sum_sq += d * d;
  }
  double Sse() const {
    if (count == 0) return 0.0;
    return std::max(0.0, sum_sq - sum * sum / static_cast<double>(count));
  }
};

double ChildrenSse(const Moments& left, const Moments& total) {
  Moments right{total.count - left.count, total.sum - left.sum,
                total.sum_sq - left.sum_sq};
  return left.Sse() + right.Sse();
}

struct Candidate {
  double sse = std::numeric_limits<double>::infinity();
  SplitRule rule;
  std::size_t left_count = 0;
};

struct Group {
  double value;
  Moments moments;
};

void ScanNumeric(const std::vector<double>& column,
                 std::span<const std::size_t> rows,
                 std::span<const double> centered, int column_index,
                 std::size_t min_leaf, const Moments& total,
                 Candidate& best) {
  thread_local std::vector<std::pair<double, double>> pairs;
  thread_local std::vector<Group> groups;
  pairs.clear();
  groups.clear();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    pairs.emplace_back(column[rows[i]], centered[i]);
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [x, d] : pairs) {
    if (groups.empty() || groups.back().value != x) groups.push_back({x, {}});
    groups.back().moments.Add(d);
  }
  const std::size_t m = groups.size();
  if (m < 2) return;

  // Cut positions: a cut after group t separates groups [0, t] from the rest.
  thread_local std::vector<std::size_t> cuts;
  cuts.clear();
  if (m <= kMaxNumericCuts) {
    for (std::size_t t = 0; t + 1 < m; ++t) cuts.push_back(t);
  } else {
    const std::size_t n = rows.size();
    std::size_t t = 0;
    std::size_t cumulative = groups[0].moments.count;
    for (std::size_t j = 1; j <= kMaxNumericCuts; ++j) {
      const std::size_t rank =
          (j * n + kMaxNumericCuts) / (kMaxNumericCuts + 1);  // ceil
      while (cumulative < rank) cumulative += groups[++t].moments.count;
      if (t + 1 < m && (cuts.empty() || cuts.back() != t)) cuts.push_back(t);
    }
  }

  Moments left;
  std::size_t next_group = 0;
  for (std::size_t t : cuts) {
    while (next_group <= t) {
      const Moments& g = groups[next_group++].moments;
      left.count += g.count;
      left.sum += g.sum;
      left.sum_sq += g.sum_sq;
    }
    if (left.count < min_leaf || total.count - left.count < min_leaf) continue;
    const double sse = ChildrenSse(left, total);
    if (sse < best.sse) {
      const double lo = groups[t].value;
      const double hi = groups[t + 1].value;
      double threshold = lo + (hi - lo) / 2.0;
      if (!(threshold >= lo && threshold < hi)) threshold = lo;
      best.sse = sse;
      best.rule = SplitRule{column_index, false, threshold, 0};
      best.left_count = left.count;
    }
  }
}

void ScanCategorical(const std::vector<double>& column,
                     std::span<const std::size_t> rows,
                     std::span<const double> centered, int column_index,
                     std::size_t min_leaf, const Moments& total,
                     Candidate& best) {
  std::array<Moments, 64> per_code{};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto code = static_cast<std::size_t>(column[rows[i]]);
    if (code >= per_code.size()) {
      throw DataError("category code out of range in column " +
                      std::to_string(column_index));
    }
    per_code[code].Add(centered[i]);
  }
  std::vector<std::size_t> present;
  for (std::size_t c = 0; c < per_code.size(); ++c) {
    if (per_code[c].count > 0) present.push_back(c);
  }
  if (present.size() < 2) return;
  std::stable_sort(present.begin(), present.end(),
                   [&](std::size_t a, std::size_t b) {
                     return per_code[a].sum / per_code[a].count <
                            per_code[b].sum / per_code[b].count;
                   });
  Moments left;
  std::uint64_t mask = 0;
  for (std::size_t k = 0; k + 1 < present.size(); ++k) {
    const Moments& g = per_code[present[k]];
    left.count += g.count;
    left.sum += g.sum;
    left.sum_sq += g.sum_sq;
    mask |= std::uint64_t{1} << present[k];
    if (left.count < min_leaf || total.count - left.count < min_leaf) continue;
    const double sse = ChildrenSse(left, total);
    if (sse < best.sse) {
      best.sse = sse;
      best.rule = SplitRule{column_index, true, 0.0, mask};
      best.left_count = left.count;
    }
  }
}

}  // namespace

std::string SplitRule::Describe(const ColumnSpec& spec) const {
  if (!categorical) return fmt::format("{} ≤ {}", spec.name, threshold);
  std::string names;
  for (std::size_t c = 0; c < 64; ++c) {
    if (((left_categories >> c) & 1U) == 0) continue;
    if (!names.empty()) names += ", ";
    names += c < spec.categories.size() ? spec.categories[c]
                                        : std::to_string(c);
  }
  return fmt::format("{} ∈ {{{}}}", spec.name, names);
}

nlohmann::json SplitRule::ToJson(const ColumnSpec& spec) const {
  nlohmann::json out = {{"feature", spec.name}};
  if (!categorical) {
    out["threshold"] = threshold;
    return out;
  }
  nlohmann::json names = nlohmann::json::array();
  for (std::size_t c = 0; c < 64; ++c) {
    if (((left_categories >> c) & 1U) == 0) continue;
    if (c >= spec.categories.size()) {
      throw ModelError("category code " + std::to_string(c) +
                       " outside the code table of " + spec.name);
    }
    names.push_back(spec.categories[c]);
  }
  out["left_categories"] = names;
  return out;
}

SplitRule SplitRule::FromJson(const nlohmann::json& json,
                              std::span<const ColumnSpec> specs) {
  const auto name = json.at("feature").get<std::string>();
  const auto it = std::find_if(specs.begin(), specs.end(),
                               [&](const auto& s) { return s.name == name; });
  if (it == specs.end()) throw ModelError("unknown feature '" + name + "'");
  SplitRule rule;
  rule.column = static_cast<int>(it - specs.begin());
  rule.categorical = it->categorical;
  if (!rule.categorical) {
    rule.threshold = json.at("threshold").get<double>();
    return rule;
  }
  for (const auto& cat : json.at("left_categories")) {
    const auto c = std::find(it->categories.begin(), it->categories.end(),
                             cat.get<std::string>());
    if (c == it->categories.end()) {
      throw ModelError("unknown category '" + cat.get<std::string>() +
                       "' for " + name);
    }
    rule.left_categories |= std::uint64_t{1}
                            << static_cast<unsigned>(c - it->categories.begin());
  }
  return rule;
}

double NodeSse(std::span<const double> targets,
               std::span<const std::size_t> rows) {
  if (rows.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t r : rows) sum += targets[r];
  const double mean = sum / static_cast<double>(rows.size());
  double sse = 0.0;
  for (std::size_t r : rows) sse += (targets[r] - mean) * (targets[r] - mean);
  return sse;
}

std::optional<SplitDecision> FindBestSplit(const FeatureMatrix& matrix,
                                           std::span<const double> targets,
                                           std::span<const std::size_t> rows,
                                           std::size_t min_leaf,
                                           std::span<const int> columns) {
  min_leaf = std::max<std::size_t>(min_leaf, 1);
  const std::size_t n = rows.size();
  if (n < 2 * min_leaf) return std::nullopt;

  double sum = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t r : rows) {
    sum += targets[r];
    lo = std::min(lo, targets[r]);
    hi = std::max(hi, targets[r]);
  }
  if (lo == hi) return std::nullopt;
  const double mean = sum / static_cast<double>(n);

  thread_local std::vector<double> centered;
  centered.resize(n);
  Moments total;
  for (std::size_t i = 0; i < n; ++i) {
    centered[i] = targets[rows[i]] - mean;
    total.Add(centered[i]);
  }
  const double sse_before = total.sum_sq;

  std::vector<int> order;
  if (columns.empty()) {
    order.resize(matrix.num_columns());
    std::iota(order.begin(), order.end(), 0);
  } else {
    order.assign(columns.begin(), columns.end());
    std::sort(order.begin(), order.end());
  }

  Candidate best;
  for (int c : order) {
    const auto& column = matrix.columns[static_cast<std::size_t>(c)];
    if (matrix.specs[static_cast<std::size_t>(c)].categorical) {
      ScanCategorical(column, rows, centered, c, min_leaf, total, best);
    } else {
      ScanNumeric(column, rows, centered, c, min_leaf, total, best);
    }
  }
  if (!std::isfinite(best.sse) || !(best.sse < sse_before * (1.0 - 1e-12))) {
    return std::nullopt;
  }
  return SplitDecision{best.rule, sse_before, best.sse, best.left_count,
                       n - best.left_count};
}

std::size_t PartitionRows(const FeatureMatrix& matrix, const SplitRule& rule,
                          std::span<std::size_t> rows) {
  const auto& column = matrix.columns[static_cast<std::size_t>(rule.column)];
  const auto mid = std::stable_partition(
      rows.begin(), rows.end(),
      [&](std::size_t r) { return rule.GoesLeft(column[r]); });
  return static_cast<std::size_t>(mid - rows.begin());
}

void CartConfig::Validate() const {
  if (min_leaf < 1) throw ConfigError("min_leaf must be >= 1");
}

nlohmann::json CartConfig::ToJson() const {
  return {{"max_depth", max_depth},
          {"min_leaf", min_leaf},
          {"features_per_split", features_per_split},
          {"seed", seed}};
}

CartConfig CartConfig::FromJson(const nlohmann::json& json) {
  CartConfig c;
  c.max_depth = json.value("max_depth", c.max_depth);
  c.min_leaf = json.value("min_leaf", c.min_leaf);
  c.features_per_split = json.value("features_per_split", c.features_per_split);
  c.seed = json.value("seed", c.seed);
  c.Validate();
  return c;
}

namespace {

class CartBuilder {
 public:
  CartBuilder(const FeatureMatrix& matrix, std::span<const double> targets,
              const CartConfig& config, std::vector<CartNode>& nodes)
      : matrix_(matrix),
        targets_(targets),
        config_(config),
        nodes_(nodes),
        rng_(config.seed) {
    all_columns_.resize(matrix.num_columns());
    std::iota(all_columns_.begin(), all_columns_.end(), 0);
  }

  int Build(std::span<std::size_t> rows, int depth) {
    const int index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    double sum = 0.0;
    for (std::size_t r : rows) sum += targets_[r];
    nodes_[index].value = sum / static_cast<double>(rows.size());
    nodes_[index].count = rows.size();

    if (config_.max_depth >= 0 && depth >= config_.max_depth) return index;
    const auto split = FindBestSplit(matrix_, targets_, rows, config_.min_leaf,
                                     SampleColumns());
    if (!split) return index;

    const std::size_t n_left = PartitionRows(matrix_, split->rule, rows);
    nodes_[index].rule = split->rule;
    nodes_[index].gain = split->sse_before - split->sse_after;
    const int left = Build(rows.subspan(0, n_left), depth + 1);
    const int right = Build(rows.subspan(n_left), depth + 1);
    nodes_[index].left = left;
    nodes_[index].right = right;
    return index;
  }

 private:
  std::span<const int> SampleColumns() {
    const std::size_t k = config_.features_per_split;
    if (k == 0 || k >= all_columns_.size()) return all_columns_;
    sampled_ = all_columns_;
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + rng_.Below(sampled_.size() - i);
      std::swap(sampled_[i], sampled_[j]);
    }
    sampled_.resize(k);
    return sampled_;
  }

  const FeatureMatrix& matrix_;
  std::span<const double> targets_;
  const CartConfig& config_;
  std::vector<CartNode>& nodes_;
  SplitMix64 rng_;
  std::vector<int> all_columns_;
  std::vector<int> sampled_;
};

int DepthFrom(const std::vector<CartNode>& nodes, int index) {
  const auto& node = nodes[static_cast<std::size_t>(index)];
  if (node.is_leaf()) return 0;
  return 1 + std::max(DepthFrom(nodes, node.left), DepthFrom(nodes, node.right));
}

nlohmann::json NodeToJson(const std::vector<CartNode>& nodes, int index,
                          std::span<const ColumnSpec> specs) {
  const auto& node = nodes[static_cast<std::size_t>(index)];
  if (node.is_leaf()) return {{"leaf", node.value}, {"count", node.count}};
  return {{"split", node.rule.ToJson(specs[node.rule.column])},
          {"value", node.value},
          {"count", node.count},
          {"gain", node.gain},
          {"left", NodeToJson(nodes, node.left, specs)},
          {"right", NodeToJson(nodes, node.right, specs)}};
}

int NodeFromJson(const nlohmann::json& json, std::span<const ColumnSpec> specs,
                 std::vector<CartNode>& nodes) {
  const int index = static_cast<int>(nodes.size());
  nodes.emplace_back();
  if (json.contains("leaf")) {
    nodes[index].value = json.at("leaf").get<double>();
    nodes[index].count = json.value("count", std::size_t{0});
    return index;
  }
  nodes[index].rule = SplitRule::FromJson(json.at("split"), specs);
  nodes[index].value = json.at("value").get<double>();
  nodes[index].count = json.value("count", std::size_t{0});
  nodes[index].gain = json.value("gain", 0.0);
  const int left = NodeFromJson(json.at("left"), specs, nodes);
  const int right = NodeFromJson(json.at("right"), specs, nodes);
  nodes[index].left = left;
  nodes[index].right = right;
  return index;
}

}  // namespace

CartTree CartTree::Fit(const FeatureMatrix& matrix,
                       std::span<const double> targets,
                       std::span<const std::size_t> rows,
                       const CartConfig& config) {
  config.Validate();
  std::vector<std::size_t> work(rows.begin(), rows.end());
  if (rows.empty()) {
    work.resize(matrix.num_rows());
    std::iota(work.begin(), work.end(), std::size_t{0});
  }
  if (work.empty()) throw DataError("cannot fit a tree on an empty dataset");
  CartTree tree;
  CartBuilder builder(matrix, targets, config, tree.nodes_);
  builder.Build(work, 0);
  return tree;
}

double CartTree::Predict(std::span<const double> features) const {
  if (nodes_.empty()) throw ModelError("predict on an unfitted tree");
  const CartNode* node = &nodes_.front();
  while (!node->is_leaf()) {
    const int next = node->rule.GoesLeft(features[node->rule.column])
                         ? node->left
                         : node->right;
    node = &nodes_[static_cast<std::size_t>(next)];
  }
  return node->value;
}

int CartTree::Depth() const { return nodes_.empty() ? 0 : DepthFrom(nodes_, 0); }

std::size_t CartTree::NumLeaves() const {
  return static_cast<std::size_t>(std::count_if(
      nodes_.begin(), nodes_.end(), [](const auto& n) { return n.is_leaf(); }));
}

void CartTree::AccumulateGains(std::span<double> importance) const {
  for (const auto& node : nodes_) {
    if (!node.is_leaf()) importance[node.rule.column] += node.gain;
  }
}

nlohmann::json CartTree::ToJson(std::span<const ColumnSpec> specs) const {
  if (nodes_.empty()) throw ModelError("cannot serialize an unfitted tree");
  return NodeToJson(nodes_, 0, specs);
}

CartTree CartTree::FromJson(const nlohmann::json& json,
                            std::span<const ColumnSpec> specs) {
  CartTree tree;
  NodeFromJson(json, specs, tree.nodes_);
  return tree;
}

bool CartTree::operator==(const CartTree& other) const {
  if (nodes_.size() != other.nodes_.size()) return false;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& a = nodes_[i];
    const auto& b = other.nodes_[i];
    if (!(a.rule == b.rule) || a.left != b.left || a.right != b.right ||
        a.value != b.value || a.gain != b.gain || a.count != b.count) {
      return false;
    }
  }
  return true;
}

}  // namespace hearthcast
