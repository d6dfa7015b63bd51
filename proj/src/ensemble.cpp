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

#include "hearthcast/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "hearthcast/errors.hpp"
#include "hearthcast/matrix.hpp"
#include "hearthcast/random.hpp"

namespace hearthcast {
namespace {

// Runs body(i) for i in [0, count) on up to n_threads workers.
template <typename Body>
void ParallelFor(std::size_t count, unsigned n_threads, Body body) {
  if (n_threads == 0) n_threads = std::max(1U, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, count));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::jthread> workers;
  for (unsigned t = 0; t < n_threads; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  workers.clear();
  if (failure) std::rethrow_exception(failure);
}

nlohmann::json TreesToJson(std::span<const CartTree> trees) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : trees) out.push_back(t.ToJson(HouseholdSchema()));
  return out;
}

std::vector<CartTree> TreesFromJson(const nlohmann::json& json) {
  std::vector<CartTree> trees;
  for (const auto& t : json) {
    trees.push_back(CartTree::FromJson(t, HouseholdSchema()));
  }
  return trees;
}

}  // namespace

void ForestConfig::Validate(std::size_t num_columns) const {
  if (n_trees < 1) throw ConfigError("n_trees must be >= 1");
  if (min_leaf < 1) throw ConfigError("min_leaf must be >= 1");
  if (features_per_split != kAllFeatures && features_per_split > num_columns) {
    throw ConfigError(fmt::format("features_per_split {} exceeds {} columns",
                                  features_per_split, num_columns));
  }
}

std::size_t ForestConfig::ResolvedFeaturesPerSplit(
    std::size_t num_columns) const {
  if (features_per_split == kAllFeatures) return num_columns;
  if (features_per_split == 0) {
    return static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(num_columns))));
  }
  return features_per_split;
}

nlohmann::json ForestConfig::ToJson() const {
  nlohmann::json fps;
  if (features_per_split == kAllFeatures) {
    fps = "all";
  } else if (features_per_split == 0) {
    fps = "sqrt";
  } else {
    fps = features_per_split;
  }
  return {{"n_trees", n_trees},     {"bootstrap", bootstrap},
          {"features_per_split", fps}, {"max_depth", max_depth},
          {"min_leaf", min_leaf},   {"seed", seed}};
}

ForestConfig ForestConfig::FromJson(const nlohmann::json& json) {
  ForestConfig c;
  c.n_trees = json.value("n_trees", c.n_trees);
  c.bootstrap = json.value("bootstrap", c.bootstrap);
  if (json.contains("features_per_split")) {
    const auto& fps = json.at("features_per_split");
    if (fps.is_string()) {
      const auto s = fps.get<std::string>();
      if (s == "all") {
        c.features_per_split = kAllFeatures;
      } else if (s == "sqrt") {
        c.features_per_split = 0;
      } else {
        throw ConfigError("features_per_split must be a count, \"all\" or "
                          "\"sqrt\"");
      }
    } else {
      c.features_per_split = fps.get<std::size_t>();
      if (c.features_per_split == 0) {
        throw ConfigError("features_per_split must be >= 1");
      }
    }
  }
  c.max_depth = json.value("max_depth", c.max_depth);
  c.min_leaf = json.value("min_leaf", c.min_leaf);
  c.seed = json.value("seed", c.seed);
  c.n_threads = json.value("n_threads", c.n_threads);
  return c;
}

void BoostConfig::Validate() const {
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw ConfigError("learning_rate must lie in (0, 1]");
  }
  if (min_leaf < 1) throw ConfigError("min_leaf must be >= 1");
}

nlohmann::json BoostConfig::ToJson() const {
  return {{"n_stages", n_stages},
          {"learning_rate", learning_rate},
          {"max_depth", max_depth},
          {"min_leaf", min_leaf},
          {"seed", seed}};
}

BoostConfig BoostConfig::FromJson(const nlohmann::json& json) {
  BoostConfig c;
  c.n_stages = json.value("n_stages", c.n_stages);
  c.learning_rate = json.value("learning_rate", c.learning_rate);
  c.max_depth = json.value("max_depth", c.max_depth);
  c.min_leaf = json.value("min_leaf", c.min_leaf);
  c.seed = json.value("seed", c.seed);
  c.Validate();
  return c;
}

Forest Forest::Fit(const FeatureMatrix& matrix, std::span<const double> targets,
                   const ForestConfig& config) {
  config.Validate(matrix.num_columns());
  const std::size_t n = matrix.num_rows();
  if (n == 0) throw DataError("cannot fit a forest on an empty dataset");

  CartConfig tree_config;
  tree_config.max_depth = config.max_depth;
  tree_config.min_leaf = config.min_leaf;
  tree_config.features_per_split =
      config.ResolvedFeaturesPerSplit(matrix.num_columns());

  Forest forest;
  forest.trees_.resize(config.n_trees);
  ParallelFor(config.n_trees, config.n_threads, [&](std::size_t t) {
    const std::uint64_t tree_seed = DeriveSeed(config.seed, t);
    std::vector<std::size_t> rows(n);
    if (config.bootstrap) {
      SplitMix64 rng(DeriveSeed(tree_seed, 0));
      for (auto& r : rows) r = rng.Below(n);
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    CartConfig c = tree_config;
    c.seed = DeriveSeed(tree_seed, 1);
    forest.trees_[t] = CartTree::Fit(matrix, targets, rows, c);
  });
  return forest;
}

double Forest::Predict(std::span<const double> features) const {
  if (trees_.empty()) throw ModelError("predict on an empty forest");
  double sum = 0.0;
  for (const auto& t : trees_) sum += t.Predict(features);
  return sum / static_cast<double>(trees_.size());
}

BoostedEnsemble BoostedEnsemble::Fit(const FeatureMatrix& matrix,
                                     std::span<const double> targets,
                                     const BoostConfig& config,
                                     std::vector<double>* training_mse) {
  config.Validate();
  const std::size_t n = matrix.num_rows();
  if (n == 0) throw DataError("cannot fit boosting on an empty dataset");

  double base = 0.0;
  for (double y : targets) base += y;
  base /= static_cast<double>(n);

  std::vector<double> fitted(n, base);
  std::vector<double> residuals(n);
  std::vector<double> row(matrix.num_columns());
  auto mse = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s += (targets[i] - fitted[i]) * (targets[i] - fitted[i]);
    }
    return s / static_cast<double>(n);
  };
  if (training_mse) training_mse->assign(1, mse());

  CartConfig tree_config;
  tree_config.max_depth = config.max_depth;
  tree_config.min_leaf = config.min_leaf;
  tree_config.seed = config.seed;

  std::vector<CartTree> stages;
  stages.reserve(config.n_stages);
  for (std::size_t m = 0; m < config.n_stages; ++m) {
    for (std::size_t i = 0; i < n; ++i) residuals[i] = targets[i] - fitted[i];
    CartTree tree = CartTree::Fit(matrix, residuals, {}, tree_config);
    for (std::size_t i = 0; i < n; ++i) {
      matrix.Row(i, row);
      fitted[i] += config.learning_rate * tree.Predict(row);
    }
    stages.push_back(std::move(tree));
    if (training_mse) training_mse->push_back(mse());
  }
  return BoostedEnsemble(base, config.learning_rate, std::move(stages));
}

double BoostedEnsemble::Predict(std::span<const double> features) const {
  double sum = 0.0;
  for (const auto& t : stages_) sum += t.Predict(features);
  return base_ + learning_rate_ * sum;
}

std::vector<std::pair<std::string, double>> FeatureImportance::Ranked() const {
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    out.emplace_back(names[i], weights[i]);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;
  });
  return out;
}

std::string FeatureImportance::ToCsv() const {
  std::string csv = "slot_name,weight\n";
  for (const auto& [name, weight] : Ranked()) {
    csv += fmt::format("{},{}\n", name, weight);
  }
  return csv;
}

FeatureImportance ImportanceFromTrees(std::span<const CartTree> trees,
                                      std::span<const ColumnSpec> specs) {
  FeatureImportance imp;
  imp.weights.assign(specs.size(), 0.0);
  for (const auto& s : specs) imp.names.push_back(s.name);
  for (const auto& t : trees) t.AccumulateGains(imp.weights);
  const double total = std::accumulate(imp.weights.begin(), imp.weights.end(), 0.0);
  if (total > 0.0) {
    for (auto& w : imp.weights) w /= total;
  }
  return imp;
}

ForestModel::ForestModel(Forest forest, ForestConfig config,
                         LowConsumptionRule rule)
    : forest_(std::move(forest)), config_(config), rule_(std::move(rule)) {}

std::unique_ptr<ForestModel> ForestModel::Fit(const Dataset& train,
                                              const ForestConfig& config,
                                              const LowConsumptionRule& rule) {
  if (train.empty()) throw DataError("cannot fit on an empty dataset");
  const FeatureMatrix m = EncodeDataset(train, rule);
  const std::vector<double> y = Targets(train);
  return std::make_unique<ForestModel>(Forest::Fit(m, y, config), config, rule);
}

double ForestModel::Predict(const HouseholdRecord& record) const {
  return forest_.Predict(Encode(record, rule_));
}

nlohmann::json ForestModel::Body() const {
  return {{"config", config_.ToJson()},
          {"low_consumption_rule", rule_.ToJson()},
          {"trees", TreesToJson(forest_.trees())}};
}

std::unique_ptr<ForestModel> ForestModel::FromBody(const nlohmann::json& body) {
  Forest forest;
  forest.trees() = TreesFromJson(body.at("trees"));
  if (forest.trees().empty()) throw ModelError("forest without trees");
  return std::make_unique<ForestModel>(
      std::move(forest), ForestConfig::FromJson(body.at("config")),
      LowConsumptionRule::FromJson(body.at("low_consumption_rule")));
}

FeatureImportance ForestModel::Importance() const {
  return ImportanceFromTrees(forest_.trees(), HouseholdSchema());
}

BoostedModel::BoostedModel(BoostedEnsemble ensemble, BoostConfig config,
                           LowConsumptionRule rule)
    : ensemble_(std::move(ensemble)), config_(config), rule_(std::move(rule)) {}

std::unique_ptr<BoostedModel> BoostedModel::Fit(const Dataset& train,
                                                const BoostConfig& config,
                                                const LowConsumptionRule& rule) {
  if (train.empty()) throw DataError("cannot fit on an empty dataset");
  const FeatureMatrix m = EncodeDataset(train, rule);
  const std::vector<double> y = Targets(train);
  return std::make_unique<BoostedModel>(BoostedEnsemble::Fit(m, y, config),
                                        config, rule);
}

double BoostedModel::Predict(const HouseholdRecord& record) const {
  return ensemble_.Predict(Encode(record, rule_));
}

nlohmann::json BoostedModel::Body() const {
  return {{"config", config_.ToJson()},
          {"low_consumption_rule", rule_.ToJson()},
          {"base", ensemble_.base()},
          {"learning_rate", ensemble_.learning_rate()},
          {"stages", TreesToJson(ensemble_.stages())}};
}

std::unique_ptr<BoostedModel> BoostedModel::FromBody(
    const nlohmann::json& body) {
  return std::make_unique<BoostedModel>(
      BoostedEnsemble(body.at("base").get<double>(),
                      body.at("learning_rate").get<double>(),
                      TreesFromJson(body.at("stages"))),
      BoostConfig::FromJson(body.at("config")),
      LowConsumptionRule::FromJson(body.at("low_consumption_rule")));
}

FeatureImportance BoostedModel::Importance() const {
  return ImportanceFromTrees(ensemble_.stages(), HouseholdSchema());
}

}  // namespace hearthcast
