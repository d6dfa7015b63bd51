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

#include "hearthcast/bench.hpp"

#include <cmath>
#include <fstream>
#include <memory>

#include <fmt/format.h>

#include "hearthcast/errors.hpp"
#include "hearthcast/random.hpp"

namespace hearthcast {
namespace {

constexpr std::array<Regime, 2> kRegimes = {Regime::kWithOutliers,
                                            Regime::kFiltered};

std::vector<double> PredictAll(const ForecastModel& model, const Dataset& data) {
  std::vector<double> out;
  out.reserve(data.size());
  for (const auto& e : data.examples) out.push_back(model.Predict(e.record));
  return out;
}

std::unique_ptr<ForecastModel> TrainModel(const BenchModel& model,
                                          const BenchmarkSpec& spec,
                                          const Dataset& train,
                                          FeatureImportance* importance) {
  switch (model.kind) {
    case ModelKind::kLegacy:
      return std::make_unique<LegacyModel>(spec.legacy);
    case ModelKind::kLinearRegression:
      return LinearModel::Fit(train, spec.ridge_epsilon, spec.rule);
    case ModelKind::kRandomForest: {
      ForestConfig config = spec.forest;
      config.seed = DeriveSeed(spec.seed, 3);
      auto fitted = ForestModel::Fit(train, config, spec.rule);
      if (importance) *importance = fitted->Importance();
      return fitted;
    }
    case ModelKind::kGradientBoosting: {
      BoostConfig config = spec.boost;
      config.seed = DeriveSeed(spec.seed, 4);
      auto fitted = BoostedModel::Fit(train, config, spec.rule);
      if (importance) *importance = fitted->Importance();
      return fitted;
    }
    case ModelKind::kConstrainedTree:
      return ConstrainedTreeModel::Fit(train, spec.tree, spec.rule);
    case ModelKind::kCart:
      break;
  }
  throw ConfigError("model kind is not part of the benchmark");
}

nlohmann::json ImportanceToJson(const FeatureImportance& importance) {
  return {{"names", importance.names}, {"weights", importance.weights}};
}

FeatureImportance ImportanceFromJson(const nlohmann::json& json) {
  FeatureImportance out;
  out.names = json.at("names").get<std::vector<std::string>>();
  out.weights = json.at("weights").get<std::vector<double>>();
  return out;
}

Regime ParseRegime(const std::string& id) {
  if (id == "a") return Regime::kWithOutliers;
  if (id == "b") return Regime::kFiltered;
  throw DataError("unknown regime '" + id + "'");
}

std::string Number(double value) { return fmt::format("{}", value); }

void WriteFile(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("failed writing " + path.string());
}

std::string GapsCsv(const BenchmarkReport& report,
                    const ModelRegimeResult& result, double unit_price) {
  std::string out = "index,target,prediction,gap,relative_gap,monetary_gap,inlier\n";
  for (std::size_t i = 0; i < report.test_targets.size(); ++i) {
    const double target = report.test_targets[i];
    const double gap = result.predictions[i] - target;
    out += fmt::format("{},{},{},{},{},{},{}\n", i, Number(target),
                       Number(result.predictions[i]), Number(gap),
                       target == 0.0 ? std::string() : Number(gap / target),
                       Number(gap * unit_price),
                       report.test_inlier[i] ? 1 : 0);
  }
  return out;
}

}  // namespace

std::string_view RegimeId(Regime regime) {
  return regime == Regime::kWithOutliers ? "a" : "b";
}

std::string_view RegimeLabel(Regime regime) {
  return regime == Regime::kWithOutliers ? "with outliers" : "filtered";
}

void BenchmarkSpec::Validate() const {
  if (data_path) {
    if (data_path->empty()) throw ConfigError("empty data path");
    if (!std::filesystem::exists(*data_path)) {
      throw ConfigError("data file not found: " + data_path->string());
    }
  } else {
    generator.Validate();
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test_fraction must be in (0, 1)");
  }
  if (!(ridge_epsilon >= 0.0)) throw ConfigError("ridge_epsilon must be >= 0");
  outliers.Validate();
  forest.Validate(kNumSlots);
  boost.Validate();
  tree.Validate();
  price.Validate();
}

nlohmann::json BenchmarkSpec::ToJson() const {
  nlohmann::json json = {{"seed", seed},
                         {"test_fraction", test_fraction},
                         {"outliers",
                          {{"low_bound", outliers.low_bound},
                           {"high_bound", outliers.high_bound}}},
                         {"legacy_table", legacy.ToJson()},
                         {"ridge_epsilon", ridge_epsilon},
                         {"random_forest", forest.ToJson()},
                         {"gradient_boosting", boost.ToJson()},
                         {"new_tree", tree.ToJson()},
                         {"low_consumption_rule", rule.ToJson()},
                         {"unit_price", price.unit_price}};
  if (data_path) {
    json["data"] = data_path->generic_string();
  } else {
    json["generator"] = generator.ToJson();
  }
  return json;
}

BenchmarkSpec BenchmarkSpec::FromJson(const nlohmann::json& json,
                                      const std::filesystem::path& base_dir) {
  BenchmarkSpec spec;
  try {
    if (!json.is_object()) throw ConfigError("benchmark spec must be an object");
    if (json.contains("data")) {
      std::filesystem::path p = json.at("data").get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      spec.data_path = p;
    }
    if (json.contains("generator")) {
      spec.generator = GeneratorConfig::FromJson(json.at("generator"));
    }
    spec.seed = json.value("seed", spec.seed);
    spec.test_fraction = json.value("test_fraction", spec.test_fraction);
    if (json.contains("outliers")) {
      const auto& o = json.at("outliers");
      spec.outliers.low_bound = o.value("low_bound", spec.outliers.low_bound);
      spec.outliers.high_bound = o.value("high_bound", spec.outliers.high_bound);
    }
    if (json.contains("legacy_table")) {
      spec.legacy = LegacyTable::FromJson(json.at("legacy_table"));
    }
    spec.ridge_epsilon = json.value("ridge_epsilon", spec.ridge_epsilon);
    if (json.contains("random_forest")) {
      spec.forest = ForestConfig::FromJson(json.at("random_forest"));
    }
    if (json.contains("gradient_boosting")) {
      spec.boost = BoostConfig::FromJson(json.at("gradient_boosting"));
    }
    if (json.contains("new_tree")) {
      spec.tree = ConstrainedTreeConfig::FromJson(json.at("new_tree"));
    }
    if (json.contains("low_consumption_rule")) {
      spec.rule = LowConsumptionRule::FromJson(json.at("low_consumption_rule"));
    }
    spec.price.unit_price = json.value("unit_price", spec.price.unit_price);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("benchmark spec: ") + e.what());
  }
  spec.Validate();
  return spec;
}

const ModelRegimeResult& BenchmarkReport::Find(std::string_view model,
                                               Regime regime) const {
  for (const auto& r : results) {
    if (r.model == model && r.regime == regime) return r;
  }
  throw Error(fmt::format("no result for {} in regime {}", model,
                          RegimeId(regime)));
}

BenchmarkReport RunBenchmark(const BenchmarkSpec& spec) {
  spec.Validate();
  Dataset data;
  if (spec.data_path) {
    data = IngestCsv(*spec.data_path).dataset;
  } else {
    GeneratorConfig generator = spec.generator;
    generator.seed = DeriveSeed(spec.seed, 1);
    data = Generate(generator).dataset;
  }
  if (data.size() < 2) throw DataError("benchmark needs at least two rows");

  const TrainTestSplit split =
      SplitTrainTest(data, spec.test_fraction, DeriveSeed(spec.seed, 2));
  const Dataset filtered = PartitionOutliers(split.train, spec.outliers).inliers;
  if (split.train.empty() || filtered.empty()) {
    throw DataError("training split is empty after filtering");
  }
  if (split.test.empty()) throw DataError("test split is empty");

  BenchmarkReport report;
  report.spec = spec.ToJson();
  report.seed = spec.seed;
  report.dataset_size = data.size();
  report.train_size = split.train.size();
  report.train_inliers = filtered.size();
  for (const auto& e : split.test.examples) {
    report.test_targets.push_back(e.target.kwh());
    report.test_inlier.push_back(spec.outliers.IsInlier(e.target.kwh()));
  }
  bool any_zero_target = false;
  for (double t : report.test_targets) any_zero_target |= t == 0.0;

  std::vector<double> inlier_targets;
  for (std::size_t i = 0; i < report.test_targets.size(); ++i) {
    if (report.test_inlier[i]) inlier_targets.push_back(report.test_targets[i]);
  }

  std::unique_ptr<ForecastModel> legacy;
  for (const auto& model : kBenchModels) {
    double rmsd_a = 0.0;
    for (Regime regime : kRegimes) {
      const Dataset& train =
          regime == Regime::kWithOutliers ? split.train : filtered;
      FeatureImportance importance;
      const bool want_importance = regime == Regime::kWithOutliers;
      std::unique_ptr<ForecastModel> fitted;
      if (model.kind == ModelKind::kLegacy && legacy) {
        fitted = std::move(legacy);
      } else {
        fitted = TrainModel(model, spec, train,
                            want_importance ? &importance : nullptr);
      }

      ModelRegimeResult result;
      result.model = std::string(model.id);
      result.regime = regime;
      result.train_size = model.kind == ModelKind::kLegacy ? 0 : train.size();
      result.predictions = PredictAll(*fitted, split.test);
      result.test = ComputeMetrics(ComputeGaps(report.test_targets, result.predictions));

      std::vector<double> inlier_predictions;
      for (std::size_t i = 0; i < result.predictions.size(); ++i) {
        if (report.test_inlier[i]) inlier_predictions.push_back(result.predictions[i]);
      }
      if (!inlier_targets.empty()) {
        result.inlier_test =
            ComputeMetrics(ComputeGaps(inlier_targets, inlier_predictions));
      }

      if (regime == Regime::kWithOutliers) {
        rmsd_a = result.test.rmsd;
        result.rmsd_delta = 0.0;
      } else {
        result.rmsd_delta = rmsd_a > 0.0 ? RmsdDelta(result.test.rmsd, rmsd_a) : 0.0;
      }

      const GapSeries gaps = ComputeGaps(report.test_targets, result.predictions);
      result.absolute_gaps = Summarize(gaps.gaps);
      std::vector<double> monetary;
      for (double g : gaps.gaps) monetary.push_back(g * spec.price.unit_price);
      result.monetary_gaps = Summarize(monetary);
      if (!any_zero_target) {
        result.relative_gaps = Summarize(
            ComputeGapViews(report.test_targets, result.predictions, spec.price)
                .relative);
      }

      if (want_importance && !importance.names.empty()) {
        report.importance[std::string(model.id)] = importance;
      }
      if (model.kind == ModelKind::kConstrainedTree &&
          regime == Regime::kWithOutliers) {
        for (Slot s : static_cast<const ConstrainedTreeModel&>(*fitted).Levels()) {
          report.constrained_levels.emplace_back(SlotName(s));
        }
      }
      if (model.kind == ModelKind::kLegacy) legacy = std::move(fitted);
      report.results.push_back(std::move(result));
    }
  }
  return report;
}

nlohmann::json BenchmarkReport::ToJson() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json row = {{"model", r.model},
                          {"regime", RegimeId(r.regime)},
                          {"regime_label", RegimeLabel(r.regime)},
                          {"train_size", r.train_size},
                          {"test", r.test},
                          {"inlier_test", r.inlier_test},
                          {"rmsd_delta", r.rmsd_delta},
                          {"absolute_gaps", r.absolute_gaps},
                          {"monetary_gaps", r.monetary_gaps},
                          {"predictions", r.predictions}};
    row["relative_gaps"] =
        r.relative_gaps ? nlohmann::json(*r.relative_gaps) : nlohmann::json();
    rows.push_back(std::move(row));
  }
  nlohmann::json importance_json = nlohmann::json::object();
  for (const auto& [model, imp] : importance) {
    importance_json[model] = ImportanceToJson(imp);
  }
  return {{"spec", spec},
          {"seed", seed},
          {"dataset_size", dataset_size},
          {"train_size", train_size},
          {"train_inliers", train_inliers},
          {"test_targets", test_targets},
          {"test_inlier", test_inlier},
          {"results", rows},
          {"importance", importance_json},
          {"new_tree_levels", constrained_levels}};
}

BenchmarkReport BenchmarkReport::FromJson(const nlohmann::json& json) {
  BenchmarkReport report;
  try {
    report.spec = json.at("spec");
    report.seed = json.at("seed").get<std::uint64_t>();
    report.dataset_size = json.at("dataset_size").get<std::size_t>();
    report.train_size = json.at("train_size").get<std::size_t>();
    report.train_inliers = json.at("train_inliers").get<std::size_t>();
    report.test_targets = json.at("test_targets").get<std::vector<double>>();
    report.test_inlier = json.at("test_inlier").get<std::vector<bool>>();
    for (const auto& row : json.at("results")) {
      ModelRegimeResult r;
      r.model = row.at("model").get<std::string>();
      r.regime = ParseRegime(row.at("regime").get<std::string>());
      r.train_size = row.at("train_size").get<std::size_t>();
      r.test = row.at("test").get<MetricsReport>();
      r.inlier_test = row.at("inlier_test").get<MetricsReport>();
      r.rmsd_delta = row.at("rmsd_delta").get<double>();
      r.absolute_gaps = row.at("absolute_gaps").get<DistributionSummary>();
      r.monetary_gaps = row.at("monetary_gaps").get<DistributionSummary>();
      if (!row.at("relative_gaps").is_null()) {
        r.relative_gaps = row.at("relative_gaps").get<DistributionSummary>();
      }
      r.predictions = row.at("predictions").get<std::vector<double>>();
      report.results.push_back(std::move(r));
    }
    for (const auto& [model, imp] : json.at("importance").items()) {
      report.importance[model] = ImportanceFromJson(imp);
    }
    report.constrained_levels =
        json.at("new_tree_levels").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed benchmark report: ") + e.what());
  }
  return report;
}

std::string MetricsTableCsv(const BenchmarkReport& report, Regime regime) {
  std::string out = "metric";
  for (const auto& m : kBenchModels) out += fmt::format(",{}", m.display_name);
  out += "\n";
  const std::array<std::pair<std::string_view, double MetricsReport::*>, 4> rows =
      {{{"MSD", &MetricsReport::msd},
        {"RMSD", &MetricsReport::rmsd},
        {"MAD", &MetricsReport::mad},
        {"MAE", &MetricsReport::mae}}};
  for (const auto& [name, field] : rows) {
    out += name;
    for (const auto& m : kBenchModels) {
      out += "," + Number(report.Find(m.id, regime).test.*field);
    }
    out += "\n";
  }
  out += "RMSD difference (%)";
  for (const auto& m : kBenchModels) {
    out += "," + Number(RoundToPrecision(report.Find(m.id, regime).rmsd_delta, 1));
  }
  out += "\n";
  return out;
}

void EmitReport(const BenchmarkReport& report, const std::filesystem::path& dir,
                ReportFormat format) {
  if (dir.empty()) throw ConfigError("empty report path");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());

  if (format != ReportFormat::kCsv) {
    WriteFile(dir / "report.json", report.ToJson().dump(2) + "\n");
  }
  if (format == ReportFormat::kJson) return;

  double unit_price = PriceConfig{}.unit_price;
  if (report.spec.contains("unit_price")) {
    unit_price = report.spec.at("unit_price").get<double>();
  }
  for (Regime regime : kRegimes) {
    WriteFile(dir / fmt::format("metrics_regime_{}.csv", RegimeId(regime)),
              MetricsTableCsv(report, regime));
  }
  for (const auto& r : report.results) {
    WriteFile(dir / fmt::format("gaps_{}_{}.csv", r.model, RegimeId(r.regime)),
              GapsCsv(report, r, unit_price));
  }
  for (const auto& [model, importance] : report.importance) {
    WriteFile(dir / fmt::format("importance_{}.csv", model), importance.ToCsv());
  }
}

}  // namespace hearthcast
