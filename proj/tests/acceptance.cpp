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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// line fails. Runs the full n = 20000 benchmark on seeds 1..5.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "hearthcast/baseline.hpp"
#include "hearthcast/bench.hpp"
#include "hearthcast/cart.hpp"
#include "hearthcast/constrained_tree.hpp"
#include "hearthcast/dataset.hpp"
#include "hearthcast/ensemble.hpp"
#include "hearthcast/errors.hpp"
#include "hearthcast/household.hpp"
#include "hearthcast/metrics.hpp"
#include "hearthcast/model.hpp"
#include "hearthcast/monotonicity.hpp"
#include "hearthcast/random.hpp"
#include "hearthcast/synthgen.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace hearthcast {
namespace {

// Collects failure reasons for one criterion.
class Check {
 public:
  void Expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++count_;
  }
  void Near(double got, double want, double tol, const std::string& what) {
    Expect(std::abs(got - want) <= tol, fmt::format("{}: got {} want {}", what, got, want));
  }
  bool ok() const { return count_ == 0; }
  std::string Summary() const {
    std::string s;
    for (const auto& f : failures_) s += "; " + f;
    if (count_ > failures_.size()) s += fmt::format("; +{} more", count_ - failures_.size());
    return s;
  }
  std::string note;

 private:
  std::vector<std::string> failures_;
  std::size_t count_ = 0;
};

std::vector<std::size_t> AllRows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  return rows;
}

void MetricOracle(Check& c) {
  const auto m = ComputeMetrics(GapSeries{{1.0, 0.0, -1.0}});
  c.Near(m.msd, 2.0 / 3.0, 1e-12, "msd");
  c.Near(m.rmsd, 0.8165, 1e-4, "rmsd");
  c.Near(m.mae, 2.0 / 3.0, 1e-12, "mae");
  c.Near(m.mad, 1.0, 1e-12, "mad");
  const auto z = ComputeMetrics(GapSeries{{0.0, 0.0, 0.0, 0.0}});
  c.Expect(z.msd == 0 && z.rmsd == 0 && z.mae == 0 && z.mad == 0, "zero gaps");
}

void TableArithmetic(Check& c, const std::vector<BenchmarkReport>& reports) {
  c.Near(RoundToPrecision(RmsdDelta(1710, 1861), 0), -8.0, 0, "delta(1710,1861)");
  c.Near(RoundToPrecision(RmsdDelta(1728, 1809), 1), -4.5, 0, "delta(1728,1809)");
  c.Expect(std::lround(std::sqrt(4259462.0)) == 2064, "sqrt(4259462) ~ 2064");
  std::size_t checked = 0;
  for (const auto& r : reports) {
    for (const auto& res : r.results) {
      for (const auto* m : {&res.test, &res.inlier_test}) {
        ++checked;
        const double want = std::sqrt(m->msd);
        c.Expect(std::abs(m->rmsd - want) <= 1e-9 * std::max(1.0, want),
                 fmt::format("rmsd != sqrt(msd) for {}", res.model));
      }
    }
  }
  c.note = fmt::format("{} reports", checked);
}

FeatureMatrix RandomMatrix(SplitMix64& rng, std::size_t rows) {
  FeatureMatrix m;
  const std::size_t cols = 1 + rng.Below(4);
  for (std::size_t j = 0; j < cols; ++j) {
    const bool categorical = rng.Below(3) == 0;
    ColumnSpec spec{"c" + std::to_string(j), categorical, {}};
    std::vector<double> column(rows);
    if (categorical) {
      const std::size_t k = 2 + rng.Below(5);
      for (std::size_t i = 0; i < k; ++i) spec.categories.push_back("k" + std::to_string(i));
      for (double& v : column) v = static_cast<double>(rng.Below(k));
    } else {
      const std::size_t levels = 2 + rng.Below(40);
      for (double& v : column) v = static_cast<double>(rng.Below(levels)) * 0.5;
    }
    m.specs.push_back(spec);
    m.columns.push_back(std::move(column));
  }
  return m;
}

void SplitOracle(Check& c) {
  {
    const auto m = testing::NumericMatrix({{0, 0, 0, 1, 1, 1}});
    const std::vector<double> y = {1, 1, 1, 9, 9, 9};
    const auto s = FindBestSplit(m, y, AllRows(6), 1);
    c.Expect(s && s->sse_before == 96.0 && s->sse_after == 0.0 && s->rule.threshold == 0.5,
             "worked example");
  }
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.Below(199);
    const auto m = RandomMatrix(rng, n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = rng.Normal() * 100.0 + 50.0 * m.at(i, 0);
    const auto rows = AllRows(n);
    const std::size_t min_leaf = 1 + rng.Below(6);
    const auto got = FindBestSplit(m, y, rows, min_leaf);
    const auto want = oracle::BestSplit(m, y, rows, min_leaf);
    const std::string tag = fmt::format("trial {}", trial);
    c.Expect(got.has_value() == want.has_value(), tag + ": existence");
    if (!got || !want) continue;
    const double scale = std::max(1.0, oracle::Sse(y, rows));
    c.Near(got->sse_after, want->sse, 1e-9 * scale, tag + ": sse");
  }
}

void ScheduleOracle(Check& c) {
  SplitMix64 rng(31337);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 20 + rng.Below(81);
    const std::size_t cols = 1 + rng.Below(3);
    std::vector<std::vector<double>> columns(cols, std::vector<double>(n));
    for (auto& col : columns) {
      const std::size_t levels = 2 + rng.Below(7);
      for (double& v : col) v = static_cast<double>(rng.Below(levels));
    }
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = rng.Normal() * 3.0;
      for (std::size_t j = 0; j < cols; ++j) {
        y[i] += static_cast<double>(j + 1) * columns[j][i] * (rng.Below(2) ? 1 : -1);
      }
    }
    const auto m = testing::NumericMatrix(columns);
    std::vector<ScheduleCandidate> candidates;
    std::vector<int> ids, uses;
    for (std::size_t j = 0; j < cols; ++j) {
      const int max_uses = 1 + static_cast<int>(rng.Below(2));
      candidates.push_back({static_cast<int>(j), max_uses});
      ids.push_back(static_cast<int>(j));
      uses.push_back(max_uses);
    }
    LevelwiseOptions options;
    options.min_bucket = 1 + rng.Below(5);
    options.leaf_model = LeafModelKind::kMean;
    options.monotone_surface = false;
    const auto exhaustive = SearchSchedule(m, y, candidates, options, SearchMode::kExhaustive);
    const auto greedy = SearchSchedule(m, y, candidates, options, SearchMode::kGreedy);
    const double want =
        oracle::BestScheduleSse(m, y, ids, uses, options.min_bucket, kMaxScheduleLength);
    const std::string tag = fmt::format("trial {}", trial);
    c.Near(exhaustive.tree.training_sse(), want, 1e-9 * std::max(1.0, want), tag);
    c.Expect(greedy.tree.training_sse() >= exhaustive.tree.training_sse() * (1 - 1e-12),
             tag + ": greedy below exhaustive");
  }
}

void CheckStructure(Check& c, const ConstrainedTreeModel& model, const Dataset& train,
                    const std::string& tag) {
  const auto& tree = model.tree();
  const auto& nodes = tree.nodes();
  c.Expect(tree.Depth() <= static_cast<int>(kMaxScheduleLength), tag + ": depth");
  for (const auto& node : nodes) {
    if (node.is_leaf()) {
      c.Expect(node.support >= tree.options().min_bucket, tag + ": leaf support");
      c.Expect(node.leaf.beta >= 0.0, tag + ": negative beta");
    } else {
      c.Expect(static_cast<std::size_t>(node.level) < tree.schedule().size() &&
                   node.rule.column == tree.schedule()[node.level],
               tag + ": level feature");
    }
  }
  for (const auto& e : train.examples) {
    const auto trace = model.Explain(e.record);
    c.Expect(trace.alpha + trace.beta * trace.surface == model.Predict(e.record),
             tag + ": trace reconstruction");
  }
}

void StructuralInvariants(Check& c) {
  const Dataset d = testing::SyntheticDataset(3000, 5);
  std::size_t fitted = 0;
  for (auto leaf : {LeafModelKind::kMean, LeafModelKind::kSurfaceLinear,
                    LeafModelKind::kGlobalSurface}) {
    for (auto threshold : {ThresholdMode::kPerNode, ThresholdMode::kShared}) {
      for (bool monotone : {true, false}) {
        for (std::size_t min_bucket : {10u, 40u, 200u}) {
          ConstrainedTreeConfig config;
          config.min_bucket = min_bucket;
          config.leaf_model = leaf;
          config.threshold_mode = threshold;
          config.monotone_surface = monotone;
          CheckStructure(c, *ConstrainedTreeModel::Fit(d, config), d,
                         fmt::format("config {}", fitted++));
        }
      }
    }
  }
  ConstrainedTreeConfig searched;
  searched.search = true;
  searched.min_bucket = 50;
  CheckStructure(c, *ConstrainedTreeModel::Fit(d, searched), d, "searched");
  c.note = fmt::format("{} trees", fitted + 1);
}

void Reductions(Check& c) {
  const Dataset train = testing::SyntheticDataset(800, 1);
  ForestConfig fc;
  fc.n_trees = 1;
  fc.bootstrap = false;
  fc.features_per_split = ForestConfig::kAllFeatures;
  fc.max_depth = 8;
  fc.min_leaf = 3;
  CartConfig cc;
  cc.max_depth = 8;
  cc.min_leaf = 3;
  const auto forest = ForestModel::Fit(train, fc);
  const auto cart = CartModel::Fit(train, cc);
  for (const auto& p : testing::SyntheticDataset(300, 77).examples) {
    c.Expect(forest->Predict(p.record) == cart->Predict(p.record), "rf(1 tree) != cart");
  }

  const Dataset boost_data = testing::SyntheticDataset(1500, 7);
  BoostConfig bc;
  bc.n_stages = 100;
  std::vector<double> mse;
  BoostedEnsemble::Fit(EncodeDataset(boost_data, LowConsumptionRule::Default()),
                       Targets(boost_data), bc, &mse);
  c.Expect(mse.size() == 101, "mse trace length");
  for (std::size_t s = 1; s < mse.size(); ++s) {
    c.Expect(mse[s] <= mse[s - 1] * (1 + 1e-12), fmt::format("mse rose at stage {}", s));
  }

  std::vector<double> x(50), y(50);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = static_cast<double>(i) * 0.7 - 3.0;
    y[i] = 2.0 * x[i];
  }
  const auto fit = FitOls(testing::NumericMatrix({x}), y);
  c.Near(fit.coefficients.at(0), 2.0, 1e-6, "ols slope");
  c.Near(fit.intercept, 0.0, 1e-6, "ols intercept");
}

BenchmarkSpec DefaultSpec(std::uint64_t seed) {
  BenchmarkSpec spec;
  spec.seed = seed;
  spec.generator.n = 20000;
  return spec;
}

void Directionality(Check& c, const std::vector<BenchmarkReport>& reports) {
  double worst_ratio = 0.0;
  for (const auto& r : reports) {
    const std::string seed = fmt::format("seed {}", r.seed);
    for (Regime regime : {Regime::kWithOutliers, Regime::kFiltered}) {
      const double legacy = r.Find("legacy", regime).test.rmsd;
      for (const auto& m : kBenchModels) {
        if (m.kind == ModelKind::kLegacy) continue;
        c.Expect(r.Find(m.id, regime).test.rmsd < legacy,
                 fmt::format("{} {}: {} not better than legacy", seed, RegimeId(regime), m.id));
      }
      const double ratio =
          r.Find("new_tree", regime).test.rmsd / r.Find("random_forest", regime).test.rmsd;
      worst_ratio = std::max(worst_ratio, ratio);
      c.Expect(ratio <= 1.15, fmt::format("{} {}: tree/forest rmsd {:.3f}", seed,
                                          RegimeId(regime), ratio));
    }
    for (const auto& m : kBenchModels) {
      if (m.kind == ModelKind::kLegacy) continue;
      const double a = r.Find(m.id, Regime::kWithOutliers).inlier_test.rmsd;
      const double b = r.Find(m.id, Regime::kFiltered).inlier_test.rmsd;
      c.Expect(b <= a, fmt::format("{}: filtering worsened {} inlier rmsd {:.1f} -> {:.1f}",
                                   seed, m.id, a, b));
    }
  }
  c.note = fmt::format("worst tree/forest rmsd ratio {:.3f}", worst_ratio);
}

void Monotonicity(Check& c) {
  const Dataset d = testing::SyntheticDataset(20000, 11);
  const auto model = ConstrainedTreeModel::Fit(d, ConstrainedTreeConfig{});
  const auto report = AuditMonotonicity(*model, SampleProbeGrid(d, 200, 12));
  const auto* surface = report.Find(AuditFeature::kSurface);
  const auto* occupants = report.Find(AuditFeature::kOccupants);
  c.Expect(surface->probes >= 1000, "grid smaller than 1000 probes");
  c.Expect(surface->violation_count() == 0,
           fmt::format("{} surface violations", surface->violation_count()));
  c.Expect(occupants->violation_rate() <= 0.01,
           fmt::format("occupant violation rate {:.4f}", occupants->violation_rate()));
  c.note = fmt::format("{} probes, occupant rate {:.4f}", surface->probes,
                       occupants->violation_rate());
}

std::string Slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void Determinism(Check& c) {
  auto csv = [](std::uint64_t seed) {
    std::ostringstream out;
    WriteCsv(testing::SyntheticDataset(5000, seed), out);
    return out.str();
  };
  c.Expect(csv(21) == csv(21), "dataset bytes differ");

  const Dataset train = testing::SyntheticDataset(3000, 1);
  const Dataset probes = testing::SyntheticDataset(1000, 99);
  auto fit_all = [&] {
    std::vector<std::unique_ptr<ForecastModel>> models;
    models.push_back(std::make_unique<LegacyModel>(LegacyTable::Default()));
    models.push_back(LinearModel::Fit(train));
    models.push_back(CartModel::Fit(train, CartConfig{}));
    ForestConfig fc;
    fc.n_trees = 20;
    fc.seed = 3;
    models.push_back(ForestModel::Fit(train, fc));
    BoostConfig bc;
    bc.n_stages = 80;
    bc.seed = 4;
    models.push_back(BoostedModel::Fit(train, bc));
    models.push_back(ConstrainedTreeModel::Fit(train, ConstrainedTreeConfig{}));
    return models;
  };
  const auto a = fit_all();
  const auto b = fit_all();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::string kind(ModelKindName(a[i]->kind()));
    const std::string text = SerializeModel(*a[i]);
    c.Expect(text == SerializeModel(*b[i]), kind + ": model bytes differ");
    const auto back = DeserializeModel(text);
    for (const auto& p : probes.examples) {
      c.Expect(back->Predict(p.record) == a[i]->Predict(p.record),
               kind + ": round trip changed a prediction");
    }
  }

  testing::TempDir dir("acceptance");
  BenchmarkSpec spec = DefaultSpec(3);
  spec.generator.n = 3000;
  spec.forest.n_trees = 25;
  spec.boost.n_stages = 60;
  EmitReport(RunBenchmark(spec), dir / "a");
  EmitReport(RunBenchmark(spec), dir / "b");
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir / "a")) {
    ++files;
    c.Expect(Slurp(entry.path()) == Slurp(dir / "b" / entry.path().filename()),
             entry.path().filename().string() + " differs");
  }
  c.Expect(files > 0, "empty bundle");
  c.note = fmt::format("{} model kinds, {} bundle files", a.size(), files);
}

void Anchors(Check& c) {
  c.Expect(AnnualizeCar(700, 70).kwh() == 3650.0, "700 kWh over 70 days");
  bool rejected = false;
  try {
    AnnualizeCar(700, 69);
  } catch (const InsufficientWindowError&) {
    rejected = true;
  }
  c.Expect(rejected, "69-day window accepted");
  const std::vector<double> targets = {3000.0};
  const std::vector<double> predictions = {4000.0};
  const auto views = ComputeGapViews(targets, predictions, PriceConfig{});
  c.Near(std::abs(views.monetary.at(0)), 251.60, 1e-9, "1000 kWh gap in EUR");
}

struct Criterion {
  const char* name;
  double budget_seconds;
  std::function<void(Check&)> run;
};

int Main() {
  std::vector<BenchmarkReport> reports;
  const std::vector<Criterion> criteria = {
      {"metric_oracle", 1, MetricOracle},
      {"split_oracle", 30, SplitOracle},
      {"schedule_oracle", 60, ScheduleOracle},
      {"structural_invariants", 0, StructuralInvariants},
      {"reductions", 0, Reductions},
      {"benchmark_directionality", 300,
       [&](Check& c) {
         for (std::uint64_t seed = 1; seed <= 5; ++seed) {
           reports.push_back(RunBenchmark(DefaultSpec(seed)));
         }
         Directionality(c, reports);
       }},
      {"table_arithmetic", 0, [&](Check& c) { TableArithmetic(c, reports); }},
      {"monotonicity", 0, Monotonicity},
      {"determinism_round_trip", 0, Determinism},
      {"annualization_price_anchors", 0, Anchors},
  };
  int failed = 0;
  for (const auto& criterion : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.run(check);
    } catch (const std::exception& e) {
      check.Expect(false, std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (criterion.budget_seconds > 0) {
      check.Expect(seconds < criterion.budget_seconds,
                   fmt::format("over the {:.0f} s budget", criterion.budget_seconds));
    }
    if (!check.ok()) ++failed;
    std::cout << fmt::format("{} {} ({:.2f} s){}{}\n", check.ok() ? "PASS" : "FAIL",
                             criterion.name, seconds,
                             check.note.empty() ? "" : " " + check.note, check.Summary())
              << std::flush;
  }
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failed,
                           criteria.size());
  return failed == 0 ? 0 : 1;
}

}  // namespace
}  // namespace hearthcast

int main() { return hearthcast::Main(); }
