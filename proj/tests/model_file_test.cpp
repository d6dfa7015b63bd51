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

#include <fstream>
#include <memory>
#include <vector>

#include <gtest/gtest.h>

#include "hearthcast/baseline.hpp"
#include "hearthcast/constrained_tree.hpp"
#include "hearthcast/ensemble.hpp"
#include "hearthcast/errors.hpp"
#include "hearthcast/model.hpp"
#include "test_util.hpp"

namespace hearthcast {
namespace {

std::vector<std::unique_ptr<ForecastModel>> AllKinds(const Dataset& train) {
  std::vector<std::unique_ptr<ForecastModel>> models;
  models.push_back(std::make_unique<LegacyModel>(LegacyTable::Default()));
  models.push_back(LinearModel::Fit(train));
  CartConfig cc;
  cc.max_depth = 10;
  cc.min_leaf = 5;
  models.push_back(CartModel::Fit(train, cc));
  ForestConfig fc;
  fc.n_trees = 10;
  fc.seed = 3;
  models.push_back(ForestModel::Fit(train, fc));
  BoostConfig bc;
  bc.n_stages = 50;
  models.push_back(BoostedModel::Fit(train, bc));
  models.push_back(ConstrainedTreeModel::Fit(train, ConstrainedTreeConfig{}));
  return models;
}

class ModelFileTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    train_ = new Dataset(testing::SyntheticDataset(3000, 1));
    probes_ = new Dataset(testing::SyntheticDataset(1000, 99));
  }
  static void TearDownTestSuite() {
    delete train_;
    delete probes_;
  }
  static Dataset* train_;
  static Dataset* probes_;
};

Dataset* ModelFileTest::train_ = nullptr;
Dataset* ModelFileTest::probes_ = nullptr;

TEST_F(ModelFileTest, EveryKindRoundTripsBitExactly) {
  for (const auto& model : AllKinds(*train_)) {
    SCOPED_TRACE(ModelKindName(model->kind()));
    const std::string text = SerializeModel(*model);
    const auto back = DeserializeModel(text);
    EXPECT_EQ(back->kind(), model->kind());
    EXPECT_EQ(SerializeModel(*back), text);
    for (const auto& p : probes_->examples) {
      EXPECT_EQ(back->Predict(p.record), model->Predict(p.record));
    }
  }
}

TEST_F(ModelFileTest, SameSeedSameFiles) {
  const auto a = AllKinds(*train_);
  const auto b = AllKinds(*train_);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(SerializeModel(*a[i]), SerializeModel(*b[i]));
  }
}

TEST_F(ModelFileTest, SaveAndLoad) {
  testing::TempDir dir("model");
  const auto model = LinearModel::Fit(*train_);
  SaveModel(*model, dir / "m.json");
  const auto back = LoadModel(dir / "m.json");
  EXPECT_EQ(back->Predict(train_->examples[0].record),
            model->Predict(train_->examples[0].record));
  EXPECT_THROW(LoadModel(dir / "missing.json"), Error);
}

TEST_F(ModelFileTest, EnvelopeFields) {
  const auto json = ModelToJson(LegacyModel(LegacyTable::Default()));
  EXPECT_EQ(json.at("format"), "hearthcast-model");
  EXPECT_EQ(json.at("version"), 1);
  EXPECT_EQ(json.at("kind"), "legacy");
  EXPECT_EQ(json.at("schema"), "household-v1");
  EXPECT_TRUE(json.at("body").is_object());
}

TEST(ModelFile, RejectsMalformedFiles) {
  const auto good = ModelToJson(LegacyModel(LegacyTable::Default()));
  EXPECT_THROW(DeserializeModel("{"), ModelError);
  EXPECT_THROW(DeserializeModel("[]"), ModelError);
  for (const auto& [key, value] :
       std::vector<std::pair<std::string, nlohmann::json>>{
           {"format", "other"},
           {"version", 2},
           {"kind", "neural_net"},
           {"schema", "household-v0"},
           {"body", nullptr}}) {
    auto bad = good;
    bad[key] = value;
    EXPECT_THROW(DeserializeModel(bad.dump()), ModelError) << key;
  }
  auto missing = good;
  missing.erase("kind");
  EXPECT_THROW(DeserializeModel(missing.dump()), ModelError);
  auto broken_body = good;
  broken_body["body"] = {{"table", 5}};
  EXPECT_THROW(DeserializeModel(broken_body.dump()), ModelError);
}

TEST(ModelFile, RejectsNegativeLeafSlopes) {
  const Dataset d = testing::SyntheticDataset(500, 4);
  auto json = ModelToJson(*ConstrainedTreeModel::Fit(d, ConstrainedTreeConfig{}));
  // Walk to the first leaf and flip its slope.
  nlohmann::json* node = &json["body"]["root"];
  while (!node->contains("leaf")) node = &(*node)["left"];
  (*node)["leaf"]["beta"] = -1.0;
  EXPECT_THROW(DeserializeModel(json.dump()), ModelError);
}

TEST(ModelKind, NamesRoundTrip) {
  for (auto kind : {ModelKind::kLegacy, ModelKind::kLinearRegression, ModelKind::kCart,
                    ModelKind::kRandomForest, ModelKind::kGradientBoosting,
                    ModelKind::kConstrainedTree}) {
    EXPECT_EQ(ParseModelKind(ModelKindName(kind)), kind);
  }
  EXPECT_FALSE(ParseModelKind("svm").has_value());
}

}  // namespace
}  // namespace hearthcast
