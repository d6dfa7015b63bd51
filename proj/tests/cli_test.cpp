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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "hearthcast/baseline.hpp"
#include "hearthcast/bench.hpp"
#include "hearthcast/cli.hpp"
#include "hearthcast/dataset.hpp"
#include "hearthcast/model.hpp"
#include "hearthcast/service.hpp"
#include "json.hpp"
#include "test_util.hpp"

namespace hearthcast {
namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hearthcast");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string Slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir("cli");
    ASSERT_EQ(Cli({"gen", "--n", "1500", "--seed", "3", "--out", Path("data.csv")}).code,
              kExitOk);
    ASSERT_EQ(Cli({"train", "--data", Path("data.csv"), "--kind", "constrained_tree",
                   "--out", Path("tree.json")})
                  .code,
              kExitOk);
    ASSERT_EQ(Cli({"train", "--data", Path("data.csv"), "--kind", "legacy", "--out",
                   Path("legacy.json")})
                  .code,
              kExitOk);
  }
  static void TearDownTestSuite() { delete dir_; }
  static std::string Path(const std::string& name) { return (*dir_ / name).string(); }

  static testing::TempDir* dir_;
};

testing::TempDir* CliTest::dir_ = nullptr;

TEST(CliUsage, BadInvocationsExitOne) {
  EXPECT_EQ(Cli({}).code, kExitUsage);
  EXPECT_EQ(Cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Cli({"train", "--data", "x.csv"}).code, kExitUsage);
  EXPECT_EQ(Cli({"train", "--data", "x.csv", "--kind", "svm", "--out", "m.json"}).code,
            kExitUsage);
  EXPECT_EQ(Cli({"predict", "--model", "m.json", "--input", "-", "--format", "xml"}).code,
            kExitUsage);
  EXPECT_EQ(Cli({"serve", "--model", "m.json", "--port", "70000"}).code, kExitUsage);
  EXPECT_EQ(Cli({"--help"}).code, kExitOk);
}

TEST(CliUsage, MissingFilesExitTwo) {
  const auto r = Cli({"train", "--data", "/nonexistent/x.csv", "--kind", "cart", "--out",
                      "/tmp/never.json"});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  EXPECT_EQ(Cli({"predict", "--model", "/nonexistent.json", "--input", "x"}).code, kExitData);
}

TEST_F(CliTest, GenIsDeterministic) {
  EXPECT_EQ(Cli({"gen", "--n", "200", "--seed", "9"}).out,
            Cli({"gen", "--n", "200", "--seed", "9"}).out);
  EXPECT_NE(Cli({"gen", "--n", "200", "--seed", "9"}).out,
            Cli({"gen", "--n", "200", "--seed", "10"}).out);
}

TEST_F(CliTest, PredictMatchesLibrary) {
  const auto model = LoadModel(Path("tree.json"));
  const auto data = IngestCsv(std::filesystem::path(Path("data.csv"))).dataset;

  const auto r = Cli({"predict", "--model", Path("tree.json"), "--input", Path("data.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  ASSERT_EQ(doc.size(), data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(doc[i].at("car_kwh").get<double>(),
              ModelPredict(model.get(), data.examples[i].record));
  }

  const std::string one = Path("one.json");
  std::ofstream(one) << RecordToJson(data.examples[0].record).dump();
  const auto single = Cli({"predict", "--model", Path("tree.json"), "--input", one});
  ASSERT_EQ(single.code, kExitOk);
  EXPECT_TRUE(nlohmann::json::parse(single.out).is_object());
  EXPECT_EQ(nlohmann::json::parse(single.out), doc[0]);

  const auto csv = Cli({"predict", "--model", Path("tree.json"), "--input", one, "--format",
                        "csv"});
  EXPECT_EQ(csv.out.substr(0, csv.out.find('\n')), "index,car_kwh,monthly_installment_eur");
}

TEST_F(CliTest, ExplainText) {
  const std::string one = Path("house.json");
  std::ofstream(one) << R"({"surface_m2": 90, "heating_type": "electric",
    "water_heating_type": "electric", "cooking_type": "electric", "occupants": 4,
    "house_type": "house", "tariff_index": "base", "max_power_kva": 9})";
  const auto r = Cli({"explain", "--model", Path("tree.json"), "--input", one});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("monthly installment:"), std::string::npos);
  EXPECT_NE(r.out.find("kWh"), std::string::npos);

  const auto json = Cli({"explain", "--model", Path("tree.json"), "--input", one, "--format",
                         "json"});
  const auto doc = nlohmann::json::parse(json.out);
  EXPECT_TRUE(doc.contains("trace"));

  const auto legacy = Cli({"explain", "--model", Path("legacy.json"), "--input", one});
  EXPECT_EQ(legacy.code, kExitData);
  EXPECT_NE(legacy.err.find("legacy"), std::string::npos);
}

TEST_F(CliTest, BadPredictInputExitsTwo) {
  const std::string bad = Path("bad.json");
  std::ofstream(bad) << R"({"surface_m2": -3})";
  EXPECT_EQ(Cli({"predict", "--model", Path("tree.json"), "--input", bad}).code, kExitData);
}

TEST_F(CliTest, EnvironmentPriceValidation) {
  const std::string one = Path("p.json");
  std::ofstream(one) << R"({"surface_m2": 50, "heating_type": "gas",
    "water_heating_type": "gas", "cooking_type": "gas", "occupants": 2,
    "house_type": "apartment", "tariff_index": "base", "max_power_kva": 6})";
  ::setenv("HEARTHCAST_UNIT_PRICE", "nope", 1);
  EXPECT_EQ(Cli({"predict", "--model", Path("tree.json"), "--input", one}).code, kExitUsage);
  ::setenv("HEARTHCAST_UNIT_PRICE", "0.5", 1);
  const auto r = Cli({"predict", "--model", Path("tree.json"), "--input", one});
  ::unsetenv("HEARTHCAST_UNIT_PRICE");
  ASSERT_EQ(r.code, kExitOk);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc.at("monthly_installment_eur").get<double>(),
            MonthlyInstallment(doc.at("car_kwh").get<double>(), PriceConfig{0.5}));
}

TEST_F(CliTest, BenchmarkBundlesAreReproducible) {
  BenchmarkSpec spec;
  spec.generator.n = 1500;
  spec.forest.n_trees = 10;
  spec.boost.n_stages = 30;
  spec.tree.min_bucket = 30;
  const std::string config = Path("bench.json");
  std::ofstream(config) << spec.ToJson().dump();

  for (const char* out : {"b1", "b2"}) {
    const auto r = Cli({"benchmark", "--config", config, "--seed", "5", "--out", Path(out)});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("New tree"), std::string::npos);
  }
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(Path("b1"))) {
    ++files;
    EXPECT_EQ(Slurp(entry.path()), Slurp(*dir_ / "b2" / entry.path().filename()))
        << entry.path().filename();
  }
  EXPECT_GT(files, 0u);
}

const std::filesystem::path kConfigDir = HEARTHCAST_CONFIG_DIR;

nlohmann::json ReadConfig(const std::string& name) {
  return nlohmann::json::parse(Slurp(kConfigDir / name));
}

TEST(ShippedConfigs, MatchLibraryDefaults) {
  const auto bench = BenchmarkSpec::FromJson(ReadConfig("benchmark.json"));
  BenchmarkSpec defaults;
  EXPECT_EQ(bench.ToJson(), defaults.ToJson());
  EXPECT_EQ(ReadConfig("generator.json"), defaults.generator.ToJson());
  EXPECT_EQ(LegacyTable::FromJson(ReadConfig("legacy_table.json")), LegacyTable::Default());
}

TEST(ShippedConfigs, SchemaEnumsAreAccepted) {
  const auto schema = ReadConfig("feature_schema.json");
  const auto& props = schema.at("properties");
  nlohmann::json base = {{"surface_m2", 60}, {"heating_type", "gas"},
                         {"water_heating_type", "gas"}, {"cooking_type", "gas"},
                         {"occupants", 2}, {"house_type", "house"},
                         {"tariff_index", "base"}, {"max_power_kva", 6}};
  EXPECT_EQ(schema.at("required").size(), base.size());
  for (const auto& [field, spec] : props.items()) {
    ASSERT_TRUE(base.contains(field)) << field;
    if (!spec.contains("enum")) continue;
    for (const auto& value : spec.at("enum")) {
      auto record = base;
      record[field] = value;
      EXPECT_NO_THROW(RecordFromJson(record)) << field << "=" << value;
    }
  }
}

TEST_F(CliTest, ShippedModelConfigsTrain) {
  for (const char* kind : {"legacy", "linear_regression", "cart", "random_forest",
                           "gradient_boosting", "constrained_tree"}) {
    auto config = ReadConfig(std::string("models/") + kind + ".json");
    if (config.contains("n_trees")) config["n_trees"] = 5;
    if (config.contains("n_stages")) config["n_stages"] = 5;
    const std::string path = Path(std::string("config_") + kind + ".json");
    std::ofstream(path) << config.dump();
    const auto r = Cli({"train", "--data", Path("data.csv"), "--kind", kind, "--config", path,
                        "--out", Path(std::string("m_") + kind + ".json")});
    EXPECT_EQ(r.code, kExitOk) << kind << ": " << r.err;
  }
}

}  // namespace
}  // namespace hearthcast
