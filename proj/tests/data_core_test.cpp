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

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "hearthcast/dataset.hpp"
#include "hearthcast/errors.hpp"
#include "hearthcast/features.hpp"
#include "hearthcast/household.hpp"
#include "hearthcast/random.hpp"
#include "test_util.hpp"

namespace hearthcast {
namespace {

using testing::DatasetOf;
using testing::Household;

constexpr const char* kHeader =
    "surface_m2,heating_type,water_heating_type,cooking_type,occupants,"
    "house_type,tariff_index,max_power_kva,reading_days,observed_kwh\n";

TEST(AnnualizeCar, SeventyDaysScaleToAYear) {
  EXPECT_DOUBLE_EQ(AnnualizeCar(700.0, 70).kwh(), 3650.0);
}

TEST(AnnualizeCar, ZeroStaysZero) {
  EXPECT_EQ(AnnualizeCar(0.0, 365).kwh(), 0.0);
}

TEST(AnnualizeCar, ShortWindowRejected) {
  EXPECT_THROW(AnnualizeCar(500.0, 69), InsufficientWindowError);
  EXPECT_NO_THROW(AnnualizeCar(500.0, kMinReadingDays));
}

TEST(AnnualizeCar, NegativeConsumptionRejected) {
  EXPECT_THROW(AnnualizeCar(-1.0, 100), DataError);
}

TEST(AnnualizeCar, LinearInObservedConsumption) {
  SplitMix64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const double x = rng.Uniform(0.0, 20000.0);
    const double k = rng.Uniform(0.0, 10.0);
    const int days = 70 + static_cast<int>(rng.Below(400));
    const double scaled = AnnualizeCar(k * x, days).kwh();
    const double expected = k * AnnualizeCar(x, days).kwh();
    EXPECT_NEAR(scaled, expected, 1e-12 * std::max(1.0, expected));
  }
}

TEST(ValidateRecord, RejectsOutOfDomainFields) {
  auto r = Household(50, 2);
  EXPECT_NO_THROW(ValidateRecord(r));
  r.surface_m2 = 0;
  EXPECT_THROW(ValidateRecord(r), DataError);
  r = Household(50, 0);
  EXPECT_THROW(ValidateRecord(r), DataError);
  r = Household(50, 2);
  r.max_power_kva = 7;
  EXPECT_THROW(ValidateRecord(r), DataError);
}

TEST(Categories, CodesAreAlphabeticalRanks) {
  EXPECT_EQ(CategoryCode(HeatingType::kDistrict), 0);
  EXPECT_EQ(CategoryName(HeatingType::kHeatPump), "heat_pump");
  EXPECT_EQ(ParseCategory<WaterHeatingType>("thermodynamic"),
            WaterHeatingType::kThermodynamic);
  EXPECT_FALSE(ParseCategory<HeatingType>("coal").has_value());
}

TEST(IngestCsv, ThreeValidRows) {
  std::istringstream in(std::string(kHeader) +
                        "50,gas,gas,gas,2,house,base,6,365,4000\n"
                        "80,electric,electric,mixed,3,apartment,peak_offpeak,9,70,700\n"
                        "120,heat_pump,thermodynamic,electric,4,house,base,12,200,3000\n");
  const auto result = IngestCsv(in);
  EXPECT_EQ(result.dataset.size(), 3u);
  EXPECT_TRUE(result.rejections.empty());
  EXPECT_DOUBLE_EQ(result.dataset.examples[1].target.kwh(), 3650.0);
}

TEST(IngestCsv, UnknownCategoryRejectedWithReason) {
  std::istringstream in(std::string(kHeader) +
                        "50,coal,gas,gas,2,house,base,6,365,4000\n"
                        "50,gas,gas,gas,2,house,base,6,365,4000\n");
  const auto result = IngestCsv(in);
  EXPECT_EQ(result.dataset.size(), 1u);
  ASSERT_EQ(result.rejections.size(), 1u);
  EXPECT_EQ(result.rejections[0].row_number, 1u);
  EXPECT_TRUE(result.rejections[0].reason.starts_with("unknown category"));
}

TEST(IngestCsv, ShortWindowAndBadNumbersRejected) {
  std::istringstream in(std::string(kHeader) +
                        "50,gas,gas,gas,2,house,base,6,69,4000\n"
                        "abc,gas,gas,gas,2,house,base,6,365,4000\n"
                        "50,gas,gas,gas,2.5,house,base,6,365,4000\n"
                        "50,gas,gas,gas,2,house,base,6,365\n");
  const auto result = IngestCsv(in);
  EXPECT_EQ(result.dataset.size(), 0u);
  ASSERT_EQ(result.rejections.size(), 4u);
  EXPECT_TRUE(result.rejections[0].reason.starts_with("insufficient window"));
  EXPECT_TRUE(result.rejections[1].reason.starts_with("non-numeric field"));
  EXPECT_TRUE(result.rejections[2].reason.starts_with("invalid value"));
  EXPECT_TRUE(result.rejections[3].reason.starts_with("wrong column count"));
}

TEST(IngestCsv, BadHeaderIsSchemaError) {
  std::istringstream in("surface,heating\n1,gas\n");
  EXPECT_THROW(IngestCsv(in), SchemaError);
  std::istringstream empty("");
  EXPECT_THROW(IngestCsv(empty), SchemaError);
}

TEST(IngestCsv, FortyTwoThousandRows) {
  std::string text = kHeader;
  for (int i = 0; i < 42000; ++i) {
    text += "60,gas,electric,gas," + std::to_string(1 + i % 5) +
            ",apartment,base,6,365,3500\n";
  }
  std::istringstream in(text);
  const auto result = IngestCsv(in);
  EXPECT_EQ(result.dataset.size(), 42000u);
  EXPECT_TRUE(result.rejections.empty());
}

TEST(IngestCsv, WriteThenReadRoundTrips) {
  const Dataset d = testing::SyntheticDataset(200, 5);
  std::ostringstream out;
  WriteCsv(d, out);
  std::istringstream in(out.str());
  const auto back = IngestCsv(in);
  ASSERT_TRUE(back.rejections.empty());
  ASSERT_EQ(back.dataset.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(back.dataset.examples[i].record, d.examples[i].record);
    EXPECT_EQ(back.dataset.examples[i].target, d.examples[i].target);
  }
}

TEST(IngestRecordsCsv, TargetColumnsOptional) {
  std::istringstream in(
      "surface_m2,heating_type,water_heating_type,cooking_type,occupants,"
      "house_type,tariff_index,max_power_kva,reading_days\n"
      "50,gas,gas,gas,2,house,base,6,0\n"
      "50,gas,gas,gas,0,house,base,6,0\n");
  const auto result = IngestRecordsCsv(in);
  EXPECT_EQ(result.records.size(), 1u);
  EXPECT_EQ(result.rejections.size(), 1u);
}

TEST(PartitionOutliers, BoundsAreInclusiveOnTheInlierSide) {
  const auto r = Household(50, 2);
  const Dataset d =
      DatasetOf({r, r, r, r, r}, {900.0, 10500.0, 5000.0, 1000.0, 10000.0});
  const auto parts = PartitionOutliers(d, OutlierPolicy{});
  ASSERT_EQ(parts.inliers.size(), 3u);
  ASSERT_EQ(parts.outliers.size(), 2u);
  EXPECT_EQ(parts.outliers.examples[0].target.kwh(), 900.0);
  EXPECT_EQ(parts.outliers.examples[1].target.kwh(), 10500.0);
  EXPECT_EQ(parts.inliers.examples[0].target.kwh(), 5000.0);
}

TEST(PartitionOutliers, OrderPreservingAndLossless) {
  const Dataset d = testing::SyntheticDataset(2000, 3);
  const OutlierPolicy policy;
  const auto parts = PartitionOutliers(d, policy);
  ASSERT_EQ(parts.inliers.size() + parts.outliers.size(), d.size());
  // Merging back by the predicate restores the input sequence.
  std::size_t i = 0, o = 0;
  for (const auto& e : d.examples) {
    if (policy.IsInlier(e.target.kwh())) {
      EXPECT_EQ(parts.inliers.examples[i++], e);
    } else {
      EXPECT_EQ(parts.outliers.examples[o++], e);
    }
  }
}

TEST(SplitTrainTest, SizesFollowTheRoundingRule) {
  const auto r = Household(50, 2);
  EXPECT_EQ(SplitTrainTest(DatasetOf({r, r, r}, {1, 2, 3}), 1.0 / 3.0, 1).test.size(), 1u);
  Dataset big;
  big.examples.assign(42000, {r, AnnualConsumption(1.0)});
  const auto split = SplitTrainTest(big, 1.0 / 3.0, 9);
  EXPECT_EQ(split.test.size(), 14000u);
  EXPECT_EQ(split.train.size(), 28000u);
}

TEST(SplitTrainTest, SameSeedSameMembership) {
  const Dataset d = testing::SyntheticDataset(500, 1);
  const auto a = SplitTrainTest(d, 1.0 / 3.0, 42);
  const auto b = SplitTrainTest(d, 1.0 / 3.0, 42);
  EXPECT_EQ(a.test_indices, b.test_indices);
  EXPECT_EQ(a.train_indices, b.train_indices);
  const auto c = SplitTrainTest(d, 1.0 / 3.0, 43);
  EXPECT_NE(a.test_indices, c.test_indices);
}

TEST(SplitTrainTest, SwappedFractionsGiveComplementarySets) {
  const Dataset d = testing::SyntheticDataset(301, 2);
  for (double f : {0.1, 0.25, 1.0 / 3.0, 0.4, 0.45}) {
    const auto a = SplitTrainTest(d, f, 5);
    const auto b = SplitTrainTest(d, 1.0 - f, 5);
    EXPECT_EQ(a.test_indices, b.train_indices) << f;
    EXPECT_EQ(a.train_indices, b.test_indices) << f;
  }
}

TEST(Encode, DefaultRuleSetsTheLowConsumptionFlag) {
  const auto rule = LowConsumptionRule::Default();
  const auto low = Household(40, 2);
  EXPECT_EQ(Encode(low, rule)[SlotIndex(Slot::kLowConsumption)], 1.0);
  const auto crowded = Household(40, 4);
  EXPECT_EQ(Encode(crowded, rule)[SlotIndex(Slot::kLowConsumption)], 0.0);
  EXPECT_EQ(Encode(low, rule), Encode(low, rule));
}

TEST(Encode, CategoricalSlotsCarryCodes) {
  auto r = Household(75.5, 3, HeatingType::kHeatPump);
  const auto v = Encode(r, LowConsumptionRule::Default());
  EXPECT_EQ(v[SlotIndex(Slot::kSurface)], 75.5);
  EXPECT_EQ(v[SlotIndex(Slot::kHeatingType)], 4.0);
  EXPECT_EQ(v[SlotIndex(Slot::kOccupants)], 3.0);
  EXPECT_EQ(v[SlotIndex(Slot::kMaxPower)], 9.0);
}

TEST(LowConsumptionRule, JsonRoundTripAndValidation) {
  const auto rule = LowConsumptionRule::Default();
  EXPECT_EQ(LowConsumptionRule::FromJson(rule.ToJson()), rule);
  EXPECT_THROW(LowConsumptionRule::FromJson(nlohmann::json::parse(
                   R"([{"field":"colour","op":"==","value":"red"}])")),
               ConfigError);
  EXPECT_THROW(LowConsumptionRule::FromJson(nlohmann::json::parse(
                   R"([{"field":"heating_type","op":"<","value":"gas"}])")),
               ConfigError);
}

TEST(SplitMix64, MatchesPublishedReferenceOutputs) {
  // First outputs for seed 0 of the reference implementation.
  SplitMix64 rng(0);
  EXPECT_EQ(rng.Next(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(rng.Next(), 0x6E789E6AA1B965F4ULL);
  EXPECT_EQ(rng.Next(), 0x06C45D188009454FULL);
}

}  // namespace
}  // namespace hearthcast
