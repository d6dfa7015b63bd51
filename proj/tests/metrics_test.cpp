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

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "hearthcast/errors.hpp"
#include "hearthcast/metrics.hpp"
#include "hearthcast/random.hpp"

namespace hearthcast {
namespace {

// Hand-computed reference metrics, written without the library helpers.
struct Reference {
  double msd, rmsd, mae, mad;
};

double SortedMedian(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

Reference Compute(const std::vector<double>& g) {
  double sq = 0.0, abs = 0.0;
  for (double x : g) {
    sq += x * x;
    abs += std::fabs(x);
  }
  const double n = static_cast<double>(g.size());
  const double med = SortedMedian(g);
  std::vector<double> dev;
  for (double x : g) dev.push_back(std::fabs(x - med));
  return {sq / n, std::sqrt(sq / n), abs / n, SortedMedian(dev)};
}

TEST(ComputeMetrics, ThreePointExample) {
  const auto gaps = ComputeGaps(std::vector<double>{1, 2, 3},
                                std::vector<double>{2, 2, 2});
  EXPECT_EQ(gaps.gaps, (std::vector<double>{1, 0, -1}));
  const auto m = ComputeMetrics(gaps);
  EXPECT_NEAR(m.msd, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(m.rmsd, 0.81650, 1e-5);
  EXPECT_NEAR(m.mae, 2.0 / 3.0, 1e-15);
  EXPECT_EQ(m.mad, 1.0);
  EXPECT_EQ(m.n, 3u);
}

TEST(ComputeMetrics, ZeroGapsGiveZeros) {
  const auto m = ComputeMetrics(GapSeries{{0, 0, 0, 0}});
  EXPECT_EQ(m.msd, 0.0);
  EXPECT_EQ(m.rmsd, 0.0);
  EXPECT_EQ(m.mae, 0.0);
  EXPECT_EQ(m.mad, 0.0);
}

TEST(ComputeMetrics, SingleGap) {
  const auto m = ComputeMetrics(GapSeries{{5}});
  EXPECT_EQ(m.msd, 25.0);
  EXPECT_EQ(m.rmsd, 5.0);
  EXPECT_EQ(m.mae, 5.0);
  EXPECT_EQ(m.mad, 0.0);
}

TEST(ComputeMetrics, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(ComputeMetrics(GapSeries{}), DataError);
  EXPECT_THROW(ComputeMetrics(GapSeries{{1.0, NAN}}), DataError);
}

TEST(ComputeMetrics, MatchesHandReferenceOnRandomSeries) {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> g(1 + rng.Below(60));
    for (double& x : g) x = rng.Normal() * 1000.0;
    const auto m = ComputeMetrics(GapSeries{g});
    const auto ref = Compute(g);
    EXPECT_NEAR(m.msd, ref.msd, 1e-9 * ref.msd);
    EXPECT_NEAR(m.rmsd, ref.rmsd, 1e-9 * ref.rmsd);
    EXPECT_NEAR(m.mae, ref.mae, 1e-9 * ref.mae);
    EXPECT_NEAR(m.mad, ref.mad, 1e-9 * std::max(1.0, ref.mad));
  }
}

TEST(ComputeMetrics, Properties) {
  SplitMix64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> g(2 + rng.Below(50));
    for (double& x : g) x = rng.Normal() * 500.0 + 30.0;
    const auto m = ComputeMetrics(GapSeries{g});
    // Power-mean inequality.
    EXPECT_GE(m.rmsd, m.mae);
    EXPECT_GE(m.mae, 0.0);
    EXPECT_NEAR(m.rmsd * m.rmsd, m.msd, 1e-9 * m.msd);

    // Permutation invariance.
    auto shuffled = g;
    for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
      std::swap(shuffled[i], shuffled[rng.Below(i + 1)]);
    }
    const auto p = ComputeMetrics(GapSeries{shuffled});
    EXPECT_NEAR(p.msd, m.msd, 1e-9 * m.msd);
    EXPECT_NEAR(p.mae, m.mae, 1e-9 * m.mae);
    EXPECT_EQ(p.mad, m.mad);

    // Scaling.
    const double k = rng.Uniform(0.1, 10.0);
    auto scaled = g;
    for (double& x : scaled) x *= k;
    const auto s = ComputeMetrics(GapSeries{scaled});
    EXPECT_NEAR(s.msd, k * k * m.msd, 1e-9 * k * k * m.msd);
    EXPECT_NEAR(s.rmsd, k * m.rmsd, 1e-9 * k * m.rmsd);
    EXPECT_NEAR(s.mae, k * m.mae, 1e-9 * k * m.mae);
    EXPECT_NEAR(s.mad, k * m.mad, 1e-9 * std::max(1.0, k * m.mad));
  }
}

TEST(ComputeMetrics, EqualMagnitudesGiveRmsdEqualMae) {
  const auto m = ComputeMetrics(GapSeries{{3, -3, 3, -3, 3}});
  EXPECT_DOUBLE_EQ(m.rmsd, m.mae);
}

TEST(RmsdDelta, PublishedTableRows) {
  EXPECT_NEAR(RmsdDelta(1710, 1861), -8.11, 0.005);
  EXPECT_EQ(RoundToPrecision(RmsdDelta(1710, 1861), 0), -8.0);
  EXPECT_NEAR(RmsdDelta(1728, 1809), -4.48, 0.005);
  EXPECT_EQ(RoundToPrecision(RmsdDelta(1728, 1809), 1), -4.5);
  EXPECT_EQ(RmsdDelta(1234.5, 1234.5), 0.0);
  EXPECT_THROW(RmsdDelta(1, 0), DataError);
}

TEST(RmsdDelta, PublishedMsdMatchesRmsdSquared) {
  // The legacy row of the published with-outliers table: MSD 4,259,462 and
  // RMSD 2064.
  EXPECT_EQ(std::round(std::sqrt(4259462.0)), 2064.0);
}

TEST(RoundToPrecision, HalfAwayFromZero) {
  EXPECT_EQ(RoundToPrecision(2.5, 0), 3.0);
  EXPECT_EQ(RoundToPrecision(-2.5, 0), -3.0);
  EXPECT_EQ(RoundToPrecision(-4.48, 1), -4.5);
}

TEST(GapViews, MonetaryAndRelative) {
  const PriceConfig price;
  auto v = ComputeGapViews(std::vector<double>{5000, 4000, 3000},
                           std::vector<double>{6000, 4000, 3000}, price);
  EXPECT_NEAR(v.monetary[0], 251.60, 1e-9);
  EXPECT_EQ(v.monetary[1], 0.0);
  EXPECT_EQ(v.relative[1], 0.0);
  v = ComputeGapViews(std::vector<double>{5000}, std::vector<double>{7000}, price);
  EXPECT_NEAR(v.relative[0], 0.40, 1e-12);
  EXPECT_THROW(ComputeGapViews(std::vector<double>{0}, std::vector<double>{1}, price),
               DataError);
  EXPECT_THROW(ComputeGapViews(std::vector<double>{1, 2}, std::vector<double>{1}, price),
               DataError);
}

TEST(Summarize, OrderStatistics) {
  const auto s = Summarize(std::vector<double>{5, 1, 4, 2, 3});
  EXPECT_EQ(s.min, 1.0);
  EXPECT_EQ(s.q1, 2.0);
  EXPECT_EQ(s.median, 3.0);
  EXPECT_EQ(s.q3, 4.0);
  EXPECT_EQ(s.max, 5.0);
  EXPECT_EQ(s.deciles.size(), 9u);
}

TEST(Summarize, DegenerateInputs) {
  const auto c = Summarize(std::vector<double>{7, 7, 7, 7});
  for (double d : c.deciles) EXPECT_EQ(d, 7.0);
  EXPECT_EQ(c.q1, 7.0);
  EXPECT_EQ(c.q3, 7.0);
  const auto one = Summarize(std::vector<double>{42});
  EXPECT_EQ(one.min, 42.0);
  EXPECT_EQ(one.max, 42.0);
  EXPECT_EQ(one.median, 42.0);
  EXPECT_THROW(Summarize(std::vector<double>{}), DataError);
}

TEST(Median, EvenLengthAveragesTheCentralPair) {
  EXPECT_EQ(Median({4, 1, 3, 2}), 2.5);
}

TEST(PriceConfig, RejectsNonPositivePrice) {
  EXPECT_THROW(PriceConfig{0.0}.Validate(), ConfigError);
  EXPECT_NO_THROW(PriceConfig{}.Validate());
}

}  // namespace
}  // namespace hearthcast
