// Copyright 2026 The evflex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "evflex/casestudy.h"

#include <algorithm>

#include <gtest/gtest.h>

#include "evflex/errors.h"
#include "evflex/scenario_io.h"

namespace evflex {
namespace {

TEST(DoublePeakPricesTest, EveningPeakAboveNight) {
  const auto prices = DoublePeakPrices(48);
  ASSERT_EQ(prices.size(), 48u);
  // Periods 37 and 38 straddle 18:30; period 7 covers 03:00-03:30.
  EXPECT_GT(prices[37], prices[6]);
  EXPECT_EQ(*std::max_element(prices.begin(), prices.end()),
            std::max(prices[36], prices[37]));
  EXPECT_GT(prices[37], prices[16]);  // evening above morning
  EXPECT_TRUE(std::all_of(prices.begin(), prices.end(),
                          [](double p) { return p > 0.0; }));
}

TEST(DoublePeakPricesTest, StartHourRotatesTheCurve) {
  const auto midnight = DoublePeakPrices(24);
  const auto noon = DoublePeakPrices(24, 12.0);
  for (std::size_t t = 0; t < 24; ++t) {
    EXPECT_DOUBLE_EQ(noon[t], midnight[(t + 12) % 24]);
  }
}

TEST(BuildCaseStudyTest, FeedersAreFeasibleAndDeterministic) {
  CaseStudyConfig config;
  const auto a = BuildCaseStudy(config);
  EXPECT_EQ(a.scenario.feeders.size(), 2u);
  EXPECT_EQ(a.scenario.evs.size(), 20u);
  for (const auto& [id, f] : a.scenario.feeders) {
    EXPECT_GE(a.limit_fraction.at(id), config.limit_start);
    EXPECT_EQ(a.scenario.EvIdsOf(id).size(), 10u);
  }
  EXPECT_EQ(SerializeScenario(BuildCaseStudy(config).scenario),
            SerializeScenario(a.scenario));
}

TEST(BuildCaseStudyTest, RejectsEmptyNetwork) {
  CaseStudyConfig config;
  config.feeders = 0;
  EXPECT_THROW(BuildCaseStudy(config), InvalidInputError);
}

// Larger horizons exercise long active sets in the min-norm decomposition,
// where nearly-zero weights used to end the iteration early.
class CaseStudyHorizonTest
    : public ::testing::TestWithParam<std::tuple<std::size_t, std::uint64_t>> {};

TEST_P(CaseStudyHorizonTest, PipelineChecksPass) {
  CaseStudyConfig config;
  config.periods = std::get<0>(GetParam());
  config.seed = std::get<1>(GetParam());
  const CaseStudyOutcome out = RunCaseStudy(config);
  EXPECT_TRUE(out.split.report.Passed());
  EXPECT_TRUE(out.Passed());
  EXPECT_LE(out.split.report.max_vertex_count, config.periods + 1);
}

INSTANTIATE_TEST_SUITE_P(Horizons, CaseStudyHorizonTest,
                         ::testing::Combine(::testing::Values<std::size_t>(24, 36, 48, 96),
                                            ::testing::Values<std::uint64_t>(1, 2, 3)),
                         [](const auto& info) {
                           return "T" + std::to_string(std::get<0>(info.param)) +
                                  "Seed" + std::to_string(std::get<1>(info.param));
                         });

TEST(RunCaseStudyTest, OptimumNoDearerThanBoxFeasibleBaseline) {
  // Limits at the full charging rate admit the charge-at-arrival baseline.
  CaseStudyConfig config;
  config.limit_start = 1.0;
  const CaseStudyOutcome out = RunCaseStudy(config);
  EXPECT_TRUE(out.baseline_within_boxes);
  EXPECT_TRUE(out.CostNotAboveBaseline());
}

}  // namespace
}  // namespace evflex
