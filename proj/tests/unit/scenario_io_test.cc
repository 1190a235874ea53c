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

#include "evflex/scenario_io.h"

#include <gtest/gtest.h>

#include "evflex/casestudy.h"
#include "evflex/errors.h"
#include "fixtures.h"

namespace evflex {
namespace {

constexpr char kSmall[] = R"({
  "horizon": {"T": 3, "delta": 0.5},
  "prices": [0.3, 0.1, 0.2],
  "feeders": [
    {"id": "F1", "flow_min": 0, "flow_max": 5, "nominal_load": [1, 1, 1], "parent": null}
  ],
  "evs": [
    {"id": "a", "feeder_id": "F1", "arrival": 1, "departure": 3,
     "max_rate": 2, "energy_min": 1, "energy_max": 2.5}
  ]
})";

TEST(ScenarioIoTest, ParsesFields) {
  const Scenario s = ParseScenario(kSmall);
  EXPECT_EQ(s.horizon.periods, 3u);
  EXPECT_DOUBLE_EQ(s.horizon.delta, 0.5);
  ASSERT_EQ(s.evs.count("a"), 1u);
  EXPECT_EQ(s.evs.at("a").departure, 3u);
  EXPECT_FALSE(s.feeders.at("F1").parent.has_value());
  EXPECT_EQ(s.EvIdsOf("F1"), std::vector<std::string>{"a"});
}

TEST(ScenarioIoTest, CanonicalFormIsAFixedPoint) {
  const std::string once = SerializeScenario(ParseScenario(kSmall));
  EXPECT_EQ(SerializeScenario(ParseScenario(once)), once);
}

TEST(ScenarioIoTest, SampledScenarioRoundTripsByteForByte) {
  CaseStudyConfig config;
  config.seed = 7;
  const Scenario s = BuildCaseStudy(config).scenario;
  const std::string text = SerializeScenario(s);
  const Scenario back = ParseScenario(text);
  EXPECT_EQ(SerializeScenario(back), text);
  EXPECT_EQ(back.evs.size(), s.evs.size());
}

TEST(ScenarioIoTest, MalformedDocumentsAreIoErrors) {
  EXPECT_THROW(ParseScenario("{"), IoError);
  EXPECT_THROW(ParseScenario(R"({"horizon": {"T": 3}})"), IoError);
  EXPECT_THROW(ParseScenario(R"({"horizon": {"T": -3, "delta": 1},
      "prices": [], "feeders": [], "evs": []})"),
               IoError);
  std::string duplicated = kSmall;
  duplicated.replace(duplicated.find("\"evs\": ["), 8,
                     R"("evs": [{"id": "a", "feeder_id": "F1", "arrival": 1,
      "departure": 2, "max_rate": 1, "energy_min": 0, "energy_max": 1},)");
  EXPECT_THROW(ParseScenario(duplicated), IoError);
}

TEST(ScenarioIoTest, MissingFileIsAnIoError) {
  EXPECT_THROW(LoadScenario("/nonexistent/scenario.json"), IoError);
}

TEST(ScenarioIoTest, NumbersUseNineSignificantDigits) {
  EXPECT_EQ(FormatNumber(0.0), "0");
  EXPECT_EQ(FormatNumber(-0.0), "0");
  EXPECT_EQ(FormatNumber(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(FormatNumber(11.0), "11");
}

TEST(ScenarioIoTest, LongCsvIsOneBased) {
  const std::string csv =
      FormatLongCsv({{"x", testing::Profile({1.5, 0.0})}});
  EXPECT_EQ(csv, "entity_id,period,kw\nx,1,1.5\nx,2,0\n");
}

}  // namespace
}  // namespace evflex
