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

#ifndef EVFLEX_CASESTUDY_H_
#define EVFLEX_CASESTUDY_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evflex/crosscheck.h"
#include "evflex/disaggregation.h"
#include "evflex/model.h"
#include "evflex/pipeline.h"

namespace evflex {

struct CaseStudyConfig {
  std::uint64_t seed = 1;
  std::size_t feeders = 2;
  std::size_t evs_per_feeder = 10;
  std::size_t periods = 48;
  // Period length in hours; 0 spreads the periods over one day (24 / T).
  double delta = 0.0;
  // Clock hour at the start of period 1. A noon start puts the sampled
  // arrivals in the evening and the departures the next morning.
  double start_hour = 12.0;
  // flow_max starts at this fraction of the feeder's summed charging rates
  // and grows by `limit_step` until the feeder can serve its EVs.
  double limit_start = 0.4;
  double limit_step = 0.05;
  DecomposeOptions options;
  bool oracle_check = false;
};

// Day-ahead style price curve (currency per kWh) with a morning and an
// evening peak over one day split into `periods` settlement periods, the
// first of which starts at `start_hour` o'clock.
std::vector<double> DoublePeakPrices(std::size_t periods,
                                     double start_hour = 0.0);

struct CaseStudyScenario {
  Scenario scenario;
  std::map<std::string, double> limit_fraction;
};

// Samples the feeders and EVs and sizes every feeder limit.
CaseStudyScenario BuildCaseStudy(const CaseStudyConfig& config);

struct CaseStudyOutcome {
  CaseStudyScenario setup;
  OptimizeOutcome optimum;
  DisaggregateOutcome split;
  std::map<std::string, ChargingProfile> baseline;  // per EV
  double baseline_cost = 0.0;
  // The baseline ignores feeder limits; this records whether it happens to
  // respect them.
  bool baseline_within_boxes = false;
  std::vector<CrossCheckReport> oracle_reports;

  bool CostNotAboveBaseline() const;
  bool OracleChecksPassed() const;
  // Pipeline checks, oracle checks and, when the baseline respects the
  // feeder boxes, the cost comparison.
  bool Passed() const;
};

CaseStudyOutcome RunCaseStudy(const CaseStudyConfig& config);

// Writes scenario.json, optimize.json, aggregate.csv, schedules.csv,
// report.json, timing.json and, after oracle checks, oracle_check.json.
// Everything except timing.json is a deterministic function of the config.
void WriteCaseStudy(const CaseStudyOutcome& outcome,
                    const CaseStudyConfig& config,
                    const std::filesystem::path& directory);

}  // namespace evflex

#endif  // EVFLEX_CASESTUDY_H_
