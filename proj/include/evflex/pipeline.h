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

#ifndef EVFLEX_PIPELINE_H_
#define EVFLEX_PIPELINE_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evflex/disaggregation.h"
#include "evflex/gpolymatroid.h"
#include "evflex/model.h"
#include "evflex/network.h"

namespace evflex {

struct OptimizeOutcome {
  LinearOptimum optimum;
  // Root feeder profiles that add up to optimum.profile; filled on request.
  std::map<std::string, ChargingProfile> per_feeder;
  double seconds = 0.0;
};

// Minimizes the scenario prices over the network set. Throws
// InvalidInputError for an invalid scenario and InfeasibleError naming the
// first feeder whose limits cannot be met.
OptimizeOutcome OptimizeScenario(const Scenario& scenario,
                                 const GPolyOptions& options = {},
                                 bool per_feeder = false);

struct FeasibilityReport {
  double residual_norm = 0.0;
  double residual_limit = 0.0;
  double max_device_violation = 0.0;
  std::vector<std::string> infeasible_devices;
  // Largest box violation (kW) of each feeder's reconstructed aggregate.
  std::map<std::string, double> box_violation;
  double box_limit = 0.0;
  std::size_t max_vertex_count = 0;
  std::size_t vertex_limit = 0;

  bool DevicesFeasible() const { return infeasible_devices.empty(); }
  bool WithinBoxes() const;
  bool Passed() const;
};

struct DisaggregateOutcome {
  DisaggregationResult result;
  // Sum of the device schedules below each feeder, subtree included.
  std::map<std::string, ChargingProfile> feeder_aggregate;
  FeasibilityReport report;
  double seconds = 0.0;
};

// Splits `target` across the scenario's EVs and checks every device and
// feeder. `check_tolerance` scales the residual and box limits by
// (1 + |target|).
DisaggregateOutcome DisaggregateScenario(
    const Scenario& scenario, const ChargingProfile& target,
    const DecomposeOptions& options = {},
    const std::optional<OrderedSplit>& hint = std::nullopt,
    double check_tolerance = 1e-6);

// Energy cost sum_t c(t) u(t) delta.
double ProfileCost(const ChargingProfile& u, const std::vector<double>& prices,
                   double delta);

// Every EV charges at full rate from arrival until energy_min is reached.
std::map<std::string, ChargingProfile> ChargeAtArrival(const Scenario& scenario);

// JSON documents for the command outputs. Orders are printed 1-based.
std::string OptimizeJson(const OptimizeOutcome& outcome);
std::string FeasibilityJson(const DisaggregateOutcome& outcome);

struct AggregateInput {
  ChargingProfile profile;
  std::optional<OrderedSplit> split;
};

// Accepts the document written by OptimizeJson or a plain array of kW
// values. Throws IoError.
AggregateInput ParseAggregate(std::string_view text, std::size_t periods);

}  // namespace evflex

#endif  // EVFLEX_PIPELINE_H_
