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

#ifndef EVFLEX_SCENARIO_IO_H_
#define EVFLEX_SCENARIO_IO_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "evflex/model.h"

namespace evflex {

// Scenario documents:
//   { "horizon": {"T": int, "delta": float},
//     "prices": [float x T],
//     "feeders": [{"id", "flow_min", "flow_max", "nominal_load", "parent"}],
//     "evs": [{"id", "feeder_id", "arrival", "departure", "max_rate",
//              "energy_min", "energy_max"}] }
// Parsing checks structure and types only; call ValidateScenario for the
// model invariants. Throws IoError.
Scenario ParseScenario(std::string_view text);
Scenario LoadScenario(const std::filesystem::path& path);

// Canonical form: fixed key order, feeders and EVs sorted by id, shortest
// round-trip numbers. Serialize(Parse(Serialize(s))) == Serialize(s).
std::string SerializeScenario(const Scenario& scenario);
void SaveScenario(const Scenario& scenario, const std::filesystem::path& path);

std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, std::string_view text);

// Nine significant digits; negative zero prints as 0.
std::string FormatNumber(double value);

using LabeledProfile = std::pair<std::string, ChargingProfile>;

// Long format "entity_id,period,kw" with 1-based periods, rows in the order
// given.
std::string FormatLongCsv(const std::vector<LabeledProfile>& series);

}  // namespace evflex

#endif  // EVFLEX_SCENARIO_IO_H_
