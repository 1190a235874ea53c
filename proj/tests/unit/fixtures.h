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

#ifndef EVFLEX_TESTS_UNIT_FIXTURES_H_
#define EVFLEX_TESTS_UNIT_FIXTURES_H_

#include <string>
#include <vector>

#include "evflex/model.h"

namespace evflex::testing {

inline EvSpec MakeEv(std::string id, std::size_t arrival,
                     std::size_t departure, double rate, double emin,
                     double emax) {
  EvSpec ev;
  ev.id = std::move(id);
  ev.feeder_id = "F1";
  ev.arrival = arrival;
  ev.departure = departure;
  ev.max_rate = rate;
  ev.energy_min = emin;
  ev.energy_max = emax;
  return ev;
}

// Window {1,2,3}, 2 kW, 3..5 kWh.
inline EvSpec D1() { return MakeEv("D1", 1, 3, 2.0, 3.0, 5.0); }
// Window {2,3}, 1 kW, exactly 2 kWh: its flexibility set is {(0,1,1)}.
inline EvSpec D2() { return MakeEv("D2", 2, 3, 1.0, 2.0, 2.0); }

inline TimeHorizon Horizon(std::size_t periods, double delta = 1.0) {
  return TimeHorizon{periods, delta};
}

inline ChargingProfile Profile(std::vector<double> kw) {
  return ChargingProfile(std::move(kw));
}

}  // namespace evflex::testing

#endif  // EVFLEX_TESTS_UNIT_FIXTURES_H_
