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

#ifndef EVFLEX_CROSSCHECK_H_
#define EVFLEX_CROSSCHECK_H_

// Randomized agreement checks between the set-function machinery and the
// brute-force LP oracle. Each suite draws its own instances from a seed and
// reports the number of disagreements.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "evflex/gpolymatroid.h"
#include "evflex/model.h"
#include "evflex/pipeline.h"

namespace evflex {

struct CrossCheckReport {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  // Membership suites: cases the oracle accepted.
  std::size_t members = 0;
  double worst_error = 0.0;
  double tolerance = 0.0;
  std::string first_failure;

  bool Passed() const { return cases > 0 && failures == 0; }
};

struct SuiteSize {
  std::uint64_t seed = 1;
  std::size_t instances = 10;
  std::size_t max_periods = 6;
  std::size_t max_evs = 3;
};

// p_i and b_i of single EVs against the LP on every subset.
CrossCheckReport CheckDeviceFunctions(const SuiteSize& size,
                                      double tolerance = 1e-7);

// contains(sum) against LP membership on `profiles` points per population,
// vertices and their perturbations included.
CrossCheckReport CheckMinkowskiMembership(const SuiteSize& size,
                                          std::size_t profiles = 200);

// Box intersection: membership against LP with box rows, and p', b' against
// the boxed LP on every subset.
CrossCheckReport CheckIntersection(const SuiteSize& size,
                                   std::size_t profiles = 200,
                                   double tolerance = 1e-6);

// Greedy objective against the LP on unconstrained and boxed sets; also
// fails when the greedy touches more than T+1 distinct chain sets.
CrossCheckReport CheckGreedy(const SuiteSize& size, double tolerance = 1e-7);

// Min-norm-point SFM against exhaustive search.
CrossCheckReport CheckSfm(const SuiteSize& size, double tolerance = 1e-6);

// Random scenarios through optimize and disaggregate. Fails on residual,
// device, box or vertex-count violations, or when the optimum disagrees with
// the per-feeder LP.
CrossCheckReport CheckEndToEnd(const SuiteSize& size, double tolerance = 1e-6);

// LP checks of one scenario run: the objective against the sum of per-feeder
// LP optima and each feeder aggregate against LP membership. Reports zero
// cases when the scenario is nested or too large for the dense oracle.
CrossCheckReport CheckScenarioRun(const Scenario& scenario,
                                  const OptimizeOutcome& optimum,
                                  const DisaggregateOutcome& split,
                                  double tolerance = 1e-6);

// Random population/box helpers, exposed for tests.
EvSpec RandomEv(std::uint64_t seed, const TimeHorizon& horizon,
                std::string id = "ev");
// A box around a random member of g, clipped below at zero.
PowerBox RandomBoxAround(const GPolymatroid& g, std::uint64_t seed,
                         double spread);

}  // namespace evflex

#endif  // EVFLEX_CROSSCHECK_H_
