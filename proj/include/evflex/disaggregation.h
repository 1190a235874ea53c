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

#ifndef EVFLEX_DISAGGREGATION_H_
#define EVFLEX_DISAGGREGATION_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "evflex/gpolymatroid.h"
#include "evflex/model.h"
#include "evflex/network.h"

namespace evflex {

struct VertexEntry {
  double weight = 0.0;
  OrderedSplit split;       // regenerates the vertex with VertexByOrder
  ChargingProfile vertex;   // kW
};

// target ~= sum_k weight_k * vertex_k with weights on the simplex.
struct VertexDecomposition {
  std::vector<VertexEntry> entries;
  ChargingProfile target;
  double residual_norm = 0.0;
  std::size_t iterations = 0;

  ChargingProfile Reconstruct() const;
};

enum class DecompositionMethod {
  // Fully corrective Frank-Wolfe (Wolfe's minimum-norm-point iteration):
  // every step re-optimizes the weights over the affine hull of the active
  // vertices.
  kMinNormPoint,
  // Away-step Frank-Wolfe with exact line search.
  kAwayStep,
};

struct DecomposeOptions {
  // Success once ||reconstruction - target|| <= tolerance * (1 + ||target||).
  double tolerance = 1e-8;
  // 0 means 500 * T.
  std::size_t max_iterations = 0;
  DecompositionMethod method = DecompositionMethod::kMinNormPoint;
  GPolyOptions gpoly;
};

// Writes `target` as a convex combination of greedy vertices of g, then
// prunes it to at most T+1 vertices. `seeds` are vertex recipes to start
// from (for instance the split returned by OptimizeLinear).
// Throws MembershipError when the iteration certifies that the target lies
// outside g, ConvergenceError when it runs out of iterations.
VertexDecomposition Decompose(const GPolymatroid& g,
                              const ChargingProfile& target,
                              const DecomposeOptions& options = {},
                              std::span<const OrderedSplit> seeds = {});

struct CaratheodoryResult {
  VertexDecomposition decomposition;
  // False when a numerically singular dependency stopped the reduction; the
  // input is then returned unchanged.
  bool reduced = true;
};

// Drops zero weights and removes affine dependencies until at most T+1
// vertices remain.
CaratheodoryResult ReduceCaratheodory(VertexDecomposition decomposition);

// Replays a vertex recipe on each summand of a Minkowski sum. The results add
// up to the vertex of the sum generated by the same recipe.
std::vector<ChargingProfile> SplitVertex(std::span<const GPolymatroid> summands,
                                         const OrderedSplit& split,
                                         const GPolyOptions& options = {});

struct DisaggregationResult {
  std::map<std::string, ChargingProfile> per_device;
  // Filled by DisaggregateTree: target handed to every feeder.
  std::map<std::string, ChargingProfile> per_feeder;
  ChargingProfile achieved_aggregate;  // sum of per_device
  double max_device_violation = 0.0;   // kW / kWh
  double max_box_violation = 0.0;      // kW
  double residual_norm = 0.0;          // ||achieved - target||
  std::size_t max_vertex_count = 0;
};

// Splits an aggregate profile of the unconstrained population set into
// per-EV schedules.
DisaggregationResult Disaggregate(std::span<const EvSpec> population,
                                  const TimeHorizon& horizon,
                                  const ChargingProfile& target,
                                  const DecomposeOptions& options = {});

// Splits a profile of the network set (the sum of the constrained root
// feeder sets) down the tree: first across root feeders over vertices of
// the network set, then inside every feeder across its EVs and child
// feeders over vertices of the feeder's unconstrained set. Each feeder
// target is checked against the feeder box.
DisaggregationResult DisaggregateTree(std::span<const FeederNode> roots,
                                      const TimeHorizon& horizon,
                                      const ChargingProfile& target,
                                      const DecomposeOptions& options = {},
                                      std::span<const OrderedSplit> seeds = {});

}  // namespace evflex

#endif  // EVFLEX_DISAGGREGATION_H_
