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

#ifndef EVFLEX_NETWORK_H_
#define EVFLEX_NETWORK_H_

#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "evflex/gpolymatroid.h"
#include "evflex/model.h"

namespace evflex {

// One feeder of a radial network: its limits, the EVs attached directly to
// it and its downstream feeders. Mutators drop the cached aggregate.
class FeederNode {
 public:
  FeederNode(FeederSpec spec, TimeHorizon horizon);

  const FeederSpec& spec() const { return spec_; }
  const TimeHorizon& horizon() const { return horizon_; }
  const std::vector<FeederNode>& children() const { return children_; }
  const std::vector<EvSpec>& evs() const { return evs_; }

  void AddChild(FeederNode child);
  void AddEv(EvSpec ev);

  // 1 for a leaf feeder.
  std::size_t Depth() const;
  std::size_t EvCount() const;  // whole subtree

 private:
  friend GPolymatroid AggregateNode(const FeederNode& node,
                                    const GPolyOptions& options);

  struct Cache {
    std::mutex mu;
    std::optional<GPolymatroid> value;
    SfmOptions built_with;
  };

  FeederSpec spec_;
  TimeHorizon horizon_;
  std::vector<FeederNode> children_;
  std::vector<EvSpec> evs_;
  std::shared_ptr<Cache> cache_;
};

// Roots of the feeder forest described by a validated scenario. Children and
// EVs are attached in id order.
std::vector<FeederNode> BuildForest(const Scenario& scenario);

// The summands whose Minkowski sum is the node's unconstrained set: one
// g-polymatroid per local EV followed by the constrained aggregate of each
// child feeder.
std::vector<GPolymatroid> NodeSummands(const FeederNode& node,
                                       const GPolyOptions& options);

// intersect_box(sum(NodeSummands), DeriveBox(spec)); cached on the node.
// Throws InfeasibleError naming the feeder when the limits cannot be met.
GPolymatroid AggregateNode(const FeederNode& node,
                           const GPolyOptions& options = {});

// Minkowski sum of the root aggregates; the zero set for an empty forest.
GPolymatroid AggregateNetwork(std::span<const FeederNode> roots,
                              const TimeHorizon& horizon,
                              const GPolyOptions& options = {});

}  // namespace evflex

#endif  // EVFLEX_NETWORK_H_
