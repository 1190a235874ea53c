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

#include "evflex/network.h"

#include <algorithm>
#include <functional>
#include <map>

#include <spdlog/spdlog.h>

#include "evflex/errors.h"

namespace evflex {

FeederNode::FeederNode(FeederSpec spec, TimeHorizon horizon)
    : spec_(std::move(spec)),
      horizon_(horizon),
      cache_(std::make_shared<Cache>()) {}

void FeederNode::AddChild(FeederNode child) {
  children_.push_back(std::move(child));
  cache_ = std::make_shared<Cache>();
}

void FeederNode::AddEv(EvSpec ev) {
  evs_.push_back(std::move(ev));
  cache_ = std::make_shared<Cache>();
}

std::size_t FeederNode::Depth() const {
  std::size_t deepest = 0;
  for (const auto& c : children_) deepest = std::max(deepest, c.Depth());
  return deepest + 1;
}

std::size_t FeederNode::EvCount() const {
  std::size_t n = evs_.size();
  for (const auto& c : children_) n += c.EvCount();
  return n;
}

std::vector<FeederNode> BuildForest(const Scenario& scenario) {
  std::map<std::string, std::vector<std::string>> children;
  std::vector<std::string> roots;
  for (const auto& [id, feeder] : scenario.feeders) {
    if (feeder.parent) {
      children[*feeder.parent].push_back(id);
    } else {
      roots.push_back(id);
    }
  }
  std::function<FeederNode(const std::string&, std::size_t)> build =
      [&](const std::string& id, std::size_t level) {
        if (level > scenario.feeders.size()) {
          throw InvalidInputError("feeder graph contains a cycle");
        }
        FeederNode node(scenario.feeders.at(id), scenario.horizon);
        for (const auto& ev_id : scenario.EvIdsOf(id)) {
          node.AddEv(scenario.evs.at(ev_id));
        }
        for (const auto& child : children[id]) {
          node.AddChild(build(child, level + 1));
        }
        return node;
      };
  std::vector<FeederNode> forest;
  for (const auto& id : roots) forest.push_back(build(id, 0));
  return forest;
}

std::vector<GPolymatroid> NodeSummands(const FeederNode& node,
                                       const GPolyOptions& options) {
  std::vector<GPolymatroid> parts;
  for (const auto& ev : node.evs()) parts.push_back(FromDevice(ev, node.horizon()));
  for (const auto& child : node.children()) {
    parts.push_back(AggregateNode(child, options));
  }
  return parts;
}

GPolymatroid AggregateNode(const FeederNode& node, const GPolyOptions& options) {
  auto cache = node.cache_;
  std::lock_guard lock(cache->mu);
  if (cache->value && cache->built_with == options.sfm) return *cache->value;
  if (node.Depth() > 2) {
    spdlog::warn("feeder {}: subtree depth {} nests SFM solves inside set "
                 "function evaluations",
                 node.spec().id, node.Depth());
  }
  const std::vector<GPolymatroid> parts = NodeSummands(node, options);
  const GPolymatroid sum = MinkowskiSum(node.horizon(), parts);
  GPolymatroid constrained =
      IntersectBox(sum, DeriveBox(node.spec()), options,
                   "feeder " + node.spec().id);
  cache->value = constrained;
  cache->built_with = options.sfm;
  return constrained;
}

GPolymatroid AggregateNetwork(std::span<const FeederNode> roots,
                              const TimeHorizon& horizon,
                              const GPolyOptions& options) {
  std::vector<GPolymatroid> parts;
  for (const auto& root : roots) parts.push_back(AggregateNode(root, options));
  if (parts.empty()) return ZeroGPolymatroid(horizon);
  return MinkowskiSum(horizon, parts);
}

}  // namespace evflex
