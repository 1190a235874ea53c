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

#include "evflex/pipeline.h"

#include <algorithm>
#include <chrono>

#include <fmt/core.h>

#include "evflex/errors.h"
#include "json.hpp"

namespace evflex {
namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void RequireValid(const Scenario& scenario) {
  const auto violations = ValidateScenario(scenario);
  if (!violations.empty()) {
    throw InvalidInputError(fmt::format("invalid scenario: {}: {}",
                                        violations.front().entity,
                                        violations.front().rule));
  }
}

// Sum of the device schedules in the subtree of every feeder.
ChargingProfile CollectFeeder(const FeederNode& node,
                              const DisaggregationResult& result,
                              std::map<std::string, ChargingProfile>& out) {
  ChargingProfile total = ChargingProfile::Zero(node.horizon().periods);
  for (const auto& ev : node.evs()) total += result.per_device.at(ev.id);
  for (const auto& child : node.children()) {
    total += CollectFeeder(child, result, out);
  }
  out[node.spec().id] = total;
  return total;
}

void CheckBoxes(const FeederNode& node,
                const std::map<std::string, ChargingProfile>& aggregates,
                FeasibilityReport& report) {
  const auto& id = node.spec().id;
  report.box_violation[id] = DeriveBox(node.spec()).Violation(aggregates.at(id));
  for (const auto& child : node.children()) CheckBoxes(child, aggregates, report);
}

Json ProfileJson(const ChargingProfile& u) { return Json(u.values()); }

}  // namespace

OptimizeOutcome OptimizeScenario(const Scenario& scenario,
                                 const GPolyOptions& options, bool per_feeder) {
  RequireValid(scenario);
  const auto start = Clock::now();
  const auto roots = BuildForest(scenario);
  const GPolymatroid network =
      AggregateNetwork(roots, scenario.horizon, options);
  OptimizeOutcome outcome;
  outcome.optimum = OptimizeLinear(network, scenario.prices, options);
  if (per_feeder) {
    std::vector<GPolymatroid> parts;
    for (const auto& root : roots) parts.push_back(AggregateNode(root, options));
    const auto split = SplitVertex(parts, outcome.optimum.split, options);
    for (std::size_t j = 0; j < roots.size(); ++j) {
      outcome.per_feeder[roots[j].spec().id] = split[j];
    }
  }
  outcome.seconds = SecondsSince(start);
  return outcome;
}

bool FeasibilityReport::WithinBoxes() const {
  return std::all_of(box_violation.begin(), box_violation.end(),
                     [&](const auto& kv) { return kv.second <= box_limit; });
}

bool FeasibilityReport::Passed() const {
  return residual_norm <= residual_limit && DevicesFeasible() &&
         WithinBoxes() && max_vertex_count <= vertex_limit;
}

DisaggregateOutcome DisaggregateScenario(const Scenario& scenario,
                                         const ChargingProfile& target,
                                         const DecomposeOptions& options,
                                         const std::optional<OrderedSplit>& hint,
                                         double check_tolerance) {
  RequireValid(scenario);
  if (target.size() != scenario.horizon.periods) {
    throw InvalidInputError(fmt::format("aggregate has {} periods, scenario {}",
                                        target.size(),
                                        scenario.horizon.periods));
  }
  const auto start = Clock::now();
  const auto roots = BuildForest(scenario);
  std::vector<OrderedSplit> seeds;
  if (hint && IsValidSplit(*hint, scenario.horizon.periods)) {
    seeds.push_back(*hint);
  }
  DisaggregateOutcome outcome;
  outcome.result =
      DisaggregateTree(roots, scenario.horizon, target, options, seeds);
  outcome.seconds = SecondsSince(start);

  auto& report = outcome.report;
  const double scale = 1.0 + target.Norm();
  report.residual_norm = outcome.result.residual_norm;
  report.residual_limit = check_tolerance * scale;
  report.box_limit = check_tolerance * scale;
  report.max_device_violation = outcome.result.max_device_violation;
  report.max_vertex_count = outcome.result.max_vertex_count;
  report.vertex_limit = scenario.horizon.periods + 1;
  for (const auto& [id, ev] : scenario.evs) {
    if (!IsDeviceFeasible(outcome.result.per_device.at(id), ev,
                          scenario.horizon.delta)) {
      report.infeasible_devices.push_back(id);
    }
  }
  for (const auto& root : roots) {
    CollectFeeder(root, outcome.result, outcome.feeder_aggregate);
    CheckBoxes(root, outcome.feeder_aggregate, report);
  }
  return outcome;
}

double ProfileCost(const ChargingProfile& u, const std::vector<double>& prices,
                   double delta) {
  double cost = 0.0;
  for (std::size_t t = 0; t < u.size(); ++t) cost += prices.at(t) * u[t] * delta;
  return cost;
}

std::map<std::string, ChargingProfile> ChargeAtArrival(const Scenario& scenario) {
  std::map<std::string, ChargingProfile> out;
  const double delta = scenario.horizon.delta;
  for (const auto& [id, ev] : scenario.evs) {
    ChargingProfile u = ChargingProfile::Zero(scenario.horizon.periods);
    double remaining = ev.energy_min;
    for (std::size_t t = ev.first_index(); t <= ev.last_index() && remaining > 0.0;
         ++t) {
      u[t] = std::min(ev.max_rate, remaining / delta);
      remaining -= u[t] * delta;
    }
    out[id] = u;
  }
  return out;
}

std::string OptimizeJson(const OptimizeOutcome& outcome) {
  const auto& opt = outcome.optimum;
  Json doc;
  doc["objective"] = opt.objective;
  doc["aggregate"] = ProfileJson(opt.profile);
  std::vector<std::size_t> order;
  for (std::size_t t : opt.split.order) order.push_back(t + 1);
  doc["split"] = {{"order", order}, {"split", opt.split.split}};
  doc["chain_evaluations"] = opt.chain_evaluations;
  if (!outcome.per_feeder.empty()) {
    Json feeders = Json::object();
    for (const auto& [id, u] : outcome.per_feeder) feeders[id] = ProfileJson(u);
    doc["feeders"] = std::move(feeders);
  }
  return doc.dump(2) + "\n";
}

std::string FeasibilityJson(const DisaggregateOutcome& outcome) {
  const auto& r = outcome.report;
  Json doc;
  doc["passed"] = r.Passed();
  doc["residual_norm"] = r.residual_norm;
  doc["residual_limit"] = r.residual_limit;
  doc["max_device_violation"] = r.max_device_violation;
  doc["infeasible_devices"] = r.infeasible_devices;
  Json boxes = Json::object();
  for (const auto& [id, v] : r.box_violation) boxes[id] = v;
  doc["box_violation"] = std::move(boxes);
  doc["box_limit"] = r.box_limit;
  doc["max_vertex_count"] = r.max_vertex_count;
  doc["vertex_limit"] = r.vertex_limit;
  return doc.dump(2) + "\n";
}

AggregateInput ParseAggregate(std::string_view text, std::size_t periods) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw IoError(fmt::format("malformed JSON: {}", e.what()));
  }
  AggregateInput input;
  const Json* values = &doc;
  if (doc.is_object()) {
    const auto it = doc.find("aggregate");
    if (it == doc.end()) throw IoError("aggregate: missing field \"aggregate\"");
    values = &*it;
    if (const auto s = doc.find("split"); s != doc.end()) {
      try {
        OrderedSplit split;
        for (std::size_t t : s->at("order").get<std::vector<std::size_t>>()) {
          if (t == 0) throw IoError("aggregate: split order is 1-based");
          split.order.push_back(t - 1);
        }
        split.split = s->at("split").get<std::size_t>();
        if (!IsValidSplit(split, periods)) {
          throw IoError("aggregate: split is not a valid vertex recipe");
        }
        input.split = std::move(split);
      } catch (const Json::exception& e) {
        throw IoError(fmt::format("aggregate: bad split: {}", e.what()));
      }
    }
  }
  if (!values->is_array()) throw IoError("aggregate: expected an array of kW");
  std::vector<double> kw;
  for (const Json& x : *values) {
    if (!x.is_number()) throw IoError("aggregate: values must be numbers");
    kw.push_back(x.get<double>());
  }
  if (kw.size() != periods) {
    throw IoError(fmt::format("aggregate has {} values, expected {}", kw.size(),
                              periods));
  }
  input.profile = ChargingProfile(std::move(kw));
  return input;
}

}  // namespace evflex
