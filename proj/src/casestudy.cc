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

#include "evflex/casestudy.h"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>
#include <spdlog/spdlog.h>

#include "evflex/errors.h"
#include "evflex/gpolymatroid.h"
#include "evflex/scenario_io.h"
#include "json.hpp"

namespace evflex {
namespace {

using Json = nlohmann::ordered_json;

double Bump(double hour, double center, double width) {
  const double z = (hour - center) / width;
  return std::exp(-z * z);
}

Json ReportJson(const CaseStudyOutcome& outcome, const CaseStudyConfig& config) {
  const auto& s = outcome.setup.scenario;
  const auto& r = outcome.split.report;
  Json doc;
  doc["seed"] = config.seed;
  doc["periods"] = s.horizon.periods;
  doc["ev_count"] = s.evs.size();
  Json feeders = Json::object();
  for (const auto& [id, f] : s.feeders) {
    feeders[id] = {{"flow_max", f.flow_max},
                   {"limit_fraction", outcome.setup.limit_fraction.at(id)},
                   {"ev_count", s.EvIdsOf(id).size()},
                   {"max_box_violation", r.box_violation.at(id)}};
  }
  doc["feeders"] = std::move(feeders);
  doc["objective"] = outcome.optimum.optimum.objective;
  doc["baseline_cost"] = outcome.baseline_cost;
  doc["baseline_within_boxes"] = outcome.baseline_within_boxes;
  doc["residual_norm"] = r.residual_norm;
  doc["max_device_violation"] = r.max_device_violation;
  doc["max_vertex_count"] = r.max_vertex_count;
  doc["checks"] = {{"devices_feasible", r.DevicesFeasible()},
                   {"within_boxes", r.WithinBoxes()},
                   {"residual", r.residual_norm <= r.residual_limit},
                   {"vertex_count", r.max_vertex_count <= r.vertex_limit},
                   {"cost_not_above_baseline", outcome.CostNotAboveBaseline()}};
  if (config.oracle_check) doc["checks"]["oracle"] = outcome.OracleChecksPassed();
  doc["passed"] = outcome.Passed();
  return doc;
}

Json OracleJson(const std::vector<CrossCheckReport>& reports) {
  Json doc = Json::array();
  for (const auto& r : reports) {
    doc.push_back({{"name", r.name},
                   {"passed", r.Passed()},
                   {"cases", r.cases},
                   {"failures", r.failures},
                   {"worst_error", r.worst_error},
                   {"tolerance", r.tolerance},
                   {"first_failure", r.first_failure}});
  }
  return doc;
}

}  // namespace

std::vector<double> DoublePeakPrices(std::size_t periods, double start_hour) {
  std::vector<double> prices(periods);
  for (std::size_t t = 0; t < periods; ++t) {
    const double hour = std::fmod(
        start_hour + (static_cast<double>(t) + 0.5) * 24.0 /
                         static_cast<double>(periods),
        24.0);
    const double value = 0.12 + 0.10 * Bump(hour, 8.5, 1.75) +
                         0.16 * Bump(hour, 18.5, 2.0) -
                         0.04 * Bump(hour, 3.5, 2.5);
    // Rounded so the scenario file carries short decimals.
    prices[t] = std::round(value * 1e5) / 1e5;
  }
  return prices;
}

CaseStudyScenario BuildCaseStudy(const CaseStudyConfig& config) {
  if (config.feeders == 0) throw InvalidInputError("need at least one feeder");
  if (!(config.limit_start > 0.0) || !(config.limit_step > 0.0)) {
    throw InvalidInputError("limit fractions must be positive");
  }
  CaseStudyScenario out;
  Scenario& s = out.scenario;
  const double delta =
      config.delta > 0.0 ? config.delta
      : config.periods > 0 ? 24.0 / static_cast<double>(config.periods)
                           : 1.0;
  s.horizon = TimeHorizon{config.periods, delta};
  const auto violations = ValidateHorizon(s.horizon);
  if (!violations.empty()) {
    throw InvalidInputError("invalid horizon: " + violations.front().rule);
  }
  s.prices = DoublePeakPrices(config.periods, config.start_hour);

  for (std::size_t j = 0; j < config.feeders; ++j) {
    FeederSpec f;
    f.id = fmt::format("F{}", j + 1);
    f.nominal_load.assign(config.periods, 0.0);
    const auto evs = SamplePopulation(config.seed * 1000 + j, config.evs_per_feeder,
                                      s.horizon, SamplerConfig{}, f.id);
    std::vector<GPolymatroid> parts;
    double rate = 0.0;
    for (const auto& ev : evs) {
      s.evs[ev.id] = ev;
      parts.push_back(FromDevice(ev, s.horizon));
      rate += ev.max_rate;
    }
    const GPolymatroid sum = MinkowskiSum(s.horizon, parts);
    double fraction = config.limit_start;
    // Integer steps keep the fractions free of accumulated rounding.
    for (int step = 0;; ++step) {
      fraction = config.limit_start + step * config.limit_step;
      f.flow_max = std::round(fraction * rate * 1e6) / 1e6;  // survives JSON
      if (CheckIntersectionFeasible(sum, DeriveBox(f), config.options.gpoly)) break;
      if (fraction >= 1.0) {
        throw InfeasibleError("feeder " + f.id,
                              "feeder " + f.id + " cannot serve its EVs");
      }
    }
    out.limit_fraction[f.id] = fraction;
    s.feeders[f.id] = std::move(f);
  }
  return out;
}

bool CaseStudyOutcome::CostNotAboveBaseline() const {
  return optimum.optimum.objective <=
         baseline_cost + 1e-9 * (1.0 + std::abs(baseline_cost));
}

bool CaseStudyOutcome::OracleChecksPassed() const {
  return std::all_of(oracle_reports.begin(), oracle_reports.end(),
                     [](const CrossCheckReport& r) {
                       return r.Passed() || r.cases == 0;
                     });
}

bool CaseStudyOutcome::Passed() const {
  // A baseline outside the boxes is not a feasible competitor, so it can be
  // cheaper than the optimum without anything being wrong.
  const bool cost_ok = CostNotAboveBaseline() || !baseline_within_boxes;
  return split.report.Passed() && cost_ok && OracleChecksPassed();
}

CaseStudyOutcome RunCaseStudy(const CaseStudyConfig& config) {
  CaseStudyOutcome out;
  out.setup = BuildCaseStudy(config);
  const Scenario& s = out.setup.scenario;
  spdlog::info("case study: {} feeders, {} EVs, T={}", s.feeders.size(),
               s.evs.size(), s.horizon.periods);

  out.optimum = OptimizeScenario(s, config.options.gpoly, true);
  spdlog::info("optimized in {:.3f} s, objective {:.6g}", out.optimum.seconds,
               out.optimum.optimum.objective);
  out.split = DisaggregateScenario(s, out.optimum.optimum.profile,
                                   config.options, out.optimum.optimum.split);
  spdlog::info("disaggregated in {:.3f} s, residual {:.3e}", out.split.seconds,
               out.split.report.residual_norm);

  out.baseline = ChargeAtArrival(s);
  ChargingProfile naive = ChargingProfile::Zero(s.horizon.periods);
  for (const auto& [id, u] : out.baseline) naive += u;
  out.baseline_cost = ProfileCost(naive, s.prices, s.horizon.delta);
  out.baseline_within_boxes = true;
  for (const auto& [id, f] : s.feeders) {
    ChargingProfile load = ChargingProfile::Zero(s.horizon.periods);
    for (const auto& ev : s.EvIdsOf(id)) load += out.baseline.at(ev);
    const PowerBox box = DeriveBox(f);
    for (std::size_t t = 0; t < s.horizon.periods; ++t) {
      if (load[t] > box.upper[t] + 1e-9 || load[t] < box.lower[t] - 1e-9) {
        out.baseline_within_boxes = false;
      }
    }
  }

  if (config.oracle_check) {
    SuiteSize size;
    size.seed = config.seed;
    size.max_periods = std::min<std::size_t>(config.periods, 8);
    size.max_evs = std::max<std::size_t>(1, std::min<std::size_t>(
                                                config.evs_per_feeder, 4));
    size.instances = 10;
    out.oracle_reports.push_back(CheckDeviceFunctions(size));
    out.oracle_reports.push_back(CheckMinkowskiMembership(size, 50));
    out.oracle_reports.push_back(CheckIntersection(size, 50));
    out.oracle_reports.push_back(CheckGreedy(size));
    size.max_periods = std::min<std::size_t>(config.periods, 12);
    out.oracle_reports.push_back(CheckSfm(size));
    out.oracle_reports.push_back(CheckEndToEnd(size));
    out.oracle_reports.push_back(CheckScenarioRun(s, out.optimum, out.split));
  }
  return out;
}

void WriteCaseStudy(const CaseStudyOutcome& outcome,
                    const CaseStudyConfig& config,
                    const std::filesystem::path& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError("cannot create " + directory.string() + ": " + ec.message());
  const auto& s = outcome.setup.scenario;

  SaveScenario(s, directory / "scenario.json");
  WriteTextFile(directory / "optimize.json", OptimizeJson(outcome.optimum));

  std::vector<LabeledProfile> aggregate;
  aggregate.emplace_back("network", outcome.optimum.optimum.profile);
  for (const auto& [id, f] : s.feeders) {
    const PowerBox box = DeriveBox(f);
    aggregate.emplace_back(id, outcome.split.feeder_aggregate.at(id));
    aggregate.emplace_back(id + ":box_lower", ChargingProfile(box.lower));
    aggregate.emplace_back(id + ":box_upper", ChargingProfile(box.upper));
  }
  ChargingProfile naive = ChargingProfile::Zero(s.horizon.periods);
  for (const auto& [id, u] : outcome.baseline) naive += u;
  aggregate.emplace_back("baseline", naive);
  WriteTextFile(directory / "aggregate.csv", FormatLongCsv(aggregate));

  std::vector<LabeledProfile> schedules(outcome.split.result.per_device.begin(),
                                        outcome.split.result.per_device.end());
  WriteTextFile(directory / "schedules.csv", FormatLongCsv(schedules));

  WriteTextFile(directory / "report.json",
                ReportJson(outcome, config).dump(2) + "\n");
  if (config.oracle_check) {
    WriteTextFile(directory / "oracle_check.json",
                  OracleJson(outcome.oracle_reports).dump(2) + "\n");
  }
  const Json timing = {{"optimize_seconds", outcome.optimum.seconds},
                       {"disaggregate_seconds", outcome.split.seconds}};
  WriteTextFile(directory / "timing.json", timing.dump(2) + "\n");
}

}  // namespace evflex
