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

#include "evflex/cli.h"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <ostream>

#include <fmt/core.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "evflex/casestudy.h"
#include "evflex/errors.h"
#include "evflex/pipeline.h"
#include "evflex/scenario_io.h"
#include "json.hpp"

namespace evflex {
namespace {

namespace fs = std::filesystem;

struct GlobalFlags {
  double tolerance = 1e-8;
  std::size_t exhaustive_threshold = 16;
  bool parallel = false;

  DecomposeOptions Decompose() const {
    DecomposeOptions o;
    o.tolerance = tolerance;
    o.gpoly = Gpoly();
    return o;
  }
  GPolyOptions Gpoly() const {
    GPolyOptions o;
    o.sfm.exhaustive_threshold = exhaustive_threshold;
    o.parallel = parallel;
    return o;
  }
};

fs::path Sibling(const fs::path& path, const std::string& suffix) {
  fs::path out = path;
  out.replace_extension(suffix);
  return out;
}

void WriteTiming(const fs::path& path, double seconds) {
  const nlohmann::ordered_json doc = {{"seconds", seconds}};
  WriteTextFile(path, doc.dump(2) + "\n");
}

// Prints violations; returns true when the scenario is clean.
bool ReportViolations(const Scenario& scenario, std::ostream& out) {
  const auto violations = ValidateScenario(scenario);
  for (const auto& v : violations) out << v.entity << ": " << v.rule << "\n";
  return violations.empty();
}

int Validate(const std::string& path, std::ostream& out) {
  const Scenario scenario = LoadScenario(path);
  if (!ReportViolations(scenario, out)) return kExitFailedChecks;
  out << fmt::format("ok: {} periods, {} feeders, {} EVs\n",
                     scenario.horizon.periods, scenario.feeders.size(),
                     scenario.evs.size());
  return kExitOk;
}

int Optimize(const GlobalFlags& flags, const std::string& scenario_path,
             const fs::path& out_path, bool per_feeder, std::ostream& out) {
  const Scenario scenario = LoadScenario(scenario_path);
  if (!ReportViolations(scenario, out)) return kExitFailedChecks;
  const OptimizeOutcome outcome =
      OptimizeScenario(scenario, flags.Gpoly(), per_feeder);

  std::vector<LabeledProfile> series;
  series.emplace_back("network", outcome.optimum.profile);
  for (const auto& [id, u] : outcome.per_feeder) series.emplace_back(id, u);
  WriteTextFile(out_path, OptimizeJson(outcome));
  WriteTextFile(Sibling(out_path, ".csv"), FormatLongCsv(series));
  WriteTiming(Sibling(out_path, ".timing.json"), outcome.seconds);
  out << fmt::format("objective {}\n", FormatNumber(outcome.optimum.objective));
  return kExitOk;
}

int Disaggregate(const GlobalFlags& flags, const std::string& scenario_path,
                 const std::string& aggregate_path, const fs::path& out_path,
                 std::ostream& out) {
  const Scenario scenario = LoadScenario(scenario_path);
  if (!ReportViolations(scenario, out)) return kExitFailedChecks;
  const AggregateInput input =
      ParseAggregate(ReadTextFile(aggregate_path), scenario.horizon.periods);
  const DisaggregateOutcome outcome = DisaggregateScenario(
      scenario, input.profile, flags.Decompose(), input.split);

  std::vector<LabeledProfile> schedules(outcome.result.per_device.begin(),
                                        outcome.result.per_device.end());
  WriteTextFile(out_path, FormatLongCsv(schedules));
  WriteTextFile(Sibling(out_path, ".report.json"), FeasibilityJson(outcome));
  WriteTiming(Sibling(out_path, ".timing.json"), outcome.seconds);
  const auto& r = outcome.report;
  out << fmt::format("{} schedules, residual {}, device violation {}\n",
                     schedules.size(), FormatNumber(r.residual_norm),
                     FormatNumber(r.max_device_violation));
  for (const auto& id : r.infeasible_devices) out << "infeasible device " << id << "\n";
  for (const auto& [id, v] : r.box_violation) {
    if (v > r.box_limit) out << "feeder " << id << " outside its box by " << v << " kW\n";
  }
  return r.Passed() ? kExitOk : kExitFailedChecks;
}

int CaseStudy(const GlobalFlags& flags, CaseStudyConfig config,
              const fs::path& out_dir, std::ostream& out) {
  config.options = flags.Decompose();
  const CaseStudyOutcome outcome = RunCaseStudy(config);
  WriteCaseStudy(outcome, config, out_dir);
  out << fmt::format("objective {} baseline {}\n",
                     FormatNumber(outcome.optimum.optimum.objective),
                     FormatNumber(outcome.baseline_cost));
  for (const auto& r : outcome.oracle_reports) {
    out << fmt::format("{} {}: {} cases, {} failures\n",
                       r.Passed() ? "PASS" : "FAIL", r.name, r.cases, r.failures);
  }
  out << (outcome.Passed() ? "passed\n" : "FAILED\n");
  return outcome.Passed() ? kExitOk : kExitFailedChecks;
}

}  // namespace

void ConfigureLogging() {
  if (!spdlog::get("evflex")) {
    spdlog::set_default_logger(spdlog::stderr_color_mt("evflex"));
  }
  const char* env = std::getenv("EVFLEX_LOG_LEVEL");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  GlobalFlags flags;
  CLI::App app{"Network-constrained EV flexibility aggregation", "evflex"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.add_option("--tol", flags.tolerance,
                 "Relative disaggregation tolerance")
      ->check(CLI::PositiveNumber);
  app.add_option("--exhaustive-threshold", flags.exhaustive_threshold,
                 "Largest horizon minimized by enumeration");
  app.add_flag("--parallel", flags.parallel,
               "Evaluate greedy chain sets on separate threads");

  std::string scenario_path, aggregate_path;
  fs::path out_path;
  bool per_feeder = false;

  auto* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->fallthrough();
  validate->add_option("scenario", scenario_path)->required();

  auto* optimize = app.add_subcommand("optimize", "Price-optimal aggregate profile");
  optimize->fallthrough();
  optimize->add_option("scenario", scenario_path)->required();
  optimize->add_option("-o,--out", out_path, "Output JSON; CSV written alongside")
      ->required();
  optimize->add_flag("--per-feeder", per_feeder, "Include root feeder profiles");

  auto* disaggregate =
      app.add_subcommand("disaggregate", "Split an aggregate into EV schedules");
  disaggregate->fallthrough();
  disaggregate->add_option("scenario", scenario_path)->required();
  disaggregate->add_option("aggregate", aggregate_path,
                           "Optimize output JSON or a JSON array of kW")
      ->required();
  disaggregate->add_option("-o,--out", out_path, "Schedules CSV")->required();

  CaseStudyConfig config;
  fs::path out_dir = "casestudy_out";
  auto* casestudy = app.add_subcommand("casestudy", "Sampled two-feeder study");
  casestudy->fallthrough();
  casestudy->add_option("--seed", config.seed);
  casestudy->add_option("--out-dir", out_dir);
  casestudy->add_option("--feeders", config.feeders)->check(CLI::PositiveNumber);
  casestudy->add_option("--evs", config.evs_per_feeder, "EVs per feeder");
  casestudy->add_option("--horizon", config.periods, "Settlement periods")
      ->check(CLI::PositiveNumber);
  casestudy->add_flag("--oracle-check", config.oracle_check,
                      "Also run the LP cross-check suites");

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitIo;
  }

  try {
    if (*validate) return Validate(scenario_path, out);
    if (*optimize) return Optimize(flags, scenario_path, out_path, per_feeder, out);
    if (*disaggregate) {
      return Disaggregate(flags, scenario_path, aggregate_path, out_path, out);
    }
    return CaseStudy(flags, config, out_dir, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const InfeasibleError& e) {
    err << "infeasible at " << e.node() << ": " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const MembershipError& e) {
    err << "not a member: " << e.what() << "\n";
    return kExitMembership;
  } catch (const ConvergenceError& e) {
    err << "no convergence: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailedChecks;
  }
}

}  // namespace evflex
