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

#include "evflex/crosscheck.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <random>
#include <set>

#include <fmt/core.h>

#include "evflex/errors.h"
#include "evflex/network.h"
#include "evflex/oracle.h"
#include "evflex/sfm.h"

namespace evflex {
namespace {

using Rng = std::mt19937_64;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t UniformIndex(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double Uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

TimeHorizon RandomHorizon(Rng& rng, std::size_t min_periods,
                          std::size_t max_periods) {
  TimeHorizon h;
  h.periods = UniformIndex(rng, min_periods, std::max(min_periods, max_periods));
  h.delta = Uniform(rng, 0.0, 1.0) < 0.25 ? 0.5 : 1.0;
  return h;
}

std::vector<EvSpec> RandomPopulation(Rng& rng, const TimeHorizon& h,
                                     std::size_t max_evs,
                                     const std::string& prefix = "ev") {
  const std::size_t n = UniformIndex(rng, 1, std::max<std::size_t>(1, max_evs));
  std::vector<EvSpec> pop;
  for (std::size_t i = 0; i < n; ++i) {
    pop.push_back(RandomEv(rng(), h, fmt::format("{}{:02d}", prefix, i + 1)));
  }
  return pop;
}

GPolymatroid SumOf(std::span<const EvSpec> pop, const TimeHorizon& h) {
  std::vector<GPolymatroid> parts;
  for (const auto& ev : pop) parts.push_back(FromDevice(ev, h));
  return MinkowskiSum(h, parts);
}

OrderedSplit RandomSplit(Rng& rng, std::size_t periods) {
  OrderedSplit s;
  s.order.resize(periods);
  std::iota(s.order.begin(), s.order.end(), 0);
  std::shuffle(s.order.begin(), s.order.end(), rng);
  s.split = UniformIndex(rng, 0, periods);
  return s;
}

ChargingProfile RandomMember(const GPolymatroid& g, Rng& rng,
                             std::size_t vertices) {
  std::vector<double> w(vertices);
  for (double& x : w) x = Uniform(rng, 0.05, 1.0);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  ChargingProfile u = ChargingProfile::Zero(g.periods());
  for (double x : w) {
    u.AddScaled(x / total, VertexByOrder(g, RandomSplit(rng, g.periods())));
  }
  return u;
}

double RateSum(std::span<const EvSpec> pop) {
  double s = 0.0;
  for (const auto& ev : pop) s += ev.max_rate;
  return s;
}

// Candidate profiles around a set: vertices, mixtures, perturbations and
// uniform points, in rotation.
ChargingProfile Probe(const GPolymatroid& g, Rng& rng, std::size_t kind,
                      double scale) {
  const std::size_t t = g.periods();
  switch (kind % 5) {
    case 0:
      return VertexByOrder(g, RandomSplit(rng, t));
    case 1:
      return RandomMember(g, rng, 3);
    case 2: {
      ChargingProfile u = RandomMember(g, rng, 2);
      const double step = Uniform(rng, 0.01, 1.0);
      u[UniformIndex(rng, 0, t - 1)] += Uniform(rng, 0.0, 1.0) < 0.5 ? -step : step;
      return u;
    }
    case 3: {
      ChargingProfile u = RandomMember(g, rng, 2);
      std::normal_distribution<double> noise(0.0, 0.3);
      for (std::size_t i = 0; i < t; ++i) u[i] += noise(rng);
      return u;
    }
    default: {
      ChargingProfile u = ChargingProfile::Zero(t);
      for (std::size_t i = 0; i < t; ++i) u[i] = Uniform(rng, -0.2, scale + 0.2);
      return u;
    }
  }
}

oracle::BoxLimits Limits(const PowerBox& box) {
  return oracle::BoxLimits{box.lower, box.upper};
}

void Record(CrossCheckReport& report, double error, const std::string& what) {
  ++report.cases;
  report.worst_error = std::max(report.worst_error, error);
  if (!(error <= report.tolerance)) {
    if (report.failures == 0) report.first_failure = what;
    ++report.failures;
  }
}

void RecordAgreement(CrossCheckReport& report, bool ours, bool theirs,
                     const std::string& what) {
  ++report.cases;
  if (theirs) ++report.members;
  if (ours != theirs) {
    if (report.failures == 0) {
      report.first_failure =
          fmt::format("{}: implementation {} oracle {}", what, ours, theirs);
    }
    ++report.failures;
  }
}

std::string Describe(const ChargingProfile& u) {
  std::string out = "(";
  for (std::size_t t = 0; t < u.size(); ++t) {
    out += fmt::format("{}{:.6g}", t ? "," : "", u[t]);
  }
  return out + ")";
}

// Wraps p and b so that every call is counted.
struct CallCounter {
  std::mutex mu;
  std::set<std::pair<int, SubsetMask>> distinct;
  std::size_t calls = 0;
};

GPolymatroid Counted(const GPolymatroid& g,
                     const std::shared_ptr<CallCounter>& counter) {
  auto wrap = [&](const SetFunction& f, int side) {
    return SetFunction(f.horizon(), f.curvature(),
                       [f, side, counter](const SubsetMask& s) {
                         {
                           std::lock_guard lock(counter->mu);
                           ++counter->calls;
                           counter->distinct.emplace(side, s);
                         }
                         return f(s);
                       });
  };
  return GPolymatroid(g.horizon(), wrap(g.lower(), 0), wrap(g.upper(), 1),
                      g.kind(), g.box_depth());
}

}  // namespace

EvSpec RandomEv(std::uint64_t seed, const TimeHorizon& horizon, std::string id) {
  if (horizon.periods < 2) {
    throw InvalidInputError("random EVs need at least two periods");
  }
  Rng rng(seed);
  static constexpr double kRates[] = {1.0, 2.0, 3.6, 7.2, 11.0};
  EvSpec ev;
  ev.id = std::move(id);
  ev.feeder_id = "F1";
  ev.arrival = UniformIndex(rng, 1, horizon.periods - 1);
  ev.departure = UniformIndex(rng, ev.arrival + 1, horizon.periods);
  ev.max_rate = kRates[UniformIndex(rng, 0, 4)];
  const double cap = ev.MaxDeliverable(horizon.delta);
  const double r = Uniform(rng, 0.0, 1.0);
  ev.energy_min = r < 0.1 ? 0.0 : Uniform(rng, 0.0, 1.0) * cap;
  const double s = Uniform(rng, 0.0, 1.0);
  if (s < 0.15) {
    ev.energy_max = ev.energy_min;
  } else if (s < 0.25) {
    ev.energy_max = cap;
  } else {
    ev.energy_max = ev.energy_min + Uniform(rng, 0.0, 1.0) * (cap - ev.energy_min);
  }
  return ev;
}

PowerBox RandomBoxAround(const GPolymatroid& g, std::uint64_t seed,
                         double spread) {
  Rng rng(seed);
  const ChargingProfile center = RandomMember(g, rng, 3);
  PowerBox box;
  for (std::size_t t = 0; t < g.periods(); ++t) {
    const double lo = Uniform(rng, 0.0, 1.0) < 0.3
                          ? 0.0
                          : center[t] - Uniform(rng, 0.0, spread);
    const double hi = Uniform(rng, 0.0, 1.0) < 0.15
                          ? center[t]
                          : center[t] + Uniform(rng, 0.0, spread);
    box.lower.push_back(std::max(0.0, std::min(lo, center[t])));
    box.upper.push_back(hi);
  }
  return box;
}

CrossCheckReport CheckDeviceFunctions(const SuiteSize& size, double tolerance) {
  CrossCheckReport report{"device set functions vs LP", 0, 0, 0, 0.0, tolerance, {}};
  Rng rng(size.seed);
  for (std::size_t i = 0; i < size.instances; ++i) {
    const TimeHorizon h = RandomHorizon(rng, 2, size.max_periods);
    const EvSpec ev = RandomEv(rng(), h);
    const std::vector<EvSpec> pop = {ev};
    const auto p = DeviceLower(ev, h);
    const auto b = DeviceUpper(ev, h);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << h.periods); ++bits) {
      const auto a = SubsetMask::FromBits(h.periods, bits);
      const auto idx = a.Indices();
      const auto lo = oracle::SetFunctionByLp(pop, h, idx, oracle::Side::kLower);
      const auto hi = oracle::SetFunctionByLp(pop, h, idx, oracle::Side::kUpper);
      const std::string what = fmt::format("instance {} A={}", i, a.ToString());
      Record(report, lo ? std::abs(p(a) - *lo) : kInf, "p " + what);
      Record(report, hi ? std::abs(b(a) - *hi) : kInf, "b " + what);
    }
  }
  return report;
}

CrossCheckReport CheckMinkowskiMembership(const SuiteSize& size,
                                          std::size_t profiles) {
  CrossCheckReport report{"Minkowski sum membership vs LP", 0, 0, 0, 0.0, 0.0, {}};
  Rng rng(size.seed);
  for (std::size_t i = 0; i < size.instances; ++i) {
    const TimeHorizon h = RandomHorizon(rng, 2, size.max_periods);
    const auto pop = RandomPopulation(rng, h, size.max_evs);
    const GPolymatroid g = SumOf(pop, h);
    for (std::size_t k = 0; k < profiles; ++k) {
      const ChargingProfile u = Probe(g, rng, k, RateSum(pop));
      RecordAgreement(report, Contains(g, u),
                      oracle::MembershipByLp(pop, h, u),
                      fmt::format("population {} u={}", i, Describe(u)));
    }
  }
  return report;
}

CrossCheckReport CheckIntersection(const SuiteSize& size, std::size_t profiles,
                                   double tolerance) {
  CrossCheckReport report{"box intersection vs LP", 0, 0, 0, 0.0, tolerance, {}};
  Rng rng(size.seed);
  for (std::size_t i = 0; i < size.instances; ++i) {
    const TimeHorizon h = RandomHorizon(rng, 2, size.max_periods);
    const auto pop = RandomPopulation(rng, h, size.max_evs);
    const GPolymatroid g = SumOf(pop, h);
    const PowerBox box = RandomBoxAround(g, rng(), 0.5 * RateSum(pop));
    const auto limits = Limits(box);
    const GPolymatroid c = IntersectBox(g, box);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << h.periods); ++bits) {
      const auto a = SubsetMask::FromBits(h.periods, bits);
      const auto idx = a.Indices();
      const auto lo =
          oracle::SetFunctionByLp(pop, h, idx, oracle::Side::kLower, limits);
      const auto hi =
          oracle::SetFunctionByLp(pop, h, idx, oracle::Side::kUpper, limits);
      const std::string what = fmt::format("pair {} A={}", i, a.ToString());
      Record(report, lo ? std::abs(c.lower()(a) - *lo) : kInf, "p' " + what);
      Record(report, hi ? std::abs(c.upper()(a) - *hi) : kInf, "b' " + what);
    }
    for (std::size_t k = 0; k < profiles; ++k) {
      // Alternate between probes of the intersection and of the outer set.
      const ChargingProfile u =
          Probe(k % 2 ? g : c, rng, k / 2, RateSum(pop));
      RecordAgreement(report, Contains(c, u),
                      oracle::MembershipByLp(pop, h, u, limits),
                      fmt::format("pair {} u={}", i, Describe(u)));
    }
  }
  return report;
}

CrossCheckReport CheckGreedy(const SuiteSize& size, double tolerance) {
  CrossCheckReport report{"greedy optimum vs LP", 0, 0, 0, 0.0, tolerance, {}};
  Rng rng(size.seed);
  for (std::size_t i = 0; i < size.instances; ++i) {
    const TimeHorizon h = RandomHorizon(rng, 2, size.max_periods);
    const auto pop = RandomPopulation(rng, h, size.max_evs);
    const GPolymatroid g = SumOf(pop, h);
    std::vector<double> cost(h.periods);
    for (double& c : cost) {
      c = Uniform(rng, -1.0, 1.0);
      // Coarse values produce ties and exact zeros.
      if (i % 3 == 0) c = std::round(c * 2.0) / 2.0;
    }
    const PowerBox box = RandomBoxAround(g, rng(), 0.5 * RateSum(pop));
    const GPolymatroid constrained = IntersectBox(g, box);
    for (int boxed = 0; boxed < 2; ++boxed) {
      auto counter = std::make_shared<CallCounter>();
      const GPolymatroid target = Counted(boxed ? constrained : g, counter);
      const LinearOptimum greedy = OptimizeLinear(target, cost);
      const auto lp = oracle::MinimizeCostByLp(
          pop, h, cost,
          boxed ? std::optional<oracle::BoxLimits>(Limits(box)) : std::nullopt);
      const std::string what =
          fmt::format("instance {} {}", i, boxed ? "boxed" : "unconstrained");
      const double error = lp.status == oracle::LpStatus::kOptimal
                               ? std::abs(greedy.objective - lp.value)
                               : kInf;
      Record(report, error, what);
      if (counter->calls > h.periods + 1 || counter->distinct.size() > h.periods + 1) {
        if (report.failures == 0) {
          report.first_failure =
              fmt::format("{}: {} evaluations", what, counter->calls);
        }
        ++report.failures;
      }
    }
  }
  return report;
}

CrossCheckReport CheckSfm(const SuiteSize& size, double tolerance) {
  CrossCheckReport report{"min-norm SFM vs exhaustive", 0, 0, 0, 0.0, tolerance, {}};
  Rng rng(size.seed);
  for (std::size_t i = 0; i < size.instances; ++i) {
    const TimeHorizon h = RandomHorizon(rng, 2, size.max_periods);
    const auto pop = RandomPopulation(rng, h, size.max_evs);
    std::vector<SetFunction> parts;
    std::vector<double> w(h.periods);
    const double scale = RateSum(pop) * h.delta;
    for (double& x : w) x = Uniform(rng, 0.0, scale);
    if (i % 2 == 0) {
      // b - w: the upper membership functional.
      for (const auto& ev : pop) parts.push_back(DeviceUpper(ev, h));
      for (double& x : w) x = -x;
    } else {
      // w - p: the lower membership functional.
      for (const auto& ev : pop) parts.push_back(Negate(DeviceLower(ev, h)));
    }
    parts.push_back(ModularFromVector(w));
    const SetFunction f = SumFunctions(h.periods, parts);
    const auto exact = MinimizeExhaustive(f);
    const auto mnp = MinimizeMinNorm(f);
    Record(report, std::abs(mnp.value - exact.value),
           fmt::format("instance {} T={}", i, h.periods));
  }
  return report;
}

namespace {

struct RandomScenario {
  Scenario scenario;
  bool nested = false;
};

RandomScenario DrawScenario(Rng& rng, const SuiteSize& size) {
  RandomScenario out;
  Scenario& s = out.scenario;
  s.horizon = RandomHorizon(rng, 3, size.max_periods);
  const std::size_t t = s.horizon.periods;
  for (std::size_t i = 0; i < t; ++i) s.prices.push_back(Uniform(rng, -0.1, 0.5));
  const std::size_t n = UniformIndex(rng, 1, std::max<std::size_t>(1, size.max_evs));
  const std::size_t feeders = UniformIndex(rng, 1, std::min<std::size_t>(3, n));
  for (std::size_t j = 0; j < feeders; ++j) {
    FeederSpec f;
    f.id = fmt::format("F{}", j + 1);
    for (std::size_t i = 0; i < t; ++i) f.nominal_load.push_back(Uniform(rng, 0.0, 2.0));
    f.flow_min = Uniform(rng, 0.0, 1.0) < 0.3 ? Uniform(rng, 0.0, 1.0) : 0.0;
    s.feeders[f.id] = f;
  }
  if (feeders >= 2 && Uniform(rng, 0.0, 1.0) < 0.3) {
    s.feeders["F2"].parent = "F1";
    out.nested = true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::string feeder = fmt::format("F{}", i % feeders + 1);
    EvSpec ev = RandomEv(rng(), s.horizon, fmt::format("{}-ev{:02d}", feeder, i + 1));
    ev.feeder_id = feeder;
    s.evs[ev.id] = ev;
  }
  return out;
}

// Subtree charging capacity of every feeder, in kW.
std::map<std::string, double> SubtreeRates(const Scenario& s) {
  std::map<std::string, double> rate;
  for (const auto& [id, ev] : s.evs) {
    for (std::optional<std::string> f = ev.feeder_id; f;
         f = s.feeders.at(*f).parent) {
      rate[*f] += ev.max_rate;
    }
  }
  return rate;
}

// Tightens flow_max to a fraction of the subtree capacity and relaxes it
// until the network is feasible.
OptimizeOutcome SizeAndOptimize(Scenario& s, const GPolyOptions& options) {
  const auto rates = SubtreeRates(s);
  std::map<std::string, double> fraction;
  for (auto& [id, f] : s.feeders) fraction[id] = 0.4;
  for (int attempt = 0;; ++attempt) {
    for (auto& [id, f] : s.feeders) {
      const double peak =
          *std::max_element(f.nominal_load.begin(), f.nominal_load.end());
      f.flow_max = std::max(f.flow_min, peak + fraction[id] *
                                                  (rates.count(id) ? rates.at(id) : 0.0));
    }
    try {
      return OptimizeScenario(s, options, true);
    } catch (const InfeasibleError& e) {
      if (attempt >= 40) throw;
      const std::string id = e.node().substr(e.node().find(' ') + 1);
      fraction[id] += 0.1;
      if (attempt >= 3) s.feeders[id].flow_min = 0.0;
    }
  }
}

}  // namespace

CrossCheckReport CheckEndToEnd(const SuiteSize& size, double tolerance) {
  CrossCheckReport report{"end-to-end disaggregation", 0, 0, 0, 0.0, tolerance, {}};
  Rng rng(size.seed);
  for (std::size_t i = 0; i < size.instances; ++i) {
    RandomScenario drawn = DrawScenario(rng, size);
    Scenario& s = drawn.scenario;
    const std::string what = fmt::format("run {} (T={}, {} EVs, {} feeders{})",
                                         i, s.horizon.periods, s.evs.size(),
                                         s.feeders.size(),
                                         drawn.nested ? ", nested" : "");
    try {
      const OptimizeOutcome opt = SizeAndOptimize(s, GPolyOptions{});
      const DisaggregateOutcome split = DisaggregateScenario(
          s, opt.optimum.profile, DecomposeOptions{}, opt.optimum.split,
          tolerance);
      const auto& r = split.report;
      const double scale = 1.0 + opt.optimum.profile.Norm();
      Record(report, r.residual_norm / scale, what + ": residual");
      Record(report, r.DevicesFeasible() ? 0.0 : kInf,
             what + ": infeasible device");
      double worst_box = 0.0;
      for (const auto& [id, v] : r.box_violation) worst_box = std::max(worst_box, v);
      Record(report, worst_box / scale, what + ": feeder box");
      Record(report, r.max_vertex_count <= r.vertex_limit ? 0.0 : kInf,
             what + ": vertex count");
      const CrossCheckReport lp = CheckScenarioRun(s, opt, split, tolerance);
      report.cases += lp.cases;
      report.worst_error = std::max(report.worst_error, lp.worst_error);
      if (lp.failures > 0) {
        if (report.failures == 0) report.first_failure = what + ": " + lp.first_failure;
        report.failures += lp.failures;
      }
    } catch (const Error& e) {
      ++report.cases;
      if (report.failures == 0) report.first_failure = what + ": " + e.what();
      ++report.failures;
    }
  }
  return report;
}

CrossCheckReport CheckScenarioRun(const Scenario& scenario,
                                  const OptimizeOutcome& optimum,
                                  const DisaggregateOutcome& split,
                                  double tolerance) {
  CrossCheckReport report{"scenario run vs LP", 0, 0, 0, 0.0, tolerance, {}};
  for (const auto& [id, f] : scenario.feeders) {
    if (f.parent) return report;
  }
  const TimeHorizon& h = scenario.horizon;
  double lp_objective = 0.0;
  std::vector<std::pair<std::string, std::vector<EvSpec>>> groups;
  for (const auto& [id, f] : scenario.feeders) {
    std::vector<EvSpec> evs;
    std::size_t variables = 0;
    for (const auto& ev_id : scenario.EvIdsOf(id)) {
      evs.push_back(scenario.evs.at(ev_id));
      variables += evs.back().window_length();
    }
    if (variables > oracle::kMaxVariables) return report;
    groups.emplace_back(id, std::move(evs));
  }
  for (const auto& [id, evs] : groups) {
    const auto limits = Limits(DeriveBox(scenario.feeders.at(id)));
    const auto lp = oracle::MinimizeCostByLp(evs, h, scenario.prices, limits);
    if (lp.status != oracle::LpStatus::kOptimal) {
      Record(report, kInf, "feeder " + id + ": LP " +
                                   std::string(oracle::ToString(lp.status)));
      continue;
    }
    lp_objective += lp.value;
    const ChargingProfile& u = split.feeder_aggregate.at(id);
    const bool member = oracle::MembershipByLp(evs, h, u, limits,
                                               tolerance * (1.0 + u.Norm()));
    Record(report, member ? 0.0 : kInf, "feeder " + id + ": LP membership");
  }
  const double objective = optimum.optimum.objective;
  Record(report, std::abs(objective - lp_objective) / (1.0 + std::abs(lp_objective)),
         fmt::format("objective {} vs LP {}", objective, lp_objective));
  return report;
}

}  // namespace evflex
