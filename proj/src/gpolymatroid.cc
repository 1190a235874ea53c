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

#include "evflex/gpolymatroid.h"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <thread>

#include <fmt/core.h>
#include <spdlog/spdlog.h>

#include "evflex/errors.h"

namespace evflex {

GPolymatroid::GPolymatroid(TimeHorizon horizon, SetFunction lower,
                           SetFunction upper, GPolymatroidKind kind,
                           std::size_t box_depth)
    : horizon_(horizon),
      lower_(std::move(lower)),
      upper_(std::move(upper)),
      kind_(kind),
      box_depth_(box_depth) {
  if (lower_.horizon() != horizon_.periods ||
      upper_.horizon() != horizon_.periods) {
    throw InvalidInputError("g-polymatroid set functions must share the horizon");
  }
}

bool PowerBox::Contains(const ChargingProfile& u, double tolerance) const {
  return Violation(u) <= tolerance;
}

double PowerBox::Violation(const ChargingProfile& u) const {
  if (u.size() != lower.size() || u.size() != upper.size()) {
    throw InvalidInputError("profile and box lengths differ");
  }
  double worst = 0.0;
  for (std::size_t t = 0; t < u.size(); ++t) {
    worst = std::max({worst, lower[t] - u[t], u[t] - upper[t]});
  }
  return worst;
}

bool IsValidSplit(const OrderedSplit& split, std::size_t periods) {
  if (split.order.size() != periods || split.split > periods) return false;
  std::vector<bool> seen(periods, false);
  for (std::size_t t : split.order) {
    if (t >= periods || seen[t]) return false;
    seen[t] = true;
  }
  return true;
}

GPolymatroid FromDevice(const EvSpec& ev, const TimeHorizon& horizon) {
  return GPolymatroid(horizon, DeviceLower(ev, horizon),
                      DeviceUpper(ev, horizon), GPolymatroidKind::kDevice);
}

GPolymatroid ZeroGPolymatroid(const TimeHorizon& horizon) {
  return GPolymatroid(horizon, ZeroFunction(horizon.periods),
                      ZeroFunction(horizon.periods), GPolymatroidKind::kSum);
}

GPolymatroid MinkowskiSum(const TimeHorizon& horizon,
                          std::span<const GPolymatroid> parts) {
  if (parts.size() == 1) return parts.front();
  std::vector<SetFunction> lowers;
  std::vector<SetFunction> uppers;
  std::size_t depth = 0;
  for (const auto& g : parts) {
    if (g.periods() != horizon.periods) {
      throw InvalidInputError(fmt::format(
          "cannot sum g-polymatroids over {} and {} periods", g.periods(),
          horizon.periods));
    }
    lowers.push_back(g.lower());
    uppers.push_back(g.upper());
    depth = std::max(depth, g.box_depth());
  }
  return GPolymatroid(horizon, SumFunctions(horizon.periods, lowers),
                      SumFunctions(horizon.periods, uppers),
                      GPolymatroidKind::kSum, depth);
}

namespace {

std::vector<double> ToEnergy(const ChargingProfile& u, double delta) {
  std::vector<double> x(u.values());
  for (double& v : x) v *= delta;
  return x;
}

std::vector<double> Scaled(const std::vector<double>& v, double factor) {
  std::vector<double> out(v);
  for (double& e : out) e *= factor;
  return out;
}

// Evaluates f on each set, optionally spread over worker threads.
std::vector<double> EvaluateAll(
    const std::vector<std::pair<const SetFunction*, SubsetMask>>& jobs,
    bool parallel) {
  std::vector<double> values(jobs.size(), 0.0);
  const std::size_t workers =
      parallel ? std::max(1U, std::thread::hardware_concurrency()) : 1;
  if (workers <= 1 || jobs.size() < 2) {
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      values[i] = (*jobs[i].first)(jobs[i].second);
    }
    return values;
  }
  std::vector<std::future<void>> tasks;
  for (std::size_t w = 0; w < workers; ++w) {
    tasks.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < jobs.size(); i += workers) {
        values[i] = (*jobs[i].first)(jobs[i].second);
      }
    }));
  }
  for (auto& task : tasks) task.get();
  return values;
}

// The greedy marginal construction shared by OptimizeLinear and
// VertexByOrder. Returns kW and counts evaluator calls.
ChargingProfile ChainVertex(const GPolymatroid& g, const OrderedSplit& split,
                            const GPolyOptions& options,
                            std::size_t* evaluations) {
  const std::size_t n = g.periods();
  if (!IsValidSplit(split, n)) {
    throw InvalidInputError("ordered split is not a permutation with split <= T");
  }
  const std::size_t j = split.split;
  std::vector<std::pair<const SetFunction*, SubsetMask>> jobs;
  jobs.reserve(n);
  // Upper prefix chain S_1 .. S_j.
  SubsetMask prefix(n);
  for (std::size_t k = 0; k < j; ++k) {
    prefix.Insert(split.order[k]);
    jobs.emplace_back(&g.upper(), prefix);
  }
  // Lower complement chain T \ S_j, ..., T \ S_{T-1}; T \ S_T is empty.
  SubsetMask rest = prefix.Complement();
  for (std::size_t k = j; k < n; ++k) {
    jobs.emplace_back(&g.lower(), rest);
    rest.Erase(split.order[k]);
  }
  const std::vector<double> values = EvaluateAll(jobs, options.parallel);
  if (evaluations != nullptr) *evaluations = jobs.size();

  std::vector<double> kw(n, 0.0);
  const double delta = g.horizon().delta;
  double previous = 0.0;
  for (std::size_t k = 0; k < j; ++k) {
    kw[split.order[k]] = (values[k] - previous) / delta;
    previous = values[k];
  }
  for (std::size_t k = j; k < n; ++k) {
    const double here = values[k];
    const double next = k + 1 < n ? values[k + 1] : 0.0;
    kw[split.order[k]] = (here - next) / delta;
  }
  for (double v : kw) {
    if (!std::isfinite(v)) {
      throw InvalidInputError("set function produced a non-finite marginal");
    }
  }
  return ChargingProfile(std::move(kw));
}

}  // namespace

bool Contains(const GPolymatroid& g, const ChargingProfile& u, double tolerance,
              const GPolyOptions& options) {
  const std::size_t n = g.periods();
  if (u.size() != n) {
    throw InvalidInputError(
        fmt::format("profile has {} periods, set has {}", u.size(), n));
  }
  std::vector<double> x = ToEnergy(u, g.horizon().delta);
  const SetFunction upper_slack[] = {g.upper(), ModularFromVector(Scaled(x, -1.0))};
  if (Minimize(SumFunctions(n, upper_slack), options.sfm).value < -tolerance) {
    return false;
  }
  const SetFunction lower_slack[] = {ModularFromVector(std::move(x)),
                                     Negate(g.lower())};
  return Minimize(SumFunctions(n, lower_slack), options.sfm).value >= -tolerance;
}

LinearOptimum OptimizeLinear(const GPolymatroid& g, std::span<const double> cost,
                             const GPolyOptions& options) {
  const std::size_t n = g.periods();
  if (cost.size() != n) {
    throw InvalidInputError(
        fmt::format("cost vector has {} entries, expected {}", cost.size(), n));
  }
  LinearOptimum out;
  out.split.order.resize(n);
  std::iota(out.split.order.begin(), out.split.order.end(), 0);
  std::stable_sort(out.split.order.begin(), out.split.order.end(),
                   [&](std::size_t a, std::size_t b) { return cost[a] < cost[b]; });
  out.split.split = static_cast<std::size_t>(
      std::count_if(cost.begin(), cost.end(), [](double c) { return c < 0.0; }));
  out.profile = ChainVertex(g, out.split, options, &out.chain_evaluations);
  for (std::size_t t = 0; t < n; ++t) {
    out.objective += cost[t] * out.profile[t] * g.horizon().delta;
  }
  if (options.verify_membership &&
      !Contains(g, out.profile, 1e-7 * (1.0 + out.profile.Norm()), options)) {
    throw InfeasibleError("", "greedy point is not a member: the set "
                              "function pair is empty or non-compliant");
  }
  return out;
}

ChargingProfile VertexByOrder(const GPolymatroid& g, const OrderedSplit& split,
                              const GPolyOptions& options) {
  return ChainVertex(g, split, options, nullptr);
}

namespace {

void CheckBoxShape(const PowerBox& box, std::size_t n) {
  if (box.lower.size() != n || box.upper.size() != n) {
    throw InvalidInputError(fmt::format(
        "box has lengths {}/{}, expected {}", box.lower.size(),
        box.upper.size(), n));
  }
}

}  // namespace

bool CheckIntersectionFeasible(const GPolymatroid& g, const PowerBox& box,
                               const GPolyOptions& options, double tolerance) {
  const std::size_t n = g.periods();
  CheckBoxShape(box, n);
  for (std::size_t t = 0; t < n; ++t) {
    if (box.lower[t] > box.upper[t] + tolerance) return false;
  }
  const double delta = g.horizon().delta;
  const SetFunction above_lower[] = {
      g.upper(), ModularFromVector(Scaled(box.lower, -delta))};
  if (Minimize(SumFunctions(n, above_lower), options.sfm).value < -tolerance) {
    return false;
  }
  const SetFunction below_upper[] = {ModularFromVector(Scaled(box.upper, delta)),
                                     Negate(g.lower())};
  return Minimize(SumFunctions(n, below_upper), options.sfm).value >= -tolerance;
}

GPolymatroid IntersectBox(const GPolymatroid& g, const PowerBox& box,
                          const GPolyOptions& options, const std::string& name) {
  const std::size_t n = g.periods();
  CheckBoxShape(box, n);
  if (!CheckIntersectionFeasible(g, box, options)) {
    throw InfeasibleError(
        name, fmt::format("flexibility set does not meet the limits of {}", name));
  }
  const std::size_t depth = g.box_depth() + 1;
  if (depth > 2) {
    spdlog::warn(
        "{}: {} nested box intersections; each evaluation runs {} levels of "
        "SFM over {} periods",
        name, depth, depth, n);
  }
  const double delta = g.horizon().delta;
  auto lo = std::make_shared<const std::vector<double>>(Scaled(box.lower, delta));
  auto hi = std::make_shared<const std::vector<double>>(Scaled(box.upper, delta));
  const SfmOptions sfm = options.sfm;

  // For fixed A, X -> f(X) - w(X \ A) + v(A \ X) equals
  // f(X) + sum_{t in X} c_A(t) + v(A) with c_A(t) = -v(t) on A, -w(t) off A.
  auto inner = [n](const SetFunction& f, const std::vector<double>& off_a,
                   const std::vector<double>& on_a, const SubsetMask& a) {
    std::vector<double> weight(n);
    double constant = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      if (a.Contains(t)) {
        weight[t] = -on_a[t];
        constant += on_a[t];
      } else {
        weight[t] = -off_a[t];
      }
    }
    return SetFunction(
        n, f.curvature(),
        [f, weight = std::move(weight), constant](const SubsetMask& x) {
          double total = f(x) + constant;
          for (std::size_t t = 0; t < weight.size(); ++t) {
            if (x.Contains(t)) total += weight[t];
          }
          return total;
        });
  };

  const SetFunction p = g.lower();
  const SetFunction b = g.upper();
  SetFunction lower(n, Curvature::kSupermodular,
                    [=](const SubsetMask& a) {
                      if (a.Empty()) return 0.0;
                      return MaximizeSupermodular(inner(p, *hi, *lo, a), sfm)
                          .value;
                    });
  SetFunction upper(n, Curvature::kSubmodular,
                    [=](const SubsetMask& a) {
                      if (a.Empty()) return 0.0;
                      return Minimize(inner(b, *lo, *hi, a), sfm).value;
                    });
  return GPolymatroid(g.horizon(), Memoize(lower), Memoize(upper),
                      GPolymatroidKind::kBoxIntersected, depth);
}

PowerBox DeriveBox(const FeederSpec& feeder) {
  PowerBox box;
  box.lower.reserve(feeder.nominal_load.size());
  box.upper.reserve(feeder.nominal_load.size());
  for (double u0 : feeder.nominal_load) {
    box.lower.push_back(std::max(0.0, feeder.flow_min - u0));
    box.upper.push_back(feeder.flow_max - u0);
  }
  if (HasNegativeUpper(box)) {
    spdlog::warn("feeder {}: nominal load already exceeds flow_max in some "
                 "period (negative flexible headroom)",
                 feeder.id);
  }
  return box;
}

bool HasNegativeUpper(const PowerBox& box) {
  return std::any_of(box.upper.begin(), box.upper.end(),
                     [](double v) { return v < 0.0; });
}

bool CheckCompliance(const GPolymatroid& g, double tolerance) {
  const std::size_t n = g.periods();
  if (n > 10) {
    throw InvalidInputError("compliance check limited to T <= 10");
  }
  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<double> p(count);
  std::vector<double> b(count);
  for (std::uint64_t s = 0; s < count; ++s) {
    const SubsetMask mask = SubsetMask::FromBits(n, s);
    p[s] = g.lower()(mask);
    b[s] = g.upper()(mask);
  }
  for (std::uint64_t x = 0; x < count; ++x) {
    for (std::uint64_t y = 0; y < count; ++y) {
      if (b[x] - p[y] < b[x & ~y] - p[y & ~x] - tolerance) return false;
    }
  }
  return true;
}

}  // namespace evflex
