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

#include "evflex/set_function.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <unordered_map>

#include <fmt/core.h>

#include "evflex/errors.h"

namespace evflex {

std::string_view ToString(Curvature curvature) {
  switch (curvature) {
    case Curvature::kSubmodular:
      return "submodular";
    case Curvature::kSupermodular:
      return "supermodular";
    case Curvature::kModular:
      return "modular";
    case Curvature::kUnknown:
      return "unknown";
  }
  return "unknown";
}

SetFunction::SetFunction(std::size_t horizon, Curvature curvature,
                         Evaluator evaluator)
    : horizon_(horizon),
      curvature_(curvature),
      evaluator_(std::make_shared<const Evaluator>(std::move(evaluator))) {}

SetFunction DeviceLower(const EvSpec& ev, const TimeHorizon& horizon) {
  const std::size_t first = ev.first_index();
  const std::size_t last = ev.last_index();
  const double window = static_cast<double>(ev.window_length());
  const double slot = ev.max_rate * horizon.delta;
  const double need = ev.energy_min;
  return SetFunction(
      horizon.periods, Curvature::kSupermodular,
      [=](const SubsetMask& set) {
        const double k = static_cast<double>(set.CountInRange(first, last));
        return std::max(0.0, need - slot * (window - k));
      });
}

SetFunction DeviceUpper(const EvSpec& ev, const TimeHorizon& horizon) {
  const std::size_t first = ev.first_index();
  const std::size_t last = ev.last_index();
  const double slot = ev.max_rate * horizon.delta;
  const double cap = ev.energy_max;
  return SetFunction(
      horizon.periods, Curvature::kSubmodular, [=](const SubsetMask& set) {
        const double k = static_cast<double>(set.CountInRange(first, last));
        return std::min(cap, slot * k);
      });
}

SetFunction ModularFromVector(std::vector<double> weights) {
  for (double w : weights) {
    if (!std::isfinite(w)) {
      throw InvalidInputError("modular weights must be finite");
    }
  }
  const std::size_t horizon = weights.size();
  return SetFunction(horizon, Curvature::kModular,
                     [w = std::move(weights)](const SubsetMask& set) {
                       double total = 0.0;
                       for (std::size_t i = 0; i < w.size(); ++i) {
                         if (set.Contains(i)) total += w[i];
                       }
                       return total;
                     });
}

SetFunction ZeroFunction(std::size_t horizon) {
  return SetFunction(horizon, Curvature::kModular,
                     [](const SubsetMask&) { return 0.0; });
}

namespace {

Curvature Combine(Curvature a, Curvature b) {
  if (a == Curvature::kModular) return b;
  if (b == Curvature::kModular) return a;
  return a == b ? a : Curvature::kUnknown;
}

}  // namespace

SetFunction SumFunctions(std::size_t horizon,
                         std::span<const SetFunction> functions) {
  Curvature curvature = Curvature::kModular;
  for (const auto& f : functions) {
    if (f.horizon() != horizon) {
      throw InvalidInputError(fmt::format(
          "set function horizon {} does not match {}", f.horizon(), horizon));
    }
    curvature = Combine(curvature, f.curvature());
  }
  if (functions.empty()) return ZeroFunction(horizon);
  if (functions.size() == 1) return functions.front();
  return SetFunction(
      horizon, curvature,
      [fs = std::vector<SetFunction>(functions.begin(), functions.end())](
          const SubsetMask& set) {
        double total = 0.0;
        for (const auto& f : fs) total += f(set);
        return total;
      });
}

SetFunction Negate(const SetFunction& f) {
  Curvature curvature = f.curvature();
  if (curvature == Curvature::kSubmodular) {
    curvature = Curvature::kSupermodular;
  } else if (curvature == Curvature::kSupermodular) {
    curvature = Curvature::kSubmodular;
  }
  return SetFunction(f.horizon(), curvature,
                     [f](const SubsetMask& set) { return -f(set); });
}

namespace {

struct MemoTable {
  std::mutex mu;
  std::unordered_map<SubsetMask, double, SubsetMaskHash> values;
};

}  // namespace

SetFunction Memoize(const SetFunction& f) {
  auto table = std::make_shared<MemoTable>();
  return SetFunction(f.horizon(), f.curvature(),
                     [f, table](const SubsetMask& set) {
                       {
                         std::lock_guard lock(table->mu);
                         auto it = table->values.find(set);
                         if (it != table->values.end()) return it->second;
                       }
                       // Evaluate outside the lock; concurrent misses on the
                       // same set compute the same value.
                       const double value = f(set);
                       std::lock_guard lock(table->mu);
                       table->values.emplace(set, value);
                       return value;
                     });
}

CurvatureReport CheckCurvature(const SetFunction& f, double tolerance) {
  return CheckCurvature(f, f.curvature(), tolerance);
}

CurvatureReport CheckCurvature(const SetFunction& f, Curvature as,
                               double tolerance) {
  const std::size_t n = f.horizon();
  if (n > kMaxCurvatureCheckHorizon) {
    throw InvalidInputError(fmt::format(
        "exhaustive curvature check limited to T <= {}, got {}",
        kMaxCurvatureCheckHorizon, n));
  }
  if (as == Curvature::kUnknown) {
    throw InvalidInputError("cannot check an unknown curvature");
  }
  if (as == Curvature::kModular) {
    CurvatureReport sub = CheckCurvature(f, Curvature::kSubmodular, tolerance);
    CurvatureReport sup =
        CheckCurvature(f, Curvature::kSupermodular, tolerance);
    CurvatureReport out = sub.worst_slack <= sup.worst_slack ? sub : sup;
    out.passed = sub.passed && sup.passed;
    out.checked = Curvature::kModular;
    out.pairs_checked = sub.pairs_checked + sup.pairs_checked;
    return out;
  }

  const double sign = as == Curvature::kSubmodular ? 1.0 : -1.0;
  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<double> values(count);
  for (std::uint64_t bits = 0; bits < count; ++bits) {
    values[bits] = f(SubsetMask::FromBits(n, bits));
  }

  CurvatureReport report;
  report.checked = as;
  report.worst_slack = std::numeric_limits<double>::infinity();
  std::uint64_t worst_a = 0;
  std::uint64_t worst_b = 0;
  for (std::uint64_t base = 0; base < count; ++base) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t bi = std::uint64_t{1} << i;
      if (base & bi) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        const std::uint64_t bj = std::uint64_t{1} << j;
        if (base & bj) continue;
        const double slack = sign * (values[base | bi] + values[base | bj] -
                                     values[base | bi | bj] - values[base]);
        ++report.pairs_checked;
        if (slack < report.worst_slack) {
          report.worst_slack = slack;
          worst_a = base | bi;
          worst_b = base | bj;
        }
      }
    }
  }
  if (report.pairs_checked == 0) report.worst_slack = 0.0;
  report.worst_a = SubsetMask::FromBits(n, worst_a);
  report.worst_b = SubsetMask::FromBits(n, worst_b);
  report.passed = report.worst_slack >= -tolerance;
  return report;
}

}  // namespace evflex
