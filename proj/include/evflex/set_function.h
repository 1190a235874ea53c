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

#ifndef EVFLEX_SET_FUNCTION_H_
#define EVFLEX_SET_FUNCTION_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "evflex/model.h"
#include "evflex/subset_mask.h"

namespace evflex {

enum class Curvature { kSubmodular, kSupermodular, kModular, kUnknown };

std::string_view ToString(Curvature curvature);

// A real-valued function on subsets of the horizon (values in kWh), tagged
// with the curvature it is known to have. Immutable; copies share the
// evaluator, so evaluation is safe from several threads as long as the
// evaluator itself is.
class SetFunction {
 public:
  using Evaluator = std::function<double(const SubsetMask&)>;

  SetFunction(std::size_t horizon, Curvature curvature, Evaluator evaluator);

  double operator()(const SubsetMask& set) const { return (*evaluator_)(set); }
  std::size_t horizon() const { return horizon_; }
  Curvature curvature() const { return curvature_; }

 private:
  std::size_t horizon_;
  Curvature curvature_;
  std::shared_ptr<const Evaluator> evaluator_;
};

// p_i(A) = max(0, e_min - m * delta * (|C| - |A n C|)). Supermodular.
SetFunction DeviceLower(const EvSpec& ev, const TimeHorizon& horizon);
// b_i(A) = min(e_max, m * delta * |A n C|). Submodular.
SetFunction DeviceUpper(const EvSpec& ev, const TimeHorizon& horizon);

// A -> sum of weights over A.
SetFunction ModularFromVector(std::vector<double> weights);

SetFunction ZeroFunction(std::size_t horizon);

// Pointwise sum. The curvature tag is kept when all summands agree (modular
// summands are compatible with either side) and is kUnknown otherwise.
SetFunction SumFunctions(std::size_t horizon,
                         std::span<const SetFunction> functions);

// -f, with submodular and supermodular tags exchanged.
SetFunction Negate(const SetFunction& f);

// Wraps f with a thread-safe cache keyed by the evaluated set.
SetFunction Memoize(const SetFunction& f);

struct CurvatureReport {
  bool passed = true;
  Curvature checked = Curvature::kUnknown;
  // Pair (A, B) with the smallest slack. For submodularity the slack is
  // f(A) + f(B) - f(A u B) - f(A n B); the sign flips for supermodularity.
  SubsetMask worst_a;
  SubsetMask worst_b;
  double worst_slack = 0.0;
  std::size_t pairs_checked = 0;
};

inline constexpr std::size_t kMaxCurvatureCheckHorizon = 16;

// Exhaustive check of the declared curvature (or `as`, when given). Uses the
// pairs (S+i, S+j), which is equivalent to checking all pairs. Modular
// functions are checked in both directions.
CurvatureReport CheckCurvature(const SetFunction& f, double tolerance = 1e-9);
CurvatureReport CheckCurvature(const SetFunction& f, Curvature as,
                               double tolerance = 1e-9);

}  // namespace evflex

#endif  // EVFLEX_SET_FUNCTION_H_
