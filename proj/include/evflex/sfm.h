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

#ifndef EVFLEX_SFM_H_
#define EVFLEX_SFM_H_

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "evflex/set_function.h"
#include "evflex/subset_mask.h"

namespace evflex {

enum class SfmMethod { kExhaustive, kMinNormPoint };

std::string_view ToString(SfmMethod method);

struct SfmResult {
  SubsetMask minimizer;
  double value = 0.0;
  // Point of the base polytope proving the bound (min-norm point only).
  std::optional<std::vector<double>> certificate;
  SfmMethod method = SfmMethod::kExhaustive;
  std::size_t iterations = 0;
};

inline constexpr std::size_t kMaxExhaustiveHorizon = 30;

struct SfmOptions {
  // Horizons up to this size are enumerated; larger ones use min-norm point.
  std::size_t exhaustive_threshold = 16;
  // Relative optimality gap accepted from the min-norm point method.
  double tolerance = 1e-10;
  // Major cycles; 0 means 10 * T^2.
  std::size_t max_iterations = 0;

  friend bool operator==(const SfmOptions&, const SfmOptions&) = default;
};

// Enumerates all 2^T subsets. Ties go to the smallest packed mask, so the
// empty set wins whenever it is optimal.
SfmResult MinimizeExhaustive(const SetFunction& f,
                             const SfmOptions& options = {});

// Fujishige-Wolfe: min-norm point of the base polytope of f - f(empty),
// stopped once the duality gap min_k f(S_k) - x^-(T) is within
// tolerance * (1 + |value|). Throws ConvergenceError otherwise.
SfmResult MinimizeMinNorm(const SetFunction& f, const SfmOptions& options = {});

// Exhaustive when T <= exhaustive_threshold, min-norm point otherwise.
SfmResult Minimize(const SetFunction& f, const SfmOptions& options = {});

// Maximizes a supermodular g by minimizing -g. value = g(maximizer).
SfmResult MaximizeSupermodular(const SetFunction& g,
                               const SfmOptions& options = {});

}  // namespace evflex

#endif  // EVFLEX_SFM_H_
