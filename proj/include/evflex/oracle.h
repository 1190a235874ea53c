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

#ifndef EVFLEX_ORACLE_H_
#define EVFLEX_ORACLE_H_

// Brute-force ground truth for tests and acceptance runs. Deliberately shares
// no code with the set-function, SFM, g-polymatroid or disaggregation
// modules: everything here is stated directly in per-device variables.

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "evflex/model.h"

namespace evflex::oracle {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr std::size_t kMaxVariables = 400;

struct LinearRow {
  std::vector<double> coefficients;
  double rhs = 0.0;
};

// minimize objective . x  s.t.  equalities (a.x = rhs), inequalities
// (a.x <= rhs), lower <= x <= upper (entries may be infinite).
struct LpProblem {
  std::vector<double> objective;
  std::vector<LinearRow> equalities;
  std::vector<LinearRow> inequalities;
  std::vector<double> lower;
  std::vector<double> upper;

  // Convenience: n free variables with zero objective.
  static LpProblem WithVariables(std::size_t n);
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

std::string_view ToString(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> point;
  double value = 0.0;
};

// Two-phase tableau simplex with Bland's rule. Throws InvalidInputError
// beyond kMaxVariables.
LpSolution LpSolveDense(const LpProblem& problem);

// Per-feeder limits in kW; mirrors a power box without depending on it.
struct BoxLimits {
  std::vector<double> lower;
  std::vector<double> upper;
};

// Is u (kW) a sum of per-device feasible profiles (and inside the box)?
bool MembershipByLp(std::span<const EvSpec> population,
                    const TimeHorizon& horizon, const ChargingProfile& u,
                    const std::optional<BoxLimits>& box = std::nullopt,
                    double tolerance = 1e-9);

enum class Side { kLower, kUpper };

// min (kLower) or max (kUpper) of delta * u(A) over the aggregate set,
// optionally intersected with the box. `periods` are 0-based indices.
// Returns nullopt when the set is empty.
std::optional<double> SetFunctionByLp(std::span<const EvSpec> population,
                                      const TimeHorizon& horizon,
                                      std::span<const std::size_t> periods,
                                      Side side,
                                      const std::optional<BoxLimits>& box =
                                          std::nullopt);

// min c . u * delta over the aggregate set (optionally boxed). On success
// `point` is the optimal aggregate profile in kW.
LpSolution MinimizeCostByLp(std::span<const EvSpec> population,
                            const TimeHorizon& horizon,
                            std::span<const double> cost,
                            const std::optional<BoxLimits>& box = std::nullopt);

}  // namespace evflex::oracle

#endif  // EVFLEX_ORACLE_H_
