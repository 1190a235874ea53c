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

#include "evflex/oracle.h"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "evflex/errors.h"

namespace evflex::oracle {

LpProblem LpProblem::WithVariables(std::size_t n) {
  LpProblem p;
  p.objective.assign(n, 0.0);
  p.lower.assign(n, -kInf);
  p.upper.assign(n, kInf);
  return p;
}

std::string_view ToString(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
  }
  return "unknown";
}

namespace {

constexpr double kPivotEps = 1e-11;
constexpr double kCostEps = 1e-10;
constexpr std::size_t kMaxPivots = 200000;

// x_j = offset + sum sign * y_col, y >= 0.
struct VariableMap {
  double offset = 0.0;
  std::vector<std::pair<std::size_t, double>> columns;
};

class Tableau {
 public:
  Tableau(std::vector<std::vector<double>> rows, std::vector<double> rhs,
          std::size_t structural)
      : m_(rows.size()), structural_(structural) {
    // Columns: structural | artificial (one per row) | rhs.
    width_ = structural_ + m_ + 1;
    cells_.assign(m_ * width_, 0.0);
    basis_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      double sign = rhs[i] < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < structural_; ++j) {
        at(i, j) = sign * rows[i][j];
      }
      at(i, structural_ + i) = 1.0;
      at(i, width_ - 1) = sign * rhs[i];
      basis_[i] = structural_ + i;
    }
  }

  // Minimizes cost . y over the current basis with Bland's rule. Columns at
  // or beyond `allowed` never enter. Returns false if unbounded.
  bool Optimize(const std::vector<double>& cost, std::size_t allowed) {
    for (std::size_t iter = 0; iter < kMaxPivots; ++iter) {
      std::size_t entering = allowed;
      for (std::size_t j = 0; j < allowed; ++j) {
        if (IsBasic(j)) continue;
        if (ReducedCost(cost, j) < -kCostEps) {
          entering = j;
          break;
        }
      }
      if (entering == allowed) return true;
      std::size_t leaving = m_;
      double best_ratio = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, entering);
        if (a <= kPivotEps) continue;
        const double ratio = at(i, width_ - 1) / a;
        if (leaving == m_ || ratio < best_ratio - 1e-12 ||
            (std::abs(ratio - best_ratio) <= 1e-12 &&
             basis_[i] < basis_[leaving])) {
          leaving = i;
          best_ratio = ratio;
        }
      }
      if (leaving == m_) return false;
      Pivot(leaving, entering);
    }
    throw Error("simplex pivot limit reached");
  }

  double Objective(const std::vector<double>& cost) const {
    double value = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      value += cost[basis_[i]] * at(i, width_ - 1);
    }
    return value;
  }

  // Pivots artificial variables out of the basis where possible.
  void DriveOutArtificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < structural_) continue;
      for (std::size_t j = 0; j < structural_; ++j) {
        if (!IsBasic(j) && std::abs(at(i, j)) > 1e-9) {
          Pivot(i, j);
          break;
        }
      }
    }
  }

  std::vector<double> Values() const {
    std::vector<double> y(structural_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < structural_) y[basis_[i]] = at(i, width_ - 1);
    }
    return y;
  }

  std::size_t structural() const { return structural_; }
  std::size_t total_columns() const { return width_ - 1; }
  double MaxRhs() const {
    double v = 0.0;
    for (std::size_t i = 0; i < m_; ++i) v = std::max(v, std::abs(at(i, width_ - 1)));
    return v;
  }

 private:
  double& at(std::size_t i, std::size_t j) { return cells_[i * width_ + j]; }
  double at(std::size_t i, std::size_t j) const {
    return cells_[i * width_ + j];
  }

  bool IsBasic(std::size_t j) const {
    return std::find(basis_.begin(), basis_.end(), j) != basis_.end();
  }

  double ReducedCost(const std::vector<double>& cost, std::size_t j) const {
    double r = cost[j];
    for (std::size_t i = 0; i < m_; ++i) r -= cost[basis_[i]] * at(i, j);
    return r;
  }

  void Pivot(std::size_t row, std::size_t col) {
    const double inv = 1.0 / at(row, col);
    for (std::size_t j = 0; j < width_; ++j) at(row, j) *= inv;
    at(row, col) = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double factor = at(i, col);
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) at(i, j) -= factor * at(row, j);
      at(i, col) = 0.0;
    }
    basis_[row] = col;
  }

  std::size_t m_;
  std::size_t structural_;
  std::size_t width_;
  std::vector<double> cells_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LpSolution LpSolveDense(const LpProblem& problem) {
  const std::size_t n = problem.objective.size();
  if (n > kMaxVariables) {
    throw InvalidInputError(
        fmt::format("dense LP oracle limited to {} variables, got {}",
                    kMaxVariables, n));
  }
  if (problem.lower.size() != n || problem.upper.size() != n) {
    throw InvalidInputError("LP bounds must match the variable count");
  }
  for (const auto* rows : {&problem.equalities, &problem.inequalities}) {
    for (const auto& row : *rows) {
      if (row.coefficients.size() != n) {
        throw InvalidInputError("LP row width must match the variable count");
      }
    }
  }

  // Substitute bounded variables by non-negative columns.
  std::vector<VariableMap> maps(n);
  std::size_t columns = 0;
  std::vector<std::pair<std::size_t, double>> bound_caps;
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = problem.lower[j];
    const double hi = problem.upper[j];
    if (lo > hi) return {LpStatus::kInfeasible, {}, 0.0};
    if (std::isfinite(lo)) {
      maps[j].offset = lo;
      maps[j].columns.emplace_back(columns, 1.0);
      if (std::isfinite(hi)) bound_caps.emplace_back(columns, hi - lo);
      ++columns;
    } else if (std::isfinite(hi)) {
      maps[j].offset = hi;
      maps[j].columns.emplace_back(columns++, -1.0);
    } else {
      maps[j].columns.emplace_back(columns++, 1.0);
      maps[j].columns.emplace_back(columns++, -1.0);
    }
  }
  const std::size_t slack_begin = columns;
  const std::size_t slack_count = problem.inequalities.size() + bound_caps.size();
  const std::size_t structural = columns + slack_count;

  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  auto translate = [&](const LinearRow& row, std::optional<std::size_t> slack) {
    std::vector<double> out(structural, 0.0);
    double b = row.rhs;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = row.coefficients[j];
      if (a == 0.0) continue;
      b -= a * maps[j].offset;
      for (auto [col, sign] : maps[j].columns) out[col] += a * sign;
    }
    if (slack) out[*slack] = 1.0;
    rows.push_back(std::move(out));
    rhs.push_back(b);
  };
  for (const auto& row : problem.equalities) translate(row, std::nullopt);
  std::size_t slack = slack_begin;
  for (const auto& row : problem.inequalities) translate(row, slack++);
  for (auto [col, cap] : bound_caps) {
    std::vector<double> out(structural, 0.0);
    out[col] = 1.0;
    out[slack++] = 1.0;
    rows.push_back(std::move(out));
    rhs.push_back(cap);
  }

  Tableau tableau(std::move(rows), std::move(rhs), structural);
  const std::size_t total = tableau.total_columns();

  // Phase 1: minimize the sum of artificials.
  std::vector<double> phase1(total, 0.0);
  for (std::size_t j = structural; j < total; ++j) phase1[j] = 1.0;
  tableau.Optimize(phase1, total);
  const double infeasibility = tableau.Objective(phase1);
  if (infeasibility > 1e-9 * (1.0 + tableau.MaxRhs())) {
    return {LpStatus::kInfeasible, {}, 0.0};
  }
  tableau.DriveOutArtificials();

  // Phase 2 over structural columns only.
  std::vector<double> phase2(total, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double c = problem.objective[j];
    for (auto [col, sign] : maps[j].columns) phase2[col] += c * sign;
  }
  if (!tableau.Optimize(phase2, structural)) {
    return {LpStatus::kUnbounded, {}, 0.0};
  }

  const std::vector<double> y = tableau.Values();
  LpSolution solution;
  solution.status = LpStatus::kOptimal;
  solution.point.resize(n);
  solution.value = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double x = maps[j].offset;
    for (auto [col, sign] : maps[j].columns) x += sign * y[col];
    solution.point[j] = x;
    solution.value += problem.objective[j] * x;
  }
  return solution;
}

namespace {

// Variables u_i(t) for every device i and connected period t.
struct DeviceLayout {
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> by_period;
  LpProblem problem;
};

DeviceLayout BuildDeviceProblem(std::span<const EvSpec> population,
                                const TimeHorizon& horizon) {
  const std::size_t periods = horizon.periods;
  DeviceLayout layout;
  layout.by_period.resize(periods);
  std::size_t count = 0;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (const auto& ev : population) {
    if (ev.departure > periods || ev.arrival < 1 || ev.arrival > ev.departure) {
      throw InvalidInputError("EV window outside the horizon");
    }
    ranges.emplace_back(count, ev.arrival - 1);
    count += ev.departure - ev.arrival + 1;
  }
  layout.problem = LpProblem::WithVariables(count);
  for (std::size_t i = 0; i < population.size(); ++i) {
    const EvSpec& ev = population[i];
    const auto [base, first] = ranges[i];
    LinearRow at_least{std::vector<double>(count, 0.0), -ev.energy_min};
    LinearRow at_most{std::vector<double>(count, 0.0), ev.energy_max};
    for (std::size_t k = 0; k < ev.departure - ev.arrival + 1; ++k) {
      const std::size_t var = base + k;
      layout.problem.lower[var] = 0.0;
      layout.problem.upper[var] = ev.max_rate;
      at_least.coefficients[var] = -horizon.delta;
      at_most.coefficients[var] = horizon.delta;
      layout.by_period[first + k].emplace_back(i, var);
    }
    layout.problem.inequalities.push_back(std::move(at_least));
    layout.problem.inequalities.push_back(std::move(at_most));
  }
  return layout;
}

void AddBoxRows(DeviceLayout& layout, const BoxLimits& box) {
  const std::size_t count = layout.problem.objective.size();
  for (std::size_t t = 0; t < layout.by_period.size(); ++t) {
    LinearRow below{std::vector<double>(count, 0.0), box.upper[t]};
    LinearRow above{std::vector<double>(count, 0.0), -box.lower[t]};
    for (auto [device, var] : layout.by_period[t]) {
      below.coefficients[var] = 1.0;
      above.coefficients[var] = -1.0;
    }
    layout.problem.inequalities.push_back(std::move(below));
    layout.problem.inequalities.push_back(std::move(above));
  }
}

void CheckBox(const BoxLimits& box, std::size_t periods) {
  if (box.lower.size() != periods || box.upper.size() != periods) {
    throw InvalidInputError("box limits must have one entry per period");
  }
}

}  // namespace

bool MembershipByLp(std::span<const EvSpec> population,
                    const TimeHorizon& horizon, const ChargingProfile& u,
                    const std::optional<BoxLimits>& box, double tolerance) {
  if (u.size() != horizon.periods) {
    throw InvalidInputError("profile length must equal T");
  }
  if (box) {
    CheckBox(*box, horizon.periods);
    for (std::size_t t = 0; t < u.size(); ++t) {
      if (u[t] < box->lower[t] - tolerance || u[t] > box->upper[t] + tolerance) {
        return false;
      }
    }
  }
  DeviceLayout layout = BuildDeviceProblem(population, horizon);
  const std::size_t count = layout.problem.objective.size();
  for (std::size_t t = 0; t < horizon.periods; ++t) {
    LinearRow below{std::vector<double>(count, 0.0), u[t] + tolerance};
    LinearRow above{std::vector<double>(count, 0.0), -(u[t] - tolerance)};
    for (auto [device, var] : layout.by_period[t]) {
      below.coefficients[var] = 1.0;
      above.coefficients[var] = -1.0;
    }
    layout.problem.inequalities.push_back(std::move(below));
    layout.problem.inequalities.push_back(std::move(above));
  }
  return LpSolveDense(layout.problem).status == LpStatus::kOptimal;
}

std::optional<double> SetFunctionByLp(std::span<const EvSpec> population,
                                      const TimeHorizon& horizon,
                                      std::span<const std::size_t> periods,
                                      Side side,
                                      const std::optional<BoxLimits>& box) {
  DeviceLayout layout = BuildDeviceProblem(population, horizon);
  if (box) {
    CheckBox(*box, horizon.periods);
    AddBoxRows(layout, *box);
  }
  const double sign = side == Side::kLower ? 1.0 : -1.0;
  for (std::size_t t : periods) {
    if (t >= horizon.periods) throw InvalidInputError("period out of range");
    for (auto [device, var] : layout.by_period[t]) {
      layout.problem.objective[var] = sign * horizon.delta;
    }
  }
  const LpSolution solution = LpSolveDense(layout.problem);
  if (solution.status != LpStatus::kOptimal) return std::nullopt;
  return sign * solution.value;
}

LpSolution MinimizeCostByLp(std::span<const EvSpec> population,
                            const TimeHorizon& horizon,
                            std::span<const double> cost,
                            const std::optional<BoxLimits>& box) {
  if (cost.size() != horizon.periods) {
    throw InvalidInputError("cost length must equal T");
  }
  DeviceLayout layout = BuildDeviceProblem(population, horizon);
  if (box) {
    CheckBox(*box, horizon.periods);
    AddBoxRows(layout, *box);
  }
  for (std::size_t t = 0; t < horizon.periods; ++t) {
    for (auto [device, var] : layout.by_period[t]) {
      layout.problem.objective[var] = cost[t] * horizon.delta;
    }
  }
  LpSolution solution = LpSolveDense(layout.problem);
  if (solution.status == LpStatus::kOptimal) {
    std::vector<double> aggregate(horizon.periods, 0.0);
    for (std::size_t t = 0; t < horizon.periods; ++t) {
      for (auto [device, var] : layout.by_period[t]) {
        aggregate[t] += solution.point[var];
      }
    }
    solution.point = std::move(aggregate);
  }
  return solution;
}

}  // namespace evflex::oracle
