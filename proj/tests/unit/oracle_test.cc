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

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "evflex/errors.h"
#include "fixtures.h"

namespace evflex::oracle {
namespace {

using testing::D1;
using testing::D2;
using testing::Horizon;
using testing::MakeEv;
using testing::Profile;

TEST(LpSolveTest, Examples) {
  const std::vector<EvSpec> pop = {D1()};
  const std::vector<double> c = {1, -1, 2};
  const auto r = MinimizeCostByLp(pop, Horizon(3), c);
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_NEAR(r.value, -1.0, 1e-9);
  EXPECT_NEAR(r.point[0], 1.0, 1e-9);
  EXPECT_NEAR(r.point[1], 2.0, 1e-9);
  EXPECT_NEAR(r.point[2], 0.0, 1e-9);

  LpProblem bad = LpProblem::WithVariables(1);
  bad.inequalities.push_back({{-1.0}, -1.0});  // x >= 1
  bad.inequalities.push_back({{1.0}, 0.0});    // x <= 0
  EXPECT_EQ(LpSolveDense(bad).status, LpStatus::kInfeasible);

  LpProblem zero = LpProblem::WithVariables(2);
  zero.equalities.push_back({{1.0, 1.0}, 3.0});
  const auto z = LpSolveDense(zero);
  ASSERT_EQ(z.status, LpStatus::kOptimal);
  EXPECT_EQ(z.value, 0.0);

  LpProblem unbounded = LpProblem::WithVariables(1);
  unbounded.objective = {-1.0};
  EXPECT_EQ(LpSolveDense(unbounded).status, LpStatus::kUnbounded);
}

TEST(LpSolveTest, SizeLimit) {
  EXPECT_THROW(LpSolveDense(LpProblem::WithVariables(kMaxVariables + 1)),
               InvalidInputError);
}

// Brute-force optimum over all basic solutions of a bounded system.
struct Enumerated {
  bool feasible = false;
  double value = kInf;
};

Enumerated EnumerateVertices(const LpProblem& lp) {
  const std::size_t n = lp.objective.size();
  std::vector<LinearRow> rows = lp.inequalities;
  for (std::size_t j = 0; j < n; ++j) {
    LinearRow lo{std::vector<double>(n, 0.0), -lp.lower[j]};
    lo.coefficients[j] = -1.0;
    LinearRow hi{std::vector<double>(n, 0.0), lp.upper[j]};
    hi.coefficients[j] = 1.0;
    rows.push_back(lo);
    rows.push_back(hi);
  }
  Enumerated best;
  const std::size_t m = rows.size();
  std::vector<std::size_t> pick(n);
  // Iterate over all n-subsets of the rows.
  std::function<void(std::size_t, std::size_t)> visit = [&](std::size_t start,
                                                            std::size_t depth) {
    if (depth == n) {
      Eigen::MatrixXd a(n, n);
      Eigen::VectorXd b(n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a(i, j) = rows[pick[i]].coefficients[j];
        b(i) = rows[pick[i]].rhs;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      if (lu.rank() < static_cast<Eigen::Index>(n)) return;
      const Eigen::VectorXd x = lu.solve(b);
      for (const auto& row : rows) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < n; ++j) lhs += row.coefficients[j] * x(j);
        if (lhs > row.rhs + 1e-9) return;
      }
      double value = 0.0;
      for (std::size_t j = 0; j < n; ++j) value += lp.objective[j] * x(j);
      best.feasible = true;
      best.value = std::min(best.value, value);
      return;
    }
    for (std::size_t i = start; i < m; ++i) {
      pick[depth] = i;
      visit(i + 1, depth + 1);
    }
  };
  visit(0, 0);
  return best;
}

TEST(LpSolveTest, MatchesVertexEnumeration) {
  std::mt19937_64 rng(67);
  std::uniform_int_distribution<std::size_t> vars(1, 6);
  std::uniform_int_distribution<std::size_t> nrows(0, 4);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::size_t infeasible = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = vars(rng);
    LpProblem lp = LpProblem::WithVariables(n);
    for (std::size_t j = 0; j < n; ++j) {
      lp.objective[j] = coef(rng);
      lp.lower[j] = -std::abs(coef(rng));
      lp.upper[j] = std::abs(coef(rng));
    }
    const std::size_t m = nrows(rng);
    for (std::size_t i = 0; i < m; ++i) {
      LinearRow row{std::vector<double>(n), coef(rng)};
      for (double& a : row.coefficients) a = coef(rng);
      lp.inequalities.push_back(row);
    }
    const auto simplex = LpSolveDense(lp);
    const auto brute = EnumerateVertices(lp);
    ASSERT_EQ(simplex.status == LpStatus::kOptimal, brute.feasible)
        << "trial " << trial;
    if (brute.feasible) {
      EXPECT_NEAR(simplex.value, brute.value, 1e-9) << "trial " << trial;
    } else {
      ++infeasible;
    }
  }
  EXPECT_LT(infeasible, 50u);
}

TEST(MembershipTest, Examples) {
  const std::vector<EvSpec> both = {D1(), D2()};
  const std::vector<EvSpec> d2 = {D2()};
  EXPECT_TRUE(MembershipByLp(both, Horizon(3), Profile({2, 3, 2})));
  EXPECT_FALSE(MembershipByLp(d2, Horizon(3), Profile({1, 1, 0})));
  EXPECT_FALSE(MembershipByLp(both, Horizon(3), Profile({2, 3.5, -0.5})));
  const BoxLimits box{{0, 0, 0}, {2, 2, 2}};
  EXPECT_FALSE(MembershipByLp(both, Horizon(3), Profile({2, 3, 2}), box));
}

TEST(SetFunctionByLpTest, Examples) {
  const std::vector<EvSpec> d1 = {D1()};
  const std::vector<std::size_t> a12 = {0, 1};
  EXPECT_NEAR(*SetFunctionByLp(d1, Horizon(3), a12, Side::kLower), 1.0, 1e-9);
  EXPECT_NEAR(*SetFunctionByLp(d1, Horizon(3), {}, Side::kLower), 0.0, 1e-12);
  EXPECT_NEAR(*SetFunctionByLp(d1, Horizon(3), {}, Side::kUpper), 0.0, 1e-12);
  const std::vector<EvSpec> tight = {MakeEv("T", 1, 2, 1.0, 2.0, 2.0)};
  const BoxLimits box{{0, 0}, {1, 1}};
  const std::vector<std::size_t> a1 = {0};
  EXPECT_NEAR(*SetFunctionByLp(tight, Horizon(2), a1, Side::kUpper, box), 1.0,
              1e-9);
  const BoxLimits empty{{0, 0}, {0.5, 0.5}};
  EXPECT_FALSE(SetFunctionByLp(tight, Horizon(2), a1, Side::kUpper, empty));
}

}  // namespace
}  // namespace evflex::oracle
