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
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "evflex/errors.h"
#include "evflex/oracle.h"
#include "fixtures.h"

namespace evflex {
namespace {

using testing::D1;
using testing::D2;
using testing::Horizon;
using testing::MakeEv;
using testing::Profile;

SubsetMask Set(std::size_t t, std::initializer_list<std::size_t> periods) {
  return SubsetMask::FromPeriods(t, periods);
}

GPolymatroid D1PlusD2() {
  const std::vector<GPolymatroid> parts = {FromDevice(D1(), Horizon(3)),
                                           FromDevice(D2(), Horizon(3))};
  return MinkowskiSum(Horizon(3), parts);
}

void ExpectProfile(const ChargingProfile& u, std::vector<double> expected) {
  ASSERT_EQ(u.size(), expected.size());
  for (std::size_t t = 0; t < u.size(); ++t) {
    EXPECT_NEAR(u[t], expected[t], 1e-12) << "period " << t + 1;
  }
}

// The single-EV tight-box example: window {1,2}, 1 kW, exactly 2 kWh.
EvSpec Tight() { return MakeEv("T", 1, 2, 1.0, 2.0, 2.0); }

TEST(FromDeviceTest, Examples) {
  const auto g = FromDevice(D1(), Horizon(3));
  EXPECT_EQ(g.lower()(SubsetMask::Full(3)), 3.0);
  EXPECT_EQ(g.upper()(SubsetMask::Full(3)), 5.0);
  const auto zero = FromDevice(MakeEv("z", 1, 3, 2.0, 0.0, 0.0), Horizon(3));
  EXPECT_TRUE(Contains(zero, Profile({0, 0, 0})));
  EXPECT_FALSE(Contains(zero, Profile({1, 0, 0})));
  EXPECT_FALSE(Contains(zero, Profile({1, -1, 0})));
  const auto d2 = FromDevice(D2(), Horizon(3));
  EXPECT_TRUE(Contains(d2, Profile({0, 1, 1})));
  EXPECT_FALSE(Contains(d2, Profile({1, 1, 1})));
  EXPECT_FALSE(Contains(d2, Profile({0, 1, 0.9})));
}

TEST(MinkowskiTest, Examples) {
  const auto g = D1PlusD2();
  EXPECT_EQ(g.lower()(Set(3, {2, 3})), 3.0);
  EXPECT_EQ(g.upper()(SubsetMask::Full(3)), 7.0);
  EXPECT_TRUE(Contains(g, Profile({2, 3, 2})));
  const std::vector<GPolymatroid> one = {FromDevice(D1(), Horizon(3))};
  const auto same = MinkowskiSum(Horizon(3), one);
  for (std::uint64_t bits = 0; bits < 8; ++bits) {
    const auto a = SubsetMask::FromBits(3, bits);
    EXPECT_EQ(same.lower()(a), one[0].lower()(a));
    EXPECT_EQ(same.upper()(a), one[0].upper()(a));
  }
  EXPECT_TRUE(Contains(MinkowskiSum(Horizon(3), {}), Profile({0, 0, 0})));
}

TEST(OptimizeLinearTest, Examples) {
  const auto g = FromDevice(D1(), Horizon(3));
  const std::vector<double> c1 = {1, -1, 2};
  auto r = OptimizeLinear(g, c1);
  ExpectProfile(r.profile, {1, 2, 0});
  EXPECT_NEAR(r.objective, -1.0, 1e-12);
  EXPECT_EQ(r.split.order, (std::vector<std::size_t>{1, 0, 2}));
  EXPECT_EQ(r.split.split, 1u);
  EXPECT_LE(r.chain_evaluations, 4u);

  const std::vector<double> c2 = {1, 1, 1};
  r = OptimizeLinear(g, c2);
  ExpectProfile(r.profile, {2, 1, 0});
  EXPECT_NEAR(r.objective, 3.0, 1e-12);

  const std::vector<double> c0 = {0, 0, 0};
  r = OptimizeLinear(g, c0);
  EXPECT_EQ(r.objective, 0.0);
  EXPECT_EQ(r.profile, VertexByOrder(g, r.split));
}

TEST(VertexByOrderTest, Examples) {
  const auto g = FromDevice(D1(), Horizon(3));
  ExpectProfile(VertexByOrder(g, {{0, 1, 2}, 3}), {2, 2, 1});
  ExpectProfile(VertexByOrder(g, {{0, 1, 2}, 0}), {2, 1, 0});
  ExpectProfile(VertexByOrder(g, {{1, 0, 2}, 1}), {1, 2, 0});
  EXPECT_THROW(VertexByOrder(g, {{0, 0, 2}, 1}), InvalidInputError);
  EXPECT_THROW(VertexByOrder(g, {{0, 1, 2}, 4}), InvalidInputError);
}

TEST(IntersectBoxTest, TightExample) {
  const auto h = Horizon(2);
  const auto g = FromDevice(Tight(), h);
  const PowerBox box{{0, 0}, {1, 1}};
  EXPECT_TRUE(CheckIntersectionFeasible(g, box));
  const auto c = IntersectBox(g, box);
  EXPECT_NEAR(c.lower()(Set(2, {1})), 1.0, 1e-12);
  EXPECT_NEAR(c.upper()(Set(2, {1})), 1.0, 1e-12);
  EXPECT_NEAR(c.upper()(Set(2, {1, 2})), 2.0, 1e-12);
  EXPECT_EQ(c.kind(), GPolymatroidKind::kBoxIntersected);
  EXPECT_EQ(c.box_depth(), 1u);
}

TEST(IntersectBoxTest, Infeasible) {
  const auto g = FromDevice(Tight(), Horizon(2));
  const PowerBox box{{0, 0}, {0.5, 0.5}};
  EXPECT_FALSE(CheckIntersectionFeasible(g, box));
  try {
    IntersectBox(g, box, {}, "feeder X");
    FAIL() << "expected InfeasibleError";
  } catch (const InfeasibleError& e) {
    EXPECT_EQ(e.node(), "feeder X");
  }
  EXPECT_FALSE(CheckIntersectionFeasible(g, PowerBox{{1, 0}, {0, 1}}));
}

TEST(IntersectBoxTest, EmptyPopulation) {
  const auto zero = ZeroGPolymatroid(Horizon(3));
  EXPECT_TRUE(CheckIntersectionFeasible(zero, PowerBox{{0, 0, 0}, {1, 2, 3}}));
  EXPECT_FALSE(CheckIntersectionFeasible(zero, PowerBox{{0, 0.5, 0}, {1, 2, 3}}));
}

TEST(IntersectBoxTest, LooseBoxChangesNothing) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t t = 2 + trial % 5;
    const auto h = Horizon(t);
    const auto pop = SamplePopulation(rng(), 3, h, SamplerConfig{});
    std::vector<GPolymatroid> parts;
    double big = 0.0;
    for (const auto& ev : pop) {
      parts.push_back(FromDevice(ev, h));
      big += ev.max_rate;
    }
    const auto g = MinkowskiSum(h, parts);
    const auto c = IntersectBox(g, PowerBox{std::vector<double>(t, 0.0),
                                            std::vector<double>(t, big)});
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << t); ++bits) {
      const auto a = SubsetMask::FromBits(t, bits);
      EXPECT_NEAR(c.lower()(a), g.lower()(a), 1e-9);
      EXPECT_NEAR(c.upper()(a), g.upper()(a), 1e-9);
    }
  }
}

TEST(DeriveBoxTest, Examples) {
  FeederSpec f;
  f.id = "F";
  f.flow_max = 10.0;
  f.nominal_load = {3.0, 0.0};
  auto box = DeriveBox(f);
  EXPECT_EQ(box.upper, (std::vector<double>{7.0, 10.0}));
  EXPECT_EQ(box.lower, (std::vector<double>{0.0, 0.0}));
  EXPECT_FALSE(HasNegativeUpper(box));
  f.flow_max = 5.0;
  f.nominal_load = {6.0, 0.0};
  box = DeriveBox(f);
  EXPECT_EQ(box.upper[0], -1.0);
  EXPECT_TRUE(HasNegativeUpper(box));
  f.flow_min = 4.0;
  f.nominal_load = {1.0, 5.0};
  box = DeriveBox(f);
  EXPECT_EQ(box.lower, (std::vector<double>{3.0, 0.0}));
}

TEST(ComplianceTest, DevicesSumsAndBoxes) {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t t = 2 + trial % 4;
    const auto h = Horizon(t);
    std::vector<GPolymatroid> parts;
    for (const auto& ev : SamplePopulation(rng(), 2, h, SamplerConfig{})) {
      parts.push_back(FromDevice(ev, h));
      EXPECT_TRUE(CheckCompliance(parts.back()));
    }
    EXPECT_TRUE(CheckCompliance(MinkowskiSum(h, parts)));
  }
  EXPECT_TRUE(CheckCompliance(
      IntersectBox(FromDevice(Tight(), Horizon(2)), PowerBox{{0, 0}, {1, 1}})));
}

TEST(GreedyTest, MatchesLpAndGivesUniqueVertices) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> cost(-2.0, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t t = 2 + trial % 5;
    const auto h = Horizon(t);
    const auto pop = SamplePopulation(rng(), 1 + trial % 3, h, SamplerConfig{});
    std::vector<GPolymatroid> parts;
    for (const auto& ev : pop) parts.push_back(FromDevice(ev, h));
    const auto g = MinkowskiSum(h, parts);

    std::vector<double> c(t);
    for (double& x : c) x = cost(rng);
    const auto greedy = OptimizeLinear(g, c);
    const auto lp = oracle::MinimizeCostByLp(pop, h, c);
    ASSERT_EQ(lp.status, oracle::LpStatus::kOptimal);
    EXPECT_NEAR(greedy.objective, lp.value, 1e-7);
    EXPECT_LE(greedy.chain_evaluations, t + 1);

    // A strictly sorted cost with the split's sign pattern has the vertex as
    // its only minimizer, so the simplex must land on it.
    OrderedSplit split;
    split.order.resize(t);
    std::iota(split.order.begin(), split.order.end(), 0);
    std::shuffle(split.order.begin(), split.order.end(), rng);
    split.split = rng() % (t + 1);
    std::vector<double> strict(t);
    for (std::size_t k = 0; k < t; ++k) {
      strict[split.order[k]] =
          static_cast<double>(k) - static_cast<double>(split.split) + 0.5;
    }
    const auto vertex = VertexByOrder(g, split);
    const auto unique = oracle::MinimizeCostByLp(pop, h, strict);
    ASSERT_EQ(unique.status, oracle::LpStatus::kOptimal);
    for (std::size_t k = 0; k < t; ++k) {
      EXPECT_NEAR(vertex[k], unique.point[k], 1e-7);
    }
  }
}

TEST(ContainsTest, ParallelAndMinNormBackends) {
  const auto g = D1PlusD2();
  GPolyOptions options;
  options.parallel = true;
  options.sfm.exhaustive_threshold = 0;
  EXPECT_TRUE(Contains(g, Profile({2, 3, 2}), 1e-9, options));
  EXPECT_FALSE(Contains(g, Profile({2, 3, 2.5}), 1e-9, options));
  const std::vector<double> c = {1, -1, 2};
  EXPECT_EQ(OptimizeLinear(g, c, options).profile,
            OptimizeLinear(g, c).profile);
}

}  // namespace
}  // namespace evflex
