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

#include "evflex/disaggregation.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "evflex/errors.h"
#include "fixtures.h"

namespace evflex {
namespace {

using testing::D1;
using testing::D2;
using testing::Horizon;
using testing::Profile;

GPolymatroid D1PlusD2() {
  const std::vector<GPolymatroid> parts = {FromDevice(D1(), Horizon(3)),
                                           FromDevice(D2(), Horizon(3))};
  return MinkowskiSum(Horizon(3), parts);
}

void ExpectClose(const ChargingProfile& u, std::vector<double> expected,
                 double tol = 1e-8) {
  ASSERT_EQ(u.size(), expected.size());
  for (std::size_t t = 0; t < u.size(); ++t) EXPECT_NEAR(u[t], expected[t], tol);
}

void ExpectSimplex(const VertexDecomposition& d) {
  double total = 0.0;
  for (const auto& e : d.entries) {
    EXPECT_GE(e.weight, 0.0);
    total += e.weight;
  }
  EXPECT_NEAR(total, 1.0, 1e-10);
}

class DecomposeTest : public ::testing::TestWithParam<DecompositionMethod> {
 protected:
  DecomposeOptions Options() const {
    DecomposeOptions o;
    o.method = GetParam();
    return o;
  }
};

TEST_P(DecomposeTest, VertexTarget) {
  const auto g = FromDevice(D1(), Horizon(3));
  const OrderedSplit split{{1, 0, 2}, 1};
  const auto d = Decompose(g, VertexByOrder(g, split), Options());
  ASSERT_EQ(d.entries.size(), 1u);
  EXPECT_EQ(d.entries[0].weight, 1.0);
  EXPECT_EQ(d.residual_norm, 0.0);
}

TEST_P(DecomposeTest, AggregateMember) {
  const auto g = D1PlusD2();
  const auto target = Profile({2, 3, 2});
  const auto d = Decompose(g, target, Options());
  EXPECT_LE(d.residual_norm, 1e-8 * (1.0 + target.Norm()));
  EXPECT_LE(d.entries.size(), 4u);
  ExpectClose(d.Reconstruct(), {2, 3, 2});
  ExpectSimplex(d);
  for (const auto& e : d.entries) {
    ExpectClose(VertexByOrder(g, e.split), e.vertex.values(), 1e-10);
  }
}

TEST_P(DecomposeTest, Midpoint) {
  const auto g = FromDevice(D1(), Horizon(3));
  const auto d = Decompose(g, Profile({2, 1.5, 0.5}), Options());
  EXPECT_LE(d.residual_norm, 1e-8 * 3.6);
  ExpectSimplex(d);
}

TEST_P(DecomposeTest, NonMemberRejected) {
  const auto g = D1PlusD2();
  EXPECT_THROW(Decompose(g, Profile({2, 3, 2.5}), Options()), MembershipError);
  EXPECT_THROW(Decompose(g, Profile({0, 0, 0}), Options()), MembershipError);
}

TEST_P(DecomposeTest, RandomMembersOfLargerSums) {
  // Away steps converge slowly on these degenerate sets; keep them small.
  const bool corrective = GetParam() == DecompositionMethod::kMinNormPoint;
  const std::size_t t = corrective ? 12 : 4;
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 10; ++trial) {
    const auto h = Horizon(t);
    const auto pop = SamplePopulation(rng(), corrective ? 8 : 2, h,
                                      SamplerConfig{});
    std::vector<GPolymatroid> parts;
    for (const auto& ev : pop) parts.push_back(FromDevice(ev, h));
    const auto g = MinkowskiSum(h, parts);
    std::vector<double> c(t);
    std::uniform_real_distribution<double> cost(-1.0, 1.0);
    ChargingProfile target = ChargingProfile::Zero(t);
    for (int k = 0; k < 3; ++k) {
      for (double& x : c) x = cost(rng);
      target.AddScaled(1.0 / 3.0, OptimizeLinear(g, c).profile);
    }
    DecomposeOptions options = Options();
    if (!corrective) options.max_iterations = 100000;
    const auto d = Decompose(g, target, options);
    EXPECT_LE(d.residual_norm, 1e-8 * (1.0 + target.Norm()));
    EXPECT_LE(d.entries.size(), t + 1);
    ExpectSimplex(d);
  }
}

INSTANTIATE_TEST_SUITE_P(Methods, DecomposeTest,
                         ::testing::Values(DecompositionMethod::kMinNormPoint,
                                           DecompositionMethod::kAwayStep),
                         [](const auto& info) {
                           return info.param == DecompositionMethod::kAwayStep
                                      ? std::string("AwayStep")
                                      : std::string("MinNormPoint");
                         });

TEST(CaratheodoryTest, SingleEntryUnchanged) {
  VertexDecomposition d;
  d.target = Profile({1, 2});
  d.entries.push_back({1.0, {{0, 1}, 0}, Profile({1, 2})});
  const auto r = ReduceCaratheodory(d);
  EXPECT_TRUE(r.reduced);
  ASSERT_EQ(r.decomposition.entries.size(), 1u);
}

TEST(CaratheodoryTest, DropsDependentAndZeroEntries) {
  const auto g = FromDevice(D1(), Horizon(3));
  const std::vector<OrderedSplit> splits = {
      {{0, 1, 2}, 0}, {{0, 1, 2}, 3}, {{1, 0, 2}, 1}, {{2, 1, 0}, 2}};
  VertexDecomposition d;
  d.target = ChargingProfile::Zero(3);
  for (const auto& s : splits) {
    d.entries.push_back({0.2, s, VertexByOrder(g, s)});
  }
  // A duplicate makes T+2 = 5 entries; append a zero-weight one as well.
  d.entries.push_back({0.2, splits[0], VertexByOrder(g, splits[0])});
  d.entries.push_back({0.0, splits[1], VertexByOrder(g, splits[1])});
  d.target = d.Reconstruct();
  d.residual_norm = 0.0;
  const auto r = ReduceCaratheodory(d);
  EXPECT_TRUE(r.reduced);
  EXPECT_LE(r.decomposition.entries.size(), 4u);
  ExpectClose(r.decomposition.Reconstruct(), d.target.values(), 1e-9);
  for (const auto& e : r.decomposition.entries) EXPECT_GT(e.weight, 0.0);
}

TEST(SplitVertexTest, Examples) {
  const std::vector<GPolymatroid> parts = {FromDevice(D1(), Horizon(3)),
                                           FromDevice(D2(), Horizon(3))};
  auto split = SplitVertex(parts, {{0, 1, 2}, 0});
  ExpectClose(split[0], {2, 1, 0}, 0);
  ExpectClose(split[1], {0, 1, 1}, 0);
  ExpectClose(VertexByOrder(D1PlusD2(), {{0, 1, 2}, 0}), {2, 2, 1}, 0);
  split = SplitVertex(parts, {{0, 1, 2}, 3});
  ExpectClose(split[0], {2, 2, 1}, 0);
  ExpectClose(split[1], {0, 1, 1}, 0);
  const std::vector<GPolymatroid> one = {parts[0]};
  EXPECT_EQ(SplitVertex(one, {{2, 0, 1}, 1})[0],
            VertexByOrder(parts[0], {{2, 0, 1}, 1}));
}

TEST(DisaggregateTest, Examples) {
  const std::vector<EvSpec> d2 = {D2()};
  auto r = Disaggregate(d2, Horizon(3), Profile({0, 1, 1}));
  ExpectClose(r.per_device.at("D2"), {0, 1, 1});
  const std::vector<EvSpec> both = {D1(), D2()};
  r = Disaggregate(both, Horizon(3), Profile({2, 3, 2}));
  ExpectClose(r.per_device.at("D2"), {0, 1, 1});
  ExpectClose(r.per_device.at("D1"), {2, 2, 1});
  EXPECT_LE(r.max_device_violation, kFeasibilityTolerance);
  EXPECT_THROW(Disaggregate(both, Horizon(3), Profile({2, 3, 3})),
               MembershipError);
  EXPECT_THROW(Disaggregate({}, Horizon(3), Profile({1, 0, 0})), MembershipError);
}

FeederSpec Feeder(std::string id, std::size_t t, double flow_max) {
  FeederSpec f;
  f.id = std::move(id);
  f.flow_max = flow_max;
  f.nominal_load.assign(t, 0.0);
  return f;
}

TEST(DisaggregateTreeTest, TwoFeedersWithinBoxes) {
  const auto h = Horizon(10);
  std::vector<FeederNode> roots;
  for (const std::string id : {"F1", "F2"}) {
    FeederNode node(Feeder(id, 10, 0.0), h);
    double rate = 0.0;
    for (const auto& ev : SamplePopulation(id == "F1" ? 7 : 8, 5, h,
                                           SamplerConfig{}, id)) {
      node.AddEv(ev);
      rate += ev.max_rate;
    }
    // Tighten the limit as far as the population still allows.
    std::vector<GPolymatroid> parts;
    for (const auto& ev : node.evs()) parts.push_back(FromDevice(ev, h));
    const auto sum = MinkowskiSum(h, parts);
    double fraction = 0.4;
    while (!CheckIntersectionFeasible(
        sum, PowerBox{std::vector<double>(10, 0.0),
                      std::vector<double>(10, fraction * rate)})) {
      fraction += 0.05;
    }
    FeederSpec spec = node.spec();
    spec.flow_max = fraction * rate;
    FeederNode sized(spec, h);
    for (const auto& ev : node.evs()) sized.AddEv(ev);
    roots.push_back(sized);
  }
  const auto network = AggregateNetwork(roots, h);
  std::vector<double> cost(10);
  for (std::size_t t = 0; t < 10; ++t) cost[t] = std::sin(0.7 * t);
  const auto opt = OptimizeLinear(network, cost);
  const std::vector<OrderedSplit> seeds = {opt.split};
  const auto r = DisaggregateTree(roots, h, opt.profile, {}, seeds);
  EXPECT_LE(r.residual_norm, 1e-6 * (1.0 + opt.profile.Norm()));
  EXPECT_LE(r.max_device_violation, kFeasibilityTolerance);
  EXPECT_EQ(r.per_device.size(), 10u);
  for (const auto& root : roots) {
    EXPECT_TRUE(DeriveBox(root.spec()).Contains(r.per_feeder.at(root.spec().id),
                                                1e-6));
  }
}

TEST(DisaggregateTreeTest, EmptyFeederGetsZero) {
  const auto h = Horizon(3);
  std::vector<FeederNode> roots;
  roots.emplace_back(Feeder("F1", 3, 10.0), h);
  roots.back().AddEv(D1());
  roots.emplace_back(Feeder("F2", 3, 10.0), h);
  const auto r = DisaggregateTree(roots, h, Profile({2, 2, 1}));
  ExpectClose(r.per_feeder.at("F2"), {0, 0, 0});
  ExpectClose(r.per_device.at("D1"), {2, 2, 1});
}

TEST(DisaggregateTreeTest, SingleFeederMatchesDisaggregate) {
  const auto h = Horizon(3);
  std::vector<FeederNode> roots;
  roots.emplace_back(Feeder("F1", 3, 10.0), h);
  roots.back().AddEv(D1());
  roots.back().AddEv(D2());
  const auto tree = DisaggregateTree(roots, h, Profile({2, 3, 2}));
  const std::vector<EvSpec> both = {D1(), D2()};
  const auto flat = Disaggregate(both, h, Profile({2, 3, 2}));
  for (const auto& [id, u] : flat.per_device) {
    ExpectClose(tree.per_device.at(id), u.values(), 1e-9);
  }
}

TEST(DisaggregateTreeTest, BoxViolationIsHardError) {
  const auto h = Horizon(3);
  std::vector<FeederNode> roots;
  roots.emplace_back(Feeder("F1", 3, 2.0), h);
  roots.back().AddEv(D1());
  EXPECT_THROW(DisaggregateTree(roots, h, Profile({2, 2.5, 0.5})),
               MembershipError);
}

}  // namespace
}  // namespace evflex
