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

#include "evflex/network.h"

#include <random>

#include <gtest/gtest.h>

#include "evflex/errors.h"
#include "evflex/oracle.h"
#include "fixtures.h"

namespace evflex {
namespace {

using testing::D1;
using testing::Horizon;
using testing::MakeEv;
using testing::Profile;

FeederSpec Feeder(std::string id, std::size_t t, double flow_max,
                  std::optional<std::string> parent = std::nullopt) {
  FeederSpec f;
  f.id = std::move(id);
  f.flow_max = flow_max;
  f.nominal_load.assign(t, 0.0);
  f.parent = std::move(parent);
  return f;
}

TEST(AggregateNodeTest, LeafWithLooseBoxMatchesDevice) {
  FeederNode node(Feeder("F1", 3, 100.0), Horizon(3));
  node.AddEv(D1());
  const auto g = AggregateNode(node);
  const auto d = FromDevice(D1(), Horizon(3));
  for (std::uint64_t bits = 0; bits < 8; ++bits) {
    const auto a = SubsetMask::FromBits(3, bits);
    EXPECT_NEAR(g.lower()(a), d.lower()(a), 1e-12);
    EXPECT_NEAR(g.upper()(a), d.upper()(a), 1e-12);
  }
}

TEST(AggregateNodeTest, TightBox) {
  FeederNode node(Feeder("F1", 2, 1.0), Horizon(2));
  node.AddEv(MakeEv("T", 1, 2, 1.0, 2.0, 2.0));
  const auto g = AggregateNode(node);
  const auto one = SubsetMask::FromPeriods(2, {1});
  EXPECT_NEAR(g.lower()(one), 1.0, 1e-12);
  EXPECT_NEAR(g.upper()(one), 1.0, 1e-12);
}

TEST(AggregateNodeTest, EmptyNodeIsZero) {
  FeederNode node(Feeder("F1", 3, 5.0), Horizon(3));
  const auto g = AggregateNode(node);
  EXPECT_TRUE(Contains(g, Profile({0, 0, 0})));
  EXPECT_FALSE(Contains(g, Profile({0.1, 0, 0})));
}

TEST(AggregateNodeTest, InfeasibleNamesFeeder) {
  FeederNode node(Feeder("F7", 2, 0.5), Horizon(2));
  node.AddEv(MakeEv("T", 1, 2, 1.0, 2.0, 2.0));
  try {
    AggregateNode(node);
    FAIL() << "expected InfeasibleError";
  } catch (const InfeasibleError& e) {
    EXPECT_EQ(e.node(), "feeder F7");
  }
}

TEST(AggregateNodeTest, CacheDroppedOnMutation) {
  FeederNode node(Feeder("F1", 3, 100.0), Horizon(3));
  node.AddEv(D1());
  EXPECT_EQ(AggregateNode(node).upper()(SubsetMask::Full(3)), 5.0);
  node.AddEv(MakeEv("x", 1, 2, 1.0, 0.0, 1.0));
  EXPECT_EQ(AggregateNode(node).upper()(SubsetMask::Full(3)), 6.0);
}

Scenario TwoFeeders(std::uint64_t seed, std::size_t t) {
  Scenario s;
  s.horizon = Horizon(t);
  s.prices.assign(t, 1.0);
  for (const std::string id : {"F1", "F2"}) {
    s.feeders[id] = Feeder(id, t, 0.0);
    double total_rate = 0.0;
    for (const auto& ev :
         SamplePopulation(seed + (id == "F2"), 3, s.horizon, SamplerConfig{}, id)) {
      s.evs[ev.id] = ev;
      total_rate += ev.max_rate;
    }
    s.feeders[id].flow_max = 0.8 * total_rate;
  }
  return s;
}

TEST(AggregateNetworkTest, Additivity) {
  const auto s = TwoFeeders(3, 5);
  const auto roots = BuildForest(s);
  ASSERT_EQ(roots.size(), 2u);
  const auto network = AggregateNetwork(roots, s.horizon);
  const auto full = SubsetMask::Full(5);
  EXPECT_NEAR(network.lower()(full),
              AggregateNode(roots[0]).lower()(full) +
                  AggregateNode(roots[1]).lower()(full),
              1e-12);
  const std::vector<FeederNode> one = {roots[0]};
  const auto single = AggregateNetwork(one, s.horizon);
  for (std::uint64_t bits = 0; bits < 32; ++bits) {
    const auto a = SubsetMask::FromBits(5, bits);
    EXPECT_EQ(single.upper()(a), AggregateNode(roots[0]).upper()(a));
  }
  const auto none = AggregateNetwork({}, s.horizon);
  EXPECT_TRUE(Contains(none, Profile({0, 0, 0, 0, 0})));
}

TEST(BuildForestTest, NestedFeeders) {
  Scenario s = TwoFeeders(5, 4);
  s.feeders["F2"].parent = "F1";
  s.feeders["F1"].flow_max = 1000.0;
  const auto roots = BuildForest(s);
  ASSERT_EQ(roots.size(), 1u);
  EXPECT_EQ(roots[0].children().size(), 1u);
  EXPECT_EQ(roots[0].Depth(), 2u);
  EXPECT_EQ(roots[0].EvCount(), 6u);
}

TEST(AggregateNodeTest, MatchesLpWithBox) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> kw(0.0, 12.0);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t t = 3 + trial % 3;
    const auto s = TwoFeeders(rng(), t);
    const auto roots = BuildForest(s);
    const auto& node = roots[0];
    const auto g = AggregateNode(node);
    const auto box = DeriveBox(node.spec());
    const oracle::BoxLimits limits{box.lower, box.upper};
    for (int k = 0; k < 30; ++k) {
      std::vector<double> u(t);
      for (double& x : u) x = kw(rng);
      EXPECT_EQ(Contains(g, Profile(u)),
                oracle::MembershipByLp(node.evs(), s.horizon, Profile(u), limits));
    }
  }
}

}  // namespace
}  // namespace evflex
