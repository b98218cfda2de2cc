// Copyright 2026 The autolift Authors
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


#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "autolift/aggregate.hpp"
#include "test_util.hpp"

namespace
{

using autolift::AggregationStrategy;
using autolift::geom::RigidTransform;
using autolift::geom::Vec3;
namespace aggregate = autolift::aggregate;
namespace ingest = autolift::ingest;
namespace t = autolift::testing;

std::vector<ingest::SweepFrame> random_sequence(std::mt19937_64 & rng, int sweeps)
{
  std::vector<ingest::SweepFrame> seq(sweeps);
  const RigidTransform sensor = RigidTransform::from_yaw(0.02, {0.9, 0.0, 1.8});
  for (int j = 0; j < sweeps; ++j) {
    auto & s = seq[j];
    s.frame_id = "s" + std::to_string(j);
    s.timestamp_us = 50000LL * j;
    s.ego_pose = RigidTransform::from_yaw(t::uniform(rng, -0.3, 0.3),
        {2.0 * j + t::uniform(rng, -0.1, 0.1), t::uniform(rng, -1, 1), 0.0});
    s.sensor_pose = sensor;
    const int n = static_cast<int>(rng() % 50);
    for (int i = 0; i < n; ++i) {
      const Vec3 p = t::random_vec3(rng, -30, 30);
      s.points.push_back({static_cast<float>(p.x()), static_cast<float>(p.y()),
          static_cast<float>(p.z()), static_cast<float>(i)});
    }
  }
  return seq;
}

TEST(Aggregate, CurrentOnlyIsIdentity)
{
  std::mt19937_64 rng(31);
  const auto seq = random_sequence(rng, 4);
  const auto cloud = aggregate::aggregate_sweeps(seq, 2, {0, 0});
  ASSERT_EQ(cloud.points.size(), seq[2].points.size());
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    EXPECT_EQ(cloud.points[i], seq[2].points[i].xyz());
    EXPECT_EQ(cloud.sweep_index[i], 2U);
  }
}

TEST(Aggregate, IdenticalPosesConcatenate)
{
  std::mt19937_64 rng(32);
  auto seq = random_sequence(rng, 2);
  seq[1].ego_pose = seq[0].ego_pose;
  const auto cloud = aggregate::aggregate_sweeps(seq, 1, {1, 0});
  ASSERT_EQ(cloud.points.size(), seq[0].points.size() + seq[1].points.size());
  std::size_t k = 0;
  for (std::size_t j = 0; j < 2; ++j) {
    for (const auto & p : seq[j].points) {
      EXPECT_LT((cloud.points[k] - p.xyz()).norm(), 1e-12);
      EXPECT_EQ(cloud.sweep_index[k], j);
      ++k;
    }
  }
}

TEST(Aggregate, StaticPointsAlignAcrossPoses)
{
  std::mt19937_64 rng(33);
  const auto seq = random_sequence(rng, 3);
  const auto cloud = aggregate::aggregate_sweeps(seq, 1, {1, 1});
  const RigidTransform current_from_world = seq[1].world_from_lidar().inverse();
  std::size_t k = 0;
  for (std::size_t j = 0; j < 3; ++j) {
    for (const auto & p : seq[j].points) {
      const Vec3 world = seq[j].ego_pose.apply(seq[j].sensor_pose.apply(p.xyz()));
      EXPECT_LT((cloud.points[k] - current_from_world.apply(world)).norm(), 1e-6);
      ++k;
    }
  }
}

TEST(Aggregate, CountsOverClampedWindow)
{
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const auto seq = random_sequence(rng, n);
    const std::size_t idx = rng() % n;
    const AggregationStrategy strat{static_cast<int>(rng() % 5), static_cast<int>(rng() % 5)};
    const auto cloud = aggregate::aggregate_sweeps(seq, idx, strat);
    std::size_t want = 0;
    for (int j = 0; j < n; ++j) {
      if (j >= static_cast<int>(idx) - strat.past && j <= static_cast<int>(idx) + strat.future) {
        want += seq[j].points.size();
      }
    }
    EXPECT_EQ(cloud.points.size(), want);
    EXPECT_TRUE(std::is_sorted(cloud.sweep_index.begin(), cloud.sweep_index.end()));
  }
}

TEST(Aggregate, CompensationInverseRecoversPoints)
{
  std::mt19937_64 rng(35);
  const auto seq = random_sequence(rng, 5);
  for (std::size_t a = 0; a < seq.size(); ++a) {
    for (std::size_t b = 0; b < seq.size(); ++b) {
      const RigidTransform tf = aggregate::compensation(seq[a], seq[b]);
      for (const auto & p : seq[b].points) {
        EXPECT_LT((tf.inverse().apply(tf.apply(p.xyz())) - p.xyz()).norm(), 1e-9);
      }
    }
  }
}

TEST(Aggregate, Errors)
{
  EXPECT_EQ(t::error_kind_of([] {aggregate::aggregate_sweeps({}, 0, {0, 0});}),
    autolift::ErrorKind::empty_input);
  std::mt19937_64 rng(36);
  const auto seq = random_sequence(rng, 2);
  EXPECT_EQ(t::error_kind_of([&] {aggregate::aggregate_sweeps(seq, 2, {0, 0});}),
    autolift::ErrorKind::invalid_argument);
  EXPECT_EQ(t::error_kind_of([] {
      aggregate::strategy_for_class(autolift::Taxonomy::defaults(), "unicorn");
    }), autolift::ErrorKind::unknown_class);
}

}  // namespace
