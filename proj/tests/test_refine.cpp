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

#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "autolift/refine.hpp"
#include "test_util.hpp"

namespace
{

using autolift::Taxonomy;
using autolift::geom::Cuboid3D;
using autolift::geom::Vec2;
using autolift::geom::Vec3;
namespace ingest = autolift::ingest;
namespace refine = autolift::refine;
namespace t = autolift::testing;

ingest::ScoredAnnotation ann(const std::string & cls, double x, double y, double score = 0.5)
{
  ingest::ScoredAnnotation a;
  a.frame_id = "f";
  a.class_label = cls;
  a.cuboid = Cuboid3D::make({x, y, 0}, {1, 1, 1}, 0.0);
  a.score = score;
  return a;
}

using Member = std::pair<std::size_t, std::size_t>;  // (frame, annotation)

std::set<std::set<Member>> partition(const std::vector<refine::Track> & tracks)
{
  std::set<std::set<Member>> out;
  for (const auto & tr : tracks) {
    std::set<Member> s;
    for (const auto & m : tr.members) {
      s.insert({m.frame, m.annotation});
    }
    out.insert(s);
  }
  return out;
}

// Objects on a 12 m lattice moving less than 1 m per frame, with some
// appearing late or leaving early; `identity` holds the generating object.
struct Crowd
{
  std::vector<refine::Frame> frames;
  std::vector<std::vector<int>> identity;
};

Crowd crowded_scene(std::mt19937_64 & rng, int frames, int objects)
{
  const std::vector<std::string> classes{"car", "adult", "bicycle"};
  std::vector<Vec2> start(objects), vel(objects);
  std::vector<int> first(objects), last(objects);
  for (int o = 0; o < objects; ++o) {
    start[o] = Vec2(12.0 * (o % 10), 12.0 * (o / 10));
    vel[o] = Vec2(t::uniform(rng, -6, 6), t::uniform(rng, -6, 6)) / std::sqrt(2.0);
    first[o] = static_cast<int>(rng() % 3);
    last[o] = frames - 1 - static_cast<int>(rng() % 3);
  }
  Crowd c;
  for (int f = 0; f < frames; ++f) {
    refine::Frame fr;
    fr.timestamp_us = 100000LL * f;
    c.identity.emplace_back();
    std::vector<int> order(objects);
    for (int o = 0; o < objects; ++o) {
      order[o] = o;
    }
    std::shuffle(order.begin(), order.end(), rng);
    for (const int o : order) {
      if (f < first[o] || f > last[o]) {
        continue;
      }
      const Vec2 p = start[o] + vel[o] * 0.1 * f;
      fr.annotations.push_back(ann(classes[o % 3], p.x(), p.y(), t::uniform(rng, 0, 1)));
      c.identity.back().push_back(o);
    }
    c.frames.push_back(std::move(fr));
  }
  return c;
}

TEST(Refine, SingleFrameGivesSingletons)
{
  std::vector<refine::Frame> frames{{0, {ann("car", 0, 0), ann("car", 0.5, 0)}}};
  const auto tracks = refine::associate(frames, Taxonomy::defaults());
  ASSERT_EQ(tracks.size(), 2U);
  EXPECT_EQ(tracks[0].track_id, 0);
  EXPECT_EQ(tracks[1].track_id, 1);
  EXPECT_EQ(tracks[0].members.size(), 1U);
}

TEST(Refine, StaticObjectMakesOneTrack)
{
  std::vector<refine::Frame> frames{{0, {ann("car", 3, 4)}}, {500000, {ann("car", 3, 4)}}};
  const auto tracks = refine::associate(frames, Taxonomy::defaults());
  ASSERT_EQ(tracks.size(), 1U);
  EXPECT_EQ(tracks[0].members.size(), 2U);
  EXPECT_EQ(tracks[0].members[1].timestamp_us, 500000);
}

TEST(Refine, RadiusAndClassGate)
{
  std::vector<refine::Frame> frames{
    {0, {ann("car", 0, 0), ann("adult", 10, 0)}},
    {1, {ann("car", 2.5, 0), ann("car", 10, 0)}}};
  const auto tracks = refine::associate(frames, Taxonomy::defaults());
  EXPECT_EQ(tracks.size(), 4U);
  frames[1].annotations[0] = ann("car", 2.0, 0);
  EXPECT_EQ(refine::associate(frames, Taxonomy::defaults()).size(), 3U);
}

TEST(Refine, GreedyTakesClosestPairFirst)
{
  std::vector<refine::Frame> frames{
    {0, {ann("car", 0, 0), ann("car", 1.5, 0)}},
    {1, {ann("car", 1.0, 0)}}};
  const auto tracks = refine::associate(frames, Taxonomy::defaults());
  ASSERT_EQ(tracks.size(), 2U);
  EXPECT_EQ(tracks[1].members.size(), 2U);
}

TEST(Refine, GapEndsTrack)
{
  std::vector<refine::Frame> frames{{0, {ann("car", 0, 0)}}, {1, {}}, {2, {ann("car", 0, 0)}}};
  EXPECT_EQ(refine::associate(frames, Taxonomy::defaults()).size(), 2U);
}

TEST(Refine, RejectsUnorderedFrames)
{
  std::vector<refine::Frame> frames{{5, {}}, {5, {}}};
  EXPECT_EQ(t::error_kind_of([&] {refine::associate(frames, Taxonomy::defaults());}),
    autolift::ErrorKind::invalid_argument);
}

TEST(Refine, CrowdedSceneMatchesIdentities)
{
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    const auto crowd = crowded_scene(rng, 12, 40);
    const auto tracks = refine::associate(crowd.frames, Taxonomy::defaults());
    std::set<std::set<Member>> want_sets;
    std::map<int, std::set<Member>> by_object;
    for (std::size_t f = 0; f < crowd.identity.size(); ++f) {
      for (std::size_t j = 0; j < crowd.identity[f].size(); ++j) {
        by_object[crowd.identity[f][j]].insert({f, j});
      }
    }
    for (const auto & [o, s] : by_object) {
      want_sets.insert(s);
    }
    EXPECT_EQ(partition(tracks), want_sets);
    for (const auto & tr : tracks) {
      for (const auto & m : tr.members) {
        EXPECT_EQ(crowd.frames[m.frame].annotations[m.annotation].class_label, tr.class_label);
      }
    }
  }
}

TEST(Refine, TimeReversalKeepsPartition)
{
  std::mt19937_64 rng(72);
  for (int trial = 0; trial < 20; ++trial) {
    const auto crowd = crowded_scene(rng, 10, 30);
    std::vector<refine::Frame> reversed(crowd.frames.rbegin(), crowd.frames.rend());
    for (auto & f : reversed) {
      f.timestamp_us = -f.timestamp_us;
    }
    const std::size_t n = crowd.frames.size();
    std::set<std::set<Member>> back;
    for (const auto & s : partition(refine::associate(reversed, Taxonomy::defaults()))) {
      std::set<Member> mapped;
      for (const auto & [f, j] : s) {
        mapped.insert({n - 1 - f, j});
      }
      back.insert(mapped);
    }
    EXPECT_EQ(back, partition(refine::associate(crowd.frames, Taxonomy::defaults())));
  }
}

TEST(Refine, ScoresAveragePerTrack)
{
  std::vector<refine::Frame> frames{
    {0, {ann("car", 0, 0, 0.2), ann("adult", 20, 0, 0.9)}},
    {1, {ann("car", 0, 0, 0.4)}},
    {2, {ann("car", 0, 0, 0.6)}}};
  const auto tracks = refine::associate(frames, Taxonomy::defaults());
  refine::refine_scores(tracks, frames);
  EXPECT_NEAR(frames[0].annotations[0].score, 0.4, 1e-15);
  EXPECT_NEAR(frames[2].annotations[0].score, 0.4, 1e-15);
  EXPECT_EQ(frames[0].annotations[1].score, 0.9);
}

TEST(Refine, ScoreSumConserved)
{
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 20; ++trial) {
    auto crowd = crowded_scene(rng, 8, 25);
    const auto tracks = refine::associate(crowd.frames, Taxonomy::defaults());
    std::vector<double> before;
    std::size_t count = 0;
    for (const auto & tr : tracks) {
      double s = 0;
      for (const auto & m : tr.members) {
        s += crowd.frames[m.frame].annotations[m.annotation].score;
      }
      before.push_back(s);
    }
    for (const auto & f : crowd.frames) {
      count += f.annotations.size();
    }
    refine::refine_scores(tracks, crowd.frames);
    std::size_t after_count = 0;
    for (const auto & f : crowd.frames) {
      after_count += f.annotations.size();
    }
    EXPECT_EQ(after_count, count);
    for (std::size_t k = 0; k < tracks.size(); ++k) {
      double s = 0;
      for (const auto & m : tracks[k].members) {
        s += crowd.frames[m.frame].annotations[m.annotation].score;
      }
      EXPECT_NEAR(s, before[k], 1e-12);
    }
  }
}

TEST(Refine, VelocityExamples)
{
  std::vector<refine::Frame> frames;
  for (int f = 0; f < 6; ++f) {
    const double ts = 0.37 * f + 0.01 * f * f;  // uneven spacing
    frames.push_back({static_cast<std::int64_t>(std::llround(ts * 1e6)),
        {ann("car", 5 + 1.0 * ts, -2 + 0.5 * ts), ann("adult", 30, 30)}});
  }
  // Keep positions exactly linear in the stored integer timestamps.
  for (auto & fr : frames) {
    const double ts = fr.timestamp_us * 1e-6;
    fr.annotations[0].cuboid.center = Vec3(5 + 1.0 * ts, -2 + 0.5 * ts, 0);
  }
  const auto tracks = refine::associate(frames, Taxonomy::defaults());
  ASSERT_EQ(tracks.size(), 2U);
  for (const auto & tr : tracks) {
    const auto v = refine::estimate_velocity(tr, frames);
    ASSERT_EQ(v.size(), 6U);
    const Vec2 want = tr.class_label == "car" ? Vec2(1.0, 0.5) : Vec2(0, 0);
    for (const auto & vi : v) {
      ASSERT_TRUE(vi);
      EXPECT_LT((*vi - want).cwiseAbs().maxCoeff(), 1e-9);
    }
  }
  std::vector<refine::Frame> single{{0, {ann("car", 0, 0)}}};
  const auto lone = refine::associate(single, Taxonomy::defaults());
  EXPECT_FALSE(refine::estimate_velocity(lone[0], single)[0]);
}

TEST(Refine, SequenceWritesIdsAndVelocities)
{
  std::vector<refine::Frame> frames{
    {0, {ann("car", 0, 0, 0.2)}}, {500000, {ann("car", 1, 0, 0.4)}}};
  refine::refine_sequence(frames, Taxonomy::defaults());
  for (const auto & f : frames) {
    EXPECT_EQ(f.annotations[0].track_id, 0);
    ASSERT_TRUE(f.annotations[0].velocity);
    EXPECT_NEAR(f.annotations[0].velocity->x(), 2.0, 1e-12);
    EXPECT_NEAR(f.annotations[0].score, 0.3, 1e-15);
  }
}

}  // namespace
