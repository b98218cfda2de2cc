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

#include "autolift/prior.hpp"
#include "test_util.hpp"

namespace
{

using autolift::geom::kPi;
using autolift::geom::RigidTransform;
using autolift::geom::Vec3;
namespace geom = autolift::geom;
namespace ingest = autolift::ingest;
namespace prior = autolift::prior;
namespace t = autolift::testing;
using prior::Face;

RigidTransform forward_camera()
{
  RigidTransform tf;
  tf.rotation << 0, 0, 1,
    -1, 0, 0,
    0, -1, 0;
  tf.translation = {1.5, 0.0, 1.6};
  return tf;
}

prior::ExpertRecord record(std::vector<Face> faces)
{
  prior::ExpertRecord r;
  r.frame_id = "f";
  r.camera_id = "front";
  r.box = {10, 20, 110, 220};
  r.dims = {4.0, 1.8, 1.5};
  r.visible_faces = std::move(faces);
  return r;
}

ingest::Detection2D detection(double score)
{
  ingest::Detection2D d;
  d.frame_id = "f";
  d.camera_id = "front";
  d.class_label = "car";
  d.box = {10, 20, 110, 220};
  d.score = score;
  return d;
}

TEST(Prior, OrientationExamples)
{
  const RigidTransform id = RigidTransform::identity();
  const RigidTransform cam = forward_camera();
  EXPECT_NEAR(prior::derive_orientation(record({Face::back}), cam, id), 0.0, 1e-12);
  EXPECT_NEAR(prior::derive_orientation(record({Face::front}), cam, id), kPi, 1e-12);
  EXPECT_NEAR(prior::derive_orientation(record({Face::left}), cam, id), kPi / 2, 1e-12);
  EXPECT_NEAR(prior::derive_orientation(record({Face::right}), cam, id), -kPi / 2, 1e-12);
  EXPECT_NEAR(prior::derive_orientation(record({Face::back, Face::right}), cam, id), -kPi / 4,
    1e-12);
}

TEST(Prior, OppositeFacesFallBackToCanonicalFirst)
{
  const RigidTransform id = RigidTransform::identity();
  EXPECT_NEAR(prior::derive_orientation(record({Face::back, Face::front}), forward_camera(), id),
    kPi, 1e-12);
  EXPECT_NEAR(prior::derive_orientation(record({Face::right, Face::left}), forward_camera(), id),
    kPi / 2, 1e-12);
  EXPECT_EQ(t::error_kind_of([&] {
      prior::derive_orientation(record({}), forward_camera(), id);
    }), autolift::ErrorKind::invalid_argument);
}

TEST(Prior, OrientationFollowsLidarExtrinsics)
{
  const RigidTransform lidar = RigidTransform::from_yaw(kPi / 2, {0, 0, 1.8});
  EXPECT_NEAR(prior::derive_orientation(record({Face::back}), forward_camera(), lidar), -kPi / 2,
    1e-12);
}

TEST(Prior, OrientationRotatesWithCamera)
{
  std::mt19937_64 rng(41);
  const std::vector<std::vector<Face>> sets = {{Face::back}, {Face::front}, {Face::left},
    {Face::right}, {Face::back, Face::left}, {Face::front, Face::right},
    {Face::front, Face::left, Face::back}};
  for (int i = 0; i < 500; ++i) {
    const RigidTransform lidar = RigidTransform::from_yaw(t::uniform(rng, -kPi, kPi),
        t::random_vec3(rng, -2, 2));
    const RigidTransform cam = RigidTransform::from_yaw(t::uniform(rng, -kPi, kPi),
        Vec3::Zero()) * forward_camera();
    const double phi = t::uniform(rng, -10, 10);
    // Rotation about the lidar z axis, written in the ego frame.
    const RigidTransform spin = lidar * RigidTransform::from_yaw(phi, Vec3::Zero()) *
      lidar.inverse();
    const auto & faces = sets[i % sets.size()];
    const double a = prior::derive_orientation(record(faces), cam, lidar);
    const double b = prior::derive_orientation(record(faces), spin * cam, lidar);
    EXPECT_GT(a, -kPi);
    EXPECT_LE(a, kPi);
    EXPECT_LT(geom::yaw_diff(b, a + phi), 1e-9);
  }
}

TEST(Prior, ExpertIndexRoundsToTenthPixel)
{
  auto a = record({Face::back});
  auto b = record({Face::front});
  b.box = {300, 20, 400, 220};
  auto dup = record({Face::left});
  const prior::ExpertIndex index({a, b, dup});
  ASSERT_NE(index.find("f", "front", {10.04, 20, 110, 219.96}), nullptr);
  EXPECT_EQ(index.find("f", "front", {10.04, 20, 110, 219.96})->visible_faces,
    std::vector<Face>{Face::back});
  EXPECT_EQ(index.find("f", "front", {10.2, 20, 110, 220}), nullptr);
  EXPECT_EQ(index.find("f", "rear", {10, 20, 110, 220}), nullptr);
  EXPECT_NE(index.find("f", "front", {300, 20, 400, 220}), nullptr);
}

TEST(Prior, RoutingRules)
{
  const auto tax = autolift::Taxonomy::defaults();
  const auto rec = record({Face::back});
  const RigidTransform id = RigidTransform::identity();
  prior::RoutingConfig cfg;
  cfg.threshold = 0.5;
  cfg.sector_half_width = 0.4;

  auto p = prior::route(detection(0.5), &rec, tax, forward_camera(), id, cfg);
  EXPECT_EQ(p.source, prior::PriorSource::per_instance);
  EXPECT_EQ(p.dims, rec.dims);
  ASSERT_TRUE(p.orientation);
  EXPECT_NEAR(*p.orientation, 0.0, 1e-12);
  EXPECT_EQ(p.sector_half_width, 0.4);

  p = prior::route(detection(0.49), &rec, tax, forward_camera(), id, cfg);
  EXPECT_EQ(p.source, prior::PriorSource::class_average);
  EXPECT_EQ(p.dims, tax.at("car").avg_dims);
  EXPECT_FALSE(p.orientation);
  EXPECT_EQ(p.sector_half_width, kPi);

  p = prior::route(detection(0.99), nullptr, tax, forward_camera(), id, cfg);
  EXPECT_EQ(p.source, prior::PriorSource::class_average);

  auto d = detection(0.9);
  d.class_label = "unicorn";
  EXPECT_EQ(t::error_kind_of([&] {prior::route(d, &rec, tax, forward_camera(), id, cfg);}),
    autolift::ErrorKind::unknown_class);
}

TEST(Prior, RoutedDimsArePositive)
{
  const auto tax = autolift::Taxonomy::defaults();
  std::mt19937_64 rng(42);
  for (int i = 0; i < 1000; ++i) {
    auto d = detection(t::uniform(rng, 0, 1));
    d.class_label = tax.names()[rng() % tax.names().size()];
    auto rec = record({static_cast<Face>(rng() % 4)});
    rec.dims = t::random_vec3(rng, -1, 5);
    const bool with = rng() % 2;
    const auto p = prior::route(d, with ? &rec : nullptr, tax, forward_camera(),
        RigidTransform::identity());
    EXPECT_GT(p.dims.minCoeff(), 0.0);
    EXPECT_GT(p.sector_half_width, 0.0);
    EXPECT_LE(p.sector_half_width, kPi);
  }
}

}  // namespace
