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

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "autolift/mht.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace
{

using autolift::geom::Box2D;
using autolift::geom::Cuboid3D;
using autolift::geom::kInsideTolerance;
using autolift::geom::kPi;
using autolift::geom::RigidTransform;
using autolift::geom::Vec3;
namespace geom = autolift::geom;
namespace mht = autolift::mht;
namespace prior = autolift::prior;
namespace frustum = autolift::frustum;
namespace t = autolift::testing;

using autolift::testing::forward_view;
using autolift::testing::make_prior;
using autolift::testing::synthetic_detection;

TEST(Mht, CoverageExamples)
{
  const Cuboid3D c = Cuboid3D::make(Vec3::Zero(), {2, 2, 2}, 0.0);
  std::vector<Vec3> pts;
  for (int i = 0; i < 7; ++i) {
    pts.push_back({0.1 * i, 0, 0});
  }
  for (int i = 0; i < 3; ++i) {
    pts.push_back({5.0 + i, 0, 0});
  }
  EXPECT_DOUBLE_EQ(mht::coverage_ratio(pts, c), 0.7);
  EXPECT_DOUBLE_EQ(mht::coverage_ratio({}, c), 0.0);
  EXPECT_DOUBLE_EQ(mht::coverage_ratio({{1, 1, 1}, {-1, 0, 0}}, c), 1.0);
}

TEST(Mht, CoverageMatchesOracle)
{
  std::mt19937_64 rng(51);
  for (int i = 0; i < 1000; ++i) {
    const Cuboid3D c = Cuboid3D::make(t::random_vec3(rng, -3, 3), t::random_vec3(rng, 0.3, 4),
        t::uniform(rng, -kPi, kPi));
    std::vector<Vec3> pts(rng() % 40);
    for (auto & p : pts) {
      p = c.center + t::random_vec3(rng, -2.5, 2.5);
    }
    EXPECT_EQ(mht::coverage_ratio(pts, c), autolift::oracle::coverage(pts, c, kInsideTolerance));
  }
}

TEST(Mht, InitHypothesisExamples)
{
  const auto p = make_prior({4, 2, 1.5}, std::nullopt, kPi);
  EXPECT_FALSE(mht::init_hypothesis({}, p));
  auto c = mht::init_hypothesis({{1, 2, 3}}, p);
  ASSERT_TRUE(c);
  EXPECT_EQ(c->center, Vec3(1, 2, 3.75));
  EXPECT_EQ(c->dims, Vec3(4, 2, 1.5));
  EXPECT_EQ(c->yaw, 0.0);
  c = mht::init_hypothesis({{-1, 5, 0}, {1, 3, 0}, {0, 4, -2}, {100, 4, 0}, {-100, 4, 0}},
      make_prior({1, 1, 1}, 0.5, 0.3));
  EXPECT_EQ(c->center, Vec3(0, 4, -1.5));
  EXPECT_EQ(c->yaw, 0.5);
  c = mht::init_hypothesis({{1, 0, 0}, {3, 0, 0}}, p);
  EXPECT_EQ(c->center.x(), 2.0);
}

TEST(Mht, InitHypothesisNearTruth)
{
  std::mt19937_64 rng(52);
  for (int i = 0; i < 200; ++i) {
    const auto d = synthetic_detection(rng);
    const auto c = mht::init_hypothesis(d.points, make_prior(d.truth.dims, std::nullopt, kPi));
    const Vec3 diff = (c->center - d.truth.center).cwiseAbs();
    const double half_diag = 0.5 * d.truth.dims.head<2>().norm();
    EXPECT_LE(diff.head<2>().norm(), half_diag + 1e-9);
    EXPECT_LE(diff.z(), 1e-9);
  }
}

TEST(Mht, GridCounts)
{
  mht::SearchConfig cfg;
  const Cuboid3D init = Cuboid3D::make({10, 0, 0}, {4, 2, 1.5}, 0.3);
  EXPECT_EQ(mht::enumerate_hypotheses(init, make_prior(init.dims, 0.3, kPi / 6), cfg).size(),
    9U * 9U * 5U * 3U);
  EXPECT_EQ(mht::enumerate_hypotheses(init, make_prior(init.dims, 0.3, 3 * kPi / 10), cfg).size(),
    2835U);
  const auto full = mht::enumerate_hypotheses(init, make_prior(init.dims, std::nullopt, kPi), cfg);
  EXPECT_EQ(full.size(), 9U * 9U * 5U * 20U);
  std::set<double> yaws;
  for (const auto & c : full) {
    yaws.insert(c.yaw);
  }
  EXPECT_EQ(yaws.size(), 20U);

  mht::SearchConfig degenerate;
  degenerate.xy_range = 0;
  degenerate.z_range = 0;
  const auto three = mht::enumerate_hypotheses(Cuboid3D::make(Vec3::Zero(), {1, 1, 1}, 0.0),
      make_prior({1, 1, 1}, 0.0, degenerate.rot_step), degenerate);
  ASSERT_EQ(three.size(), 3U);
  EXPECT_NEAR(three[0].yaw, -degenerate.rot_step, 1e-12);
  EXPECT_EQ(three[1].yaw, 0.0);
  EXPECT_NEAR(three[2].yaw, degenerate.rot_step, 1e-12);
}

TEST(Mht, GridContainsInitAndHoldsDims)
{
  std::mt19937_64 rng(53);
  for (int i = 0; i < 100; ++i) {
    const Vec3 dims = t::random_vec3(rng, 0.3, 5);
    const double yaw = t::uniform(rng, -kPi, kPi);
    const Cuboid3D init = Cuboid3D::make(t::random_vec3(rng, -50, 50), dims, yaw);
    const double sector = (i % 2) ? kPi : t::uniform(rng, 0.01, 3.0);
    const auto grid = mht::enumerate_hypotheses(init, make_prior(dims, yaw, sector), {});
    EXPECT_NE(std::find_if(grid.begin(), grid.end(), [&](const Cuboid3D & c) {
        return c.center == init.center && c.yaw == init.yaw;
      }), grid.end());
    for (const auto & c : grid) {
      EXPECT_EQ(c.dims, dims);
      EXPECT_LE(geom::yaw_diff(c.yaw, yaw), sector + 1e-12);
    }
  }
}

TEST(Mht, SelectBestPicksArgmax)
{
  std::mt19937_64 rng(54);
  const auto view = forward_view();
  for (int i = 0; i < 30; ++i) {
    const auto d = synthetic_detection(rng, 200);
    const auto pr = make_prior(d.truth.dims, d.truth.yaw, kPi / 6);
    const auto init = *mht::init_hypothesis(d.points, pr);
    const auto grid = mht::enumerate_hypotheses(init, pr, {});
    const auto best = mht::select_best(grid, init, d.points, d.box, view, 1);
    double max_obj = -1.0;
    for (const auto & c : grid) {
      const auto h = mht::evaluate(c, d.points, d.box, view);
      EXPECT_EQ(h.objective, h.coverage + h.proj_iou);
      EXPECT_GE(h.coverage, 0.0);
      EXPECT_LE(h.coverage, 1.0);
      EXPECT_GE(h.proj_iou, 0.0);
      EXPECT_LE(h.proj_iou, 1.0);
      max_obj = std::max(max_obj, h.objective);
    }
    EXPECT_EQ(best.objective, max_obj);
    EXPECT_GE(best.objective, mht::evaluate(init, d.points, d.box, view).objective);
    EXPECT_LE(geom::yaw_diff(best.cuboid.yaw, d.truth.yaw), kPi / 6);
  }
}

TEST(Mht, SingleHypothesisGrid)
{
  const auto view = forward_view();
  const Cuboid3D c = Cuboid3D::make({10, 0, 0}, {1, 1, 1}, 0.0);
  const auto h = mht::select_best({c}, c, {}, {0, 0, 1, 1}, view, 1);
  EXPECT_EQ(h.cuboid.center, c.center);
  EXPECT_THROW(mht::select_best({}, c, {}, {0, 0, 1, 1}, view, 1), autolift::Error);
}

TEST(Mht, SelectBestIndependentOfThreadsAndOrder)
{
  std::mt19937_64 rng(55);
  const auto view = forward_view();
  for (int i = 0; i < 20; ++i) {
    const auto d = synthetic_detection(rng, 150);
    const auto pr = make_prior(d.truth.dims, std::nullopt, kPi);
    const auto init = *mht::init_hypothesis(d.points, pr);
    auto grid = mht::enumerate_hypotheses(init, pr, {});
    const auto a = mht::select_best(grid, init, d.points, d.box, view, 1);
    const auto b = mht::select_best(grid, init, d.points, d.box, view, 4);
    std::shuffle(grid.begin(), grid.end(), rng);
    const auto c = mht::select_best(grid, init, d.points, d.box, view, 3);
    for (const auto & h : {b, c}) {
      EXPECT_EQ(h.cuboid.center, a.cuboid.center);
      EXPECT_EQ(h.cuboid.yaw, a.cuboid.yaw);
      EXPECT_EQ(h.objective, a.objective);
    }
  }
}

TEST(Mht, TieBreakOrder)
{
  const Cuboid3D base = Cuboid3D::make(Vec3::Zero(), {1, 1, 1}, 0.0);
  mht::Hypothesis a{base, 0.5, 0.5, 1.0};
  mht::Hypothesis b = a;
  b.coverage = 0.6;
  b.proj_iou = 0.4;
  EXPECT_TRUE(mht::better(b, a, 0.0));
  b = a;
  b.cuboid.yaw = 0.1;
  EXPECT_TRUE(mht::better(a, b, 0.0));
  EXPECT_TRUE(mht::better(b, a, 0.1));
  b = a;
  b.cuboid.center.y() = -1;
  EXPECT_TRUE(mht::better(b, a, 0.0));
  EXPECT_FALSE(mht::better(a, a, 0.0));
}

TEST(Mht, NestedGridMonotone)
{
  std::mt19937_64 rng(56);
  const auto view = forward_view();
  for (int i = 0; i < 20; ++i) {
    const auto d = synthetic_detection(rng, 150);
    const auto pr = (i % 2) ? make_prior(d.truth.dims, std::nullopt, kPi) :
      make_prior(d.truth.dims, d.truth.yaw, kPi / 6);
    const auto init = *mht::init_hypothesis(d.points, pr);
    mht::SearchConfig coarse;
    mht::SearchConfig fine = coarse;
    fine.trans_step /= 2;
    fine.rot_step /= 2;
    const auto g = mht::enumerate_hypotheses(init, pr, coarse);
    const auto gf = mht::enumerate_hypotheses(init, pr, fine);
    for (const auto & c : g) {
      ASSERT_NE(std::find_if(gf.begin(), gf.end(), [&](const Cuboid3D & f) {
          return f.center == c.center && f.yaw == c.yaw;
        }), gf.end());
    }
    EXPECT_GE(mht::select_best(gf, init, d.points, d.box, view, 1).objective,
      mht::select_best(g, init, d.points, d.box, view, 1).objective);
  }
}

TEST(Mht, CanonicalizeExamples)
{
  const Cuboid3D c = Cuboid3D::make({1, 2, 3}, {1, 1, 1}, kPi / 3);
  const auto out = mht::canonicalize_points({c.center, {2, 2, 3}, {4, -1, 7}}, c);
  EXPECT_LT(out[0].norm(), 1e-15);
  const double cs = 0.5, sn = std::sqrt(3.0) / 2;
  EXPECT_LT((out[1] - Vec3(cs, -sn, 0)).norm(), 1e-12);
  EXPECT_LT((out[2] - Vec3(cs * 3 + sn * -3, -sn * 3 + cs * -3, 4)).norm(), 1e-12);
  const Cuboid3D straight = Cuboid3D::make({1, 2, 3}, {1, 1, 1}, 0.0);
  EXPECT_EQ(mht::canonicalize_points({{5, 5, 5}}, straight)[0], Vec3(4, 3, 2));
}

TEST(Mht, FeatureExamples)
{
  const auto f = mht::encode_point_features({Vec3::Zero()}, {1, 2, 3}, 0, 1);
  ASSERT_EQ(f.size(), 1U);
  EXPECT_EQ(f[0], (mht::PointFeature{0, 0, 0, 1, 2, 3, 1, 2, 3}));
  EXPECT_EQ(t::error_kind_of([] {mht::encode_point_features({}, {1, 1, 1}, 0);}),
    autolift::ErrorKind::empty_input);
}

TEST(Mht, FeatureIdentitiesAndResampling)
{
  std::mt19937_64 rng(57);
  for (const std::size_t m : {1U, 7U, 511U, 512U, 513U, 600U, 2000U}) {
    std::vector<Vec3> pts(m);
    for (auto & p : pts) {
      p = t::random_vec3(rng, -3, 3);
    }
    const Vec3 d0 = t::random_vec3(rng, 0.5, 5);
    const auto f = mht::encode_point_features(pts, d0, m);
    ASSERT_EQ(f.size(), mht::kRefinerPoints);
    std::vector<std::size_t> rows;
    for (const auto & row : f) {
      for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR(row[3 + k] + row[k], d0[k], 1e-12);
        EXPECT_NEAR(row[6 + k] - row[k], d0[k], 1e-12);
      }
      const auto it = std::find(pts.begin(), pts.end(), Vec3(row[0], row[1], row[2]));
      ASSERT_NE(it, pts.end());
      rows.push_back(static_cast<std::size_t>(it - pts.begin()));
    }
    if (m >= mht::kRefinerPoints) {
      EXPECT_TRUE(std::is_sorted(rows.begin(), rows.end()));
      EXPECT_EQ(std::set<std::size_t>(rows.begin(), rows.end()).size(), mht::kRefinerPoints);
    } else {
      EXPECT_EQ(std::set<std::size_t>(rows.begin(), rows.end()).size(), m);
    }
    EXPECT_EQ(mht::encode_point_features(pts, d0, m), f);
  }
}

TEST(Mht, DimOffsetCodec)
{
  EXPECT_EQ(mht::encode_dim_offsets({1, 2, 3}, {1, 2, 3}), Vec3::Zero());
  EXPECT_NEAR(mht::encode_dim_offsets({std::exp(1.0) * 2, 1, 1}, {2, 1, 1}).x(), 1.0, 1e-15);
  std::mt19937_64 rng(58);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 gt = t::random_vec3(rng, 0.05, 20), init = t::random_vec3(rng, 0.05, 20);
    const Vec3 back = mht::decode_dim_offsets(init, mht::encode_dim_offsets(gt, init));
    EXPECT_LT((back - gt).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_THROW(mht::encode_dim_offsets({0, 1, 1}, {1, 1, 1}), autolift::Error);
  EXPECT_THROW(mht::encode_dim_offsets({1, 1, 1}, {1, -1, 1}), autolift::Error);
}

TEST(Mht, ConfigValidation)
{
  mht::SearchConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.trans_step = 0;
  EXPECT_THROW(cfg.validate(), autolift::Error);
  cfg = {};
  cfg.rot_step = std::nan("");
  EXPECT_THROW(cfg.validate(), autolift::Error);
}

}  // namespace
