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

#include <string>
#include <vector>

#include "autolift/pipeline.hpp"
#include "autolift/synth.hpp"
#include "test_util.hpp"

namespace
{

using autolift::geom::Cuboid3D;
using autolift::geom::Vec2;
namespace ingest = autolift::ingest;
namespace pipeline = autolift::pipeline;
namespace prior = autolift::prior;
namespace synth = autolift::synth;
namespace t = autolift::testing;

synth::GeneratedScene small_sequence(std::uint64_t seed)
{
  synth::SceneSpec spec;
  spec.seed = seed;
  spec.random = synth::RandomObjects{5, 8};
  spec.noise_sigma = 0.03;
  spec.timestamps_us = {0, 100000, 200000};
  spec.ego_velocity = Vec2(2.0, 0.0);
  return synth::generate_scene(spec);
}

TEST(Pipeline, ConfigJsonRoundTrip)
{
  pipeline::PipelineConfig cfg;
  cfg.search.trans_step = 0.25;
  cfg.scoring.alpha = 0.7;
  cfg.routing.sector_half_width = 0.9;
  cfg.eval.dist_thresholds = {1.0, 3.0};
  cfg.threads = 3;
  cfg.seed = 9;
  cfg.use_masks = false;
  const auto back = pipeline::PipelineConfig::from_json(cfg.to_json());
  EXPECT_EQ(back.to_json(), cfg.to_json());
  EXPECT_EQ(back.search.trans_step, 0.25);
  EXPECT_FALSE(back.use_masks);
  const auto defaults = pipeline::PipelineConfig::from_json(nlohmann::json::object());
  EXPECT_EQ(defaults.to_json(), pipeline::PipelineConfig{}.to_json());
}

TEST(Pipeline, ConfigRejectsUnknownKeys)
{
  EXPECT_EQ(t::error_kind_of([] {
      pipeline::PipelineConfig::from_json({{"serach", nlohmann::json::object()}});
    }), autolift::ErrorKind::format);
  EXPECT_EQ(t::error_kind_of([] {
      pipeline::PipelineConfig::from_json({{"search", {{"step", 1.0}}}});
    }), autolift::ErrorKind::format);
  EXPECT_EQ(t::error_kind_of([] {
      pipeline::PipelineConfig::from_json({{"use_masks", 1}});
    }), autolift::ErrorKind::format);
}

TEST(Pipeline, ConfigValidation)
{
  pipeline::PipelineConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.routing.threshold = 1.5;
  EXPECT_THROW(cfg.validate(), autolift::Error);
  cfg = {};
  cfg.routing.sector_half_width = 0.0;
  EXPECT_THROW(cfg.validate(), autolift::Error);
  cfg = {};
  cfg.routing.sector_half_width = 0.1;
  EXPECT_THROW(cfg.validate(), autolift::Error);
  cfg = {};
  cfg.scoring.alpha = -0.1;
  EXPECT_THROW(cfg.validate(), autolift::Error);
}

TEST(Pipeline, NoDetectionsNoAnnotations)
{
  const auto g = small_sequence(1);
  const auto r = pipeline::run_annotate(g.scene, {}, prior::ExpertIndex{}, {});
  EXPECT_TRUE(r.annotations.empty());
  EXPECT_TRUE(r.skipped.empty());
}

TEST(Pipeline, OutputIndependentOfThreads)
{
  const auto g = small_sequence(2);
  const prior::ExpertIndex expert(g.expert);
  std::string reference;
  for (std::size_t threads : {1U, 2U, 4U, 8U}) {
    pipeline::PipelineConfig cfg;
    cfg.threads = threads;
    const auto r = pipeline::run_annotate(g.scene, g.detections, expert, cfg);
    const std::string text = ingest::annotations_to_ndjson(r.annotations);
    if (reference.empty()) {
      reference = text;
      EXPECT_FALSE(reference.empty());
    }
    EXPECT_EQ(text, reference) << threads;
  }
}

TEST(Pipeline, AnnotationsCarryScoresTracksAndVelocity)
{
  const auto g = small_sequence(3);
  pipeline::PipelineConfig cfg;
  cfg.threads = 2;
  cfg.track_refinement = false;
  const auto raw = pipeline::run_annotate(g.scene, g.detections, prior::ExpertIndex(g.expert), cfg);
  ASSERT_EQ(raw.annotations.size(), g.detections.size());
  EXPECT_EQ(raw.per_instance_priors, g.detections.size());
  for (std::size_t i = 0; i < raw.annotations.size(); ++i) {
    const auto & a = raw.annotations[i];
    ASSERT_TRUE(a.score_2d && a.score_3d);
    EXPECT_EQ(*a.score_2d, g.detections[raw.source_detection[i]].score);
    EXPECT_DOUBLE_EQ(a.score, cfg.scoring.alpha * *a.score_2d +
      (1 - cfg.scoring.alpha) * *a.score_3d);
    EXPECT_FALSE(a.track_id);
    if (i > 0) {
      EXPECT_LE(*g.scene.manifest.sweep_index(raw.annotations[i - 1].frame_id),
        *g.scene.manifest.sweep_index(a.frame_id));
    }
  }
  cfg.track_refinement = true;
  const auto refined = pipeline::run_annotate(g.scene, g.detections,
      prior::ExpertIndex(g.expert), cfg);
  ASSERT_EQ(refined.annotations.size(), raw.annotations.size());
  for (const auto & a : refined.annotations) {
    EXPECT_TRUE(a.track_id);
    EXPECT_TRUE(a.velocity);
  }
}

TEST(Pipeline, ClassAverageFallbackWithoutExpert)
{
  const auto g = small_sequence(4);
  const auto r = pipeline::run_annotate(g.scene, g.detections, prior::ExpertIndex{}, {});
  EXPECT_EQ(r.per_instance_priors, 0U);
  EXPECT_EQ(r.class_average_priors, g.detections.size());
}

TEST(Pipeline, EmptyFrustumIsSkipped)
{
  const auto g = small_sequence(5);
  auto dets = g.detections;
  ingest::Detection2D lonely = dets.front();
  lonely.box = {0, 0, 1, 1};
  lonely.mask.reset();
  dets.push_back(lonely);
  const auto r = pipeline::run_annotate(g.scene, dets, prior::ExpertIndex{}, {});
  ASSERT_EQ(r.skipped.size(), 1U);
  EXPECT_EQ(r.skipped[0].detection, dets.size() - 1);
  EXPECT_EQ(r.skipped[0].reason, "empty_frustum");
}

TEST(Pipeline, RefineAnnotationsKeepsOrderAndChecksFrames)
{
  const auto g = small_sequence(6);
  auto shuffled = g.ground_truth;
  std::reverse(shuffled.begin(), shuffled.end());
  const auto out = pipeline::refine_annotations(shuffled, g.scene.manifest,
      autolift::Taxonomy::defaults());
  ASSERT_EQ(out.size(), shuffled.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_EQ(out[i].cuboid.center, shuffled[i].cuboid.center);
    EXPECT_TRUE(out[i].track_id);
  }
  shuffled.front().frame_id = "nope";
  EXPECT_EQ(t::error_kind_of([&] {
      pipeline::refine_annotations(shuffled, g.scene.manifest, autolift::Taxonomy::defaults());
    }), autolift::ErrorKind::invalid_argument);
}

TEST(Pipeline, UnknownCameraRejected)
{
  const auto g = small_sequence(7);
  auto dets = g.detections;
  dets[0].camera_id = "rear";
  EXPECT_EQ(t::error_kind_of([&] {
      pipeline::run_annotate(g.scene, dets, prior::ExpertIndex{}, {});
    }), autolift::ErrorKind::unknown_camera);
}

}  // namespace
