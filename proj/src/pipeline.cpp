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

#include "autolift/pipeline.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include "autolift/aggregate.hpp"
#include "autolift/error.hpp"
#include "autolift/frustum.hpp"
#include "autolift/json_util.hpp"
#include "autolift/parallel.hpp"
#include "autolift/refine.hpp"

namespace autolift::pipeline
{

namespace ju = json_util;
using json = nlohmann::json;

void PipelineConfig::validate() const
{
  search.validate();
  scoring.validate();
  eval.validate();
  if (!(routing.threshold >= 0.0 && routing.threshold <= 1.0)) {
    throw Error(ErrorKind::invalid_argument, "routing threshold must lie in [0, 1]");
  }
  if (!(routing.sector_half_width > 0.0 && routing.sector_half_width <= geom::kPi)) {
    throw Error(ErrorKind::invalid_argument, "sector_half_width must lie in (0, pi]");
  }
  if (search.rot_step > 2.0 * routing.sector_half_width) {
    throw Error(ErrorKind::invalid_argument, "rot_step exceeds the sector width");
  }
}

namespace
{

bool boolean(const json & j, const char * key)
{
  const json & v = ju::field(j, key);
  if (!v.is_boolean()) {
    throw Error(ErrorKind::format, std::string("'") + key + "' must be a boolean");
  }
  return v.get<bool>();
}

std::uint64_t non_negative(const json & j, const char * key)
{
  const std::int64_t v = ju::integer(j, key);
  if (v < 0) {
    throw Error(ErrorKind::invalid_argument, std::string("'") + key + "' must be >= 0");
  }
  return static_cast<std::uint64_t>(v);
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const json & j)
{
  ju::require_object(j, "config");
  ju::reject_unknown_keys(j,
    {"taxonomy", "search", "scoring", "routing", "eval", "sweep_format", "threads", "seed",
      "use_masks", "track_refinement"},
    "config");
  PipelineConfig c;
  if (j.contains("taxonomy")) {
    c.taxonomy = Taxonomy::from_json(j["taxonomy"]);
  }
  if (j.contains("search")) {
    const json & s = j["search"];
    ju::require_object(s, "search");
    ju::reject_unknown_keys(s, {"trans_step", "rot_step", "xy_range", "z_range"}, "search");
    if (s.contains("trans_step")) {c.search.trans_step = ju::finite_number(s, "trans_step");}
    if (s.contains("rot_step")) {c.search.rot_step = ju::finite_number(s, "rot_step");}
    if (s.contains("xy_range")) {c.search.xy_range = ju::finite_number(s, "xy_range");}
    if (s.contains("z_range")) {c.search.z_range = ju::finite_number(s, "z_range");}
  }
  if (j.contains("scoring")) {
    const json & s = j["scoring"];
    ju::require_object(s, "scoring");
    ju::reject_unknown_keys(s, {"grid_k", "alpha"}, "scoring");
    if (s.contains("grid_k")) {c.scoring.grid_k = static_cast<int>(ju::integer(s, "grid_k"));}
    if (s.contains("alpha")) {c.scoring.alpha = ju::finite_number(s, "alpha");}
  }
  if (j.contains("routing")) {
    const json & s = j["routing"];
    ju::require_object(s, "routing");
    ju::reject_unknown_keys(s, {"threshold", "sector_half_width"}, "routing");
    if (s.contains("threshold")) {c.routing.threshold = ju::finite_number(s, "threshold");}
    if (s.contains("sector_half_width")) {
      c.routing.sector_half_width = ju::finite_number(s, "sector_half_width");
    }
  }
  if (j.contains("eval")) {
    const json & s = j["eval"];
    ju::require_object(s, "eval");
    ju::reject_unknown_keys(s,
      {"dist_thresholds", "tp_threshold", "min_recall", "min_precision", "classes"}, "eval");
    if (s.contains("dist_thresholds")) {
      const json & a = s["dist_thresholds"];
      if (!a.is_array() || a.empty()) {
        throw Error(ErrorKind::format, "'dist_thresholds' must be a nonempty array");
      }
      c.eval.dist_thresholds.clear();
      for (const auto & v : a) {
        c.eval.dist_thresholds.push_back(ju::finite_number(v));
      }
    }
    if (s.contains("tp_threshold")) {c.eval.tp_threshold = ju::finite_number(s, "tp_threshold");}
    if (s.contains("min_recall")) {c.eval.min_recall = ju::finite_number(s, "min_recall");}
    if (s.contains("min_precision")) {
      c.eval.min_precision = ju::finite_number(s, "min_precision");
    }
    if (s.contains("classes")) {
      const json & a = s["classes"];
      if (!a.is_array()) {
        throw Error(ErrorKind::format, "'classes' must be an array of strings");
      }
      for (const auto & v : a) {
        if (!v.is_string()) {
          throw Error(ErrorKind::format, "'classes' must be an array of strings");
        }
        c.eval.classes.push_back(v.get<std::string>());
      }
    }
  }
  if (j.contains("sweep_format")) {
    c.sweep_format = ingest::stride_from_int(static_cast<int>(ju::integer(j, "sweep_format")));
  }
  if (j.contains("threads")) {c.threads = non_negative(j, "threads");}
  if (j.contains("seed")) {c.seed = non_negative(j, "seed");}
  if (j.contains("use_masks")) {c.use_masks = boolean(j, "use_masks");}
  if (j.contains("track_refinement")) {c.track_refinement = boolean(j, "track_refinement");}
  c.validate();
  return c;
}

json PipelineConfig::to_json() const
{
  return {
    {"taxonomy", taxonomy.to_json()},
    {"search", {{"trans_step", search.trans_step}, {"rot_step", search.rot_step},
      {"xy_range", search.xy_range}, {"z_range", search.z_range}}},
    {"scoring", {{"grid_k", scoring.grid_k}, {"alpha", scoring.alpha}}},
    {"routing", {{"threshold", routing.threshold},
      {"sector_half_width", routing.sector_half_width}}},
    {"eval", {{"dist_thresholds", eval.dist_thresholds}, {"tp_threshold", eval.tp_threshold},
      {"min_recall", eval.min_recall}, {"min_precision", eval.min_precision},
      {"classes", eval.classes}}},
    {"sweep_format", static_cast<int>(sweep_format)},
    {"threads", threads},
    {"seed", seed},
    {"use_masks", use_masks},
    {"track_refinement", track_refinement},
  };
}

namespace
{

using CloudKey = std::tuple<std::size_t, int, int>;

struct DetectionOutcome
{
  std::optional<ingest::ScoredAnnotation> annotation;
  std::string skip_reason;
  prior::PriorSource source = prior::PriorSource::class_average;
};

}  // namespace

AnnotateResult run_annotate(
  const ingest::Scene & scene, const std::vector<ingest::Detection2D> & detections,
  const prior::ExpertIndex & expert, const PipelineConfig & cfg,
  const PriorProvider & prior_override)
{
  cfg.validate();
  const auto & manifest = scene.manifest;
  if (scene.sweeps.size() != manifest.sweeps.size()) {
    throw Error(ErrorKind::invalid_argument, "scene sweeps do not match the manifest");
  }
  ingest::validate_detections(detections, manifest);

  std::vector<std::size_t> frame_of(detections.size());
  std::map<CloudKey, std::size_t> cloud_slot;
  std::vector<CloudKey> cloud_keys;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    frame_of[i] = *manifest.sweep_index(detections[i].frame_id);
    const auto s = aggregate::strategy_for_class(cfg.taxonomy, detections[i].class_label);
    const CloudKey key{frame_of[i], s.past, s.future};
    if (cloud_slot.emplace(key, cloud_keys.size()).second) {
      cloud_keys.push_back(key);
    }
  }

  const std::size_t threads = resolve_threads(cfg.threads);
  std::vector<aggregate::AggregatedCloud> clouds(cloud_keys.size());
  parallel_for(cloud_keys.size(), threads, [&](std::size_t k) {
      const auto & [idx, past, future] = cloud_keys[k];
      clouds[k] = aggregate::aggregate_sweeps(scene.sweeps, idx, AggregationStrategy{past, future});
    });

  std::vector<DetectionOutcome> outcomes(detections.size());
  parallel_for(detections.size(), threads, [&](std::size_t i) {
      const auto & det = detections[i];
      const auto s = aggregate::strategy_for_class(cfg.taxonomy, det.class_label);
      const auto & cloud = clouds[cloud_slot.at(CloudKey{frame_of[i], s.past, s.future})];
      const auto view = frustum::camera_view(manifest, det.camera_id);
      auto fp = frustum::extract_frustum(cloud.points, i, det, view);
      fp = frustum::filter_foreground(std::move(fp),
        cfg.use_masks ? det.mask : std::optional<BinaryMask>{});
      const auto fg = fp.foreground();
      auto & out = outcomes[i];
      std::optional<prior::SemanticPrior> pr;
      if (prior_override) {
        pr = prior_override(det, i);
      }
      if (!pr) {
        pr = prior::route(det, expert.find(det.frame_id, det.camera_id, det.box), cfg.taxonomy,
          manifest, cfg.routing);
      }
      out.source = pr->source;
      const auto init = mht::init_hypothesis(fg, *pr);
      if (!init) {
        out.skip_reason = "empty_frustum";
        return;
      }
      const auto grid = mht::enumerate_hypotheses(*init, *pr, cfg.search);
      const auto best = mht::select_best(grid, *init, fg, det.box, view, 1);
      const double s3d = score::occupancy_rate(best.cuboid, cloud.points, cfg.scoring.grid_k);
      const double s2d = std::clamp(det.score, 0.0, 1.0);

      const auto world_from_lidar = scene.sweeps[frame_of[i]].world_from_lidar();
      ingest::ScoredAnnotation ann;
      ann.frame_id = det.frame_id;
      ann.class_label = det.class_label;
      ann.cuboid = geom::Cuboid3D::make(world_from_lidar.apply(best.cuboid.center),
        best.cuboid.dims, best.cuboid.yaw + world_from_lidar.yaw());
      ann.score_2d = s2d;
      ann.score_3d = s3d;
      ann.score = score::fuse_score(s2d, s3d, cfg.scoring.alpha);
      out.annotation = std::move(ann);
    });

  AnnotateResult result;
  std::vector<std::size_t> order(detections.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return frame_of[a] < frame_of[b];
    });
  for (const std::size_t i : order) {
    auto & o = outcomes[i];
    if (o.source == prior::PriorSource::per_instance) {
      ++result.per_instance_priors;
    } else {
      ++result.class_average_priors;
    }
    if (!o.annotation) {
      result.skipped.push_back({i, o.skip_reason});
      continue;
    }
    result.annotations.push_back(std::move(*o.annotation));
    result.source_detection.push_back(i);
  }
  if (cfg.track_refinement) {
    result.annotations = refine_annotations(result.annotations, manifest, cfg.taxonomy);
  }
  std::sort(result.skipped.begin(), result.skipped.end(),
    [](const SkippedDetection & a, const SkippedDetection & b) {return a.detection < b.detection;});
  return result;
}

std::vector<ingest::ScoredAnnotation> refine_annotations(
  const std::vector<ingest::ScoredAnnotation> & annotations,
  const ingest::SceneManifest & manifest, const Taxonomy & taxonomy)
{
  std::vector<refine::Frame> frames(manifest.sweeps.size());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    frames[f].timestamp_us = manifest.sweeps[f].timestamp_us;
  }
  // Position of each input annotation as (frame, slot) so that the output
  // keeps the input order.
  std::vector<std::pair<std::size_t, std::size_t>> where(annotations.size());
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const auto idx = manifest.sweep_index(annotations[i].frame_id);
    if (!idx) {
      throw Error(ErrorKind::invalid_argument,
              "annotation references unknown frame '" + annotations[i].frame_id + "'");
    }
    where[i] = {*idx, frames[*idx].annotations.size()};
    frames[*idx].annotations.push_back(annotations[i]);
  }
  refine::refine_sequence(frames, taxonomy);
  std::vector<ingest::ScoredAnnotation> out;
  out.reserve(annotations.size());
  for (const auto & [f, slot] : where) {
    out.push_back(frames[f].annotations[slot]);
  }
  return out;
}

}  // namespace autolift::pipeline
