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

#ifndef AUTOLIFT__PIPELINE_HPP_
#define AUTOLIFT__PIPELINE_HPP_

#include "json.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "autolift/eval.hpp"
#include "autolift/ingest.hpp"
#include "autolift/mht.hpp"
#include "autolift/prior.hpp"
#include "autolift/score.hpp"
#include "autolift/taxonomy.hpp"

namespace autolift::pipeline
{

struct PipelineConfig
{
  Taxonomy taxonomy = Taxonomy::defaults();
  mht::SearchConfig search;
  score::ScoringConfig scoring;
  prior::RoutingConfig routing;
  eval::EvalConfig eval;
  ingest::PointStride sweep_format = ingest::PointStride::xyzi;
  std::size_t threads = 0;  // 0 = hardware concurrency
  std::uint64_t seed = 0;
  bool use_masks = true;
  bool track_refinement = true;

  void validate() const;
  /// Missing keys keep their defaults; unknown keys are rejected.
  static PipelineConfig from_json(const nlohmann::json & j);
  nlohmann::json to_json() const;
};

/// Overrides prior routing for one detection (index into the detection list).
using PriorProvider =
  std::function<std::optional<prior::SemanticPrior>(const ingest::Detection2D &, std::size_t)>;

struct SkippedDetection
{
  std::size_t detection = 0;
  std::string reason;
};

struct AnnotateResult
{
  /// Frame order, then detection order within a frame.
  std::vector<ingest::ScoredAnnotation> annotations;
  std::vector<std::size_t> source_detection;  // per annotation
  std::vector<SkippedDetection> skipped;
  std::size_t per_instance_priors = 0;
  std::size_t class_average_priors = 0;
};

AnnotateResult run_annotate(
  const ingest::Scene & scene, const std::vector<ingest::Detection2D> & detections,
  const prior::ExpertIndex & expert, const PipelineConfig & cfg,
  const PriorProvider & prior_override = {});

/// Track refinement over a flat annotation list; frame order comes from the
/// manifest timestamps. Annotations on unknown frames raise invalid_argument.
std::vector<ingest::ScoredAnnotation> refine_annotations(
  const std::vector<ingest::ScoredAnnotation> & annotations,
  const ingest::SceneManifest & manifest, const Taxonomy & taxonomy);

}  // namespace autolift::pipeline

#endif  // AUTOLIFT__PIPELINE_HPP_
