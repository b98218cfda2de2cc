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

#ifndef AUTOLIFT__EVAL_HPP_
#define AUTOLIFT__EVAL_HPP_

#include "json.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "autolift/geom.hpp"
#include "autolift/ingest.hpp"

// nuScenes-style detection metrics. Predictions and ground truth are matched
// per frame by BEV center distance; AP uses the devkit's 101-point recall
// sampling with the 0.1 recall/precision floor.
namespace autolift::eval
{

struct EvalConfig
{
  std::vector<double> dist_thresholds{0.5, 1.0, 2.0, 4.0};  // meters
  double tp_threshold = 2.0;                                // meters
  double min_recall = 0.1;
  double min_precision = 0.1;
  /// Classes to evaluate; empty means every class present in the ground truth.
  std::vector<std::string> classes;

  void validate() const;
};

struct MatchEntry
{
  std::size_t pred_index = 0;
  double score = 0.0;
  bool is_tp = false;
  std::optional<std::size_t> gt_index;
};

struct MatchResult
{
  std::string class_label;
  double threshold = 0.0;
  std::vector<MatchEntry> entries;  // descending score; ties keep input order
  std::size_t num_gt = 0;
};

double bev_distance(const ingest::ScoredAnnotation & a, const ingest::ScoredAnnotation & b);

/// Greedy matching by descending score. A prediction is a true positive when
/// an unmatched ground-truth box of the same class and frame lies within
/// `threshold_m` (inclusive); it takes the nearest one (lowest index on ties).
MatchResult match_predictions(
  const std::vector<ingest::ScoredAnnotation> & preds,
  const std::vector<ingest::ScoredAnnotation> & gts,
  const std::string & class_label, double threshold_m);

/// Precision sampled at 101 evenly spaced recalls (linear interpolation,
/// zero beyond the highest recall reached); samples at recall <= min_recall
/// are dropped and precision is reduced by min_precision, floored at 0, then
/// rescaled by 1 / (1 - min_precision).
double average_precision(
  const MatchResult & match, double min_recall = 0.1, double min_precision = 0.1);

struct TpErrors
{
  double ate = 1.0;
  double ase = 1.0;
  double aoe = 1.0;
  std::optional<double> ave;  // only when velocities exist on both sides
  std::size_t tp_count = 0;
};

/// 1 - IoU of two boxes sharing center and yaw.
double aligned_scale_error(const geom::Vec3 & a, const geom::Vec3 & b);

/// Mean errors over the true positives of `match`. A class without true
/// positives scores 1.0 on every term.
TpErrors tp_errors(
  const MatchResult & match, const std::vector<ingest::ScoredAnnotation> & preds,
  const std::vector<ingest::ScoredAnnotation> & gts);

/// tp_means = (mATE, mASE, mAOE, mAVE, mAAE).
double nds(double map, const std::array<double, 5> & tp_means);
/// Variant without velocity and attribute terms.
double adapted_nds(double map, double ate, double ase, double aoe);

/// COCO-style 2D mAP: greedy IoU matching per (frame, camera, class),
/// monotone precision envelope sampled at 101 recalls, mean over classes
/// that have ground truth.
double map2d(
  const std::vector<ingest::Detection2D> & preds, const std::vector<ingest::Detection2D> & gts,
  double iou_threshold = 0.5);

struct ClassMetrics
{
  std::string class_label;
  std::size_t num_gt = 0;
  std::size_t num_pred = 0;
  std::map<double, double> ap;  // threshold -> AP
  double mean_ap = 0.0;
  TpErrors errors;
};

struct MetricsReport
{
  std::vector<ClassMetrics> per_class;  // classes with ground truth only
  double map = 0.0;
  double mate = 1.0;
  double mase = 1.0;
  double maoe = 1.0;
  std::optional<double> mave;
  double maae = 1.0;  // attributes are never predicted
  double nds = 0.0;
  double adapted_nds = 0.0;
  std::optional<double> map2d;
};

MetricsReport evaluate(
  const std::vector<ingest::ScoredAnnotation> & preds,
  const std::vector<ingest::ScoredAnnotation> & gts, const EvalConfig & cfg = {});

struct DistanceBand
{
  double lo = 0.0;
  double hi = 0.0;
  MetricsReport report;
};

/// Re-runs the evaluation on boxes whose BEV distance from the frame's ego
/// position falls in [lo, hi), for the bands 0-10, 10-20, 20-30 and 0-50 m.
/// Frames missing from `ego_xy` are measured from the world origin.
std::vector<DistanceBand> stratify_by_distance(
  const std::vector<ingest::ScoredAnnotation> & preds,
  const std::vector<ingest::ScoredAnnotation> & gts, const EvalConfig & cfg,
  const std::map<std::string, geom::Vec2> & ego_xy);

nlohmann::json to_json(const MetricsReport & report);
std::string to_table(const MetricsReport & report);

}  // namespace autolift::eval

#endif  // AUTOLIFT__EVAL_HPP_
