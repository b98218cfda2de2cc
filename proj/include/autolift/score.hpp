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

#ifndef AUTOLIFT__SCORE_HPP_
#define AUTOLIFT__SCORE_HPP_

#include <vector>

#include "autolift/eval.hpp"
#include "autolift/geom.hpp"
#include "autolift/ingest.hpp"

namespace autolift::score
{

struct ScoringConfig
{
  int grid_k = 7;
  double alpha = 0.5;

  void validate() const;
};

/// Share of the k x k footprint cells (yaw-aligned, local frame) that hold at
/// least one point lying inside the cuboid. Cells are binned by floor, so a
/// point on an interior edge lands in the cell that edge opens; the far edge
/// belongs to the last cell.
double occupancy_rate(const geom::Cuboid3D & c, const std::vector<geom::Vec3> & points, int k);

/// alpha * s2d + (1 - alpha) * s3d. Throws Error(invalid_argument) when an
/// input lies outside [0, 1].
double fuse_score(double s2d, double s3d, double alpha);

/// Default candidate weights: 0.00, 0.05, ..., 1.00.
std::vector<double> default_alpha_grid();

/// Picks the weight whose re-fused scores give the highest 3D mAP on the
/// validation split; ties go to the smaller weight. Every prediction must
/// carry score_2d and score_3d. Throws Error(empty_input) when the
/// validation ground truth or the candidate list is empty.
double tune_alpha(
  const std::vector<ingest::ScoredAnnotation> & val_predictions,
  const std::vector<ingest::ScoredAnnotation> & val_ground_truth,
  const std::vector<double> & candidates, const eval::EvalConfig & eval_cfg);

}  // namespace autolift::score

#endif  // AUTOLIFT__SCORE_HPP_
