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

#include "autolift/score.hpp"

#include <algorithm>
#include <cmath>

#include "autolift/error.hpp"

namespace autolift::score
{

void ScoringConfig::validate() const
{
  if (grid_k < 1) {
    throw Error(ErrorKind::invalid_argument, "grid_k must be at least 1");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorKind::invalid_argument, "alpha must lie in [0, 1]");
  }
}

double occupancy_rate(const geom::Cuboid3D & c, const std::vector<geom::Vec3> & points, int k)
{
  if (k < 1) {
    throw Error(ErrorKind::invalid_argument, "occupancy grid size must be at least 1");
  }
  const double cs = std::cos(c.yaw);
  const double sn = std::sin(c.yaw);
  const double hl = 0.5 * c.dims.x() + geom::kInsideTolerance;
  const double hw = 0.5 * c.dims.y() + geom::kInsideTolerance;
  const double hh = 0.5 * c.dims.z() + geom::kInsideTolerance;
  const auto bin = [k](double local, double extent) {
      const double u = (local + 0.5 * extent) / extent * k;
      return std::clamp(static_cast<int>(std::floor(u)), 0, k - 1);
    };
  std::vector<bool> occupied(static_cast<std::size_t>(k) * k, false);
  std::size_t n = 0;
  for (const auto & p : points) {
    const double dx = p.x() - c.center.x();
    const double dy = p.y() - c.center.y();
    const double dz = p.z() - c.center.z();
    if (!geom::inside_local_box(dx, dy, dz, cs, sn, hl, hw, hh)) {
      continue;
    }
    const double lx = cs * dx + sn * dy;
    const double ly = -sn * dx + cs * dy;
    const std::size_t cell = static_cast<std::size_t>(bin(lx, c.dims.x())) * k +
      static_cast<std::size_t>(bin(ly, c.dims.y()));
    if (!occupied[cell]) {
      occupied[cell] = true;
      ++n;
    }
  }
  return static_cast<double>(n) / static_cast<double>(k * k);
}

double fuse_score(double s2d, double s3d, double alpha)
{
  const auto unit = [](double v) {return v >= 0.0 && v <= 1.0;};
  if (!unit(s2d) || !unit(s3d) || !unit(alpha)) {
    throw Error(ErrorKind::invalid_argument, "fuse_score inputs must lie in [0, 1]");
  }
  return std::clamp(alpha * s2d + (1.0 - alpha) * s3d, 0.0, 1.0);
}

std::vector<double> default_alpha_grid()
{
  std::vector<double> out;
  for (int i = 0; i <= 20; ++i) {
    out.push_back(static_cast<double>(i) / 20.0);
  }
  return out;
}

double tune_alpha(
  const std::vector<ingest::ScoredAnnotation> & val_predictions,
  const std::vector<ingest::ScoredAnnotation> & val_ground_truth,
  const std::vector<double> & candidates, const eval::EvalConfig & eval_cfg)
{
  if (candidates.empty()) {
    throw Error(ErrorKind::empty_input, "no candidate alphas");
  }
  if (val_ground_truth.empty()) {
    throw Error(ErrorKind::empty_input, "empty validation set");
  }
  for (const auto & p : val_predictions) {
    if (!p.score_2d || !p.score_3d) {
      throw Error(ErrorKind::invalid_argument,
              "alpha tuning needs score_2d and score_3d on every prediction");
    }
  }
  std::vector<double> sorted = candidates;
  std::sort(sorted.begin(), sorted.end());
  double best_alpha = sorted.front();
  double best_map = -1.0;
  std::vector<ingest::ScoredAnnotation> rescored = val_predictions;
  for (const double alpha : sorted) {
    for (std::size_t i = 0; i < rescored.size(); ++i) {
      rescored[i].score = fuse_score(*val_predictions[i].score_2d, *val_predictions[i].score_3d,
          alpha);
    }
    const double map = eval::evaluate(rescored, val_ground_truth, eval_cfg).map;
    if (map > best_map) {
      best_map = map;
      best_alpha = alpha;
    }
  }
  return best_alpha;
}

}  // namespace autolift::score
