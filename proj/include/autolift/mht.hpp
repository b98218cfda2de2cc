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

#ifndef AUTOLIFT__MHT_HPP_
#define AUTOLIFT__MHT_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "autolift/frustum.hpp"
#include "autolift/geom.hpp"
#include "autolift/prior.hpp"

// Multi-hypothesis cuboid search: a fixed-size cuboid is swept over a grid of
// translations and yaws inside the detection frustum, and the hypothesis that
// best explains both the foreground lidar points (coverage) and the 2D box
// (projected IoU) wins.
namespace autolift::mht
{

struct SearchConfig
{
  double trans_step = 0.5;             // meters
  double rot_step = geom::kPi / 10.0;  // radians
  double xy_range = 2.0;               // half-width around the anchor, meters
  double z_range = 1.0;                // half-width around the anchor, meters

  /// Throws Error(invalid_argument) unless every field is positive and finite.
  void validate() const;
};

struct Hypothesis
{
  geom::Cuboid3D cuboid;
  double coverage = 0.0;
  double proj_iou = 0.0;
  double objective = 0.0;  // coverage + proj_iou
};

/// Fraction of `points` inside `c`; 0 for an empty set.
double coverage_ratio(const std::vector<geom::Vec3> & points, const geom::Cuboid3D & c);

/// Search anchor: median foreground x/y, bottom face on the lowest point,
/// prior dims and orientation (0 without one). Empty when there are no
/// foreground points.
std::optional<geom::Cuboid3D> init_hypothesis(
  const std::vector<geom::Vec3> & foreground, const prior::SemanticPrior & prior);

/// Number of grid steps on each side of the anchor for a half-range.
int steps_per_side(double half_range, double step);

/// Cartesian grid around `init`, yaw-major. The yaw axis spans the prior's
/// sector (whole steps that fit inside it) or, for a full sector, the
/// round(2*pi / rot_step) headings anchored at init.yaw. The anchor itself is
/// always in the grid, bit for bit.
std::vector<geom::Cuboid3D> enumerate_hypotheses(
  const geom::Cuboid3D & init, const prior::SemanticPrior & prior, const SearchConfig & cfg);

/// Scores one hypothesis.
Hypothesis evaluate(
  const geom::Cuboid3D & c, const std::vector<geom::Vec3> & foreground,
  const geom::Box2D & det_box, const frustum::CameraView & view);

/// Total order used by the argmax: higher objective, then higher coverage,
/// then smaller yaw distance to `init_yaw`, then smaller (x, y, z), then
/// smaller yaw.
bool better(const Hypothesis & a, const Hypothesis & b, double init_yaw);

/// Argmax of coverage + projected IoU over `grid`. The result does not
/// depend on `threads`. Throws Error(invalid_argument) on an empty grid.
Hypothesis select_best(
  const std::vector<geom::Cuboid3D> & grid, const geom::Cuboid3D & init,
  const std::vector<geom::Vec3> & foreground, const geom::Box2D & det_box,
  const frustum::CameraView & view, std::size_t threads = 1);

/// p_local = R(-yaw) * (p - center) for each point.
std::vector<geom::Vec3> canonicalize_points(
  const std::vector<geom::Vec3> & points, const geom::Cuboid3D & c);

using PointFeature = std::array<double, 9>;

inline constexpr std::size_t kRefinerPoints = 512;

/// Per-point [p; d0 - p; d0 + p] with d0 = (l, w, h), resampled to exactly
/// `target` rows: all points plus random repeats when short, a random subset
/// (kept in input order) when long. Sampling is driven by mt19937_64(seed).
/// Throws Error(empty_input) for an empty point set.
std::vector<PointFeature> encode_point_features(
  const std::vector<geom::Vec3> & local_points, const geom::Vec3 & dims, std::uint64_t seed,
  std::size_t target = kRefinerPoints);

/// (log(l_gt / l0), log(w_gt / w0), log(h_gt / h0)); throws on nonpositive dims.
geom::Vec3 encode_dim_offsets(const geom::Vec3 & gt_dims, const geom::Vec3 & init_dims);
geom::Vec3 decode_dim_offsets(const geom::Vec3 & init_dims, const geom::Vec3 & offsets);

}  // namespace autolift::mht

#endif  // AUTOLIFT__MHT_HPP_
