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

#ifndef AUTOLIFT__FRUSTUM_HPP_
#define AUTOLIFT__FRUSTUM_HPP_

#include <optional>
#include <vector>

#include "autolift/geom.hpp"
#include "autolift/ingest.hpp"
#include "autolift/mask.hpp"

namespace autolift::frustum
{

/// Lidar points whose projection falls inside one detection box.
struct FrustumPoints
{
  std::size_t detection_ref = 0;
  std::vector<geom::Vec3> points;    // lidar frame, input order preserved
  std::vector<geom::Vec2> pixels;    // projection of each point
  std::vector<bool> foreground_flags;

  std::size_t size() const {return points.size();}
  std::vector<geom::Vec3> foreground() const;
};

/// Pinhole view of a camera as seen from the lidar frame.
struct CameraView
{
  geom::CameraIntrinsics intrinsics;
  geom::RigidTransform camera_from_lidar;
};

CameraView camera_view(const ingest::SceneManifest & manifest, const std::string & camera_id);

/// A point is a member iff its camera-frame depth is positive and its
/// projection lies inside det.box (edges inclusive). All members start out
/// flagged foreground.
FrustumPoints extract_frustum(
  const std::vector<geom::Vec3> & points, std::size_t detection_ref,
  const ingest::Detection2D & det, const CameraView & view);

/// Resolves the camera through the manifest; throws Error(unknown_camera).
FrustumPoints extract_frustum(
  const std::vector<geom::Vec3> & points, std::size_t detection_ref,
  const ingest::Detection2D & det, const ingest::SceneManifest & manifest);

/// Flags each point by the mask pixel under its projection, rounded to the
/// nearest integer (halves away from zero) and clamped to the image. With no
/// mask every point is foreground.
FrustumPoints filter_foreground(FrustumPoints fp, const std::optional<BinaryMask> & mask);

}  // namespace autolift::frustum

#endif  // AUTOLIFT__FRUSTUM_HPP_
