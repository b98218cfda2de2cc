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

#include "autolift/frustum.hpp"

#include <algorithm>
#include <cmath>

namespace autolift::frustum
{

std::vector<geom::Vec3> FrustumPoints::foreground() const
{
  std::vector<geom::Vec3> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (foreground_flags[i]) {
      out.push_back(points[i]);
    }
  }
  return out;
}

CameraView camera_view(const ingest::SceneManifest & manifest, const std::string & camera_id)
{
  return CameraView{manifest.camera(camera_id).intrinsics, manifest.camera_from_lidar(camera_id)};
}

FrustumPoints extract_frustum(
  const std::vector<geom::Vec3> & points, std::size_t detection_ref,
  const ingest::Detection2D & det, const CameraView & view)
{
  FrustumPoints fp;
  fp.detection_ref = detection_ref;
  for (const auto & p : points) {
    const auto uv = geom::project_point(view.camera_from_lidar.apply(p), view.intrinsics);
    if (uv && det.box.contains(uv->x(), uv->y())) {
      fp.points.push_back(p);
      fp.pixels.push_back(*uv);
    }
  }
  fp.foreground_flags.assign(fp.points.size(), true);
  return fp;
}

FrustumPoints extract_frustum(
  const std::vector<geom::Vec3> & points, std::size_t detection_ref,
  const ingest::Detection2D & det, const ingest::SceneManifest & manifest)
{
  return extract_frustum(points, detection_ref, det, camera_view(manifest, det.camera_id));
}

FrustumPoints filter_foreground(FrustumPoints fp, const std::optional<BinaryMask> & mask)
{
  if (!mask || mask->width() == 0 || mask->height() == 0) {
    fp.foreground_flags.assign(fp.points.size(), !mask.has_value());
    return fp;
  }
  for (std::size_t i = 0; i < fp.points.size(); ++i) {
    // std::lround rounds halves away from zero.
    const long u = std::clamp<long>(std::lround(fp.pixels[i].x()), 0, mask->width() - 1);
    const long v = std::clamp<long>(std::lround(fp.pixels[i].y()), 0, mask->height() - 1);
    fp.foreground_flags[i] = mask->at(static_cast<int>(u), static_cast<int>(v));
  }
  return fp;
}

}  // namespace autolift::frustum
