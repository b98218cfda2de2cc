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


#ifndef AUTOLIFT__FIXTURES_HPP_
#define AUTOLIFT__FIXTURES_HPP_

#include <optional>
#include <random>
#include <vector>

#include "autolift/frustum.hpp"
#include "autolift/geom.hpp"
#include "autolift/prior.hpp"
#include "test_util.hpp"

namespace autolift::testing
{

using geom::Box2D;
using geom::Cuboid3D;
using geom::kPi;
using geom::Vec3;

inline prior::SemanticPrior make_prior(const Vec3 & dims, std::optional<double> yaw, double sector)
{
  prior::SemanticPrior p;
  p.dims = dims;
  p.orientation = yaw;
  p.sector_half_width = sector;
  p.source = yaw ? prior::PriorSource::per_instance : prior::PriorSource::class_average;
  return p;
}

// Camera at the lidar origin looking along +x.
inline frustum::CameraView forward_view()
{
  frustum::CameraView view;
  view.intrinsics = {1000, 1000, 800, 450, 1600, 900};
  view.camera_from_lidar.rotation << 0, -1, 0,
    0, 0, -1,
    1, 0, 0;
  return view;
}

// Points on the sensor-facing faces of `c`, plus the projected box.
struct Detection
{
  Cuboid3D truth;
  std::vector<Vec3> points;
  Box2D box;
};

inline Detection synthetic_detection(std::mt19937_64 & rng, int n = 300)
{
  Detection d;
  const Vec3 dims(uniform(rng, 0.5, 5), uniform(rng, 0.5, 2.5), uniform(rng, 0.8, 2));
  d.truth = Cuboid3D::make({uniform(rng, 8, 30), uniform(rng, -4, 4), uniform(rng, -1, 0)},
      dims, uniform(rng, -kPi, kPi));
  const auto view = forward_view();
  for (int i = 0; i < n; ++i) {
    // Random point on the box surface; keep the ones whose face looks at the origin.
    Vec3 local(uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5));
    const int axis = static_cast<int>(rng() % 3);
    local[axis] = (rng() % 2) ? 0.5 : -0.5;
    local = local.cwiseProduct(dims);
    const Vec3 p = d.truth.center + Eigen::AngleAxisd(d.truth.yaw, Vec3::UnitZ()) * local;
    d.points.push_back(p);
  }
  d.box = *geom::project_cuboid_to_box(d.truth, view.camera_from_lidar, view.intrinsics);
  return d;
}

}  // namespace autolift::testing

#endif  // AUTOLIFT__FIXTURES_HPP_
