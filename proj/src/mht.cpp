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

#include "autolift/mht.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "autolift/error.hpp"
#include "autolift/parallel.hpp"

namespace autolift::mht
{

void SearchConfig::validate() const
{
  const auto positive = [](double v) {return std::isfinite(v) && v > 0.0;};
  if (!positive(trans_step) || !positive(rot_step)) {
    throw Error(ErrorKind::invalid_argument, "search step sizes must be positive");
  }
  if (!std::isfinite(xy_range) || !std::isfinite(z_range) || xy_range < 0.0 || z_range < 0.0) {
    throw Error(ErrorKind::invalid_argument, "search ranges must be non-negative");
  }
}

namespace
{

// Counting kernel shared by coverage_ratio and the grid search so that both
// produce bit-identical coverage values.
std::size_t count_inside(
  const double * xs, const double * ys, const double * zs, std::size_t n,
  const geom::Cuboid3D & c, double cos_yaw, double sin_yaw)
{
  const double hl = 0.5 * c.dims.x() + geom::kInsideTolerance;
  const double hw = 0.5 * c.dims.y() + geom::kInsideTolerance;
  const double hh = 0.5 * c.dims.z() + geom::kInsideTolerance;
  const double cx = c.center.x();
  const double cy = c.center.y();
  const double cz = c.center.z();
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    count += geom::inside_local_box(
      xs[i] - cx, ys[i] - cy, zs[i] - cz, cos_yaw, sin_yaw, hl, hw, hh) ? 1U : 0U;
  }
  return count;
}

double ratio(std::size_t count, std::size_t n)
{
  return n == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(n);
}

struct PointColumns
{
  std::vector<double> x, y, z;

  explicit PointColumns(const std::vector<geom::Vec3> & pts)
  {
    x.reserve(pts.size());
    y.reserve(pts.size());
    z.reserve(pts.size());
    for (const auto & p : pts) {
      x.push_back(p.x());
      y.push_back(p.y());
      z.push_back(p.z());
    }
  }
  std::size_t size() const {return x.size();}
};

double median(std::vector<double> v)
{
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (n % 2 == 1) {
    return upper;
  }
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

Hypothesis finish(
  const geom::Cuboid3D & c, double coverage, const geom::Box2D & det_box,
  const frustum::CameraView & view)
{
  Hypothesis h;
  h.cuboid = c;
  h.coverage = coverage;
  const auto box = geom::project_cuboid_to_box(c, view.camera_from_lidar, view.intrinsics);
  h.proj_iou = box ? geom::iou_2d(*box, det_box) : 0.0;
  h.objective = h.coverage + h.proj_iou;
  return h;
}

// Unbiased integer in [0, n) from a 64-bit engine (rejection sampling), so
// that sampling does not depend on the standard library's distributions.
std::size_t uniform_index(std::mt19937_64 & rng, std::size_t n)
{
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
    std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r = rng();
  while (r >= limit) {
    r = rng();
  }
  return static_cast<std::size_t>(r % bound);
}

}  // namespace

double coverage_ratio(const std::vector<geom::Vec3> & points, const geom::Cuboid3D & c)
{
  const PointColumns cols(points);
  return ratio(
    count_inside(cols.x.data(), cols.y.data(), cols.z.data(), cols.size(), c,
    std::cos(c.yaw), std::sin(c.yaw)),
    cols.size());
}

std::optional<geom::Cuboid3D> init_hypothesis(
  const std::vector<geom::Vec3> & foreground, const prior::SemanticPrior & prior)
{
  if (foreground.empty()) {
    return std::nullopt;
  }
  std::vector<double> xs, ys;
  xs.reserve(foreground.size());
  ys.reserve(foreground.size());
  double zmin = foreground.front().z();
  for (const auto & p : foreground) {
    xs.push_back(p.x());
    ys.push_back(p.y());
    zmin = std::min(zmin, p.z());
  }
  const geom::Vec3 center(median(std::move(xs)), median(std::move(ys)),
    zmin + 0.5 * prior.dims.z());
  return geom::Cuboid3D::make(center, prior.dims, prior.orientation.value_or(0.0));
}

int steps_per_side(double half_range, double step)
{
  return static_cast<int>(std::floor(half_range / step + 1e-9));
}

std::vector<geom::Cuboid3D> enumerate_hypotheses(
  const geom::Cuboid3D & init, const prior::SemanticPrior & prior, const SearchConfig & cfg)
{
  cfg.validate();
  const int nxy = steps_per_side(cfg.xy_range, cfg.trans_step);
  const int nz = steps_per_side(cfg.z_range, cfg.trans_step);

  std::vector<double> yaws;
  const auto add_yaw = [&](int k) {
      const double yaw = (k == 0) ? init.yaw : geom::normalize_angle(init.yaw + k * cfg.rot_step);
      for (const double existing : yaws) {
        if (geom::yaw_diff(existing, yaw) < 1e-9) {
          return;
        }
      }
      yaws.push_back(yaw);
    };
  if (prior.sector_half_width >= geom::kPi - 1e-12) {
    const int count = std::max(1, static_cast<int>(std::lround(2.0 * geom::kPi / cfg.rot_step)));
    const int kmin = -((count - 1) / 2);
    add_yaw(0);
    for (int k = kmin; k < kmin + count; ++k) {
      add_yaw(k);
    }
  } else {
    const int n = steps_per_side(prior.sector_half_width, cfg.rot_step);
    add_yaw(0);
    for (int k = -n; k <= n; ++k) {
      add_yaw(k);
    }
  }
  std::sort(yaws.begin(), yaws.end());

  std::vector<geom::Cuboid3D> grid;
  grid.reserve(yaws.size() * static_cast<std::size_t>((2 * nxy + 1) * (2 * nxy + 1) * (2 * nz + 1)));
  for (const double yaw : yaws) {
    for (int i = -nxy; i <= nxy; ++i) {
      for (int j = -nxy; j <= nxy; ++j) {
        for (int k = -nz; k <= nz; ++k) {
          geom::Cuboid3D c = init;
          c.dims = prior.dims;
          c.yaw = yaw;
          c.center.x() += i * cfg.trans_step;
          c.center.y() += j * cfg.trans_step;
          c.center.z() += k * cfg.trans_step;
          grid.push_back(c);
        }
      }
    }
  }
  return grid;
}

Hypothesis evaluate(
  const geom::Cuboid3D & c, const std::vector<geom::Vec3> & foreground,
  const geom::Box2D & det_box, const frustum::CameraView & view)
{
  return finish(c, coverage_ratio(foreground, c), det_box, view);
}

bool better(const Hypothesis & a, const Hypothesis & b, double init_yaw)
{
  if (a.objective != b.objective) {
    return a.objective > b.objective;
  }
  if (a.coverage != b.coverage) {
    return a.coverage > b.coverage;
  }
  const double da = geom::yaw_diff(a.cuboid.yaw, init_yaw);
  const double db = geom::yaw_diff(b.cuboid.yaw, init_yaw);
  if (da != db) {
    return da < db;
  }
  for (int i = 0; i < 3; ++i) {
    if (a.cuboid.center[i] != b.cuboid.center[i]) {
      return a.cuboid.center[i] < b.cuboid.center[i];
    }
  }
  return a.cuboid.yaw < b.cuboid.yaw;
}

Hypothesis select_best(
  const std::vector<geom::Cuboid3D> & grid, const geom::Cuboid3D & init,
  const std::vector<geom::Vec3> & foreground, const geom::Box2D & det_box,
  const frustum::CameraView & view, std::size_t threads)
{
  if (grid.empty()) {
    throw Error(ErrorKind::invalid_argument, "empty hypothesis grid");
  }
  const PointColumns cols(foreground);
  std::vector<Hypothesis> scored(grid.size());
  constexpr std::size_t kChunk = 64;
  const std::size_t chunks = (grid.size() + kChunk - 1) / kChunk;
  parallel_for(chunks, threads, [&](std::size_t chunk) {
      const std::size_t begin = chunk * kChunk;
      const std::size_t end = std::min(grid.size(), begin + kChunk);
      double cached_yaw = grid[begin].yaw;
      double cs = std::cos(cached_yaw);
      double sn = std::sin(cached_yaw);
      for (std::size_t i = begin; i < end; ++i) {
        const auto & c = grid[i];
        if (c.yaw != cached_yaw) {
          cached_yaw = c.yaw;
          cs = std::cos(cached_yaw);
          sn = std::sin(cached_yaw);
        }
        const std::size_t inside = count_inside(
          cols.x.data(), cols.y.data(), cols.z.data(), cols.size(), c, cs, sn);
        scored[i] = finish(c, ratio(inside, cols.size()), det_box, view);
      }
    });
  std::size_t best = 0;
  for (std::size_t i = 1; i < scored.size(); ++i) {
    if (better(scored[i], scored[best], init.yaw)) {
      best = i;
    }
  }
  return scored[best];
}

std::vector<geom::Vec3> canonicalize_points(
  const std::vector<geom::Vec3> & points, const geom::Cuboid3D & c)
{
  std::vector<geom::Vec3> out;
  out.reserve(points.size());
  for (const auto & p : points) {
    out.push_back(geom::to_local(p, c));
  }
  return out;
}

std::vector<PointFeature> encode_point_features(
  const std::vector<geom::Vec3> & local_points, const geom::Vec3 & dims, std::uint64_t seed,
  std::size_t target)
{
  const std::size_t m = local_points.size();
  if (m == 0) {
    throw Error(ErrorKind::empty_input, "empty point set");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> rows;
  rows.reserve(target);
  if (m <= target) {
    for (std::size_t i = 0; i < m; ++i) {
      rows.push_back(i);
    }
    while (rows.size() < target) {
      rows.push_back(uniform_index(rng, m));
    }
  } else {
    std::vector<std::size_t> perm(m);
    for (std::size_t i = 0; i < m; ++i) {
      perm[i] = i;
    }
    for (std::size_t i = 0; i < target; ++i) {
      const std::size_t j = i + uniform_index(rng, m - i);
      std::swap(perm[i], perm[j]);
    }
    rows.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(target));
    std::sort(rows.begin(), rows.end());
  }
  std::vector<PointFeature> out;
  out.reserve(rows.size());
  for (const std::size_t r : rows) {
    const geom::Vec3 & p = local_points[r];
    out.push_back({
      p.x(), p.y(), p.z(),
      dims.x() - p.x(), dims.y() - p.y(), dims.z() - p.z(),
      dims.x() + p.x(), dims.y() + p.y(), dims.z() + p.z()});
  }
  return out;
}

geom::Vec3 encode_dim_offsets(const geom::Vec3 & gt_dims, const geom::Vec3 & init_dims)
{
  if (!(gt_dims.minCoeff() > 0.0) || !(init_dims.minCoeff() > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "dimension offsets need positive dims");
  }
  return {
    std::log(gt_dims.x() / init_dims.x()),
    std::log(gt_dims.y() / init_dims.y()),
    std::log(gt_dims.z() / init_dims.z())};
}

geom::Vec3 decode_dim_offsets(const geom::Vec3 & init_dims, const geom::Vec3 & offsets)
{
  if (!(init_dims.minCoeff() > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "dimension offsets need positive dims");
  }
  return {
    init_dims.x() * std::exp(offsets.x()),
    init_dims.y() * std::exp(offsets.y()),
    init_dims.z() * std::exp(offsets.z())};
}

}  // namespace autolift::mht
