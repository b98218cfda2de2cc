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

#include "autolift/synth.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "autolift/error.hpp"
#include "autolift/eval.hpp"
#include "autolift/json_util.hpp"

namespace autolift::synth
{

namespace ju = json_util;
using json = nlohmann::json;
using geom::Vec2;
using geom::Vec3;

namespace
{

// Distribution transforms are spelled out so that a seed gives the same
// stream with any standard library.
class Rng
{
public:
  explicit Rng(std::uint64_t seed)
  : gen_(seed) {}

  // [0, 1) with 53 random bits.
  double uniform() {return static_cast<double>(gen_() >> 11) * 0x1.0p-53;}
  double uniform(double lo, double hi) {return lo + (hi - lo) * uniform();}

  // Inclusive range, rejection sampled.
  int uniform_int(int lo, int hi)
  {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t v = gen_();
    while (v >= limit) {
      v = gen_();
    }
    return lo + static_cast<int>(v % span);
  }

  // Box-Muller, one draw per call.
  double normal()
  {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * geom::kPi * u2);
  }

private:
  std::mt19937_64 gen_;
};

Vec3 rotate_z(double yaw, const Vec3 & v)
{
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y(), v.z()};
}

bool bev_overlap(const geom::Cuboid3D & a, const geom::Cuboid3D & b, double margin)
{
  geom::Cuboid3D ia = a;
  geom::Cuboid3D ib = b;
  ia.dims += Vec3(margin, margin, 0.0);
  ib.dims += Vec3(margin, margin, 0.0);
  const auto ra = geom::bev_rect(ia);
  const auto rb = geom::bev_rect(ib);
  for (const double yaw : {a.yaw, b.yaw}) {
    for (const Vec2 & axis : {Vec2(std::cos(yaw), std::sin(yaw)),
        Vec2(-std::sin(yaw), std::cos(yaw))})
    {
      double amin = INFINITY, amax = -INFINITY, bmin = INFINITY, bmax = -INFINITY;
      for (int k = 0; k < 4; ++k) {
        amin = std::min(amin, ra[k].dot(axis));
        amax = std::max(amax, ra[k].dot(axis));
        bmin = std::min(bmin, rb[k].dot(axis));
        bmax = std::max(bmax, rb[k].dot(axis));
      }
      if (amax < bmin || bmax < amin) {
        return false;
      }
    }
  }
  return true;
}

struct Face
{
  Vec3 normal;  // local, unit axis
  Vec3 u_axis;  // local half-extent directions spanning the face
  Vec3 v_axis;
  double area = 0.0;
};

std::array<Face, 6> cuboid_faces(const Vec3 & dims)
{
  const Vec3 h = 0.5 * dims;
  const Vec3 ex(h.x(), 0, 0), ey(0, h.y(), 0), ez(0, 0, h.z());
  return {{
    {Vec3(1, 0, 0), ey, ez, dims.y() * dims.z()},
    {Vec3(-1, 0, 0), ey, ez, dims.y() * dims.z()},
    {Vec3(0, 1, 0), ex, ez, dims.x() * dims.z()},
    {Vec3(0, -1, 0), ex, ez, dims.x() * dims.z()},
    {Vec3(0, 0, 1), ex, ey, dims.x() * dims.y()},
    {Vec3(0, 0, -1), ex, ey, dims.x() * dims.y()},
  }};
}

// Uniform samples on the faces whose outward normal points at the sensor.
std::vector<Vec3> sample_visible_surface(
  const geom::Cuboid3D & c, const Vec3 & sensor, int n, Rng & rng)
{
  const auto faces = cuboid_faces(c.dims);
  const Vec3 half = 0.5 * c.dims;
  std::vector<const Face *> visible;
  std::vector<double> cumulative;
  double total = 0.0;
  for (const auto & f : faces) {
    const Vec3 center = c.center + rotate_z(c.yaw, f.normal.cwiseProduct(half));
    if (rotate_z(c.yaw, f.normal).dot(sensor - center) > 0.0) {
      visible.push_back(&f);
      total += f.area;
      cumulative.push_back(total);
    }
  }
  std::vector<Vec3> out;
  if (visible.empty()) {
    return out;
  }
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double pick = rng.uniform() * total;
    std::size_t k = static_cast<std::size_t>(
      std::upper_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin());
    k = std::min(k, visible.size() - 1);
    const Face & f = *visible[k];
    const Vec3 local = f.normal.cwiseProduct(half) + rng.uniform(-1.0, 1.0) * f.u_axis +
      rng.uniform(-1.0, 1.0) * f.v_axis;
    out.push_back(c.center + rotate_z(c.yaw, local));
  }
  return out;
}

struct Projection
{
  bool all_in_front = false;
  bool any_in_front = false;
  std::vector<Vec2> corners;  // only when all_in_front
  std::optional<geom::Box2D> clamped;
  double depth = 0.0;         // camera z of the center
};

Projection project(
  const geom::Cuboid3D & c, const geom::RigidTransform & camera_from_world,
  const geom::CameraIntrinsics & intr)
{
  Projection p;
  p.all_in_front = true;
  for (const auto & corner : geom::cuboid_corners(c)) {
    const Vec3 pc = camera_from_world.apply(corner);
    const auto px = geom::project_point(pc, intr);
    if (px) {
      p.any_in_front = true;
      p.corners.push_back(*px);
    } else {
      p.all_in_front = false;
    }
  }
  if (!p.all_in_front) {
    p.corners.clear();
  }
  p.clamped = geom::project_cuboid_to_box(c, camera_from_world, intr);
  p.depth = camera_from_world.apply(c.center).z();
  return p;
}

bool fully_inside_image(const Projection & p, const geom::CameraIntrinsics & intr, double margin)
{
  if (!p.all_in_front) {
    return false;
  }
  return std::all_of(p.corners.begin(), p.corners.end(), [&](const Vec2 & q) {
             return q.x() >= margin && q.y() >= margin && q.x() <= intr.width - margin &&
             q.y() <= intr.height - margin;
           });
}

// Conservative image footprint: a cuboid straddling the image plane is
// treated as covering the whole image.
std::optional<geom::Box2D> footprint(const Projection & p, const geom::CameraIntrinsics & intr)
{
  if (!p.any_in_front) {
    return std::nullopt;
  }
  if (!p.all_in_front) {
    return geom::Box2D{0.0, 0.0, static_cast<double>(intr.width),
      static_cast<double>(intr.height)};
  }
  if (!p.clamped || p.clamped->area() <= 0.0) {
    return std::nullopt;
  }
  return p.clamped;
}

bool boxes_touch(const geom::Box2D & a, const geom::Box2D & b, double margin)
{
  return a.x1 - margin <= b.x2 && b.x1 - margin <= a.x2 && a.y1 - margin <= b.y2 &&
         b.y1 - margin <= a.y2;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts)
{
  std::sort(pts.begin(), pts.end(), [](const Vec2 & a, const Vec2 & b) {
      return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
  if (pts.size() < 3) {
    return pts;
  }
  const auto cross = [](const Vec2 & o, const Vec2 & a, const Vec2 & b) {
      return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
    };
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) {
      --k;
    }
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i - 1]) <= 0) {
      --k;
    }
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

// Clears every pixel center inside the convex polygon (counter-clockwise).
void clear_polygon(BinaryMask & mask, const std::vector<Vec2> & hull)
{
  if (hull.size() < 3) {
    return;
  }
  double x1 = INFINITY, y1 = INFINITY, x2 = -INFINITY, y2 = -INFINITY;
  for (const auto & q : hull) {
    x1 = std::min(x1, q.x());
    y1 = std::min(y1, q.y());
    x2 = std::max(x2, q.x());
    y2 = std::max(y2, q.y());
  }
  const int px1 = std::max(0, static_cast<int>(std::floor(x1)));
  const int py1 = std::max(0, static_cast<int>(std::floor(y1)));
  const int px2 = std::min(mask.width() - 1, static_cast<int>(std::ceil(x2)));
  const int py2 = std::min(mask.height() - 1, static_cast<int>(std::ceil(y2)));
  for (int y = py1; y <= py2; ++y) {
    for (int x = px1; x <= px2; ++x) {
      bool inside = true;
      for (std::size_t i = 0; i < hull.size() && inside; ++i) {
        const Vec2 & a = hull[i];
        const Vec2 & b = hull[(i + 1) % hull.size()];
        inside = (b.x() - a.x()) * (y - a.y()) - (b.y() - a.y()) * (x - a.x()) >= 0.0;
      }
      if (inside) {
        mask.set(x, y, false);
      }
    }
  }
}

geom::RigidTransform ego_pose_at(const SceneSpec & spec, std::int64_t t_us)
{
  const double dt = static_cast<double>(t_us - spec.timestamps_us.front()) * 1e-6;
  geom::RigidTransform pose = spec.ego_start;
  pose.translation.x() += spec.ego_velocity.x() * dt;
  pose.translation.y() += spec.ego_velocity.y() * dt;
  return pose;
}

std::vector<prior::Face> faces_toward_camera(double rel_yaw)
{
  constexpr double kFaceThreshold = 0.38;
  std::vector<prior::Face> faces;
  const double c = std::cos(rel_yaw);
  const double s = std::sin(rel_yaw);
  if (c < -kFaceThreshold) {faces.push_back(prior::Face::front);}
  if (c > kFaceThreshold) {faces.push_back(prior::Face::back);}
  if (s > kFaceThreshold) {faces.push_back(prior::Face::left);}
  if (s < -kFaceThreshold) {faces.push_back(prior::Face::right);}
  return faces;
}

geom::Cuboid3D cuboid_from_json(const json & j)
{
  return geom::Cuboid3D::make(ju::vec3(j, "center"), ju::vec3(j, "dims"),
           ju::finite_number(j, "yaw"));
}

json cuboid_to_json(const geom::Cuboid3D & c)
{
  return {{"center", {c.center.x(), c.center.y(), c.center.z()}},
    {"dims", {c.dims.x(), c.dims.y(), c.dims.z()}}, {"yaw", c.yaw}};
}

std::vector<SynthObject> place_random(
  const SceneSpec & spec, const std::vector<ingest::CameraCalibration> & cameras, Rng & rng)
{
  const RandomObjects & r = *spec.random;
  const Taxonomy tax = Taxonomy::defaults();
  const geom::RigidTransform world_from_lidar = ego_pose_at(spec, spec.timestamps_us.front()) *
    spec.ego_from_lidar;
  std::vector<geom::RigidTransform> camera_from_world;
  for (const auto & cam : cameras) {
    camera_from_world.push_back(
      (ego_pose_at(spec, spec.timestamps_us.front()) * cam.ego_from_camera).inverse());
  }
  const int count = rng.uniform_int(r.min_count, r.max_count);
  std::vector<SynthObject> placed;
  std::vector<std::vector<std::optional<geom::Box2D>>> placed_boxes;
  constexpr int kMaxTries = 20000;
  int tries = 0;
  while (static_cast<int>(placed.size()) < count) {
    if (++tries > kMaxTries) {
      throw Error(ErrorKind::invalid_argument, "could not place " + std::to_string(count) +
              " non-overlapping objects; widen the range or reduce the count");
    }
    SynthObject obj;
    obj.class_label = r.classes[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<int>(r.classes.size()) - 1))];
    const Vec3 dims = tax.at(obj.class_label).avg_dims * rng.uniform(0.9, 1.1);
    const double range = rng.uniform(r.min_range, r.max_range);
    const double azimuth = rng.uniform(-geom::kPi, geom::kPi);
    const double yaw = rng.uniform(-geom::kPi, geom::kPi);
    const Vec3 ego_center(range * std::cos(azimuth), range * std::sin(azimuth), 0.5 * dims.z());
    const auto & ego = ego_pose_at(spec, spec.timestamps_us.front());
    obj.cuboid = geom::Cuboid3D::make(ego.apply(ego_center), dims, yaw + ego.yaw());

    bool ok = !bev_overlap(obj.cuboid,
        geom::Cuboid3D::make(world_from_lidar.translation, Vec3(1.0, 1.0, 1.0), 0.0), 1.0);
    for (std::size_t k = 0; ok && k < placed.size(); ++k) {
      ok = !bev_overlap(obj.cuboid, placed[k].cuboid, 0.5);
    }
    for (std::size_t k = 0; ok && k < spec.occluders.size(); ++k) {
      ok = !bev_overlap(obj.cuboid, spec.occluders[k].cuboid, 0.5);
    }
    if (!ok) {
      continue;
    }
    // Exactly one camera sees the object, entirely, and no image footprint
    // touches another object's.
    std::vector<std::optional<geom::Box2D>> boxes(cameras.size());
    int hosts = 0;
    int seen = 0;
    for (std::size_t c = 0; c < cameras.size() && ok; ++c) {
      const auto p = project(obj.cuboid, camera_from_world[c], cameras[c].intrinsics);
      boxes[c] = footprint(p, cameras[c].intrinsics);
      if (boxes[c]) {
        ++seen;
        hosts += fully_inside_image(p, cameras[c].intrinsics, 2.0) ? 1 : 0;
        for (std::size_t k = 0; ok && k < placed.size(); ++k) {
          ok = !(placed_boxes[k][c] && boxes_touch(*boxes[c], *placed_boxes[k][c], 4.0));
        }
      }
    }
    if (!ok || hosts != 1 || seen != 1) {
      continue;
    }
    placed.push_back(obj);
    placed_boxes.push_back(boxes);
  }
  return placed;
}

}  // namespace

geom::RigidTransform SceneSpec::default_ego_from_lidar()
{
  return geom::RigidTransform::from_yaw(0.0, Vec3(0.94, 0.0, 1.84));
}

std::vector<ingest::CameraCalibration> SceneSpec::default_cameras(int count)
{
  if (count < 1) {
    throw Error(ErrorKind::invalid_argument, "camera count must be at least 1");
  }
  // Columns are the camera x (right), y (down) and z (forward) axes in ego.
  geom::Mat3 base;
  base << 0, 0, 1,
    -1, 0, 0,
    0, -1, 0;
  std::vector<ingest::CameraCalibration> out;
  for (int k = 0; k < count; ++k) {
    const double az = 2.0 * geom::kPi * k / count;
    const auto rz = geom::RigidTransform::from_yaw(az, Vec3::Zero());
    ingest::CameraCalibration cam;
    cam.id = count == 1 ? "front" : "cam" + std::to_string(k);
    cam.intrinsics = {1266.4, 1266.4, 800.0, 450.0, 1600, 900};
    cam.ego_from_camera.rotation = rz.rotation * base;
    cam.ego_from_camera.translation = Vec3(0.94, 0.0, 1.6) + rotate_z(az, Vec3(0.3, 0.0, 0.0));
    out.push_back(cam);
  }
  return out;
}

void SceneSpec::validate() const
{
  if (timestamps_us.empty()) {
    throw Error(ErrorKind::invalid_argument, "scene needs at least one timestamp");
  }
  for (std::size_t i = 1; i < timestamps_us.size(); ++i) {
    if (timestamps_us[i] <= timestamps_us[i - 1]) {
      throw Error(ErrorKind::invalid_argument, "timestamps must strictly increase");
    }
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw Error(ErrorKind::invalid_argument, "noise_sigma must be >= 0");
  }
  if (min_points < 1 || max_points < min_points) {
    throw Error(ErrorKind::invalid_argument, "points_per_object must satisfy 1 <= min <= max");
  }
  if (!(detection_score >= 0.0 && detection_score <= 1.0)) {
    throw Error(ErrorKind::invalid_argument, "detection_score must lie in [0, 1]");
  }
  if (mask_dilation < 0) {
    throw Error(ErrorKind::invalid_argument, "mask_dilation must be >= 0");
  }
  const Taxonomy tax = Taxonomy::defaults();
  for (const auto & o : objects) {
    if (!o.cuboid.valid()) {
      throw Error(ErrorKind::invalid_argument, "object cuboid has nonpositive dims");
    }
  }
  for (const auto & o : occluders) {
    if (!o.cuboid.valid() || o.points < 0) {
      throw Error(ErrorKind::invalid_argument, "invalid occluder");
    }
  }
  if (random) {
    if (random->min_count < 0 || random->max_count < random->min_count) {
      throw Error(ErrorKind::invalid_argument, "random count must satisfy 0 <= min <= max");
    }
    if (random->classes.empty()) {
      throw Error(ErrorKind::invalid_argument, "random placement needs at least one class");
    }
    for (const auto & c : random->classes) {
      tax.at(c);
    }
    if (!(random->min_range > 0.0 && random->max_range > random->min_range)) {
      throw Error(ErrorKind::invalid_argument, "random range must satisfy 0 < min < max");
    }
  } else {
    for (std::size_t i = 0; i < objects.size(); ++i) {
      for (std::size_t k = 0; k < i; ++k) {
        if (bev_overlap(objects[i].cuboid, objects[k].cuboid, 0.0)) {
          throw Error(ErrorKind::invalid_argument, "objects " + std::to_string(k) + " and " +
                  std::to_string(i) + " overlap in BEV");
        }
      }
    }
  }
  for (const auto & c : cameras) {
    c.intrinsics.validate();
  }
}

SceneSpec SceneSpec::from_json(const json & j)
{
  ju::require_object(j, "scene spec");
  ju::reject_unknown_keys(j,
    {"seed", "objects", "random", "occluders", "cameras", "camera_count", "lidar_extrinsics",
      "timestamps_us", "ego_start", "ego_velocity", "points_per_object", "noise_sigma",
      "detection_score", "mask_dilation", "with_masks"},
    "scene spec");
  SceneSpec s;
  if (j.contains("seed")) {
    const auto v = ju::integer(j, "seed");
    if (v < 0) {
      throw Error(ErrorKind::invalid_argument, "'seed' must be >= 0");
    }
    s.seed = static_cast<std::uint64_t>(v);
  }
  if (j.contains("objects")) {
    for (const auto & o : ju::field(j, "objects")) {
      ju::reject_unknown_keys(o, {"class", "center", "dims", "yaw", "velocity"}, "object");
      SynthObject obj;
      obj.class_label = ju::string(o, "class");
      Taxonomy::defaults().at(obj.class_label);
      obj.cuboid = cuboid_from_json(o);
      if (o.contains("velocity")) {
        obj.velocity = ju::vec2(o, "velocity");
      }
      s.objects.push_back(obj);
    }
  }
  if (j.contains("random")) {
    const json & r = j["random"];
    ju::require_object(r, "random");
    ju::reject_unknown_keys(r, {"count", "classes", "range"}, "random");
    RandomObjects ro;
    if (r.contains("count")) {
      const Vec2 c = ju::vec2(r, "count");
      ro.min_count = static_cast<int>(c.x());
      ro.max_count = static_cast<int>(c.y());
    }
    if (r.contains("classes")) {
      ro.classes.clear();
      for (const auto & c : ju::field(r, "classes")) {
        if (!c.is_string()) {
          throw Error(ErrorKind::format, "'classes' must be an array of strings");
        }
        ro.classes.push_back(c.get<std::string>());
      }
    }
    if (r.contains("range")) {
      const Vec2 range = ju::vec2(r, "range");
      ro.min_range = range.x();
      ro.max_range = range.y();
    }
    s.random = ro;
  }
  if (j.contains("occluders")) {
    for (const auto & o : ju::field(j, "occluders")) {
      ju::reject_unknown_keys(o, {"center", "dims", "yaw", "points"}, "occluder");
      Occluder occ;
      occ.cuboid = cuboid_from_json(o);
      if (o.contains("points")) {
        occ.points = static_cast<int>(ju::integer(o, "points"));
      }
      s.occluders.push_back(occ);
    }
  }
  if (j.contains("cameras") && j.contains("camera_count")) {
    throw Error(ErrorKind::invalid_argument, "give either 'cameras' or 'camera_count'");
  }
  if (j.contains("cameras")) {
    for (const auto & c : ju::field(j, "cameras")) {
      ju::reject_unknown_keys(c, {"id", "intrinsics", "extrinsics"}, "camera");
      s.cameras.push_back({ju::string(c, "id"), ju::intrinsics(c, "intrinsics"),
          ju::transform(c, "extrinsics")});
    }
  }
  if (j.contains("camera_count")) {
    s.cameras = default_cameras(static_cast<int>(ju::integer(j, "camera_count")));
  }
  if (j.contains("lidar_extrinsics")) {
    s.ego_from_lidar = ju::transform(j, "lidar_extrinsics");
  }
  if (j.contains("timestamps_us")) {
    s.timestamps_us.clear();
    for (const auto & t : ju::field(j, "timestamps_us")) {
      if (!t.is_number_integer()) {
        throw Error(ErrorKind::format, "'timestamps_us' must hold integers");
      }
      s.timestamps_us.push_back(t.get<std::int64_t>());
    }
  }
  if (j.contains("ego_start")) {
    s.ego_start = ju::transform(j, "ego_start");
  }
  if (j.contains("ego_velocity")) {
    s.ego_velocity = ju::vec2(j, "ego_velocity");
  }
  if (j.contains("points_per_object")) {
    const Vec2 p = ju::vec2(j, "points_per_object");
    s.min_points = static_cast<int>(p.x());
    s.max_points = static_cast<int>(p.y());
  }
  if (j.contains("noise_sigma")) {s.noise_sigma = ju::finite_number(j, "noise_sigma");}
  if (j.contains("detection_score")) {
    s.detection_score = ju::finite_number(j, "detection_score");
  }
  if (j.contains("mask_dilation")) {
    s.mask_dilation = static_cast<int>(ju::integer(j, "mask_dilation"));
  }
  if (j.contains("with_masks")) {
    const json & v = j["with_masks"];
    if (!v.is_boolean()) {
      throw Error(ErrorKind::format, "'with_masks' must be a boolean");
    }
    s.with_masks = v.get<bool>();
  }
  s.validate();
  return s;
}

json SceneSpec::to_json() const
{
  json j;
  j["seed"] = seed;
  j["objects"] = json::array();
  for (const auto & o : objects) {
    json e = cuboid_to_json(o.cuboid);
    e["class"] = o.class_label;
    e["velocity"] = {o.velocity.x(), o.velocity.y()};
    j["objects"].push_back(e);
  }
  if (random) {
    j["random"] = {{"count", {random->min_count, random->max_count}},
      {"classes", random->classes}, {"range", {random->min_range, random->max_range}}};
  }
  j["occluders"] = json::array();
  for (const auto & o : occluders) {
    json e = cuboid_to_json(o.cuboid);
    e["points"] = o.points;
    j["occluders"].push_back(e);
  }
  if (!cameras.empty()) {
    j["cameras"] = json::array();
    for (const auto & c : cameras) {
      j["cameras"].push_back({{"id", c.id}, {"intrinsics", ju::to_json(c.intrinsics)},
          {"extrinsics", ju::to_json(c.ego_from_camera)}});
    }
  }
  j["lidar_extrinsics"] = ju::to_json(ego_from_lidar);
  j["timestamps_us"] = timestamps_us;
  j["ego_start"] = ju::to_json(ego_start);
  j["ego_velocity"] = {ego_velocity.x(), ego_velocity.y()};
  j["points_per_object"] = {min_points, max_points};
  j["noise_sigma"] = noise_sigma;
  j["detection_score"] = detection_score;
  j["mask_dilation"] = mask_dilation;
  j["with_masks"] = with_masks;
  return j;
}

geom::Cuboid3D object_at(const SynthObject & obj, std::int64_t t0_us, std::int64_t t_us)
{
  const double dt = static_cast<double>(t_us - t0_us) * 1e-6;
  geom::Cuboid3D c = obj.cuboid;
  c.center.x() += obj.velocity.x() * dt;
  c.center.y() += obj.velocity.y() * dt;
  return c;
}

GeneratedScene generate_scene(const SceneSpec & spec)
{
  spec.validate();
  Rng rng(spec.seed);
  GeneratedScene g;
  auto cameras = spec.cameras;
  if (cameras.empty()) {
    cameras = SceneSpec::default_cameras(spec.random ? 6 : 1);
  }
  g.objects = spec.random ? place_random(spec, cameras, rng) : spec.objects;

  auto & manifest = g.scene.manifest;
  manifest.cameras = cameras;
  manifest.ego_from_lidar = spec.ego_from_lidar;
  const std::int64_t t0 = spec.timestamps_us.front();
  char name[32];

  for (std::size_t s = 0; s < spec.timestamps_us.size(); ++s) {
    const std::int64_t t = spec.timestamps_us[s];
    ingest::SweepEntry entry;
    std::snprintf(name, sizeof(name), "sweep_%04zu", s);
    entry.frame_id = name;
    entry.timestamp_us = t;
    entry.ego_pose = ego_pose_at(spec, t);
    std::snprintf(name, sizeof(name), "sweeps/%06zu.bin", s);
    entry.path = name;
    manifest.sweeps.push_back(entry);

    ingest::SweepFrame frame;
    frame.frame_id = entry.frame_id;
    frame.timestamp_us = t;
    frame.ego_pose = entry.ego_pose;
    frame.sensor_pose = spec.ego_from_lidar;
    const auto world_from_lidar = frame.world_from_lidar();
    const auto lidar_from_world = world_from_lidar.inverse();
    const Vec3 sensor = world_from_lidar.translation;

    const auto emit = [&](const std::vector<Vec3> & world_pts) {
        std::vector<Vec3> lidar_pts;
        lidar_pts.reserve(world_pts.size());
        for (const auto & p : world_pts) {
          Vec3 q = p;
          if (spec.noise_sigma > 0.0) {
            q += spec.noise_sigma * Vec3(rng.normal(), rng.normal(), rng.normal());
          }
          const Vec3 l = lidar_from_world.apply(q);
          frame.points.push_back({static_cast<float>(l.x()), static_cast<float>(l.y()),
              static_cast<float>(l.z()), 0.5F});
          lidar_pts.push_back(l);
        }
        return lidar_pts;
      };

    std::vector<geom::Cuboid3D> cuboids;
    std::vector<std::vector<Vec3>> lidar_points;
    g.object_points.emplace_back();
    for (const auto & obj : g.objects) {
      cuboids.push_back(object_at(obj, t0, t));
      const int n = rng.uniform_int(spec.min_points, spec.max_points);
      auto pts = sample_visible_surface(cuboids.back(), sensor, n, rng);
      lidar_points.push_back(emit(pts));
      g.object_points.back().push_back(std::move(pts));
    }
    for (const auto & occ : spec.occluders) {
      emit(sample_visible_surface(occ.cuboid, sensor, occ.points, rng));
    }

    for (const auto & cam : cameras) {
      const auto camera_from_world = (entry.ego_pose * cam.ego_from_camera).inverse();
      const auto camera_from_lidar = camera_from_world * world_from_lidar;
      const auto & intr = cam.intrinsics;
      std::vector<Projection> proj;
      for (const auto & c : cuboids) {
        proj.push_back(project(c, camera_from_world, intr));
      }
      std::vector<Projection> occ_proj;
      for (const auto & occ : spec.occluders) {
        occ_proj.push_back(project(occ.cuboid, camera_from_world, intr));
      }
      const Vec3 axis = world_from_lidar.inverse().rotation *
        (entry.ego_pose.rotation * cam.ego_from_camera.rotation.col(2));
      const double axis_azimuth = std::atan2(axis.y(), axis.x());

      for (std::size_t o = 0; o < cuboids.size(); ++o) {
        const auto & p = proj[o];
        if (!p.all_in_front || !p.clamped || p.clamped->area() <= 0.0) {
          continue;
        }
        ingest::Detection2D det;
        det.frame_id = entry.frame_id;
        det.camera_id = cam.id;
        det.class_label = g.objects[o].class_label;
        det.box = *p.clamped;
        det.score = spec.detection_score;
        if (spec.with_masks) {
          BinaryMask raster(intr.width, intr.height);
          for (const auto & l : lidar_points[o]) {
            const auto px = geom::project_point(camera_from_lidar.apply(l), intr);
            if (!px) {
              continue;
            }
            const long u = std::lround(px->x());
            const long v = std::lround(px->y());
            if (u >= 0 && v >= 0 && u < intr.width && v < intr.height) {
              raster.set(static_cast<int>(u), static_cast<int>(v));
            }
          }
          BinaryMask mask = raster.dilated(spec.mask_dilation);
          // Nearer geometry hides this object.
          for (std::size_t k = 0; k < cuboids.size(); ++k) {
            if (k != o && proj[k].all_in_front && proj[k].depth < p.depth) {
              clear_polygon(mask, convex_hull(proj[k].corners));
            }
          }
          for (const auto & op : occ_proj) {
            if (op.all_in_front && op.depth < p.depth) {
              clear_polygon(mask, convex_hull(op.corners));
            }
          }
          det.mask = std::move(mask);
        }

        prior::ExpertRecord rec;
        rec.frame_id = det.frame_id;
        rec.camera_id = det.camera_id;
        rec.box = det.box;
        rec.dims = cuboids[o].dims;
        const double yaw_lidar = cuboids[o].yaw - world_from_lidar.yaw();
        rec.visible_faces = faces_toward_camera(yaw_lidar - axis_azimuth);
        const double u = 0.5 * (det.box.x1 + det.box.x2);
        rec.image_region = u < intr.width / 3.0 ? prior::ImageRegion::left :
          (u > 2.0 * intr.width / 3.0 ? prior::ImageRegion::right : prior::ImageRegion::center);

        g.detections.push_back(std::move(det));
        g.detection_object.push_back(o);
        g.expert.push_back(std::move(rec));
      }
    }

    std::vector<bool> visible(cuboids.size(), false);
    for (std::size_t d = 0; d < g.detections.size(); ++d) {
      if (g.detections[d].frame_id == entry.frame_id) {
        visible[g.detection_object[d]] = true;
      }
    }
    for (std::size_t o = 0; o < cuboids.size(); ++o) {
      if (!visible[o]) {
        continue;
      }
      ingest::ScoredAnnotation gt;
      gt.frame_id = entry.frame_id;
      gt.class_label = g.objects[o].class_label;
      gt.cuboid = cuboids[o];
      gt.score = 1.0;
      gt.track_id = static_cast<std::int64_t>(o);
      gt.velocity = g.objects[o].velocity;
      g.ground_truth.push_back(std::move(gt));
    }
    g.scene.sweeps.push_back(std::move(frame));
  }
  return g;
}

void write_scene(const GeneratedScene & g, const std::string & dir)
{
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "sweeps");
  ingest::write_manifest(g.scene.manifest, (fs::path(dir) / "manifest.json").string());
  for (std::size_t s = 0; s < g.scene.sweeps.size(); ++s) {
    ingest::write_sweep_points(g.scene.sweeps[s].points,
      (fs::path(dir) / g.scene.manifest.sweeps[s].path).string(), ingest::PointStride::xyzi);
  }
  ingest::write_detections(g.detections, (fs::path(dir) / "detections.ndjson").string());
  prior::write_expert_records(g.expert, (fs::path(dir) / "expert.ndjson").string());
  ingest::write_annotations(g.ground_truth, (fs::path(dir) / "gt.ndjson").string());
}

RecoveryReport verify_roundtrip(
  const SceneSpec & spec, const pipeline::PipelineConfig & cfg, PriorMode mode)
{
  return verify_roundtrip(generate_scene(spec), cfg, mode);
}

RecoveryReport verify_roundtrip(
  const GeneratedScene & g, const pipeline::PipelineConfig & cfg, PriorMode mode)
{
  const auto & manifest = g.scene.manifest;
  const std::int64_t t0 = manifest.sweeps.empty() ? 0 : manifest.sweeps.front().timestamp_us;
  const auto truth = [&](std::size_t det) {
      const auto idx = *manifest.sweep_index(g.detections[det].frame_id);
      return object_at(g.objects[g.detection_object[det]], t0, manifest.sweeps[idx].timestamp_us);
    };
  pipeline::PriorProvider provider;
  if (mode != PriorMode::expert) {
    provider = [&](const ingest::Detection2D & det, std::size_t i) {
        const auto idx = *manifest.sweep_index(det.frame_id);
        const auto c = truth(i);
        prior::SemanticPrior p;
        p.dims = c.dims;
        if (mode == PriorMode::oracle) {
          p.orientation =
            geom::normalize_angle(c.yaw - g.scene.sweeps[idx].world_from_lidar().yaw());
          p.sector_half_width = cfg.routing.sector_half_width;
          p.source = prior::PriorSource::per_instance;
        }
        return std::optional<prior::SemanticPrior>(p);
      };
  }
  const prior::ExpertIndex expert(mode == PriorMode::expert ? g.expert :
    std::vector<prior::ExpertRecord>{});

  const auto start = std::chrono::steady_clock::now();
  const auto result = pipeline::run_annotate(g.scene, g.detections, expert, cfg, provider);
  RecoveryReport report;
  report.wall_time_s =
    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::vector<std::optional<std::size_t>> ann_of(g.detections.size());
  for (std::size_t a = 0; a < result.annotations.size(); ++a) {
    ann_of[result.source_detection[a]] = a;
  }
  for (std::size_t d = 0; d < g.detections.size(); ++d) {
    ObjectRecovery r;
    r.frame_id = g.detections[d].frame_id;
    r.object = g.detection_object[d];
    r.class_label = g.detections[d].class_label;
    r.truth = truth(d);
    if (ann_of[d]) {
      const auto & pred = result.annotations[*ann_of[d]].cuboid;
      const auto & c = r.truth;
      r.recovered = true;
      r.predicted = pred;
      r.center_error = (pred.center - c.center).norm();
      r.yaw_error = geom::yaw_diff(pred.yaw, c.yaw);
      r.dim_error = (pred.dims - c.dims).cwiseAbs().maxCoeff();
    }
    report.objects.push_back(r);
  }

  report.num_gt = g.ground_truth.size();
  report.num_pred = result.annotations.size();
  std::vector<std::string> classes;
  for (const auto & gt : g.ground_truth) {
    if (std::find(classes.begin(), classes.end(), gt.class_label) == classes.end()) {
      classes.push_back(gt.class_label);
    }
  }
  for (const double th : cfg.eval.dist_thresholds) {
    std::size_t tp = 0;
    for (const auto & cls : classes) {
      const auto m = eval::match_predictions(result.annotations, g.ground_truth, cls, th);
      tp += static_cast<std::size_t>(std::count_if(m.entries.begin(), m.entries.end(),
        [](const eval::MatchEntry & e) {return e.is_tp;}));
    }
    report.recall[th] = report.num_gt ? static_cast<double>(tp) / report.num_gt : 1.0;
    report.precision[th] = report.num_pred ? static_cast<double>(tp) / report.num_pred : 1.0;
  }
  return report;
}

json to_json(const RecoveryReport & r)
{
  json objects = json::array();
  for (const auto & o : r.objects) {
    objects.push_back({{"frame_id", o.frame_id}, {"object", o.object}, {"class", o.class_label},
        {"recovered", o.recovered}, {"center_error", o.center_error},
        {"yaw_error", o.yaw_error}, {"dim_error", o.dim_error}});
    if (o.recovered) {
      const auto & c = o.predicted.center;
      objects.back()["predicted_center"] = {c.x(), c.y(), c.z()};
    }
  }
  json recall = json::object();
  json precision = json::object();
  for (const auto & [th, v] : r.recall) {
    recall[json(th).dump()] = v;
  }
  for (const auto & [th, v] : r.precision) {
    precision[json(th).dump()] = v;
  }
  return {{"objects", objects}, {"num_gt", r.num_gt}, {"num_pred", r.num_pred},
    {"recall", recall}, {"precision", precision}, {"wall_time_s", r.wall_time_s}};
}

}  // namespace autolift::synth
