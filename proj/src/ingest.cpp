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

#include "autolift/ingest.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "autolift/error.hpp"
#include "autolift/json_util.hpp"

namespace autolift::ingest
{

static_assert(std::endian::native == std::endian::little, "sweep I/O assumes a little-endian host");

namespace fs = std::filesystem;
using json_util::json;

PointStride stride_from_int(int floats)
{
  if (floats == 4) {
    return PointStride::xyzi;
  }
  if (floats == 5) {
    return PointStride::xyzir;
  }
  throw Error(ErrorKind::invalid_argument, "point stride must be 4 or 5 floats, got " +
          std::to_string(floats));
}

const CameraCalibration & SceneManifest::camera(const std::string & id) const
{
  for (const auto & cam : cameras) {
    if (cam.id == id) {
      return cam;
    }
  }
  throw Error(ErrorKind::unknown_camera, "unknown camera id '" + id + "'");
}

geom::RigidTransform SceneManifest::camera_from_lidar(const std::string & camera_id) const
{
  return camera(camera_id).ego_from_camera.inverse() * ego_from_lidar;
}

std::optional<std::size_t> SceneManifest::sweep_index(const std::string & frame_id) const
{
  for (std::size_t i = 0; i < sweeps.size(); ++i) {
    if (sweeps[i].frame_id == frame_id) {
      return i;
    }
  }
  return std::nullopt;
}

SceneManifest load_manifest(const std::string & path)
{
  using namespace json_util;
  const json doc = read_json_file(path);
  try {
    reject_unknown_keys(doc, {"lidar", "cameras", "sweeps"}, "scene manifest");
    SceneManifest m;
    const json & lidar = field(doc, "lidar");
    reject_unknown_keys(lidar, {"extrinsics"}, "lidar");
    m.ego_from_lidar = transform(lidar, "extrinsics");

    const json & cams = field(doc, "cameras");
    if (!cams.is_array()) {
      throw Error(ErrorKind::format, "'cameras' must be an array");
    }
    for (const auto & c : cams) {
      reject_unknown_keys(c, {"id", "intrinsics", "extrinsics"}, "camera");
      CameraCalibration cal;
      cal.id = string(c, "id");
      cal.intrinsics = intrinsics(c, "intrinsics");
      cal.ego_from_camera = transform(c, "extrinsics");
      for (const auto & other : m.cameras) {
        if (other.id == cal.id) {
          throw Error(ErrorKind::format, "duplicate camera id '" + cal.id + "'");
        }
      }
      m.cameras.push_back(std::move(cal));
    }

    const json & sweeps = field(doc, "sweeps");
    if (!sweeps.is_array()) {
      throw Error(ErrorKind::format, "'sweeps' must be an array");
    }
    for (const auto & s : sweeps) {
      reject_unknown_keys(s, {"frame_id", "timestamp", "ego_pose", "path"}, "sweep");
      SweepEntry e;
      e.timestamp_us = integer(s, "timestamp");
      e.frame_id = s.contains("frame_id") ? string(s, "frame_id") : std::to_string(e.timestamp_us);
      e.ego_pose = transform(s, "ego_pose");
      e.path = string(s, "path");
      if (!m.sweeps.empty() && e.timestamp_us <= m.sweeps.back().timestamp_us) {
        throw Error(ErrorKind::format, "sweep timestamps must strictly increase (at frame '" +
                e.frame_id + "')");
      }
      if (m.sweep_index(e.frame_id)) {
        throw Error(ErrorKind::format, "duplicate frame id '" + e.frame_id + "'");
      }
      m.sweeps.push_back(std::move(e));
    }
    return m;
  } catch (const Error & e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

void write_manifest(const SceneManifest & manifest, const std::string & path)
{
  json cams = json::array();
  for (const auto & c : manifest.cameras) {
    cams.push_back({
      {"id", c.id},
      {"intrinsics", json_util::to_json(c.intrinsics)},
      {"extrinsics", json_util::to_json(c.ego_from_camera)}});
  }
  json sweeps = json::array();
  for (const auto & s : manifest.sweeps) {
    sweeps.push_back({
      {"frame_id", s.frame_id},
      {"timestamp", s.timestamp_us},
      {"ego_pose", json_util::to_json(s.ego_pose)},
      {"path", s.path}});
  }
  const json doc{
    {"lidar", {{"extrinsics", json_util::to_json(manifest.ego_from_lidar)}}},
    {"cameras", cams},
    {"sweeps", sweeps}};
  write_file_atomically(path, doc.dump(2) + "\n");
}

std::vector<LidarPoint> load_sweep_points(const std::string & path, PointStride stride)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::io, "cannot open sweep '" + path + "'");
  }
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw Error(ErrorKind::io, "read failure on sweep '" + path + "'");
  }
  const std::size_t floats = static_cast<std::size_t>(stride);
  const std::size_t record_bytes = floats * sizeof(float);
  if (bytes.size() % record_bytes != 0) {
    throw Error(
      ErrorKind::format, "sweep '" + path + "' has " + std::to_string(bytes.size()) +
      " bytes, not a multiple of the " + std::to_string(record_bytes) + "-byte record");
  }
  const std::size_t n = bytes.size() / record_bytes;
  std::vector<LidarPoint> points(n);
  float rec[5];
  for (std::size_t i = 0; i < n; ++i) {
    std::memcpy(rec, bytes.data() + i * record_bytes, record_bytes);
    for (std::size_t k = 0; k < 4; ++k) {
      if (!std::isfinite(rec[k])) {
        throw Error(ErrorKind::format, "sweep '" + path + "' record " + std::to_string(i) +
                " has a non-finite value");
      }
    }
    points[i] = LidarPoint{rec[0], rec[1], rec[2], rec[3]};
  }
  return points;
}

void write_sweep_points(
  const std::vector<LidarPoint> & points, const std::string & path, PointStride stride)
{
  const std::size_t floats = static_cast<std::size_t>(stride);
  std::string bytes(points.size() * floats * sizeof(float), '\0');
  for (std::size_t i = 0; i < points.size(); ++i) {
    const float rec[5] = {points[i].x, points[i].y, points[i].z, points[i].intensity, 0.0F};
    std::memcpy(bytes.data() + i * floats * sizeof(float), rec, floats * sizeof(float));
  }
  write_file_atomically(path, bytes);
}

SweepFrame load_sweep(
  const SceneManifest & manifest, std::size_t index, const std::string & base_dir,
  PointStride stride)
{
  const SweepEntry & e = manifest.sweeps.at(index);
  SweepFrame f;
  f.frame_id = e.frame_id;
  f.timestamp_us = e.timestamp_us;
  f.ego_pose = e.ego_pose;
  f.sensor_pose = manifest.ego_from_lidar;
  f.points = load_sweep_points((fs::path(base_dir) / e.path).string(), stride);
  return f;
}

Scene load_scene(const std::string & manifest_path, PointStride stride)
{
  Scene scene;
  scene.manifest = load_manifest(manifest_path);
  const std::string base = fs::path(manifest_path).parent_path().string();
  scene.sweeps.reserve(scene.manifest.sweeps.size());
  for (std::size_t i = 0; i < scene.manifest.sweeps.size(); ++i) {
    scene.sweeps.push_back(load_sweep(scene.manifest, i, base, stride));
  }
  return scene;
}

namespace
{

geom::Box2D parse_box(const json & j)
{
  const json & b = json_util::field(j, "box");
  if (!b.is_array() || b.size() != 4) {
    throw Error(ErrorKind::format, "'box' must be [x1, y1, x2, y2]");
  }
  geom::Box2D box{
    json_util::finite_number(b[0]), json_util::finite_number(b[1]),
    json_util::finite_number(b[2]), json_util::finite_number(b[3])};
  if (!box.valid()) {
    throw Error(ErrorKind::format, "'box' must satisfy x1 <= x2 and y1 <= y2");
  }
  return box;
}

double parse_unit_score(const json & j, const char * key)
{
  const double s = json_util::finite_number(j, key);
  if (s < 0.0 || s > 1.0) {
    throw Error(ErrorKind::format, std::string("'") + key + "' outside [0, 1]");
  }
  return s;
}

}  // namespace

std::vector<Detection2D> load_detections(const std::string & path, const Taxonomy & taxonomy)
{
  using namespace json_util;
  std::vector<Detection2D> out;
  for_each_ndjson_line(path, [&](const json & r, std::size_t) {
      reject_unknown_keys(r, {"frame_id", "camera_id", "class", "box", "score", "mask_rle"},
        "detection");
      Detection2D d;
      d.frame_id = string(r, "frame_id");
      d.camera_id = string(r, "camera_id");
      d.class_label = string(r, "class");
      if (!taxonomy.contains(d.class_label)) {
        throw Error(ErrorKind::unknown_class, "unknown class '" + d.class_label + "'");
      }
      d.box = parse_box(r);
      d.score = parse_unit_score(r, "score");
      if (r.contains("mask_rle") && !r["mask_rle"].is_null()) {
        const json & m = r["mask_rle"];
        reject_unknown_keys(m, {"size", "counts"}, "mask_rle");
        const json & size = field(m, "size");
        if (!size.is_array() || size.size() != 2 || !size[0].is_number_unsigned() ||
        !size[1].is_number_unsigned())
        {
          throw Error(ErrorKind::format, "'mask_rle.size' must be [height, width]");
        }
        const json & counts = field(m, "counts");
        if (!counts.is_array()) {
          throw Error(ErrorKind::format, "'mask_rle.counts' must be an array");
        }
        std::vector<std::uint32_t> runs;
        runs.reserve(counts.size());
        for (const auto & c : counts) {
          if (!c.is_number_unsigned()) {
            throw Error(ErrorKind::format, "'mask_rle.counts' must hold non-negative integers");
          }
          runs.push_back(c.get<std::uint32_t>());
        }
        d.mask = decode_rle(runs, size[1].get<int>(), size[0].get<int>());
      }
      out.push_back(std::move(d));
    });
  return out;
}

void write_detections(const std::vector<Detection2D> & dets, const std::string & path)
{
  std::string out;
  for (const auto & d : dets) {
    json r{
      {"frame_id", d.frame_id},
      {"camera_id", d.camera_id},
      {"class", d.class_label},
      {"box", {d.box.x1, d.box.y1, d.box.x2, d.box.y2}},
      {"score", d.score}};
    if (d.mask) {
      r["mask_rle"] = {
        {"size", {d.mask->height(), d.mask->width()}},
        {"counts", encode_rle(*d.mask)}};
    }
    out += r.dump();
    out += '\n';
  }
  write_file_atomically(path, out);
}

void validate_detections(const std::vector<Detection2D> & dets, const SceneManifest & manifest)
{
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const auto & d = dets[i];
    const std::string where = "detection " + std::to_string(i) + ": ";
    const CameraCalibration * cam = nullptr;
    try {
      cam = &manifest.camera(d.camera_id);
    } catch (const Error & e) {
      throw Error(e.kind(), where + e.what());
    }
    if (!manifest.sweep_index(d.frame_id)) {
      throw Error(ErrorKind::format, where + "frame '" + d.frame_id + "' is not in the scene");
    }
    if (d.mask && (d.mask->width() != cam->intrinsics.width ||
      d.mask->height() != cam->intrinsics.height))
    {
      throw Error(ErrorKind::format, where + "mask size does not match camera '" + cam->id + "'");
    }
  }
}

namespace
{

json annotation_to_json(const ScoredAnnotation & a)
{
  const auto & c = a.cuboid;
  json r{
    {"frame_id", a.frame_id},
    {"class", a.class_label},
    {"center", {c.center.x(), c.center.y(), c.center.z()}},
    {"dims", {c.dims.x(), c.dims.y(), c.dims.z()}},
    {"yaw", c.yaw},
    {"score", a.score}};
  if (a.track_id) {
    r["track_id"] = *a.track_id;
  }
  if (a.velocity) {
    r["velocity"] = {a.velocity->x(), a.velocity->y()};
  }
  if (a.score_2d) {
    r["score_2d"] = *a.score_2d;
  }
  if (a.score_3d) {
    r["score_3d"] = *a.score_3d;
  }
  return r;
}

}  // namespace

std::string annotations_to_ndjson(const std::vector<ScoredAnnotation> & items)
{
  std::string out;
  for (const auto & a : items) {
    out += annotation_to_json(a).dump();
    out += '\n';
  }
  return out;
}

void write_annotations(const std::vector<ScoredAnnotation> & items, const std::string & path)
{
  write_file_atomically(path, annotations_to_ndjson(items));
}

std::vector<ScoredAnnotation> load_annotations(const std::string & path)
{
  using namespace json_util;
  std::vector<ScoredAnnotation> out;
  for_each_ndjson_line(path, [&](const json & r, std::size_t) {
      reject_unknown_keys(
        r, {"frame_id", "class", "center", "dims", "yaw", "score", "track_id", "velocity",
          "score_2d", "score_3d"}, "annotation");
      ScoredAnnotation a;
      a.frame_id = string(r, "frame_id");
      a.class_label = string(r, "class");
      const geom::Vec3 center = vec3(r, "center");
      const geom::Vec3 dims = vec3(r, "dims");
      const double yaw = finite_number(r, "yaw");
      if (!(dims.minCoeff() > 0.0)) {
        throw Error(ErrorKind::format, "'dims' must be positive");
      }
      // Yaw is stored already normalized; keep it verbatim so reading is
      // the exact inverse of writing.
      a.cuboid = geom::Cuboid3D{center, dims, yaw};
      if (!(yaw > -geom::kPi - 1e-12 && yaw <= geom::kPi + 1e-12)) {
        a.cuboid.yaw = geom::normalize_angle(yaw);
      }
      a.score = parse_unit_score(r, "score");
      if (r.contains("track_id")) {
        a.track_id = integer(r, "track_id");
      }
      if (r.contains("velocity")) {
        a.velocity = vec2(r, "velocity");
      }
      if (r.contains("score_2d")) {
        a.score_2d = parse_unit_score(r, "score_2d");
      }
      if (r.contains("score_3d")) {
        a.score_3d = parse_unit_score(r, "score_3d");
      }
      out.push_back(std::move(a));
    });
  return out;
}

void write_file_atomically(const std::string & path, const std::string & contents)
{
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorKind::io, "cannot write '" + tmp.string() + "'");
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(ErrorKind::io, "write failure on '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::io, "cannot move output into place at '" + path + "'");
  }
}

}  // namespace autolift::ingest
