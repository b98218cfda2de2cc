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

#include "autolift/prior.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "autolift/error.hpp"
#include "autolift/json_util.hpp"

namespace autolift::prior
{

using json_util::json;

const char * to_string(Face f)
{
  switch (f) {
    case Face::front: return "front";
    case Face::back: return "back";
    case Face::left: return "left";
    case Face::right: return "right";
  }
  return "front";
}

Face face_from_string(const std::string & s)
{
  if (s == "front") {return Face::front;}
  if (s == "back") {return Face::back;}
  if (s == "left") {return Face::left;}
  if (s == "right") {return Face::right;}
  throw Error(ErrorKind::format, "unknown face '" + s + "'");
}

namespace
{

const char * to_string(ImageRegion r)
{
  switch (r) {
    case ImageRegion::left: return "left";
    case ImageRegion::center: return "center";
    case ImageRegion::right: return "right";
  }
  return "center";
}

ImageRegion region_from_string(const std::string & s)
{
  if (s == "left") {return ImageRegion::left;}
  if (s == "center") {return ImageRegion::center;}
  if (s == "right") {return ImageRegion::right;}
  throw Error(ErrorKind::format, "unknown image_region '" + s + "'");
}

double face_offset(Face f)
{
  switch (f) {
    case Face::back: return 0.0;
    case Face::front: return geom::kPi;
    case Face::left: return 0.5 * geom::kPi;
    case Face::right: return -0.5 * geom::kPi;
  }
  return 0.0;
}

}  // namespace

double derive_orientation(
  const ExpertRecord & rec, const geom::RigidTransform & ego_from_camera,
  const geom::RigidTransform & ego_from_lidar)
{
  if (rec.visible_faces.empty()) {
    throw Error(ErrorKind::invalid_argument, "expert record has no visible faces");
  }
  std::vector<Face> faces = rec.visible_faces;
  std::sort(faces.begin(), faces.end());
  faces.erase(std::unique(faces.begin(), faces.end()), faces.end());

  const geom::RigidTransform lidar_from_camera = ego_from_lidar.inverse() * ego_from_camera;
  const geom::Vec3 axis = lidar_from_camera.rotation * geom::Vec3::UnitZ();
  const double azimuth = std::atan2(axis.y(), axis.x());

  double sx = 0.0;
  double sy = 0.0;
  for (const Face f : faces) {
    sx += std::cos(face_offset(f));
    sy += std::sin(face_offset(f));
  }
  const double offset = (std::hypot(sx, sy) < 1e-9) ? face_offset(faces.front()) :
    std::atan2(sy, sx);
  return geom::normalize_angle(azimuth + offset);
}

ExpertIndex::ExpertIndex(std::vector<ExpertRecord> records)
: records_(std::move(records))
{
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto & r = records_[i];
    index_.emplace(make_key(r.frame_id, r.camera_id, r.box), i);
  }
}

ExpertIndex::Key ExpertIndex::make_key(
  const std::string & frame_id, const std::string & camera_id, const geom::Box2D & box)
{
  const auto q = [](double v) {return std::llround(v * 10.0);};
  return {frame_id, camera_id, q(box.x1), q(box.y1), q(box.x2), q(box.y2)};
}

const ExpertRecord * ExpertIndex::find(
  const std::string & frame_id, const std::string & camera_id, const geom::Box2D & box) const
{
  const auto it = index_.find(make_key(frame_id, camera_id, box));
  return it == index_.end() ? nullptr : &records_[it->second];
}

std::vector<ExpertRecord> load_expert_records(const std::string & path)
{
  using namespace json_util;
  std::vector<ExpertRecord> out;
  for_each_ndjson_line(path, [&](const json & r, std::size_t) {
      reject_unknown_keys(
        r, {"frame_id", "camera_id", "box", "dims", "visible_faces", "image_region"},
        "expert record");
      ExpertRecord rec;
      rec.frame_id = string(r, "frame_id");
      rec.camera_id = string(r, "camera_id");
      const json & b = field(r, "box");
      if (!b.is_array() || b.size() != 4) {
        throw Error(ErrorKind::format, "'box' must be [x1, y1, x2, y2]");
      }
      rec.box = geom::Box2D{finite_number(b[0]), finite_number(b[1]), finite_number(b[2]),
        finite_number(b[3])};
      rec.dims = vec3(r, "dims");
      if (!(rec.dims.minCoeff() > 0.0)) {
        throw Error(ErrorKind::format, "'dims' must be positive");
      }
      const json & faces = field(r, "visible_faces");
      if (!faces.is_array() || faces.empty()) {
        throw Error(ErrorKind::format, "'visible_faces' must be a non-empty array");
      }
      for (const auto & f : faces) {
        if (!f.is_string()) {
          throw Error(ErrorKind::format, "'visible_faces' must hold strings");
        }
        rec.visible_faces.push_back(face_from_string(f.get<std::string>()));
      }
      std::sort(rec.visible_faces.begin(), rec.visible_faces.end());
      rec.visible_faces.erase(
        std::unique(rec.visible_faces.begin(), rec.visible_faces.end()), rec.visible_faces.end());
      rec.image_region = r.contains("image_region") ?
      region_from_string(string(r, "image_region")) : ImageRegion::center;
      out.push_back(std::move(rec));
    });
  return out;
}

void write_expert_records(const std::vector<ExpertRecord> & records, const std::string & path)
{
  std::string out;
  for (const auto & r : records) {
    json faces = json::array();
    for (const Face f : r.visible_faces) {
      faces.push_back(to_string(f));
    }
    const json j{
      {"frame_id", r.frame_id},
      {"camera_id", r.camera_id},
      {"box", {r.box.x1, r.box.y1, r.box.x2, r.box.y2}},
      {"dims", {r.dims.x(), r.dims.y(), r.dims.z()}},
      {"visible_faces", faces},
      {"image_region", to_string(r.image_region)}};
    out += j.dump();
    out += '\n';
  }
  ingest::write_file_atomically(path, out);
}

SemanticPrior route(
  const ingest::Detection2D & det, const ExpertRecord * expert, const Taxonomy & taxonomy,
  const geom::RigidTransform & ego_from_camera, const geom::RigidTransform & ego_from_lidar,
  const RoutingConfig & cfg)
{
  const ClassInfo & info = taxonomy.at(det.class_label);
  SemanticPrior p;
  if (expert != nullptr && det.score >= cfg.threshold && !expert->visible_faces.empty() &&
    expert->dims.minCoeff() > 0.0)
  {
    p.dims = expert->dims;
    p.orientation = derive_orientation(*expert, ego_from_camera, ego_from_lidar);
    p.sector_half_width = std::clamp(cfg.sector_half_width, 1e-9, geom::kPi);
    p.source = PriorSource::per_instance;
    return p;
  }
  p.dims = info.avg_dims;
  p.sector_half_width = geom::kPi;
  p.source = PriorSource::class_average;
  return p;
}

SemanticPrior route(
  const ingest::Detection2D & det, const ExpertRecord * expert, const Taxonomy & taxonomy,
  const ingest::SceneManifest & manifest, const RoutingConfig & cfg)
{
  // Unknown classes are reported before unknown cameras.
  taxonomy.at(det.class_label);
  const bool use_expert = expert != nullptr && det.score >= cfg.threshold;
  const geom::RigidTransform ego_from_camera = use_expert ?
    manifest.camera(det.camera_id).ego_from_camera : geom::RigidTransform::identity();
  return route(det, expert, taxonomy, ego_from_camera, manifest.ego_from_lidar, cfg);
}

}  // namespace autolift::prior
