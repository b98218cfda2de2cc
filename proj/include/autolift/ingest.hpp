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

#ifndef AUTOLIFT__INGEST_HPP_
#define AUTOLIFT__INGEST_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "autolift/geom.hpp"
#include "autolift/mask.hpp"
#include "autolift/taxonomy.hpp"

namespace autolift::ingest
{

/// On-disk layout of a sweep: little-endian float32 records of 4 floats
/// (x, y, z, intensity) or 5 floats (x, y, z, intensity, ring). The stride
/// is configured, never guessed from the file length.
enum class PointStride : int { xyzi = 4, xyzir = 5 };

PointStride stride_from_int(int floats);

struct LidarPoint
{
  float x = 0.0F;
  float y = 0.0F;
  float z = 0.0F;
  float intensity = 0.0F;

  geom::Vec3 xyz() const {return {x, y, z};}
  bool operator==(const LidarPoint &) const = default;
};

struct SweepFrame
{
  std::string frame_id;
  std::int64_t timestamp_us = 0;
  std::vector<LidarPoint> points;
  geom::RigidTransform ego_pose;     // world <- ego
  geom::RigidTransform sensor_pose;  // ego <- lidar

  geom::RigidTransform world_from_lidar() const {return ego_pose * sensor_pose;}
};

struct CameraCalibration
{
  std::string id;
  geom::CameraIntrinsics intrinsics;
  geom::RigidTransform ego_from_camera;
};

struct SweepEntry
{
  std::string frame_id;
  std::int64_t timestamp_us = 0;
  geom::RigidTransform ego_pose;  // world <- ego
  std::string path;               // relative to the manifest directory
};

struct SceneManifest
{
  std::vector<CameraCalibration> cameras;
  geom::RigidTransform ego_from_lidar;
  std::vector<SweepEntry> sweeps;

  /// Throws Error(unknown_camera).
  const CameraCalibration & camera(const std::string & id) const;
  geom::RigidTransform camera_from_lidar(const std::string & camera_id) const;
  /// Index of the sweep with this frame id, if any.
  std::optional<std::size_t> sweep_index(const std::string & frame_id) const;
};

struct Scene
{
  SceneManifest manifest;
  std::vector<SweepFrame> sweeps;
};

/// Manifest layout:
///   {"lidar": {"extrinsics": T},
///    "cameras": [{"id", "intrinsics": {fx, fy, cx, cy, width, height}, "extrinsics": T}],
///    "sweeps": [{"frame_id"?, "timestamp", "ego_pose": T, "path"}]}
/// where T = {"rotation": [w, x, y, z], "translation": [x, y, z]}; camera and
/// lidar extrinsics map into the ego frame. `frame_id` defaults to the
/// decimal timestamp.
SceneManifest load_manifest(const std::string & path);
void write_manifest(const SceneManifest & manifest, const std::string & path);

std::vector<LidarPoint> load_sweep_points(const std::string & path, PointStride stride);
/// The ring field is written as 0 with the 5-float stride.
void write_sweep_points(
  const std::vector<LidarPoint> & points, const std::string & path, PointStride stride);

/// One sweep with poses filled in from the manifest.
SweepFrame load_sweep(
  const SceneManifest & manifest, std::size_t index, const std::string & base_dir,
  PointStride stride);
Scene load_scene(const std::string & manifest_path, PointStride stride);

struct Detection2D
{
  std::string frame_id;
  std::string camera_id;
  std::string class_label;
  geom::Box2D box;
  double score = 0.0;
  std::optional<BinaryMask> mask;
};

/// NDJSON, one detection per line:
///   {"frame_id", "camera_id", "class", "box": [x1, y1, x2, y2], "score",
///    "mask_rle"?: {"size": [height, width], "counts": [...]}}
std::vector<Detection2D> load_detections(const std::string & path, const Taxonomy & taxonomy);
void write_detections(const std::vector<Detection2D> & dets, const std::string & path);

/// Checks camera ids and mask sizes against the manifest.
void validate_detections(const std::vector<Detection2D> & dets, const SceneManifest & manifest);

struct ScoredAnnotation
{
  std::string frame_id;
  std::string class_label;
  geom::Cuboid3D cuboid;  // world frame
  double score = 0.0;
  std::optional<std::int64_t> track_id;
  std::optional<geom::Vec2> velocity;  // BEV, m/s
  // Score components before fusion; carried so that the fusion weight can be
  // re-tuned offline.
  std::optional<double> score_2d;
  std::optional<double> score_3d;
};

/// NDJSON, one annotation per line:
///   {"frame_id", "class", "center": [x, y, z], "dims": [l, w, h], "yaw", "score",
///    "track_id"?, "velocity"?: [vx, vy], "score_2d"?, "score_3d"?}
/// Doubles are printed in shortest round-trip form.
void write_annotations(const std::vector<ScoredAnnotation> & items, const std::string & path);
std::string annotations_to_ndjson(const std::vector<ScoredAnnotation> & items);
std::vector<ScoredAnnotation> load_annotations(const std::string & path);

/// Writes to a sibling temporary file and renames it over `path`, so that a
/// failed run never leaves a partial output behind.
void write_file_atomically(const std::string & path, const std::string & contents);

}  // namespace autolift::ingest

#endif  // AUTOLIFT__INGEST_HPP_
