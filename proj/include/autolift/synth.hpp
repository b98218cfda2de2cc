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

#ifndef AUTOLIFT__SYNTH_HPP_
#define AUTOLIFT__SYNTH_HPP_

#include "json.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "autolift/geom.hpp"
#include "autolift/ingest.hpp"
#include "autolift/pipeline.hpp"
#include "autolift/prior.hpp"

// Synthetic scenes with known cuboids. Points are sampled on the faces that
// face the sensor, 2D detections are the projected cuboid boxes and masks
// are rasterized from the sampled points. All randomness comes from one
// std::mt19937_64 stream seeded with SceneSpec::seed; uniform and normal
// draws use fixed transforms (53-bit mantissa, Box-Muller) so the stream is
// the same with every standard library.
namespace autolift::synth
{

struct SynthObject
{
  std::string class_label;
  geom::Cuboid3D cuboid;  // world frame at the first timestamp
  geom::Vec2 velocity = geom::Vec2::Zero();
};

/// A thin box (wall, fence) that emits points but no detection.
struct Occluder
{
  geom::Cuboid3D cuboid;  // world frame
  int points = 500;
};

struct RandomObjects
{
  int min_count = 5;
  int max_count = 20;
  std::vector<std::string> classes{"car", "adult", "bicycle", "motorcycle", "traffic-cone",
    "barrier"};
  double min_range = 10.0;  // meters from the ego origin
  double max_range = 40.0;
};

struct SceneSpec
{
  std::uint64_t seed = 0;
  std::vector<SynthObject> objects;
  /// When set, `objects` is replaced by a random placement drawn from the seed.
  std::optional<RandomObjects> random;
  std::vector<Occluder> occluders;
  /// Empty means default_cameras(6) for random placement and
  /// default_cameras(1) otherwise.
  std::vector<ingest::CameraCalibration> cameras;
  geom::RigidTransform ego_from_lidar = default_ego_from_lidar();
  std::vector<std::int64_t> timestamps_us{0};
  geom::RigidTransform ego_start;          // world <- ego at the first timestamp
  geom::Vec2 ego_velocity = geom::Vec2::Zero();
  int min_points = 200;                   // per object and sweep
  int max_points = 400;
  double noise_sigma = 0.0;               // meters, world frame
  double detection_score = 0.9;
  int mask_dilation = 2;                  // pixels
  bool with_masks = true;

  static geom::RigidTransform default_ego_from_lidar();
  /// Surround rig of `count` cameras spaced evenly in azimuth, the first
  /// looking along ego +x. 1600x900 pinhole, 64 degree horizontal field.
  static std::vector<ingest::CameraCalibration> default_cameras(int count);

  static SceneSpec from_json(const nlohmann::json & j);
  nlohmann::json to_json() const;
  void validate() const;
};

struct GeneratedScene
{
  ingest::Scene scene;
  std::vector<ingest::Detection2D> detections;
  std::vector<std::size_t> detection_object;  // generating object per detection
  std::vector<prior::ExpertRecord> expert;    // one per detection
  /// Visible objects per sweep, world frame; track_id is the object index.
  std::vector<ingest::ScoredAnnotation> ground_truth;
  std::vector<SynthObject> objects;           // after random placement
  /// Sampled surface points per sweep and object, world frame, before noise.
  std::vector<std::vector<std::vector<geom::Vec3>>> object_points;
};

/// Places random objects (when requested) and renders every sweep. Throws
/// Error(invalid_argument) on overlapping objects, empty cameras or a
/// placement that cannot be satisfied.
GeneratedScene generate_scene(const SceneSpec & spec);

/// Object cuboid at a timestamp, world frame.
geom::Cuboid3D object_at(const SynthObject & obj, std::int64_t t0_us, std::int64_t t_us);

/// Writes manifest.json, sweeps/*.bin, detections.ndjson, expert.ndjson and
/// gt.ndjson into `dir` (created if missing).
void write_scene(const GeneratedScene & g, const std::string & dir);

enum class PriorMode
{
  oracle,         // per-instance prior: true dims and yaw, narrow sector
  class_average,  // true dims, no orientation, full-circle search
  expert,         // route through the generated expert records
};

struct ObjectRecovery
{
  std::string frame_id;
  std::size_t object = 0;
  std::string class_label;
  bool recovered = false;  // a cuboid was produced for the detection
  geom::Cuboid3D predicted;  // world frame, valid when recovered
  geom::Cuboid3D truth;      // world frame
  double center_error = 0.0;
  double yaw_error = 0.0;
  double dim_error = 0.0;  // max abs dimension difference
};

struct RecoveryReport
{
  std::vector<ObjectRecovery> objects;
  std::size_t num_gt = 0;
  std::size_t num_pred = 0;
  std::map<double, double> recall;     // BEV distance threshold -> recall
  std::map<double, double> precision;
  double wall_time_s = 0.0;            // annotate stage only
};

/// Generates the scene, runs the annotate pipeline with the chosen priors
/// and measures recovery against the generating cuboids.
RecoveryReport verify_roundtrip(
  const SceneSpec & spec, const pipeline::PipelineConfig & cfg, PriorMode mode);

/// Same, on an already generated scene.
RecoveryReport verify_roundtrip(
  const GeneratedScene & g, const pipeline::PipelineConfig & cfg, PriorMode mode);

nlohmann::json to_json(const RecoveryReport & r);

}  // namespace autolift::synth

#endif  // AUTOLIFT__SYNTH_HPP_
