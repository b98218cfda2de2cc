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

#ifndef AUTOLIFT__PRIOR_HPP_
#define AUTOLIFT__PRIOR_HPP_

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "autolift/geom.hpp"
#include "autolift/ingest.hpp"
#include "autolift/taxonomy.hpp"

namespace autolift::prior
{

enum class PriorSource { per_instance, class_average };

/// Size and heading hint for one detection, plus how far the yaw search may
/// stray from that heading.
struct SemanticPrior
{
  geom::Vec3 dims = geom::Vec3::Ones();
  std::optional<double> orientation;   // lidar frame, radians
  double sector_half_width = geom::kPi;
  PriorSource source = PriorSource::class_average;
};

/// Canonical order front < back < left < right.
enum class Face { front = 0, back = 1, left = 2, right = 3 };
enum class ImageRegion { left, center, right };

const char * to_string(Face f);
Face face_from_string(const std::string & s);

/// Per-detection output of an external vision-language model.
struct ExpertRecord
{
  std::string frame_id;
  std::string camera_id;
  geom::Box2D box;
  geom::Vec3 dims = geom::Vec3::Ones();
  std::vector<Face> visible_faces;  // sorted, unique
  ImageRegion image_region = ImageRegion::center;
};

/// Heading of the object in the lidar frame from the faces the camera sees:
/// back -> optical-axis azimuth, front -> +pi, left -> +pi/2, right -> -pi/2.
/// Several faces are averaged on the circle; an exact cancellation falls back
/// to the first face in canonical order. Throws Error(invalid_argument) on an
/// empty face set.
double derive_orientation(
  const ExpertRecord & rec, const geom::RigidTransform & ego_from_camera,
  const geom::RigidTransform & ego_from_lidar);

/// Lookup keyed by (frame_id, camera_id, box corners rounded to 0.1 px).
class ExpertIndex
{
public:
  ExpertIndex() = default;
  explicit ExpertIndex(std::vector<ExpertRecord> records);

  const ExpertRecord * find(
    const std::string & frame_id, const std::string & camera_id, const geom::Box2D & box) const;
  std::size_t size() const {return records_.size();}
  const std::vector<ExpertRecord> & records() const {return records_;}

private:
  using Key = std::tuple<std::string, std::string, long long, long long, long long, long long>;
  static Key make_key(
    const std::string & frame_id, const std::string & camera_id, const geom::Box2D & box);

  std::vector<ExpertRecord> records_;
  std::map<Key, std::size_t> index_;
};

/// NDJSON: {"frame_id", "camera_id", "box": [x1, y1, x2, y2], "dims": [l, w, h],
///          "visible_faces": ["back", "right"], "image_region": "center"}
std::vector<ExpertRecord> load_expert_records(const std::string & path);
void write_expert_records(const std::vector<ExpertRecord> & records, const std::string & path);

struct RoutingConfig
{
  double threshold = 0.3;
  double sector_half_width = geom::kPi / 6.0;
};

/// Confident detections with an expert record get a per-instance prior and a
/// narrow yaw sector; everything else falls back to the class-average size
/// and a full-circle search. Throws Error(unknown_class).
SemanticPrior route(
  const ingest::Detection2D & det, const ExpertRecord * expert, const Taxonomy & taxonomy,
  const ingest::SceneManifest & manifest, const RoutingConfig & cfg = {});

/// Same, with explicit extrinsics instead of a manifest lookup.
SemanticPrior route(
  const ingest::Detection2D & det, const ExpertRecord * expert, const Taxonomy & taxonomy,
  const geom::RigidTransform & ego_from_camera, const geom::RigidTransform & ego_from_lidar,
  const RoutingConfig & cfg = {});

}  // namespace autolift::prior

#endif  // AUTOLIFT__PRIOR_HPP_
