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

#ifndef AUTOLIFT__REFINE_HPP_
#define AUTOLIFT__REFINE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "autolift/geom.hpp"
#include "autolift/ingest.hpp"
#include "autolift/taxonomy.hpp"

namespace autolift::refine
{

/// Annotations of one timestamp, world frame.
struct Frame
{
  std::int64_t timestamp_us = 0;
  std::vector<ingest::ScoredAnnotation> annotations;
};

struct TrackMember
{
  std::int64_t timestamp_us = 0;
  std::size_t frame = 0;       // index into the frame list
  std::size_t annotation = 0;  // index within that frame
};

struct Track
{
  std::int64_t track_id = 0;
  std::string class_label;
  std::vector<TrackMember> members;  // strictly increasing timestamps
};

/// Greedy frame-to-frame association. Between consecutive frames, same-class
/// pairs are taken in ascending BEV center distance (ties by index) while
/// within the class's match radius; each cuboid matches at most once.
/// Unmatched cuboids open new tracks, and a missed frame ends a track. Ids
/// follow first appearance. Frames must be in strictly increasing time.
std::vector<Track> associate(const std::vector<Frame> & frames, const Taxonomy & taxonomy);

/// Replaces every member's score with the mean over its track.
void refine_scores(const std::vector<Track> & tracks, std::vector<Frame> & frames);

/// Finite-difference BEV velocity per member (central inside, one-sided at
/// the ends); all absent for single-member tracks.
std::vector<std::optional<geom::Vec2>> estimate_velocity(
  const Track & track, const std::vector<Frame> & frames);

/// associate + refine_scores + estimate_velocity, writing track ids and
/// velocities back into the frames.
std::vector<Track> refine_sequence(std::vector<Frame> & frames, const Taxonomy & taxonomy);

}  // namespace autolift::refine

#endif  // AUTOLIFT__REFINE_HPP_
