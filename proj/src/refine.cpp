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

#include "autolift/refine.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "autolift/error.hpp"

namespace autolift::refine
{

namespace
{

double bev_distance(const ingest::ScoredAnnotation & a, const ingest::ScoredAnnotation & b)
{
  return std::hypot(
    a.cuboid.center.x() - b.cuboid.center.x(), a.cuboid.center.y() - b.cuboid.center.y());
}

}  // namespace

std::vector<Track> associate(const std::vector<Frame> & frames, const Taxonomy & taxonomy)
{
  for (std::size_t f = 1; f < frames.size(); ++f) {
    if (frames[f].timestamp_us <= frames[f - 1].timestamp_us) {
      throw Error(ErrorKind::invalid_argument, "frames must be in strictly increasing time");
    }
  }
  std::vector<Track> tracks;
  // Track index owning each annotation of the previous frame.
  std::vector<std::size_t> prev_owner;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const auto & cur = frames[f].annotations;
    std::vector<std::size_t> owner(cur.size(), SIZE_MAX);
    if (f > 0) {
      const auto & prev = frames[f - 1].annotations;
      std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
      for (std::size_t i = 0; i < prev.size(); ++i) {
        const double radius = taxonomy.at(prev[i].class_label).match_radius;
        for (std::size_t j = 0; j < cur.size(); ++j) {
          if (prev[i].class_label != cur[j].class_label) {
            continue;
          }
          const double d = bev_distance(prev[i], cur[j]);
          if (d <= radius) {
            pairs.emplace_back(d, i, j);
          }
        }
      }
      std::sort(pairs.begin(), pairs.end());
      std::vector<bool> used_prev(prev.size(), false);
      for (const auto & [d, i, j] : pairs) {
        if (used_prev[i] || owner[j] != SIZE_MAX) {
          continue;
        }
        used_prev[i] = true;
        owner[j] = prev_owner[i];
        tracks[owner[j]].members.push_back({frames[f].timestamp_us, f, j});
      }
    }
    for (std::size_t j = 0; j < cur.size(); ++j) {
      if (owner[j] != SIZE_MAX) {
        continue;
      }
      taxonomy.at(cur[j].class_label);
      owner[j] = tracks.size();
      Track t;
      t.track_id = static_cast<std::int64_t>(tracks.size());
      t.class_label = cur[j].class_label;
      t.members.push_back({frames[f].timestamp_us, f, j});
      tracks.push_back(std::move(t));
    }
    prev_owner = std::move(owner);
  }
  return tracks;
}

void refine_scores(const std::vector<Track> & tracks, std::vector<Frame> & frames)
{
  for (const auto & t : tracks) {
    if (t.members.size() < 2) {
      continue;
    }
    double sum = 0.0;
    for (const auto & m : t.members) {
      sum += frames[m.frame].annotations[m.annotation].score;
    }
    const double mean = std::clamp(sum / static_cast<double>(t.members.size()), 0.0, 1.0);
    for (const auto & m : t.members) {
      frames[m.frame].annotations[m.annotation].score = mean;
    }
  }
}

std::vector<std::optional<geom::Vec2>> estimate_velocity(
  const Track & track, const std::vector<Frame> & frames)
{
  const std::size_t n = track.members.size();
  std::vector<std::optional<geom::Vec2>> out(n);
  if (n < 2) {
    return out;
  }
  const auto xy = [&](std::size_t i) -> geom::Vec2 {
      const auto & m = track.members[i];
      return frames[m.frame].annotations[m.annotation].cuboid.center.head<2>();
    };
  const auto t = [&](std::size_t i) {
      return static_cast<double>(track.members[i].timestamp_us) * 1e-6;
    };
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1;
    const std::size_t b = i + 1 == n ? n - 1 : i + 1;
    out[i] = (xy(b) - xy(a)) / (t(b) - t(a));
  }
  return out;
}

std::vector<Track> refine_sequence(std::vector<Frame> & frames, const Taxonomy & taxonomy)
{
  std::vector<Track> tracks = associate(frames, taxonomy);
  refine_scores(tracks, frames);
  for (const auto & t : tracks) {
    const auto v = estimate_velocity(t, frames);
    for (std::size_t i = 0; i < t.members.size(); ++i) {
      auto & ann = frames[t.members[i].frame].annotations[t.members[i].annotation];
      ann.track_id = t.track_id;
      ann.velocity = v[i];
    }
  }
  return tracks;
}

}  // namespace autolift::refine
