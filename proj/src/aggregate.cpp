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

#include "autolift/aggregate.hpp"

#include <algorithm>

#include "autolift/error.hpp"

namespace autolift::aggregate
{

geom::RigidTransform compensation(
  const ingest::SweepFrame & target, const ingest::SweepFrame & source)
{
  return target.world_from_lidar().inverse() * source.world_from_lidar();
}

AggregatedCloud aggregate_sweeps(
  const std::vector<ingest::SweepFrame> & seq, std::size_t idx, AggregationStrategy strategy)
{
  if (seq.empty()) {
    throw Error(ErrorKind::empty_input, "cannot aggregate an empty sweep sequence");
  }
  if (idx >= seq.size()) {
    throw Error(ErrorKind::invalid_argument, "sweep index out of range");
  }
  const std::size_t past = static_cast<std::size_t>(std::max(0, strategy.past));
  const std::size_t future = static_cast<std::size_t>(std::max(0, strategy.future));
  const std::size_t first = idx >= past ? idx - past : 0;
  const std::size_t last = std::min(seq.size() - 1, idx + future);

  std::size_t total = 0;
  for (std::size_t j = first; j <= last; ++j) {
    total += seq[j].points.size();
  }
  AggregatedCloud out;
  out.points.reserve(total);
  out.intensity.reserve(total);
  out.sweep_index.reserve(total);
  for (std::size_t j = first; j <= last; ++j) {
    const bool identity = (j == idx);
    const geom::RigidTransform t = identity ? geom::RigidTransform::identity() :
      compensation(seq[idx], seq[j]);
    for (const auto & p : seq[j].points) {
      out.points.push_back(identity ? p.xyz() : t.apply(p.xyz()));
      out.intensity.push_back(p.intensity);
      out.sweep_index.push_back(j);
    }
  }
  return out;
}

AggregationStrategy strategy_for_class(const Taxonomy & taxonomy, const std::string & class_label)
{
  return taxonomy.at(class_label).aggregation;
}

}  // namespace autolift::aggregate
