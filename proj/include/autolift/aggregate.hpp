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

#ifndef AUTOLIFT__AGGREGATE_HPP_
#define AUTOLIFT__AGGREGATE_HPP_

#include <string>
#include <vector>

#include "autolift/geom.hpp"
#include "autolift/ingest.hpp"
#include "autolift/taxonomy.hpp"

namespace autolift::aggregate
{

struct AggregatedCloud
{
  std::vector<geom::Vec3> points;  // current lidar frame
  std::vector<float> intensity;
  std::vector<std::size_t> sweep_index;
};

/// Maps lidar points of sweep `source` into the lidar frame of sweep `target`.
geom::RigidTransform compensation(
  const ingest::SweepFrame & target, const ingest::SweepFrame & source);

/// Concatenates sweeps [idx - past, idx + future], clamped to the sequence,
/// each motion-compensated into the lidar frame of sweep `idx`. Output is
/// ordered by sweep, then by point. Throws Error(empty_input) on an empty
/// sequence and Error(invalid_argument) when idx is out of range.
AggregatedCloud aggregate_sweeps(
  const std::vector<ingest::SweepFrame> & seq, std::size_t idx, AggregationStrategy strategy);

/// Throws Error(unknown_class).
AggregationStrategy strategy_for_class(const Taxonomy & taxonomy, const std::string & class_label);

}  // namespace autolift::aggregate

#endif  // AUTOLIFT__AGGREGATE_HPP_
