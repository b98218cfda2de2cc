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

#ifndef AUTOLIFT__TAXONOMY_HPP_
#define AUTOLIFT__TAXONOMY_HPP_

#include "json.hpp"

#include <string>
#include <vector>

#include "autolift/geom.hpp"

namespace autolift
{

/// Sweep window around the annotated timestamp: `past` sweeps before and
/// `future` sweeps after the current one.
struct AggregationStrategy
{
  int past = 0;
  int future = 0;

  bool operator==(const AggregationStrategy &) const = default;
};

struct ClassInfo
{
  std::string name;
  geom::Vec3 avg_dims = geom::Vec3::Ones();  // (l, w, h) meters
  AggregationStrategy aggregation;
  double match_radius = 2.0;                 // track association, meters
};

class Taxonomy
{
public:
  Taxonomy() = default;
  explicit Taxonomy(std::vector<ClassInfo> classes);

  /// The 18-class driving taxonomy with per-class sweep windows from the
  /// aggregation study (car C, bicycle C+2, adult 1+C+1, ...).
  static Taxonomy defaults();

  static Taxonomy from_json(const nlohmann::json & j);
  nlohmann::json to_json() const;

  bool contains(const std::string & name) const;
  /// Throws Error(unknown_class).
  const ClassInfo & at(const std::string & name) const;
  const std::vector<ClassInfo> & classes() const {return classes_;}
  std::vector<std::string> names() const;

private:
  void validate() const;

  std::vector<ClassInfo> classes_;
};

}  // namespace autolift

#endif  // AUTOLIFT__TAXONOMY_HPP_
