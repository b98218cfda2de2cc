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

#include "autolift/taxonomy.hpp"

#include <set>
#include <utility>

#include "autolift/error.hpp"
#include "autolift/json_util.hpp"

namespace autolift
{

Taxonomy::Taxonomy(std::vector<ClassInfo> classes)
: classes_(std::move(classes))
{
  validate();
}

Taxonomy Taxonomy::defaults()
{
  // Average sizes follow common driving-dataset statistics. Sweep windows
  // are the per-class winners of the aggregation study; classes without a
  // clear winner use the current sweep only.
  const auto cls = [](const char * name, double l, double w, double h, int past, int future) {
      return ClassInfo{name, geom::Vec3(l, w, h), AggregationStrategy{past, future}, 2.0};
    };
  return Taxonomy({
    cls("car", 4.63, 1.97, 1.74, 0, 0),
    cls("truck", 6.93, 2.51, 2.84, 0, 0),
    cls("trailer", 12.29, 2.90, 3.87, 0, 0),
    cls("bus", 10.50, 2.94, 3.47, 0, 0),
    cls("construction-vehicle", 6.37, 2.85, 3.19, 0, 0),
    cls("bicycle", 1.72, 0.60, 1.28, 0, 2),
    cls("motorcycle", 2.11, 0.77, 1.47, 1, 1),
    cls("emergency-vehicle", 5.20, 2.05, 2.10, 6, 0),
    cls("adult", 0.73, 0.67, 1.77, 1, 1),
    cls("child", 0.52, 0.50, 1.28, 6, 0),
    cls("police-officer", 0.73, 0.67, 1.77, 0, 0),
    cls("construction-worker", 0.73, 0.67, 1.77, 0, 2),
    cls("stroller", 0.95, 0.60, 1.15, 0, 0),
    cls("personal-mobility", 1.20, 0.60, 1.50, 1, 1),
    cls("pushable-pullable", 0.80, 0.60, 1.00, 0, 0),
    cls("debris", 1.00, 1.00, 0.50, 0, 0),
    cls("traffic-cone", 0.41, 0.41, 1.07, 0, 2),
    cls("barrier", 0.50, 2.53, 0.98, 0, 0),
  });
}

Taxonomy Taxonomy::from_json(const nlohmann::json & j)
{
  using namespace json_util;
  reject_unknown_keys(j, {"classes"}, "taxonomy");
  const json & arr = field(j, "classes");
  if (!arr.is_array()) {
    throw Error(ErrorKind::format, "'classes' must be an array");
  }
  std::vector<ClassInfo> classes;
  for (const auto & c : arr) {
    reject_unknown_keys(c, {"name", "avg_dims", "aggregation", "match_radius"}, "taxonomy class");
    ClassInfo info;
    info.name = string(c, "name");
    info.avg_dims = vec3(c, "avg_dims");
    if (c.contains("aggregation")) {
      const json & agg = c["aggregation"];
      reject_unknown_keys(agg, {"past", "future"}, "aggregation");
      info.aggregation.past = static_cast<int>(integer(agg, "past"));
      info.aggregation.future = static_cast<int>(integer(agg, "future"));
    }
    if (c.contains("match_radius")) {
      info.match_radius = finite_number(c, "match_radius");
    }
    classes.push_back(std::move(info));
  }
  try {
    return Taxonomy(std::move(classes));
  } catch (const Error & e) {
    throw Error(ErrorKind::format, e.what());
  }
}

nlohmann::json Taxonomy::to_json() const
{
  nlohmann::json arr = nlohmann::json::array();
  for (const auto & c : classes_) {
    arr.push_back({
      {"name", c.name},
      {"avg_dims", {c.avg_dims.x(), c.avg_dims.y(), c.avg_dims.z()}},
      {"aggregation", {{"past", c.aggregation.past}, {"future", c.aggregation.future}}},
      {"match_radius", c.match_radius}});
  }
  return {{"classes", arr}};
}

bool Taxonomy::contains(const std::string & name) const
{
  for (const auto & c : classes_) {
    if (c.name == name) {
      return true;
    }
  }
  return false;
}

const ClassInfo & Taxonomy::at(const std::string & name) const
{
  for (const auto & c : classes_) {
    if (c.name == name) {
      return c;
    }
  }
  throw Error(ErrorKind::unknown_class, "unknown class '" + name + "'");
}

std::vector<std::string> Taxonomy::names() const
{
  std::vector<std::string> out;
  out.reserve(classes_.size());
  for (const auto & c : classes_) {
    out.push_back(c.name);
  }
  return out;
}

void Taxonomy::validate() const
{
  std::set<std::string> seen;
  for (const auto & c : classes_) {
    if (c.name.empty()) {
      throw Error(ErrorKind::invalid_argument, "taxonomy class with empty name");
    }
    if (!seen.insert(c.name).second) {
      throw Error(ErrorKind::invalid_argument, "duplicate taxonomy class '" + c.name + "'");
    }
    if (!(c.avg_dims.minCoeff() > 0.0) || !c.avg_dims.allFinite()) {
      throw Error(ErrorKind::invalid_argument, "class '" + c.name + "' needs positive avg_dims");
    }
    if (c.aggregation.past < 0 || c.aggregation.future < 0) {
      throw Error(ErrorKind::invalid_argument, "class '" + c.name + "' has a negative sweep window");
    }
    if (!(c.match_radius > 0.0)) {
      throw Error(ErrorKind::invalid_argument, "class '" + c.name + "' needs a positive match_radius");
    }
  }
}

}  // namespace autolift
