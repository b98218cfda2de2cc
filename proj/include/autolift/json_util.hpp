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

#ifndef AUTOLIFT__JSON_UTIL_HPP_
#define AUTOLIFT__JSON_UTIL_HPP_

#include "json.hpp"

#include <functional>
#include <initializer_list>
#include <string>
#include <string_view>

#include "autolift/error.hpp"
#include "autolift/geom.hpp"

// Strict accessors for hand-written JSON documents. Every failure raises
// Error(format) with the offending key in the message.
namespace autolift::json_util
{

using json = nlohmann::json;

void require_object(const json & j, std::string_view what);
/// Rejects keys outside `allowed`.
void reject_unknown_keys(
  const json & j, std::initializer_list<std::string_view> allowed, std::string_view what);

const json & field(const json & j, const char * key);
double finite_number(const json & j, const char * key);
double finite_number(const json & j);
std::int64_t integer(const json & j, const char * key);
std::string string(const json & j, const char * key);
geom::Vec3 vec3(const json & j, const char * key);
geom::Vec2 vec2(const json & j, const char * key);
Eigen::Vector4d vec4(const json & j, const char * key);

/// {"rotation": [w, x, y, z], "translation": [x, y, z]}
geom::RigidTransform transform(const json & j, const char * key);
json to_json(const geom::RigidTransform & t);
geom::CameraIntrinsics intrinsics(const json & j, const char * key);
json to_json(const geom::CameraIntrinsics & intr);

/// Reads newline-delimited JSON, calling `fn(record, line_number)` per
/// non-blank line. Parse failures and exceptions thrown by `fn` are rethrown
/// as Error(format) prefixed with "<path>:<line>: ".
void for_each_ndjson_line(
  const std::string & path, const std::function<void(const json &, std::size_t)> & fn);

json read_json_file(const std::string & path);

}  // namespace autolift::json_util

#endif  // AUTOLIFT__JSON_UTIL_HPP_
