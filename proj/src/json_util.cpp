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

#include "autolift/json_util.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace autolift::json_util
{

namespace
{

[[noreturn]] void fail(const std::string & msg)
{
  throw Error(ErrorKind::format, msg);
}

template<int N>
Eigen::Matrix<double, N, 1> fixed_array(const json & j, const char * key)
{
  const json & arr = field(j, key);
  if (!arr.is_array() || arr.size() != static_cast<std::size_t>(N)) {
    fail(std::string("'") + key + "' must be an array of " + std::to_string(N) + " numbers");
  }
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) {
    if (!arr[i].is_number()) {
      fail(std::string("'") + key + "' must contain only numbers");
    }
    out[i] = arr[i].get<double>();
    if (!std::isfinite(out[i])) {
      fail(std::string("'") + key + "' contains a non-finite value");
    }
  }
  return out;
}

}  // namespace

void require_object(const json & j, std::string_view what)
{
  if (!j.is_object()) {
    fail(std::string(what) + " must be a JSON object");
  }
}

void reject_unknown_keys(
  const json & j, std::initializer_list<std::string_view> allowed, std::string_view what)
{
  require_object(j, what);
  for (const auto & item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      fail("unknown key '" + item.key() + "' in " + std::string(what));
    }
  }
}

const json & field(const json & j, const char * key)
{
  if (!j.is_object()) {
    fail(std::string("expected an object holding '") + key + "'");
  }
  const auto it = j.find(key);
  if (it == j.end()) {
    fail(std::string("missing field '") + key + "'");
  }
  return *it;
}

double finite_number(const json & j)
{
  if (!j.is_number()) {
    fail("expected a number");
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) {
    fail("non-finite number");
  }
  return v;
}

double finite_number(const json & j, const char * key)
{
  const json & v = field(j, key);
  if (!v.is_number()) {
    fail(std::string("'") + key + "' must be a number");
  }
  const double d = v.get<double>();
  if (!std::isfinite(d)) {
    fail(std::string("'") + key + "' is not finite");
  }
  return d;
}

std::int64_t integer(const json & j, const char * key)
{
  const json & v = field(j, key);
  if (!v.is_number_integer()) {
    fail(std::string("'") + key + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

std::string string(const json & j, const char * key)
{
  const json & v = field(j, key);
  if (!v.is_string()) {
    fail(std::string("'") + key + "' must be a string");
  }
  return v.get<std::string>();
}

geom::Vec3 vec3(const json & j, const char * key) {return fixed_array<3>(j, key);}
geom::Vec2 vec2(const json & j, const char * key) {return fixed_array<2>(j, key);}
Eigen::Vector4d vec4(const json & j, const char * key) {return fixed_array<4>(j, key);}

geom::RigidTransform transform(const json & j, const char * key)
{
  const json & t = field(j, key);
  reject_unknown_keys(t, {"rotation", "translation"}, key);
  return geom::RigidTransform::from_quaternion(vec4(t, "rotation"), vec3(t, "translation"));
}

json to_json(const geom::RigidTransform & t)
{
  const Eigen::Vector4d q = t.quaternion();
  return json{
    {"rotation", {q[0], q[1], q[2], q[3]}},
    {"translation", {t.translation.x(), t.translation.y(), t.translation.z()}}};
}

geom::CameraIntrinsics intrinsics(const json & j, const char * key)
{
  const json & t = field(j, key);
  // Distortion coefficients are accepted for compatibility and ignored:
  // images are assumed rectified.
  reject_unknown_keys(t, {"fx", "fy", "cx", "cy", "width", "height", "distortion"}, key);
  geom::CameraIntrinsics intr;
  intr.fx = finite_number(t, "fx");
  intr.fy = finite_number(t, "fy");
  intr.cx = finite_number(t, "cx");
  intr.cy = finite_number(t, "cy");
  intr.width = static_cast<int>(integer(t, "width"));
  intr.height = static_cast<int>(integer(t, "height"));
  try {
    intr.validate();
  } catch (const Error & e) {
    fail(e.what());
  }
  return intr;
}

json to_json(const geom::CameraIntrinsics & intr)
{
  return json{
    {"fx", intr.fx}, {"fy", intr.fy}, {"cx", intr.cx}, {"cy", intr.cy},
    {"width", intr.width}, {"height", intr.height}};
}

void for_each_ndjson_line(
  const std::string & path, const std::function<void(const json &, std::size_t)> & fn)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::io, "cannot open '" + path + "'");
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(), [](unsigned char ch) {return std::isspace(ch);})) {
      continue;
    }
    const std::string where = path + ":" + std::to_string(line_no) + ": ";
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception & e) {
      throw Error(ErrorKind::format, where + "malformed JSON (" + e.what() + ")");
    }
    try {
      fn(record, line_no);
    } catch (const Error & e) {
      throw Error(e.kind(), where + e.what());
    } catch (const json::exception & e) {
      throw Error(ErrorKind::format, where + e.what());
    }
  }
  if (in.bad()) {
    throw Error(ErrorKind::io, "read failure on '" + path + "'");
  }
}

json read_json_file(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::io, "cannot open '" + path + "'");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::exception & e) {
    throw Error(ErrorKind::format, path + ": malformed JSON (" + e.what() + ")");
  }
}

}  // namespace autolift::json_util
