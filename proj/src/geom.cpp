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

#include "autolift/geom.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "autolift/error.hpp"

namespace autolift
{

const char * to_string(ErrorKind kind)
{
  switch (kind) {
    case ErrorKind::io: return "io";
    case ErrorKind::format: return "format";
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::unknown_class: return "unknown_class";
    case ErrorKind::unknown_camera: return "unknown_camera";
    case ErrorKind::empty_input: return "empty_input";
  }
  return "unknown";
}

}  // namespace autolift

namespace autolift::geom
{

double normalize_angle(double angle)
{
  double a = std::fmod(angle + kPi, 2.0 * kPi);
  if (a <= 0.0) {
    a += 2.0 * kPi;
  }
  return a - kPi;
}

double yaw_diff(double a, double b)
{
  return std::abs(normalize_angle(a - b));
}

RigidTransform RigidTransform::from_quaternion(const Eigen::Vector4d & wxyz, const Vec3 & t)
{
  Eigen::Quaterniond q(wxyz[0], wxyz[1], wxyz[2], wxyz[3]);
  if (q.norm() == 0.0) {
    throw Error(ErrorKind::invalid_argument, "zero-norm quaternion");
  }
  q.normalize();
  RigidTransform out;
  out.rotation = q.toRotationMatrix();
  out.translation = t;
  return out;
}

RigidTransform RigidTransform::from_yaw(double yaw, const Vec3 & t)
{
  RigidTransform out;
  out.rotation = Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
  out.translation = t;
  return out;
}

RigidTransform RigidTransform::inverse() const
{
  RigidTransform out;
  out.rotation = rotation.transpose();
  out.translation = -(out.rotation * translation);
  return out;
}

double RigidTransform::yaw() const
{
  return std::atan2(rotation(1, 0), rotation(0, 0));
}

Eigen::Vector4d RigidTransform::quaternion() const
{
  Eigen::Quaterniond q(rotation);
  q.normalize();
  if (q.w() < 0.0) {
    q.coeffs() *= -1.0;
  }
  return {q.w(), q.x(), q.y(), q.z()};
}

bool RigidTransform::is_orthonormal(double tol) const
{
  const Mat3 gram = rotation.transpose() * rotation;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) {
    return false;
  }
  return std::abs(rotation.determinant() - 1.0) <= tol;
}

RigidTransform compose(const RigidTransform & a, const RigidTransform & b)
{
  RigidTransform out;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.rotation * b.translation + a.translation;
  return out;
}

void CameraIntrinsics::validate() const
{
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "camera focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw Error(ErrorKind::invalid_argument, "camera image size must be positive");
  }
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height)) {
    throw Error(ErrorKind::invalid_argument, "camera principal point outside the image");
  }
}

Cuboid3D Cuboid3D::make(const Vec3 & center, const Vec3 & dims, double yaw)
{
  Cuboid3D c{center, dims, normalize_angle(yaw)};
  if (!c.valid()) {
    throw Error(ErrorKind::invalid_argument, "cuboid dimensions must be positive and finite");
  }
  return c;
}

bool Cuboid3D::valid() const
{
  return dims.x() > 0.0 && dims.y() > 0.0 && dims.z() > 0.0 &&
         dims.allFinite() && center.allFinite() && std::isfinite(yaw);
}

std::optional<Vec2> project_point(const Vec3 & p, const CameraIntrinsics & intr)
{
  if (!(p.z() > 0.0)) {
    return std::nullopt;
  }
  return Vec2(intr.fx * p.x() / p.z() + intr.cx, intr.fy * p.y() / p.z() + intr.cy);
}

std::array<Vec3, 8> cuboid_corners(const Cuboid3D & c)
{
  static constexpr std::array<std::array<double, 3>, 8> kSigns{{
    {+1, +1, -1}, {-1, +1, -1}, {-1, -1, -1}, {+1, -1, -1},
    {+1, +1, +1}, {-1, +1, +1}, {-1, -1, +1}, {+1, -1, +1},
  }};
  const double cs = std::cos(c.yaw);
  const double sn = std::sin(c.yaw);
  std::array<Vec3, 8> out;
  for (std::size_t i = 0; i < 8; ++i) {
    const double lx = kSigns[i][0] * 0.5 * c.dims.x();
    const double ly = kSigns[i][1] * 0.5 * c.dims.y();
    const double lz = kSigns[i][2] * 0.5 * c.dims.z();
    out[i] = Vec3(
      c.center.x() + cs * lx - sn * ly,
      c.center.y() + sn * lx + cs * ly,
      c.center.z() + lz);
  }
  return out;
}

std::array<Vec2, 4> bev_rect(const Cuboid3D & c)
{
  const auto corners = cuboid_corners(c);
  return {corners[0].head<2>(), corners[1].head<2>(), corners[2].head<2>(), corners[3].head<2>()};
}

Vec3 to_local(const Vec3 & p, const Cuboid3D & c)
{
  const double cs = std::cos(c.yaw);
  const double sn = std::sin(c.yaw);
  const Vec3 d = p - c.center;
  return {cs * d.x() + sn * d.y(), -sn * d.x() + cs * d.y(), d.z()};
}

bool point_in_cuboid(const Vec3 & p, const Cuboid3D & c)
{
  return inside_local_box(
    p.x() - c.center.x(), p.y() - c.center.y(), p.z() - c.center.z(),
    std::cos(c.yaw), std::sin(c.yaw),
    0.5 * c.dims.x() + kInsideTolerance,
    0.5 * c.dims.y() + kInsideTolerance,
    0.5 * c.dims.z() + kInsideTolerance);
}

std::optional<Box2D> project_cuboid_to_box(
  const Cuboid3D & c, const RigidTransform & camera_from_sensor,
  const CameraIntrinsics & intr)
{
  double umin = std::numeric_limits<double>::infinity();
  double vmin = umin;
  double umax = -umin;
  double vmax = -umin;
  bool any = false;
  for (const auto & corner : cuboid_corners(c)) {
    const auto uv = project_point(camera_from_sensor.apply(corner), intr);
    if (!uv) {
      continue;
    }
    any = true;
    umin = std::min(umin, uv->x());
    umax = std::max(umax, uv->x());
    vmin = std::min(vmin, uv->y());
    vmax = std::max(vmax, uv->y());
  }
  if (!any) {
    return std::nullopt;
  }
  const double w = static_cast<double>(intr.width);
  const double h = static_cast<double>(intr.height);
  return Box2D{
    std::clamp(umin, 0.0, w), std::clamp(vmin, 0.0, h),
    std::clamp(umax, 0.0, w), std::clamp(vmax, 0.0, h)};
}

double iou_2d(const Box2D & a, const Box2D & b)
{
  const double ix = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double iy = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  const double inter = (ix > 0.0 && iy > 0.0) ? ix * iy : 0.0;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) {
    return 0.0;
  }
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace autolift::geom
