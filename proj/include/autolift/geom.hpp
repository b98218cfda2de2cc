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

#ifndef AUTOLIFT__GEOM_HPP_
#define AUTOLIFT__GEOM_HPP_

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <optional>
#include <vector>

namespace autolift::geom
{

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

/// Slack (meters) applied to every cuboid face in membership tests, so that
/// points sampled exactly on a rotated face are not lost to rounding.
inline constexpr double kInsideTolerance = 1e-4;

/// Wraps an angle into (-pi, pi].
double normalize_angle(double angle);

/// Smallest absolute difference between two angles, in [0, pi].
double yaw_diff(double a, double b);

/// Rigid transform `target <- source`: p_target = rotation * p_source + translation.
struct RigidTransform
{
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() {return {};}
  /// Quaternion in (w, x, y, z) order; it is normalized before use.
  static RigidTransform from_quaternion(const Eigen::Vector4d & wxyz, const Vec3 & t);
  static RigidTransform from_yaw(double yaw, const Vec3 & t);

  Vec3 apply(const Vec3 & p) const {return rotation * p + translation;}
  RigidTransform inverse() const;
  /// Heading of the rotation about +z, atan2(R10, R00).
  double yaw() const;
  /// (w, x, y, z)
  Eigen::Vector4d quaternion() const;
  bool is_orthonormal(double tol = 1e-6) const;
};

/// `a * b` maps b's source frame into a's target frame.
RigidTransform compose(const RigidTransform & a, const RigidTransform & b);
inline RigidTransform operator*(const RigidTransform & a, const RigidTransform & b)
{
  return compose(a, b);
}

struct CameraIntrinsics
{
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;

  /// Throws Error(invalid_argument) unless fx, fy > 0 and the principal
  /// point lies inside the image.
  void validate() const;
};

/// Oriented box. `dims` is (length, width, height) along the local x, y, z
/// axes; yaw rotates local x towards +y about +z.
struct Cuboid3D
{
  Vec3 center = Vec3::Zero();
  Vec3 dims = Vec3::Ones();
  double yaw = 0.0;

  /// Validates the dimensions and normalizes the yaw.
  static Cuboid3D make(const Vec3 & center, const Vec3 & dims, double yaw);
  bool valid() const;
};

struct Box2D
{
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const {return x2 - x1;}
  double height() const {return y2 - y1;}
  double area() const {return (x2 > x1 && y2 > y1) ? (x2 - x1) * (y2 - y1) : 0.0;}
  bool valid() const {return x1 <= x2 && y1 <= y2;}
  bool contains(double u, double v) const {return u >= x1 && u <= x2 && v >= y1 && v <= y2;}
};

std::optional<Vec2> project_point(const Vec3 & p, const CameraIntrinsics & intr);

/// Corner ordering (local frame, before yaw and translation):
///   0 (+l/2, +w/2, -h/2)   4 (+l/2, +w/2, +h/2)
///   1 (-l/2, +w/2, -h/2)   5 (-l/2, +w/2, +h/2)
///   2 (-l/2, -w/2, -h/2)   6 (-l/2, -w/2, +h/2)
///   3 (+l/2, -w/2, -h/2)   7 (+l/2, -w/2, +h/2)
/// Bottom face first, counter-clockwise seen from above, starting at front-left.
std::array<Vec3, 8> cuboid_corners(const Cuboid3D & c);

/// Ground-plane footprint: corners 0..3 of cuboid_corners with z dropped.
std::array<Vec2, 4> bev_rect(const Cuboid3D & c);

/// p expressed in the cuboid's yaw-aligned frame centred on the cuboid:
/// R(-yaw) * (p - center).
Vec3 to_local(const Vec3 & p, const Cuboid3D & c);

/// Membership test shared by every hot loop. `cos_yaw`/`sin_yaw` belong to
/// the cuboid; half extents already include kInsideTolerance.
inline bool inside_local_box(
  double dx, double dy, double dz, double cos_yaw, double sin_yaw,
  double half_l, double half_w, double half_h)
{
  const double lx = cos_yaw * dx + sin_yaw * dy;
  const double ly = -sin_yaw * dx + cos_yaw * dy;
  return std::abs(lx) <= half_l && std::abs(ly) <= half_w && std::abs(dz) <= half_h;
}

/// Boundary-inclusive (with kInsideTolerance) containment test.
bool point_in_cuboid(const Vec3 & p, const Cuboid3D & c);

/// AABB of the projected corners that lie in front of the camera, clipped to
/// the image rectangle. Empty when no corner has positive depth.
std::optional<Box2D> project_cuboid_to_box(
  const Cuboid3D & c, const RigidTransform & camera_from_sensor,
  const CameraIntrinsics & intr);

double iou_2d(const Box2D & a, const Box2D & b);

}  // namespace autolift::geom

#endif  // AUTOLIFT__GEOM_HPP_
