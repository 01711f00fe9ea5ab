// Copyright 2026 The scenemock Authors
// SPDX-License-Identifier: Apache-2.0

// World frame: ground plane y = 0, +y up. Azimuth is a right-handed rotation
// about +y, so a point on +x turns toward -z for positive angles. Objects face
// -z in their canonical pose.

#pragma once

#include <array>
#include <numbers>
#include <optional>
#include <span>

#include <Eigen/Core>

namespace scenemock {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kEyeHeight = 1.8;
inline constexpr double kPi = std::numbers::pi;

/// Wraps an angle into [-pi, pi).
double wrap_angle(double radians);

/// Rotation about the world up axis.
Mat3 rotation_about_up(double azimuth);

/// Derivative of rotation_about_up with respect to the angle.
Mat3 rotation_about_up_derivative(double azimuth);

/// Applies the up-axis rotation to a ground-plane vector (x, z).
Vec2 rotate_ground(double azimuth, const Vec2& xz);

struct ImageSize {
  int width = 0;
  int height = 0;
};

class Camera {
 public:
  Camera(const Mat3& rotation, double focal_length, const Vec3& position,
         ImageSize image_size, ImageSize map_size);

  /// Camera at (0, 1.8, 0).
  static Camera at_eye_height(const Mat3& rotation, double focal_length,
                              ImageSize image_size, ImageSize map_size);

  /// Eye-height camera looking along +z, tilted down by `pitch` radians.
  static Camera pitched(double pitch, double focal_length, ImageSize image_size,
                        ImageSize map_size);

  /// Default harness camera: 640x480 image, f = 500, 128x96 map, 25 deg pitch.
  static Camera harness_default();

  const Mat3& rotation() const { return rotation_; }
  double focal_length() const { return focal_length_; }
  const Vec3& position() const { return position_; }
  ImageSize image_size() const { return image_size_; }
  ImageSize map_size() const { return map_size_; }

  Vec3 to_camera(const Vec3& world) const {
    return rotation_ * (world - position_);
  }

  /// Continuous map-grid coordinates of a world point. Throws kBehindCamera
  /// when the camera-space depth is <= 1e-6. If `jacobian` is given it
  /// receives d(map)/d(world).
  Vec2 project(const Vec3& world,
               Eigen::Matrix<double, 2, 3>* jacobian = nullptr) const;

  /// Unit world-space direction of the ray through a map-grid position.
  Vec3 ray_direction(const Vec2& map_position) const;

  /// Intersection of the ray through `map_position` with the horizontal plane
  /// y = height. Empty if the plane is not hit in front of the camera.
  std::optional<Vec3> intersect_horizontal(const Vec2& map_position,
                                           double height) const;

 private:
  Mat3 rotation_;
  double focal_length_;
  Vec3 position_;
  ImageSize image_size_;
  ImageSize map_size_;
};

/// Ground-plane pose of an object: translation (x, z) and azimuth.
struct ObjectPose {
  Vec2 translation = Vec2::Zero();
  double azimuth = 0.0;
};

/// Full placement of a deformable template instance.
struct PlacementParams {
  Vec2 translation = Vec2::Zero();
  double azimuth = 0.0;
  double scale = 1.0;
  Eigen::VectorXd deform;

  ObjectPose pose() const { return {translation, azimuth}; }
};

/// Rotates about up, scales uniformly, then shifts by (t_x, 0, t_z). Rows of
/// `keypoints` are 3D points.
Eigen::MatrixX3d place_keypoints(const Eigen::MatrixX3d& keypoints,
                                 const PlacementParams& params);

/// Box that rotates about the world up axis only.
struct OrientedBox {
  Vec3 center = Vec3::Zero();
  Vec3 half_extents = Vec3::Ones();
  double azimuth = 0.0;

  /// Footprint corners in the ground plane (x, z), counterclockwise in (x, z).
  std::array<Vec2, 4> footprint() const;
  std::array<Vec3, 8> corners() const;
  double volume() const {
    return 8.0 * half_extents.x() * half_extents.y() * half_extents.z();
  }
  /// Entry distance of a ray into the box, if any (t >= 0).
  std::optional<double> ray_entry(const Vec3& origin, const Vec3& direction) const;
};

/// Area of the intersection of two convex polygons given counterclockwise.
double convex_intersection_area(std::span<const Vec2> a, std::span<const Vec2> b);

double obb_iou_3d(const OrientedBox& a, const OrientedBox& b);

/// Separating-axis overlap test after scaling both boxes' half extents by
/// `shrink` (0 < shrink <= 1).
bool obb_intersects(const OrientedBox& a, const OrientedBox& b,
                    double shrink = 0.9);

}  // namespace scenemock
