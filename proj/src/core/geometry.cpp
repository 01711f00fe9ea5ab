// Copyright 2026 The scenemock Authors
// SPDX-License-Identifier: Apache-2.0

#include "scenemock/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "scenemock/error.hpp"

namespace scenemock {

double wrap_angle(double radians) {
  double wrapped = std::fmod(radians + kPi, 2.0 * kPi);
  if (wrapped < 0.0) wrapped += 2.0 * kPi;
  wrapped -= kPi;
  // fmod can round up to exactly +pi.
  if (wrapped >= kPi) wrapped -= 2.0 * kPi;
  return wrapped;
}

Mat3 rotation_about_up(double azimuth) {
  const double c = std::cos(azimuth);
  const double s = std::sin(azimuth);
  Mat3 r;
  r << c, 0.0, s,
       0.0, 1.0, 0.0,
       -s, 0.0, c;
  return r;
}

Mat3 rotation_about_up_derivative(double azimuth) {
  const double c = std::cos(azimuth);
  const double s = std::sin(azimuth);
  Mat3 r;
  r << -s, 0.0, c,
       0.0, 0.0, 0.0,
       -c, 0.0, -s;
  return r;
}

Vec2 rotate_ground(double azimuth, const Vec2& xz) {
  const double c = std::cos(azimuth);
  const double s = std::sin(azimuth);
  return {c * xz.x() + s * xz.y(), -s * xz.x() + c * xz.y()};
}

Camera::Camera(const Mat3& rotation, double focal_length, const Vec3& position,
               ImageSize image_size, ImageSize map_size)
    : rotation_(rotation),
      focal_length_(focal_length),
      position_(position),
      image_size_(image_size),
      map_size_(map_size) {
  require(focal_length > 0.0, "camera focal length must be positive");
  require(image_size.width > 0 && image_size.height > 0,
          "camera image size must be positive");
  require(map_size.width > 0 && map_size.height > 0,
          "camera map size must be positive");
  const double orthonormality =
      (rotation * rotation.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff();
  require(orthonormality <= 1e-9, "camera rotation is not orthonormal");
}

Camera Camera::at_eye_height(const Mat3& rotation, double focal_length,
                             ImageSize image_size, ImageSize map_size) {
  return Camera(rotation, focal_length, Vec3(0.0, kEyeHeight, 0.0), image_size,
                map_size);
}

Camera Camera::pitched(double pitch, double focal_length, ImageSize image_size,
                       ImageSize map_size) {
  const double c = std::cos(pitch);
  const double s = std::sin(pitch);
  Mat3 r;
  // Rows: camera right, camera up, camera forward, in world coordinates.
  r << 1.0, 0.0, 0.0,
       0.0, c, s,
       0.0, -s, c;
  return at_eye_height(r, focal_length, image_size, map_size);
}

Camera Camera::harness_default() {
  return pitched(25.0 * kPi / 180.0, 500.0, {640, 480}, {128, 96});
}

Vec2 Camera::project(const Vec3& world, Eigen::Matrix<double, 2, 3>* jacobian) const {
  const Vec3 p = to_camera(world);
  if (!(p.z() > 1e-6)) {
    fail(ErrorCode::kBehindCamera, "point lies behind the camera");
  }
  const double sx = static_cast<double>(map_size_.width) / image_size_.width;
  const double sy = static_cast<double>(map_size_.height) / image_size_.height;
  const double inv_z = 1.0 / p.z();
  const double u = 0.5 * image_size_.width + focal_length_ * p.x() * inv_z;
  const double v = 0.5 * image_size_.height - focal_length_ * p.y() * inv_z;
  if (jacobian != nullptr) {
    Eigen::Matrix<double, 2, 3> d_cam;
    d_cam << sx * focal_length_ * inv_z, 0.0, -sx * focal_length_ * p.x() * inv_z * inv_z,
             0.0, -sy * focal_length_ * inv_z, sy * focal_length_ * p.y() * inv_z * inv_z;
    *jacobian = d_cam * rotation_;
  }
  return {u * sx, v * sy};
}

Vec3 Camera::ray_direction(const Vec2& map_position) const {
  const double u = map_position.x() * image_size_.width / map_size_.width;
  const double v = map_position.y() * image_size_.height / map_size_.height;
  const Vec3 cam((u - 0.5 * image_size_.width) / focal_length_,
                 -(v - 0.5 * image_size_.height) / focal_length_, 1.0);
  return (rotation_.transpose() * cam).normalized();
}

std::optional<Vec3> Camera::intersect_horizontal(const Vec2& map_position,
                                                 double height) const {
  const Vec3 dir = ray_direction(map_position);
  if (std::abs(dir.y()) < 1e-12) return std::nullopt;
  const double t = (height - position_.y()) / dir.y();
  if (t <= 1e-6) return std::nullopt;
  return Vec3(position_ + t * dir);
}

Eigen::MatrixX3d place_keypoints(const Eigen::MatrixX3d& keypoints,
                                 const PlacementParams& params) {
  const Mat3 r = rotation_about_up(params.azimuth);
  Eigen::MatrixX3d out = (params.scale * keypoints) * r.transpose();
  out.col(0).array() += params.translation.x();
  out.col(2).array() += params.translation.y();
  return out;
}

std::array<Vec2, 4> OrientedBox::footprint() const {
  const Vec2 c(center.x(), center.z());
  const double hx = half_extents.x();
  const double hz = half_extents.z();
  return {c + rotate_ground(azimuth, Vec2(-hx, -hz)),
          c + rotate_ground(azimuth, Vec2(hx, -hz)),
          c + rotate_ground(azimuth, Vec2(hx, hz)),
          c + rotate_ground(azimuth, Vec2(-hx, hz))};
}

std::array<Vec3, 8> OrientedBox::corners() const {
  const auto fp = footprint();
  std::array<Vec3, 8> out;
  for (int i = 0; i < 4; ++i) {
    out[i] = Vec3(fp[i].x(), center.y() - half_extents.y(), fp[i].y());
    out[i + 4] = Vec3(fp[i].x(), center.y() + half_extents.y(), fp[i].y());
  }
  return out;
}

std::optional<double> OrientedBox::ray_entry(const Vec3& origin,
                                             const Vec3& direction) const {
  // Work in the box frame, where the box is axis aligned.
  const Vec2 o_xz = rotate_ground(-azimuth, Vec2(origin.x() - center.x(),
                                                 origin.z() - center.z()));
  const Vec2 d_xz = rotate_ground(-azimuth, Vec2(direction.x(), direction.z()));
  const Vec3 o(o_xz.x(), origin.y() - center.y(), o_xz.y());
  const Vec3 d(d_xz.x(), direction.y(), d_xz.y());
  double t_near = 0.0;
  double t_far = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 3; ++axis) {
    const double h = half_extents[axis];
    if (std::abs(d[axis]) < 1e-15) {
      if (std::abs(o[axis]) > h) return std::nullopt;
      continue;
    }
    double t0 = (-h - o[axis]) / d[axis];
    double t1 = (h - o[axis]) / d[axis];
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
    if (t_near > t_far) return std::nullopt;
  }
  return t_near;
}

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double polygon_area(const std::vector<Vec2>& poly) {
  double area = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    area += cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  return 0.5 * std::abs(area);
}

}  // namespace

double convex_intersection_area(std::span<const Vec2> a, std::span<const Vec2> b) {
  // Sutherland-Hodgman: clip `a` by every edge of `b`.
  std::vector<Vec2> poly(a.begin(), a.end());
  for (std::size_t e = 0; e < b.size() && !poly.empty(); ++e) {
    const Vec2& p = b[e];
    const Vec2& q = b[(e + 1) % b.size()];
    const Vec2 edge = q - p;
    auto inside = [&](const Vec2& v) { return cross(edge, v - p) >= 0.0; };
    std::vector<Vec2> next;
    next.reserve(poly.size() + 2);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2& cur = poly[i];
      const Vec2& prev = poly[(i + poly.size() - 1) % poly.size()];
      const bool cur_in = inside(cur);
      const bool prev_in = inside(prev);
      if (cur_in != prev_in) {
        const Vec2 dir = cur - prev;
        const double denom = cross(edge, dir);
        if (std::abs(denom) > 1e-300) {
          const double t = cross(edge, p - prev) / denom;
          next.push_back(prev + t * dir);
        }
      }
      if (cur_in) next.push_back(cur);
    }
    poly = std::move(next);
  }
  return poly.size() < 3 ? 0.0 : polygon_area(poly);
}

double obb_iou_3d(const OrientedBox& a, const OrientedBox& b) {
  const double y_overlap =
      std::min(a.center.y() + a.half_extents.y(), b.center.y() + b.half_extents.y()) -
      std::max(a.center.y() - a.half_extents.y(), b.center.y() - b.half_extents.y());
  if (y_overlap <= 0.0) return 0.0;
  const auto fa = a.footprint();
  const auto fb = b.footprint();
  const double area = convex_intersection_area(fa, fb);
  const double inter = area * y_overlap;
  const double uni = a.volume() + b.volume() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

bool obb_intersects(const OrientedBox& a, const OrientedBox& b, double shrink) {
  require(shrink > 0.0 && shrink <= 1.0, "shrink must lie in (0, 1]");
  const Vec3 ha = a.half_extents * shrink;
  const Vec3 hb = b.half_extents * shrink;
  if (std::abs(a.center.y() - b.center.y()) >= ha.y() + hb.y()) return false;

  const Vec2 d(b.center.x() - a.center.x(), b.center.z() - a.center.z());
  const std::array<Vec2, 2> axes_a = {rotate_ground(a.azimuth, Vec2(1, 0)),
                                      rotate_ground(a.azimuth, Vec2(0, 1))};
  const std::array<Vec2, 2> axes_b = {rotate_ground(b.azimuth, Vec2(1, 0)),
                                      rotate_ground(b.azimuth, Vec2(0, 1))};
  auto radius = [](const std::array<Vec2, 2>& axes, const Vec3& h, const Vec2& n) {
    return h.x() * std::abs(axes[0].dot(n)) + h.z() * std::abs(axes[1].dot(n));
  };
  for (const auto* axes : {&axes_a, &axes_b}) {
    for (const Vec2& n : *axes) {
      if (std::abs(d.dot(n)) >= radius(axes_a, ha, n) + radius(axes_b, hb, n)) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace scenemock
