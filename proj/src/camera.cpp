// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#include "roi/camera.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <string>

#include "roi/error.hpp"

namespace roi {

const char* to_string(CameraModel model) {
  switch (model) {
    case CameraModel::Pinhole: return "PINHOLE";
    case CameraModel::SimplePinhole: return "SIMPLE_PINHOLE";
  }
  return "UNKNOWN";
}

bool CameraIntrinsics::valid() const {
  return width > 0 && height > 0 && fx > 0.0 && fy > 0.0 && std::isfinite(fx) &&
         std::isfinite(fy) && cx >= 0.0 && cx < width && cy >= 0.0 && cy < height;
}

Mat3 Pose::rotation() const {
  const Eigen::Quaterniond q(qvec[0], qvec[1], qvec[2], qvec[3]);
  return q.toRotationMatrix();
}

Vec3 Pose::center() const { return -rotation().transpose() * tvec; }

std::array<double, 4> quaternion_from_rotation(const Mat3& rotation) {
  Eigen::Quaterniond q(rotation);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  return {q.w(), q.x(), q.y(), q.z()};
}

Pose look_at(const Vec3& position, const Vec3& target, const Vec3& up) {
  Vec3 forward = target - position;
  if (!(forward.norm() > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "look_at target coincides with camera position");
  }
  forward.normalize();
  Vec3 right = forward.cross(up);
  if (right.norm() < 1e-9) right = forward.cross(Vec3::UnitY());
  if (right.norm() < 1e-9) right = forward.cross(Vec3::UnitX());
  right.normalize();
  const Vec3 down = forward.cross(right);
  Mat3 r;
  r.row(0) = right.transpose();
  r.row(1) = down.transpose();
  r.row(2) = forward.transpose();
  Pose pose;
  pose.qvec = quaternion_from_rotation(r);
  pose.tvec = -pose.rotation() * position;
  return pose;
}

Ray camera_ray_continuous(const PosedCamera& camera, double x, double y, double t_near,
                          double t_far) {
  const auto& k = camera.intrinsics;
  const Vec3 dir_cam((x - k.cx) / k.fx, (y - k.cy) / k.fy, 1.0);
  const Mat3 r = camera.pose.rotation();
  const Vec3 origin = -r.transpose() * camera.pose.tvec;
  const Vec3 dir = (r.transpose() * dir_cam).normalized();
  return Ray{origin, dir, t_near, t_far};
}

Ray camera_ray(const PosedCamera& camera, double u, double v, double t_near, double t_far) {
  const auto& k = camera.intrinsics;
  if (!(u >= 0.0 && u < k.width && v >= 0.0 && v < k.height)) {
    throw Error(ErrorCode::PixelOutOfBounds, "pixel (" + std::to_string(u) + ", " +
                                                 std::to_string(v) + ") outside " +
                                                 std::to_string(k.width) + "x" +
                                                 std::to_string(k.height));
  }
  return camera_ray_continuous(camera, u + 0.5, v + 0.5, t_near, t_far);
}

std::optional<std::array<double, 2>> project(const PosedCamera& camera, const Vec3& world) {
  const Vec3 pc = camera.pose.to_camera(world);
  if (!(pc.z() > 1e-12)) return std::nullopt;
  const auto& k = camera.intrinsics;
  return std::array<double, 2>{k.fx * pc.x() / pc.z() + k.cx, k.fy * pc.y() / pc.z() + k.cy};
}

CameraIntrinsics scale_intrinsics(const CameraIntrinsics& intrinsics, int max_dim) {
  if (max_dim < 1) throw Error(ErrorCode::InvalidArgument, "max_dim must be >= 1");
  const int long_side = std::max(intrinsics.width, intrinsics.height);
  if (long_side <= max_dim) return intrinsics;
  const double s = static_cast<double>(max_dim) / long_side;
  CameraIntrinsics out = intrinsics;
  out.width = std::max(1, static_cast<int>(std::lround(intrinsics.width * s)));
  out.height = std::max(1, static_cast<int>(std::lround(intrinsics.height * s)));
  const double sx = static_cast<double>(out.width) / intrinsics.width;
  const double sy = static_cast<double>(out.height) / intrinsics.height;
  out.fx = intrinsics.fx * sx;
  out.fy = intrinsics.fy * sy;
  out.cx = std::clamp(intrinsics.cx * sx, 0.0, std::nextafter(static_cast<double>(out.width), 0.0));
  out.cy =
      std::clamp(intrinsics.cy * sy, 0.0, std::nextafter(static_cast<double>(out.height), 0.0));
  return out;
}

}  // namespace roi
