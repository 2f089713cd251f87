// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>

#include "roi/geometry.hpp"

namespace roi {

using CameraId = int;
using ViewId = int;

enum class CameraModel { Pinhole, SimplePinhole };

const char* to_string(CameraModel model);

struct CameraIntrinsics {
  CameraId camera_id = 1;
  CameraModel model = CameraModel::Pinhole;
  int width = 0;
  int height = 0;
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;

  bool valid() const;
  bool operator==(const CameraIntrinsics& other) const = default;
};

/// World-to-camera rigid transform, COLMAP convention: x_cam = R * x_world + t.
/// The camera looks down +z with +x right and +y down in the image.
struct Pose {
  std::array<double, 4> qvec{1.0, 0.0, 0.0, 0.0};  // w, x, y, z
  Vec3 tvec = Vec3::Zero();

  Mat3 rotation() const;
  Vec3 center() const;  // -R^T t
  Vec3 to_camera(const Vec3& world) const { return rotation() * world + tvec; }

  bool operator==(const Pose& other) const { return qvec == other.qvec && tvec == other.tvec; }
};

/// Normalized quaternion with non-negative w.
std::array<double, 4> quaternion_from_rotation(const Mat3& rotation);

/// Camera at `position` looking at `target`; `up` picks the image vertical.
Pose look_at(const Vec3& position, const Vec3& target, const Vec3& up = Vec3::UnitZ());

struct PosedCamera {
  Pose pose;
  CameraIntrinsics intrinsics;
};

/// Ray through the centre of integer pixel (u, v); the centre sits at (u + 0.5, v + 0.5)
/// in continuous image coordinates. Throws PixelOutOfBounds outside the image.
Ray camera_ray(const PosedCamera& camera, double u, double v, double t_near = 0.0,
               double t_far = kInf);

/// Ray through continuous image coordinates (x, y) with no half-pixel shift,
/// the inverse of `project`.
Ray camera_ray_continuous(const PosedCamera& camera, double x, double y, double t_near = 0.0,
                          double t_far = kInf);

/// Continuous image coordinates of a world point, nullopt when behind the camera.
std::optional<std::array<double, 2>> project(const PosedCamera& camera, const Vec3& world);

/// Uniformly rescales intrinsics so that the long side is at most `max_dim` pixels.
/// Intrinsics already within the budget are returned unchanged.
CameraIntrinsics scale_intrinsics(const CameraIntrinsics& intrinsics, int max_dim);

}  // namespace roi
