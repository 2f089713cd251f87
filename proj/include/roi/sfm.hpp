// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "roi/camera.hpp"
#include "roi/geometry.hpp"

namespace roi {

using PointId = std::int64_t;
inline constexpr PointId kNoPoint = -1;

struct Observation {
  double u = 0.0;
  double v = 0.0;
  PointId point3d_id = kNoPoint;

  bool operator==(const Observation& other) const = default;
};

struct ViewRecord {
  ViewId view_id = 0;
  std::string name;
  CameraId camera_id = 0;
  Pose pose;
  std::vector<Observation> observations;

  Vec3 center() const { return pose.center(); }
  bool operator==(const ViewRecord& other) const = default;
};

struct TrackElement {
  ViewId view_id = 0;
  int observation_index = 0;

  bool operator==(const TrackElement& other) const = default;
};

struct SparsePoint {
  PointId point_id = 0;
  Vec3 position = Vec3::Zero();
  std::array<std::uint8_t, 3> color{128, 128, 128};
  double reproj_error = 0.0;
  std::vector<TrackElement> track;

  bool operator==(const SparsePoint& other) const = default;
};

/// Output of structure-from-motion: intrinsics, posed views with keypoint
/// observations, and sparse points with their visibility tracks.
/// Immutable once built; safe to share between readers.
struct Reconstruction {
  std::map<CameraId, CameraIntrinsics> intrinsics;
  std::map<ViewId, ViewRecord> views;
  std::map<PointId, SparsePoint> points;

  PosedCamera camera(ViewId view_id) const;
  bool operator==(const Reconstruction& other) const = default;
};

/// Checks referential integrity and track/observation bidirectionality.
/// Throws BrokenTrack, MalformedLine or InvalidArgument.
void validate(const Reconstruction& recon);

// COLMAP text layout (cameras.txt, images.txt, points3D.txt).
Reconstruction parse_colmap_text(const std::filesystem::path& directory);
void write_colmap_text(const Reconstruction& recon, const std::filesystem::path& directory);

inline constexpr std::string_view kReconSchema = "roi-recon v1";
std::string write_reconstruction_json(const Reconstruction& recon);
Reconstruction parse_reconstruction_json(std::string_view bytes);

/// Synthetic scene used to generate reconstructions with known ground truth.
struct PointCloudSpec {
  enum class Kind { Volume, BoxSurface, SphereSurface, SlabTop };
  Kind kind = Kind::Volume;
  Aabb box;                 // Volume / BoxSurface / SlabTop (xy extent + top at max.z)
  Vec3 center = Vec3::Zero();  // SphereSurface
  double radius = 1.0;         // SphereSurface
  int count = 0;
};

struct SynthScene {
  std::vector<Vec3> points;
  std::vector<PointCloudSpec> clouds;
  /// Shapes that block lines of sight when deciding visibility.
  std::vector<Shape> occluders;
  /// Keypoints farther than this from a camera are not detected.
  double max_range = kInf;
  std::function<std::array<std::uint8_t, 3>(const Vec3&)> colorize;
};

struct CameraRing {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
  double height = 0.0;
  int count = 0;
  Vec3 target = Vec3::Zero();
  double phase = 0.0;  // radians
};

struct CameraPlacement {
  Vec3 position = Vec3::Zero();
  Vec3 target = Vec3::UnitX();
};

struct CameraRig {
  CameraIntrinsics intrinsics;
  std::vector<CameraRing> rings;
  std::vector<CameraPlacement> placements;
  Vec3 up = Vec3::UnitZ();
};

/// Deterministic for a seed. Observations are pinhole projections of the
/// visible points; tracks are consistent with observations by construction.
/// Throws DegenerateOrbit when two or more cameras all share one centre.
Reconstruction synth_reconstruction(const SynthScene& scene, const CameraRig& rig,
                                    std::uint64_t seed);

/// Positions of all cameras of a rig in generation order (view ids start at 1).
std::vector<CameraPlacement> expand_rig(const CameraRig& rig);

}  // namespace roi
