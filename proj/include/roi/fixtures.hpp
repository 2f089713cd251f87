// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "roi/fields.hpp"
#include "roi/grouping.hpp"
#include "roi/sfm.hpp"

namespace roi {

struct ProbeRay {
  std::string name;
  Ray ray;
};

/// A synthetic scene: analytic ground truth, the sparse-point layout used to
/// synthesise a reconstruction, a camera rig and the ROIs of interest.
struct Fixture {
  std::string name;
  std::shared_ptr<const AnalyticField> oracle;
  Aabb scene_bounds;
  SynthScene synth;
  CameraRig rig;
  std::vector<RoiSpec> rois;
  std::uint32_t scene_resolution = 32;
  std::uint32_t roi_resolution = 128;
  /// Extra cameras that are not part of the reconstruction.
  std::vector<PosedCamera> probe_cameras;
  std::vector<ProbeRay> probe_rays;
};

/// "checker-table", "two-spheres" (four spheres in two pairs, one ROI each)
/// or "occluder". Throws InvalidArgument for other names.
Fixture make_fixture(const std::string& name);
std::vector<std::string> fixture_names();

Reconstruction fixture_reconstruction(const Fixture& fixture, std::uint64_t seed);

GridResolution cube_resolution(std::uint32_t n);
std::shared_ptr<GridField> bake_scene_grid(const Fixture& fixture, std::uint32_t resolution);
std::shared_ptr<GridField> bake_roi_grid(const Fixture& fixture, std::size_t roi_index,
                                         std::uint32_t resolution);

PosedCamera make_camera(const Vec3& position, const Vec3& target, const CameraIntrinsics& intr,
                        const Vec3& up = Vec3::UnitZ());

/// Checkered sphere (radius 0.5 at the origin) in the box [-1, 1]^3.
std::shared_ptr<const AnalyticField> checkered_sphere_field();

}  // namespace roi
