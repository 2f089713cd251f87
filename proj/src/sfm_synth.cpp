// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <random>

#include "roi/error.hpp"
#include "roi/rng.hpp"
#include "roi/sfm.hpp"

namespace roi {

namespace {

Vec3 uniform_in_box(const Aabb& box, std::mt19937_64& rng) {
  Vec3 p;
  for (int a = 0; a < 3; ++a) p[a] = box.min[a] + uniform01(rng) * (box.max[a] - box.min[a]);
  return p;
}

// Area-weighted choice of a face, then a uniform point on it.
Vec3 uniform_on_box_surface(const Aabb& box, std::mt19937_64& rng) {
  const Vec3 e = box.max - box.min;
  const std::array<double, 3> area{e.y() * e.z(), e.x() * e.z(), e.x() * e.y()};
  const double total = 2.0 * (area[0] + area[1] + area[2]);
  double pick = uniform01(rng) * total;
  int axis = 2;
  bool upper = true;
  for (int a = 0; a < 3; ++a) {
    if (pick < area[a]) { axis = a; upper = false; break; }
    pick -= area[a];
    if (pick < area[a]) { axis = a; upper = true; break; }
    pick -= area[a];
  }
  Vec3 p = uniform_in_box(box, rng);
  p[axis] = upper ? box.max[axis] : box.min[axis];
  return p;
}

Vec3 uniform_on_sphere(const Vec3& center, double radius, std::mt19937_64& rng) {
  const double z = 2.0 * uniform01(rng) - 1.0;
  const double phi = 2.0 * std::numbers::pi * uniform01(rng);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return center + radius * Vec3(r * std::cos(phi), r * std::sin(phi), z);
}

bool occluded(const Vec3& from, const Vec3& to, const std::vector<Shape>& occluders) {
  const Vec3 d = to - from;
  const double dist = d.norm();
  if (dist <= 0.0) return false;
  const Ray seg{from, d / dist, 0.0, dist};
  const double tol = 1e-6 * std::max(1.0, dist);
  for (const auto& shape : occluders) {
    // The camera itself may sit inside a slab or box; only surfaces crossed in
    // front of the point count.
    if (shape_contains(shape, from)) continue;
    auto hit = ray_shape_intersect(seg, shape);
    if (hit && hit->t_enter < dist - tol) return true;
  }
  return false;
}

}  // namespace

std::vector<CameraPlacement> expand_rig(const CameraRig& rig) {
  std::vector<CameraPlacement> out;
  for (const auto& ring : rig.rings) {
    for (int i = 0; i < ring.count; ++i) {
      const double a = ring.phase + 2.0 * std::numbers::pi * i / ring.count;
      const Vec3 pos = ring.center + Vec3(ring.radius * std::cos(a), ring.radius * std::sin(a),
                                          ring.height);
      out.push_back({pos, ring.target});
    }
  }
  out.insert(out.end(), rig.placements.begin(), rig.placements.end());
  return out;
}

Reconstruction synth_reconstruction(const SynthScene& scene, const CameraRig& rig,
                                    std::uint64_t seed) {
  if (!rig.intrinsics.valid()) throw Error(ErrorCode::InvalidArgument, "invalid rig intrinsics");
  const auto placements = expand_rig(rig);
  if (placements.empty()) throw Error(ErrorCode::InvalidArgument, "rig has no cameras");
  if (placements.size() >= 2) {
    bool all_same = true;
    for (const auto& p : placements) {
      if ((p.position - placements.front().position).norm() > 1e-12) all_same = false;
    }
    if (all_same) throw Error(ErrorCode::DegenerateOrbit, "all camera centres coincide");
  }

  std::mt19937_64 rng(seed);
  std::vector<Vec3> positions = scene.points;
  for (const auto& cloud : scene.clouds) {
    for (int i = 0; i < cloud.count; ++i) {
      switch (cloud.kind) {
        case PointCloudSpec::Kind::Volume:
          positions.push_back(uniform_in_box(cloud.box, rng));
          break;
        case PointCloudSpec::Kind::BoxSurface:
          positions.push_back(uniform_on_box_surface(cloud.box, rng));
          break;
        case PointCloudSpec::Kind::SphereSurface:
          positions.push_back(uniform_on_sphere(cloud.center, cloud.radius, rng));
          break;
        case PointCloudSpec::Kind::SlabTop: {
          Vec3 p = uniform_in_box(cloud.box, rng);
          p.z() = cloud.box.max.z();
          positions.push_back(p);
          break;
        }
      }
    }
  }
  if (positions.empty()) throw Error(ErrorCode::InvalidArgument, "scene has no points");

  Reconstruction recon;
  CameraIntrinsics intr = rig.intrinsics;
  recon.intrinsics.emplace(intr.camera_id, intr);

  for (std::size_t i = 0; i < placements.size(); ++i) {
    ViewRecord view;
    view.view_id = static_cast<ViewId>(i + 1);
    view.name = "view_" + std::to_string(i + 1) + ".png";
    view.camera_id = intr.camera_id;
    view.pose = look_at(placements[i].position, placements[i].target, rig.up);
    recon.views.emplace(view.view_id, std::move(view));
  }

  for (std::size_t i = 0; i < positions.size(); ++i) {
    SparsePoint p;
    p.point_id = static_cast<PointId>(i + 1);
    p.position = positions[i];
    if (scene.colorize) p.color = scene.colorize(p.position);
    recon.points.emplace(p.point_id, std::move(p));
  }

  for (auto& [vid, view] : recon.views) {
    const PosedCamera cam{view.pose, intr};
    const Vec3 center = view.pose.center();
    for (auto& [pid, point] : recon.points) {
      const auto uv = project(cam, point.position);
      if (!uv) continue;
      const auto [u, v] = *uv;
      if (!(u >= 0.0 && u < intr.width && v >= 0.0 && v < intr.height)) continue;
      if ((point.position - center).norm() > scene.max_range) continue;
      if (occluded(center, point.position, scene.occluders)) continue;
      const int idx = static_cast<int>(view.observations.size());
      view.observations.push_back({u, v, pid});
      point.track.push_back({vid, idx});
    }
  }
  return recon;
}

}  // namespace roi
