// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#include "roi/fixtures.hpp"

#include <cmath>
#include <numbers>

#include "roi/error.hpp"

namespace roi {

namespace {

constexpr double kPi = std::numbers::pi;

CameraIntrinsics default_intrinsics() {
  CameraIntrinsics c;
  c.camera_id = 1;
  c.model = CameraModel::Pinhole;
  c.width = 200;
  c.height = 200;
  c.fx = c.fy = 180.0;
  c.cx = c.cy = 100.0;
  return c;
}

Material solid(double density, const Vec3& color) {
  Material m;
  m.density = density;
  m.color = color;
  return m;
}

Material checker(double density, const Vec3& a, const Vec3& b, double freq) {
  Material m = solid(density, a);
  m.texture.kind = Texture::Kind::Checker;
  m.texture.frequency = freq;
  m.texture.alt_color = b;
  return m;
}

Material stripes(double density, const Vec3& a, const Vec3& b, double freq, int axis) {
  Material m = solid(density, a);
  m.texture.kind = Texture::Kind::Stripes;
  m.texture.frequency = freq;
  m.texture.axis = axis;
  m.texture.alt_color = b;
  return m;
}

Aabb box(double x0, double x1, double y0, double y1, double z0, double z1) {
  return make_aabb(Vec3(x0, y0, z0), Vec3(x1, y1, z1));
}

PointCloudSpec box_cloud(const Aabb& b, int count) {
  PointCloudSpec c;
  c.kind = PointCloudSpec::Kind::BoxSurface;
  c.box = b;
  c.count = count;
  return c;
}

PointCloudSpec sphere_cloud(const Sphere& s, int count) {
  PointCloudSpec c;
  c.kind = PointCloudSpec::Kind::SphereSurface;
  c.center = s.center;
  c.radius = s.radius;
  c.count = count;
  return c;
}

PointCloudSpec ground_cloud(const Aabb& extent, int count) {
  PointCloudSpec c;
  c.kind = PointCloudSpec::Kind::SlabTop;
  c.box = extent;
  c.count = count;
  return c;
}

// Visibility blockers and point colours follow the analytic primitives.
void finish_synth(Fixture& f) {
  for (const auto& p : f.oracle->primitives()) f.synth.occluders.push_back(p.shape);
  auto oracle = f.oracle;
  f.synth.colorize = [oracle](const Vec3& p) {
    const auto s = oracle->query(p, Vec3::UnitZ());
    std::array<std::uint8_t, 3> c{};
    for (int k = 0; k < 3; ++k) {
      c[k] = static_cast<std::uint8_t>(std::lround(std::clamp(s.rgb[k], 0.0, 1.0) * 255.0));
    }
    return c;
  };
}

CameraRing ring(double radius, double height, int count, const Vec3& target, double phase = 0.0) {
  CameraRing r;
  r.radius = radius;
  r.height = height;
  r.count = count;
  r.target = target;
  r.phase = phase;
  return r;
}

std::vector<Primitive> table_primitives() {
  return {
      {Slab{2, -0.3, 0.0},
       checker(40.0, Vec3(0.55, 0.5, 0.45), Vec3(0.35, 0.32, 0.3), 2.0)},
      {box(-0.5, 0.5, -0.35, 0.35, 0.55, 0.65),
       checker(60.0, Vec3(0.9, 0.85, 0.75), Vec3(0.12, 0.18, 0.35), 20.0)},
      {box(-0.08, 0.08, -0.08, 0.08, 0.0, 0.55),
       stripes(60.0, Vec3(0.7, 0.3, 0.2), Vec3(0.95, 0.85, 0.3), 12.0, 2)},
  };
}

Fixture checker_table() {
  Fixture f;
  f.name = "checker-table";
  f.scene_bounds = box(-2.5, 2.5, -2.5, 2.5, -0.5, 2.0);
  auto prims = table_primitives();
  prims.push_back({box(1.4, 1.8, -1.6, -1.2, 0.0, 0.8), solid(50.0, Vec3(0.2, 0.35, 0.7))});
  prims.push_back({box(-1.9, -1.5, 1.0, 1.4, 0.0, 0.5), solid(50.0, Vec3(0.25, 0.6, 0.3))});
  prims.push_back({Sphere{Vec3(1.5, 1.3, 0.35), 0.35},
                   checker(50.0, Vec3(0.8, 0.4, 0.6), Vec3(0.3, 0.1, 0.2), 6.0)});
  f.oracle = std::make_shared<AnalyticField>("checker-table", std::move(prims), f.scene_bounds);

  f.synth.clouds = {ground_cloud(box(-2.5, 2.5, -2.5, 2.5, -0.3, 0.0), 1500),
                    box_cloud(box(-0.5, 0.5, -0.35, 0.35, 0.55, 0.65), 800),
                    box_cloud(box(-0.08, 0.08, -0.08, 0.08, 0.0, 0.55), 200),
                    box_cloud(box(1.4, 1.8, -1.6, -1.2, 0.0, 0.8), 150),
                    box_cloud(box(-1.9, -1.5, 1.0, 1.4, 0.0, 0.5), 150),
                    sphere_cloud(Sphere{Vec3(1.5, 1.3, 0.35), 0.35}, 150)};
  finish_synth(f);

  f.rig.intrinsics = default_intrinsics();
  const Vec3 target(0.0, 0.0, 0.55);
  f.rig.rings = {ring(2.8, 1.6, 24, Vec3(0.0, 0.0, 0.5)), ring(1.3, 1.2, 12, target),
                 ring(1.1, 0.95, 12, target, kPi / 12.0)};

  RoiSpec roi;
  roi.name = "table";
  roi.aabb = box(-0.7, 0.7, -0.55, 0.55, 0.05, 0.8);
  f.rois = {roi};
  return f;
}

Fixture two_spheres() {
  Fixture f;
  f.name = "two-spheres";
  f.scene_bounds = box(-2.5, 2.5, -2.5, 2.5, -0.5, 1.5);
  std::vector<Primitive> prims = {
      {Slab{2, -0.3, 0.0}, checker(40.0, Vec3(0.5, 0.5, 0.5), Vec3(0.3, 0.3, 0.32), 2.0)}};
  const std::array<Vec3, 4> centers{Vec3(0.9, 0.9, 0.3), Vec3(-0.9, 0.9, 0.3),
                                    Vec3(-0.9, -0.9, 0.3), Vec3(0.9, -0.9, 0.3)};
  const std::array<Vec3, 4> colors{Vec3(0.9, 0.3, 0.25), Vec3(0.25, 0.7, 0.35),
                                   Vec3(0.3, 0.4, 0.9), Vec3(0.9, 0.8, 0.3)};
  const double radius = 0.28;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    prims.push_back({Sphere{centers[i], radius},
                     checker(60.0, colors[i], Vec3(0.1, 0.1, 0.12), 14.0)});
  }
  f.oracle = std::make_shared<AnalyticField>("two-spheres", std::move(prims), f.scene_bounds);
  f.synth.clouds = {ground_cloud(box(-2.5, 2.5, -2.5, 2.5, -0.3, 0.0), 1200)};
  for (const auto& c : centers) f.synth.clouds.push_back(sphere_cloud(Sphere{c, radius}, 300));
  finish_synth(f);

  f.rig.intrinsics = default_intrinsics();
  f.rig.rings = {ring(3.2, 1.8, 24, Vec3(0.0, 0.0, 0.3)),
                 ring(1.9, 1.2, 12, Vec3(0.0, 0.0, 0.3), kPi / 12.0)};
  const char* names[] = {"sphere-a", "sphere-b", "sphere-c", "sphere-d"};
  for (std::size_t i = 0; i < centers.size(); ++i) {
    RoiSpec roi;
    roi.name = names[i];
    roi.aabb = make_aabb(Vec3(centers[i].x() - 0.4, centers[i].y() - 0.4, 0.01),
                         Vec3(centers[i].x() + 0.4, centers[i].y() + 0.4, 0.7));
    f.rois.push_back(roi);
  }
  return f;
}

Fixture occluder() {
  Fixture f;
  f.name = "occluder";
  f.scene_bounds = box(-2.5, 2.5, -2.5, 2.5, -0.5, 2.0);
  auto prims = table_primitives();
  const Aabb pillar = box(-1.15, -0.95, -0.1, 0.1, 0.0, 1.6);
  prims.push_back({pillar, stripes(60.0, Vec3(0.3, 0.3, 0.35), Vec3(0.8, 0.8, 0.85), 5.0, 2)});
  f.oracle = std::make_shared<AnalyticField>("occluder", std::move(prims), f.scene_bounds);
  f.synth.clouds = {ground_cloud(box(-2.5, 2.5, -2.5, 2.5, -0.3, 0.0), 1500),
                    box_cloud(box(-0.5, 0.5, -0.35, 0.35, 0.55, 0.65), 800),
                    box_cloud(box(-0.08, 0.08, -0.08, 0.08, 0.0, 0.55), 200),
                    box_cloud(pillar, 200)};
  finish_synth(f);

  f.rig.intrinsics = default_intrinsics();
  f.rig.rings = {ring(2.8, 1.6, 24, Vec3(0.0, 0.0, 0.5))};
  RoiSpec roi;
  roi.name = "table";
  roi.aabb = box(-0.7, 0.7, -0.55, 0.55, 0.05, 0.8);
  f.rois = {roi};

  // The probe sees the table with the pillar hiding roughly its left half.
  // Ray A crosses an empty corner of the box, ray D ends on the table top
  // behind the pillar.
  const Vec3 probe(-2.4, 0.6, 1.2);
  f.probe_cameras.push_back(make_camera(probe, Vec3(0.0, 0.0, 0.6), f.rig.intrinsics));
  f.probe_rays.push_back({"A", make_ray(probe, Vec3(0.62, 0.5, 0.76) - probe)});
  f.probe_rays.push_back({"D", make_ray(probe, Vec3(-0.3, -0.3, 0.62) - probe)});
  return f;
}

}  // namespace

Fixture make_fixture(const std::string& name) {
  if (name == "checker-table") return checker_table();
  if (name == "two-spheres") return two_spheres();
  if (name == "occluder") return occluder();
  throw Error(ErrorCode::InvalidArgument, "unknown fixture '" + name + "'");
}

std::vector<std::string> fixture_names() { return {"checker-table", "two-spheres", "occluder"}; }

Reconstruction fixture_reconstruction(const Fixture& fixture, std::uint64_t seed) {
  return synth_reconstruction(fixture.synth, fixture.rig, seed);
}

GridResolution cube_resolution(std::uint32_t n) { return {n, n, n}; }

std::shared_ptr<GridField> bake_scene_grid(const Fixture& fixture, std::uint32_t resolution) {
  return std::make_shared<GridField>(bake_grid(*fixture.oracle, fixture.scene_bounds,
                                               cube_resolution(resolution), "scene"));
}

std::shared_ptr<GridField> bake_roi_grid(const Fixture& fixture, std::size_t roi_index,
                                         std::uint32_t resolution) {
  const auto& spec = fixture.rois.at(roi_index);
  return std::make_shared<GridField>(
      bake_grid(*fixture.oracle, spec.aabb, cube_resolution(resolution), spec.name));
}

PosedCamera make_camera(const Vec3& position, const Vec3& target, const CameraIntrinsics& intr,
                        const Vec3& up) {
  return {look_at(position, target, up), intr};
}

std::shared_ptr<const AnalyticField> checkered_sphere_field() {
  std::vector<Primitive> prims = {
      {Sphere{Vec3::Zero(), 0.5}, checker(50.0, Vec3(0.9, 0.2, 0.2), Vec3(0.15, 0.2, 0.85), 8.0)}};
  return std::make_shared<AnalyticField>("checkered-sphere", std::move(prims),
                                         make_aabb(Vec3::Constant(-1.0), Vec3::Constant(1.0)));
}

}  // namespace roi
