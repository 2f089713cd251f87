// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "roi/error.hpp"
#include "roi/fixtures.hpp"
#include "roi/sfm.hpp"

using namespace roi;
namespace fs = std::filesystem;

namespace {

const fs::path kData = ROI_TEST_DATA_DIR;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

fs::path temp_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("roi_sfm_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

CameraRig single_camera_rig(const Vec3& position, const Vec3& target) {
  CameraRig rig;
  rig.intrinsics = make_fixture("checker-table").rig.intrinsics;
  rig.placements.push_back({position, target});
  return rig;
}

}  // namespace

TEST_SUITE("sfm") {

TEST_CASE("hand-written COLMAP fixture parses field by field") {
  const auto r = parse_colmap_text(kData / "colmap_small");
  REQUIRE(r.intrinsics.size() == 2);
  REQUIRE(r.views.size() == 3);
  REQUIRE(r.points.size() == 5);

  const auto& c1 = r.intrinsics.at(1);
  CHECK(c1.model == CameraModel::Pinhole);
  CHECK(c1.width == 100);
  CHECK(c1.height == 80);
  CHECK(c1.fx == 90.0);
  CHECK(c1.fy == 91.5);
  CHECK(c1.cx == 50.0);
  CHECK(c1.cy == 40.0);
  const auto& c2 = r.intrinsics.at(2);
  CHECK(c2.model == CameraModel::SimplePinhole);
  CHECK(c2.fx == 60.0);
  CHECK(c2.fy == 60.0);
  CHECK(c2.cx == 32.0);

  const auto& front = r.views.at(1);
  CHECK(front.name == "front.png");
  CHECK(front.camera_id == 1);
  CHECK(front.pose.qvec == std::array<double, 4>{1, 0, 0, 0});
  CHECK(front.pose.tvec == Vec3(0, 0, 5));
  CHECK((front.center() - Vec3(0, 0, -5)).norm() < 1e-12);
  REQUIRE(front.observations.size() == 3);
  CHECK(front.observations[1] == Observation{60, 45, 2});
  CHECK(front.observations[2].point3d_id == kNoPoint);

  const auto& side = r.views.at(2);
  CHECK(side.pose.qvec[0] == 0.7071067811865476);
  CHECK(side.pose.qvec[2] == 0.7071067811865476);
  CHECK(side.observations[1] == Observation{31.5, 22.25, 3});
  // 90 degrees about y: R = [[0,0,1],[0,1,0],[-1,0,0]], centre = -R^T t.
  CHECK((side.center() - Vec3(4.0, 0.5, -0.25)).norm() < 1e-9);

  const auto& below = r.views.at(3);
  CHECK(below.camera_id == 2);
  // 180 degrees about x: centre = -(t.x, -t.y, -t.z).
  CHECK((below.center() - Vec3(0, 0, 4)).norm() < 1e-12);

  const auto& p1 = r.points.at(1);
  CHECK(p1.position == Vec3::Zero());
  CHECK(p1.color == std::array<std::uint8_t, 3>{255, 0, 0});
  CHECK(p1.reproj_error == 0.5);
  CHECK(p1.track == std::vector<TrackElement>{{1, 0}, {3, 0}});
  const auto& p5 = r.points.at(5);
  CHECK(p5.position == Vec3(0, -1, 2));
  CHECK(p5.color == std::array<std::uint8_t, 3>{200, 100, 50});
  CHECK(p5.track == std::vector<TrackElement>{{3, 1}});
}

TEST_CASE("JSON and COLMAP text round-trips are identities") {
  const auto r = parse_colmap_text(kData / "colmap_small");
  const auto json = write_reconstruction_json(r);
  CHECK(parse_reconstruction_json(json) == r);
  CHECK(write_reconstruction_json(parse_reconstruction_json(json)) == json);

  const auto dir = temp_dir("roundtrip");
  write_colmap_text(r, dir);
  CHECK(parse_colmap_text(dir) == r);

  const Reconstruction empty;
  CHECK(parse_reconstruction_json(write_reconstruction_json(empty)) == empty);
}

TEST_CASE("malformed corpus is rejected with the listed error") {
  std::ifstream list(kData / "malformed" / "cases.txt");
  REQUIRE(list);
  std::string line;
  int cases = 0;
  while (std::getline(list, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string name, code;
    ss >> name >> code;
    CAPTURE(name);
    const auto got = code_of([&] { parse_colmap_text(kData / "malformed" / name); });
    CHECK(std::string(to_string(got)) == code);
    ++cases;
  }
  CHECK(cases >= 10);
}

TEST_CASE("malformed JSON documents") {
  const auto json = write_reconstruction_json(parse_colmap_text(kData / "colmap_small"));
  CHECK(code_of([&] { parse_reconstruction_json(json.substr(0, json.size() / 2)); }) ==
        ErrorCode::MalformedJson);
  std::string other = json;
  other.replace(other.find("roi-recon v1"), 12, "roi-recon v9");
  CHECK(code_of([&] { parse_reconstruction_json(other); }) == ErrorCode::SchemaVersionMismatch);
  CHECK(code_of([&] { parse_reconstruction_json("[]"); }) == ErrorCode::MalformedJson);
}

TEST_CASE("single camera, no observations, empty points file") {
  const auto dir = temp_dir("empty");
  std::ofstream(dir / "cameras.txt") << "1 PINHOLE 10 10 5 5 5 5\n";
  std::ofstream(dir / "images.txt") << "1 1 0 0 0 0 0 0 1 a.png\n\n";
  std::ofstream(dir / "points3D.txt") << "";
  const auto r = parse_colmap_text(dir);
  CHECK(r.views.size() == 1);
  CHECK(r.points.empty());
  CHECK(r.views.at(1).observations.empty());
}

TEST_CASE("synthetic reconstructions") {
  const auto fx = make_fixture("checker-table");

  SUBCASE("deterministic for a seed") {
    CHECK(write_reconstruction_json(fixture_reconstruction(fx, 7)) ==
          write_reconstruction_json(fixture_reconstruction(fx, 7)));
    CHECK(fixture_reconstruction(fx, 7) != fixture_reconstruction(fx, 8));
  }

  SUBCASE("tracked points reproject onto their observations") {
    const auto r = fixture_reconstruction(fx, 3);
    validate(r);
    double worst = 0.0;
    std::size_t tracked = 0;
    for (const auto& [pid, p] : r.points) {
      for (const auto& el : p.track) {
        const auto& view = r.views.at(el.view_id);
        const auto& cam = r.intrinsics.at(view.camera_id);
        // Pinhole equations written out directly.
        const Vec3 x = view.pose.to_camera(p.position);
        const double u = cam.fx * x.x() / x.z() + cam.cx;
        const double v = cam.fy * x.y() / x.z() + cam.cy;
        const auto& o = view.observations.at(el.observation_index);
        worst = std::max({worst, std::abs(o.u - u), std::abs(o.v - v)});
        ++tracked;
      }
    }
    CHECK(tracked > 1000);
    CHECK(worst < 1e-6);
  }

  SUBCASE("one camera and one point in front of it") {
    SynthScene scene;
    scene.points = {Vec3(0, 0, 0)};
    const auto r = synth_reconstruction(scene, single_camera_rig(Vec3(0, -3, 0), Vec3::Zero()), 1);
    REQUIRE(r.points.size() == 1);
    CHECK(r.points.begin()->second.track.size() == 1);
  }

  SUBCASE("a point behind every camera has an empty track") {
    SynthScene scene;
    scene.points = {Vec3(0, -10, 0)};
    CameraRig rig = single_camera_rig(Vec3(0, -3, 0), Vec3::Zero());
    rig.placements.push_back({Vec3(0.5, -3, 0), Vec3(0.5, 0, 0)});
    const auto r = synth_reconstruction(scene, rig, 1);
    // Camera z axis points to +y; the point sits at y = -10, i.e. z_cam = -7 < 0.
    const PosedCamera cam = r.camera(r.views.begin()->first);
    CHECK(cam.pose.to_camera(Vec3(0, -10, 0)).z() < 0);
    CHECK(r.points.begin()->second.track.empty());
  }

  SUBCASE("coincident cameras are degenerate") {
    SynthScene scene;
    scene.points = {Vec3::Zero()};
    CameraRig rig = single_camera_rig(Vec3(0, -3, 0), Vec3::Zero());
    rig.placements.push_back({Vec3(0, -3, 0), Vec3(1, 0, 0)});
    CHECK(code_of([&] { synth_reconstruction(scene, rig, 0); }) == ErrorCode::DegenerateOrbit);
  }
}

}  // TEST_SUITE
