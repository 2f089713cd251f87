// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "roi/error.hpp"
#include "roi/sfm.hpp"

namespace roi {

namespace fs = std::filesystem;

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool is_blank(std::string_view line) { return split_ws(line).empty(); }

bool is_comment(std::string_view line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos != std::string_view::npos && line[pos] == '#';
}

class LineReader {
 public:
  explicit LineReader(const fs::path& path) : path_(path), in_(path) {
    if (!fs::exists(path)) throw Error(ErrorCode::MissingFile, path.string());
    if (!in_) throw Error(ErrorCode::Io, "cannot open " + path.string());
  }

  // Next line that is not a comment; empty lines are returned as-is.
  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (is_comment(line)) continue;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::MalformedLine,
                path_.filename().string() + ":" + std::to_string(line_no_) + ": " + what);
  }

  int line_no() const { return line_no_; }

  template <typename T>
  T number(std::string_view token) const {
    T value{};
    const auto* first = token.data();
    const auto* last = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) fail("expected a number, got '" + std::string(token) + "'");
    if constexpr (std::is_floating_point_v<T>) {
      if (!std::isfinite(value)) fail("non-finite value '" + std::string(token) + "'");
    }
    return value;
  }

 private:
  fs::path path_;
  std::ifstream in_;
  int line_no_ = 0;
};

void read_cameras(const fs::path& path, Reconstruction& recon) {
  LineReader reader(path);
  std::string line;
  while (reader.next(line)) {
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() < 2) reader.fail("truncated camera line");
    CameraIntrinsics cam;
    cam.camera_id = reader.number<int>(tok[0]);
    const std::string_view model = tok[1];
    if (model == "PINHOLE") {
      if (tok.size() != 8) reader.fail("PINHOLE expects 'ID MODEL W H fx fy cx cy'");
      cam.model = CameraModel::Pinhole;
      cam.fx = reader.number<double>(tok[4]);
      cam.fy = reader.number<double>(tok[5]);
      cam.cx = reader.number<double>(tok[6]);
      cam.cy = reader.number<double>(tok[7]);
    } else if (model == "SIMPLE_PINHOLE") {
      if (tok.size() != 7) reader.fail("SIMPLE_PINHOLE expects 'ID MODEL W H f cx cy'");
      cam.model = CameraModel::SimplePinhole;
      cam.fx = cam.fy = reader.number<double>(tok[4]);
      cam.cx = reader.number<double>(tok[5]);
      cam.cy = reader.number<double>(tok[6]);
    } else {
      throw Error(ErrorCode::UnsupportedCameraModel,
                  path.filename().string() + ":" + std::to_string(reader.line_no()) + ": " +
                      std::string(model));
    }
    cam.width = reader.number<int>(tok[2]);
    cam.height = reader.number<int>(tok[3]);
    if (!cam.valid()) reader.fail("camera parameters out of range");
    if (!recon.intrinsics.emplace(cam.camera_id, cam).second) reader.fail("duplicate camera id");
  }
}

void read_images(const fs::path& path, Reconstruction& recon) {
  LineReader reader(path);
  std::string line;
  while (reader.next(line)) {
    if (is_blank(line)) continue;
    const auto tok = split_ws(line);
    if (tok.size() != 10) reader.fail("pose line expects 'ID qw qx qy qz tx ty tz CAM_ID NAME'");
    ViewRecord view;
    view.view_id = reader.number<int>(tok[0]);
    std::array<double, 4> q{};
    for (int i = 0; i < 4; ++i) q[i] = reader.number<double>(tok[1 + i]);
    const double qn = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
    if (!(qn > 1e-12)) reader.fail("zero-length quaternion");
    if (std::abs(qn - 1.0) > 1e-9) {
      for (auto& c : q) c /= qn;
    }
    view.pose.qvec = q;
    for (int i = 0; i < 3; ++i) view.pose.tvec[i] = reader.number<double>(tok[5 + i]);
    view.camera_id = reader.number<int>(tok[8]);
    view.name = std::string(tok[9]);
    if (!recon.intrinsics.count(view.camera_id)) {
      reader.fail("image references unknown camera id " + std::to_string(view.camera_id));
    }

    std::string obs_line;
    if (!reader.next(obs_line)) reader.fail("missing observation line for image");
    const auto obs = split_ws(obs_line);
    if (obs.size() % 3 != 0) reader.fail("observation line must hold (u v POINT3D_ID) triples");
    view.observations.reserve(obs.size() / 3);
    for (std::size_t i = 0; i < obs.size(); i += 3) {
      Observation o;
      o.u = reader.number<double>(obs[i]);
      o.v = reader.number<double>(obs[i + 1]);
      o.point3d_id = reader.number<PointId>(obs[i + 2]);
      if (o.point3d_id < kNoPoint) reader.fail("negative point id other than -1");
      view.observations.push_back(o);
    }
    if (!recon.views.emplace(view.view_id, std::move(view)).second) {
      reader.fail("duplicate image id");
    }
  }
}

void read_points(const fs::path& path, Reconstruction& recon) {
  LineReader reader(path);
  std::string line;
  while (reader.next(line)) {
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() < 8 || (tok.size() - 8) % 2 != 0) {
      reader.fail("point line expects 'ID x y z r g b error (IMG_ID OBS_IDX)*'");
    }
    SparsePoint p;
    p.point_id = reader.number<PointId>(tok[0]);
    if (p.point_id < 0) reader.fail("point id must be non-negative");
    for (int i = 0; i < 3; ++i) p.position[i] = reader.number<double>(tok[1 + i]);
    for (int i = 0; i < 3; ++i) {
      const int c = reader.number<int>(tok[4 + i]);
      if (c < 0 || c > 255) reader.fail("color channel out of [0,255]");
      p.color[i] = static_cast<std::uint8_t>(c);
    }
    p.reproj_error = reader.number<double>(tok[7]);
    for (std::size_t i = 8; i < tok.size(); i += 2) {
      p.track.push_back({reader.number<int>(tok[i]), reader.number<int>(tok[i + 1])});
    }
    if (!recon.points.emplace(p.point_id, std::move(p)).second) reader.fail("duplicate point id");
  }
}

}  // namespace

Reconstruction parse_colmap_text(const fs::path& directory) {
  Reconstruction recon;
  read_cameras(directory / "cameras.txt", recon);
  read_images(directory / "images.txt", recon);
  read_points(directory / "points3D.txt", recon);
  validate(recon);
  return recon;
}

void write_colmap_text(const Reconstruction& recon, const fs::path& directory) {
  fs::create_directories(directory);
  auto open = [&](const char* name) {
    std::ofstream out(directory / name);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + (directory / name).string());
    out << std::setprecision(17);
    return out;
  };
  {
    auto out = open("cameras.txt");
    out << "# Camera list with one line of data per camera:\n"
        << "#   CAMERA_ID, MODEL, WIDTH, HEIGHT, PARAMS[]\n";
    for (const auto& [id, cam] : recon.intrinsics) {
      out << id << ' ' << to_string(cam.model) << ' ' << cam.width << ' ' << cam.height << ' ';
      if (cam.model == CameraModel::SimplePinhole) {
        out << cam.fx << ' ' << cam.cx << ' ' << cam.cy << '\n';
      } else {
        out << cam.fx << ' ' << cam.fy << ' ' << cam.cx << ' ' << cam.cy << '\n';
      }
    }
  }
  {
    auto out = open("images.txt");
    out << "# Image list with two lines of data per image:\n"
        << "#   IMAGE_ID, QW, QX, QY, QZ, TX, TY, TZ, CAMERA_ID, NAME\n"
        << "#   POINTS2D[] as (X, Y, POINT3D_ID)\n";
    for (const auto& [id, view] : recon.views) {
      const auto& q = view.pose.qvec;
      const auto& t = view.pose.tvec;
      out << id << ' ' << q[0] << ' ' << q[1] << ' ' << q[2] << ' ' << q[3] << ' ' << t.x() << ' '
          << t.y() << ' ' << t.z() << ' ' << view.camera_id << ' ' << view.name << '\n';
      for (std::size_t i = 0; i < view.observations.size(); ++i) {
        const auto& o = view.observations[i];
        if (i) out << ' ';
        out << o.u << ' ' << o.v << ' ' << o.point3d_id;
      }
      out << '\n';
    }
  }
  {
    auto out = open("points3D.txt");
    out << "# 3D point list with one line of data per point:\n"
        << "#   POINT3D_ID, X, Y, Z, R, G, B, ERROR, TRACK[] as (IMAGE_ID, POINT2D_IDX)\n";
    for (const auto& [id, p] : recon.points) {
      out << id << ' ' << p.position.x() << ' ' << p.position.y() << ' ' << p.position.z() << ' '
          << int(p.color[0]) << ' ' << int(p.color[1]) << ' ' << int(p.color[2]) << ' '
          << p.reproj_error;
      for (const auto& el : p.track) out << ' ' << el.view_id << ' ' << el.observation_index;
      out << '\n';
    }
  }
}

void validate(const Reconstruction& recon) {
  auto broken = [](PointId pid, ViewId vid, const std::string& what) {
    throw Error(ErrorCode::BrokenTrack, "point " + std::to_string(pid) + ", view " +
                                            std::to_string(vid) + ": " + what);
  };
  for (const auto& [id, cam] : recon.intrinsics) {
    if (id != cam.camera_id || !cam.valid()) {
      throw Error(ErrorCode::InvalidArgument, "invalid camera " + std::to_string(id));
    }
  }
  for (const auto& [vid, view] : recon.views) {
    if (vid != view.view_id) throw Error(ErrorCode::InvalidArgument, "view id key mismatch");
    if (!recon.intrinsics.count(view.camera_id)) {
      throw Error(ErrorCode::MalformedLine, "view " + std::to_string(vid) +
                                                " references unknown camera " +
                                                std::to_string(view.camera_id));
    }
    const auto& q = view.pose.qvec;
    const double qn = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
    if (std::abs(qn - 1.0) > 1e-9) {
      throw Error(ErrorCode::InvalidArgument, "view " + std::to_string(vid) + " quaternion not unit");
    }
    for (std::size_t k = 0; k < view.observations.size(); ++k) {
      const PointId pid = view.observations[k].point3d_id;
      if (pid == kNoPoint) continue;
      auto it = recon.points.find(pid);
      if (it == recon.points.end()) broken(pid, vid, "observation references missing point");
      const auto& track = it->second.track;
      const TrackElement el{vid, static_cast<int>(k)};
      if (std::find(track.begin(), track.end(), el) == track.end()) {
        broken(pid, vid, "observation " + std::to_string(k) + " absent from point track");
      }
    }
  }
  for (const auto& [pid, point] : recon.points) {
    if (pid != point.point_id) throw Error(ErrorCode::InvalidArgument, "point id key mismatch");
    std::set<std::pair<ViewId, int>> seen;
    for (const auto& el : point.track) {
      auto vit = recon.views.find(el.view_id);
      if (vit == recon.views.end()) broken(pid, el.view_id, "track references missing view");
      const auto& obs = vit->second.observations;
      if (el.observation_index < 0 || el.observation_index >= static_cast<int>(obs.size())) {
        broken(pid, el.view_id, "observation index out of range");
      }
      if (obs[el.observation_index].point3d_id != pid) {
        broken(pid, el.view_id, "observation does not reference this point");
      }
      if (!seen.emplace(el.view_id, el.observation_index).second) {
        broken(pid, el.view_id, "duplicate track element");
      }
    }
  }
}

PosedCamera Reconstruction::camera(ViewId view_id) const {
  auto vit = views.find(view_id);
  if (vit == views.end()) {
    throw Error(ErrorCode::InvalidArgument, "unknown view id " + std::to_string(view_id));
  }
  return PosedCamera{vit->second.pose, intrinsics.at(vit->second.camera_id)};
}

}  // namespace roi
