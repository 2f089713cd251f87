// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#include <json.hpp>

#include "roi/error.hpp"
#include "roi/sfm.hpp"

namespace roi {

using nlohmann::json;

namespace {

CameraModel model_from_string(const std::string& s) {
  if (s == "PINHOLE") return CameraModel::Pinhole;
  if (s == "SIMPLE_PINHOLE") return CameraModel::SimplePinhole;
  throw Error(ErrorCode::UnsupportedCameraModel, s);
}

}  // namespace

std::string write_reconstruction_json(const Reconstruction& recon) {
  json doc;
  doc["schema"] = kReconSchema;
  json cameras = json::array();
  for (const auto& [id, c] : recon.intrinsics) {
    cameras.push_back({{"camera_id", id},
                       {"model", to_string(c.model)},
                       {"width", c.width},
                       {"height", c.height},
                       {"fx", c.fx},
                       {"fy", c.fy},
                       {"cx", c.cx},
                       {"cy", c.cy}});
  }
  json views = json::array();
  for (const auto& [id, v] : recon.views) {
    json obs = json::array();
    for (const auto& o : v.observations) obs.push_back(json::array({o.u, o.v, o.point3d_id}));
    views.push_back({{"view_id", id},
                     {"name", v.name},
                     {"camera_id", v.camera_id},
                     {"qvec", v.pose.qvec},
                     {"tvec", {v.pose.tvec.x(), v.pose.tvec.y(), v.pose.tvec.z()}},
                     {"observations", std::move(obs)}});
  }
  json points = json::array();
  for (const auto& [id, p] : recon.points) {
    json track = json::array();
    for (const auto& el : p.track) track.push_back(json::array({el.view_id, el.observation_index}));
    points.push_back({{"point_id", id},
                      {"xyz", {p.position.x(), p.position.y(), p.position.z()}},
                      {"rgb", p.color},
                      {"error", p.reproj_error},
                      {"track", std::move(track)}});
  }
  doc["cameras"] = std::move(cameras);
  doc["views"] = std::move(views);
  doc["points"] = std::move(points);
  return doc.dump();
}

Reconstruction parse_reconstruction_json(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
  if (!doc.is_object() || !doc.contains("schema")) {
    throw Error(ErrorCode::MalformedJson, "missing schema tag");
  }
  if (doc["schema"] != kReconSchema) {
    throw Error(ErrorCode::SchemaVersionMismatch,
                "expected '" + std::string(kReconSchema) + "', got " + doc["schema"].dump());
  }
  Reconstruction recon;
  try {
    for (const auto& c : doc.at("cameras")) {
      CameraIntrinsics cam;
      cam.camera_id = c.at("camera_id").get<int>();
      cam.model = model_from_string(c.at("model").get<std::string>());
      cam.width = c.at("width").get<int>();
      cam.height = c.at("height").get<int>();
      cam.fx = c.at("fx").get<double>();
      cam.fy = c.at("fy").get<double>();
      cam.cx = c.at("cx").get<double>();
      cam.cy = c.at("cy").get<double>();
      recon.intrinsics.emplace(cam.camera_id, cam);
    }
    for (const auto& v : doc.at("views")) {
      ViewRecord view;
      view.view_id = v.at("view_id").get<int>();
      view.name = v.at("name").get<std::string>();
      view.camera_id = v.at("camera_id").get<int>();
      view.pose.qvec = v.at("qvec").get<std::array<double, 4>>();
      const auto t = v.at("tvec").get<std::array<double, 3>>();
      view.pose.tvec = Vec3(t[0], t[1], t[2]);
      for (const auto& o : v.at("observations")) {
        if (!o.is_array() || o.size() != 3) throw Error(ErrorCode::MalformedJson, "observation");
        view.observations.push_back({o[0].get<double>(), o[1].get<double>(), o[2].get<PointId>()});
      }
      recon.views.emplace(view.view_id, std::move(view));
    }
    for (const auto& p : doc.at("points")) {
      SparsePoint point;
      point.point_id = p.at("point_id").get<PointId>();
      const auto xyz = p.at("xyz").get<std::array<double, 3>>();
      point.position = Vec3(xyz[0], xyz[1], xyz[2]);
      point.color = p.at("rgb").get<std::array<std::uint8_t, 3>>();
      point.reproj_error = p.at("error").get<double>();
      for (const auto& el : p.at("track")) {
        if (!el.is_array() || el.size() != 2) throw Error(ErrorCode::MalformedJson, "track");
        point.track.push_back({el[0].get<int>(), el[1].get<int>()});
      }
      recon.points.emplace(point.point_id, std::move(point));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
  validate(recon);
  return recon;
}

}  // namespace roi
