// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#include "roi/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>

#include "json_util.hpp"
#include "roi/error.hpp"
#include "roi/image_io.hpp"
#include "roi/rng.hpp"

namespace roi {

using nlohmann::json;

struct Service::Server {
  httplib::Server http;
};

namespace {

HttpResponse json_response(int status, const json& body) {
  HttpResponse r;
  r.status = status;
  r.body = body.dump() + "\n";
  return r;
}

HttpResponse error_response(int status, const std::string& code, const std::string& message) {
  return json_response(status, {{"error", code}, {"message", message}});
}

json camera_json(const ViewRecord& v, const CameraIntrinsics& c) {
  return {{"view_id", v.view_id},
          {"name", v.name},
          {"camera_id", v.camera_id},
          {"qvec", v.pose.qvec},
          {"tvec", jsonutil::vec3(v.pose.tvec)},
          {"center", jsonutil::vec3(v.center())},
          {"intrinsics",
           {{"model", to_string(c.model)},
            {"width", c.width},
            {"height", c.height},
            {"fx", c.fx},
            {"fy", c.fy},
            {"cx", c.cx},
            {"cy", c.cy}}}};
}

std::uint64_t parse_u64(const std::string& s, const char* what) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad ") + what + " '" + s + "'");
  }
  return v;
}

// FNV-1a over the canonical spec document.
std::string config_id(const std::string& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyRoi:
      return 422;
    case ErrorCode::MissingFile:
    case ErrorCode::Io:
      return 500;
    default:
      break;
  }
  return category(code) == ErrorCategory::Numeric ? 500 : 400;
}

std::vector<PointId> decimate_points(const Reconstruction& recon, std::size_t budget,
                                     std::uint64_t seed) {
  std::vector<PointId> ids;
  ids.reserve(recon.points.size());
  for (const auto& [id, p] : recon.points) ids.push_back(id);
  if (budget >= ids.size()) return ids;
  // Partial Fisher-Yates: the first `budget` slots are a uniform subset.
  std::mt19937_64 rng(derive_seed(seed, 0xdec1));
  for (std::size_t i = 0; i < budget; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform01(rng) * double(ids.size() - i));
    std::swap(ids[i], ids[std::min(j, ids.size() - 1)]);
  }
  ids.resize(budget);
  std::sort(ids.begin(), ids.end());
  return ids;
}

Service::Service(ServiceOptions options)
    : options_(std::move(options)), state_(std::make_shared<SessionState>()) {}

Service::~Service() { stop(); }

std::shared_ptr<const SessionState> Service::snapshot() const {
  std::lock_guard lock(mutex_);
  return state_;
}

void Service::load_reconstruction(Reconstruction recon) {
  validate(recon);
  auto shared = std::make_shared<const Reconstruction>(std::move(recon));
  std::lock_guard lock(mutex_);
  auto next = std::make_shared<SessionState>(*state_);
  next->recon = std::move(shared);
  state_ = std::move(next);
}

void Service::load_fields(LoadedFields fields) {
  if (!fields.scene) throw Error(ErrorCode::InvalidArgument, "scene field missing");
  auto shared = std::make_shared<const LoadedFields>(std::move(fields));
  std::lock_guard lock(mutex_);
  auto next = std::make_shared<SessionState>(*state_);
  next->fields = std::move(shared);
  state_ = std::move(next);
}

HttpResponse Service::handle(const HttpRequest& req) {
  try {
    if (req.method == "GET" && req.path == "/api/reconstruction") return get_reconstruction(req);
    if (req.method == "POST" && req.path == "/api/group") return post_group(req);
    if (req.method == "GET" && req.path == "/api/rois") return get_rois();
    if (req.method == "POST" && req.path == "/api/rois") return post_rois(req);
    if (req.method == "POST" && req.path == "/api/preview") return post_preview(req);
    if (req.method == "OPTIONS") return {204, "text/plain", ""};
    return error_response(404, "NotFound", req.method + " " + req.path);
  } catch (const Error& e) {
    return error_response(http_status(e.code()), to_string(e.code()), e.what());
  } catch (const json::exception& e) {
    return error_response(400, "MalformedJson", e.what());
  }
}

HttpResponse Service::get_reconstruction(const HttpRequest& req) const {
  const auto state = snapshot();
  if (!state->recon) return error_response(404, "NoSession", "no reconstruction loaded");
  const Reconstruction& recon = *state->recon;
  std::size_t budget = options_.point_budget;
  std::uint64_t seed = options_.seed;
  if (auto it = req.query.find("budget"); it != req.query.end()) {
    budget = parse_u64(it->second, "budget");
  }
  if (auto it = req.query.find("seed"); it != req.query.end()) seed = parse_u64(it->second, "seed");

  json points = json::array();
  for (PointId id : decimate_points(recon, budget, seed)) {
    const auto& p = recon.points.at(id);
    points.push_back({{"id", id}, {"xyz", jsonutil::vec3(p.position)}, {"rgb", p.color}});
  }
  json cameras = json::array();
  for (const auto& [id, v] : recon.views) {
    cameras.push_back(camera_json(v, recon.intrinsics.at(v.camera_id)));
  }
  return json_response(200, {{"total_points", recon.points.size()},
                             {"budget", budget},
                             {"seed", seed},
                             {"points", std::move(points)},
                             {"cameras", std::move(cameras)}});
}

HttpResponse Service::post_group(const HttpRequest& req) const {
  const auto state = snapshot();
  if (!state->recon) return error_response(404, "NoSession", "no reconstruction loaded");
  const json body = jsonutil::parse(req.body);
  RoiSpec spec;
  spec.name = body.value("name", std::string("roi"));
  spec.aabb = jsonutil::aabb(body.at("aabb"));
  spec.threshold_fraction = body.value("threshold_fraction", spec.threshold_fraction);
  spec.validate();
  ThresholdRule rule = options_.rule;
  if (body.contains("threshold_rule")) {
    const auto r = body["threshold_rule"].get<std::string>();
    if (r != "strict" && r != "at-least") {
      throw Error(ErrorCode::InvalidArgument, "threshold_rule must be strict or at-least");
    }
    rule = r == "strict" ? ThresholdRule::Strict : ThresholdRule::AtLeast;
  }
  const auto counts = count_visible_points(*state->recon, spec.aabb);
  const auto selected = select_from_counts(counts, spec.threshold_fraction, rule);
  json jc = json::array();
  for (const auto& [v, c] : counts.counts) jc.push_back(json::array({v, c}));
  return json_response(200, {{"nbTotalPoints", counts.total_points},
                             {"counts", std::move(jc)},
                             {"selected", selected}});
}

HttpResponse Service::get_rois() const {
  const auto state = snapshot();
  auto doc = json::parse(write_roi_specs_json(state->rois));
  doc["config_id"] = state->rois_config_id;
  return json_response(200, doc);
}

HttpResponse Service::post_rois(const HttpRequest& req) {
  json doc = jsonutil::parse(req.body);
  // A bare list of specs is accepted as shorthand for the full document.
  if (doc.is_array()) doc = {{"schema", kGroupsSchema}, {"rois", doc}};
  auto specs = parse_roi_specs_json(doc.dump());
  const std::string canonical = write_roi_specs_json(specs);
  const std::string id = config_id(canonical);
  if (!options_.state_dir.empty()) {
    std::filesystem::create_directories(options_.state_dir);
    const auto path = options_.state_dir / ("rois-" + id + ".json");
    std::ofstream out(path, std::ios::binary);
    out << canonical;
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  }
  {
    std::lock_guard lock(mutex_);
    auto next = std::make_shared<SessionState>(*state_);
    next->rois = std::move(specs);
    next->rois_config_id = id;
    state_ = std::move(next);
  }
  return json_response(200, {{"config_id", id}, {"count", doc.at("rois").size()}});
}

HttpResponse Service::post_preview(const HttpRequest& req) const {
  const auto state = snapshot();
  if (!state->fields) return error_response(409, "FieldsNotLoaded", "load fields first");
  if (!state->recon) return error_response(404, "NoSession", "no reconstruction loaded");
  const json body = jsonutil::parse(req.body);
  const Reconstruction& recon = *state->recon;

  PosedCamera camera;
  if (body.contains("view_id")) {
    camera = recon.camera(body["view_id"].get<ViewId>());
  } else if (body.contains("pose")) {
    const json& p = body["pose"];
    if (recon.intrinsics.empty()) throw Error(ErrorCode::NoUsableView, "no intrinsics loaded");
    camera.intrinsics = recon.intrinsics.begin()->second;
    if (p.contains("qvec")) {
      camera.pose.qvec = p.at("qvec").get<std::array<double, 4>>();
      camera.pose.tvec = jsonutil::vec3(p.at("tvec"));
    } else {
      const Vec3 up = p.contains("up") ? jsonutil::vec3(p["up"]) : Vec3::UnitZ();
      camera.pose = look_at(jsonutil::vec3(p.at("position")), jsonutil::vec3(p.at("target")), up);
    }
  } else {
    throw Error(ErrorCode::InvalidArgument, "preview needs view_id or pose");
  }
  const int max_dim = body.value("max_dim", options_.default_max_dim);
  if (max_dim < 1) throw Error(ErrorCode::InvalidArgument, "max_dim must be >= 1");
  camera.intrinsics = scale_intrinsics(camera.intrinsics, max_dim);

  const std::string mode = body.value("mode", std::string("composed"));
  const LoadedFields& fields = *state->fields;
  SamplerConfig sampler = options_.sampler;
  sampler.seed = body.value("seed", options_.seed);
  json out;
  ImageBuffer image;
  if (mode == "scene-only") {
    RenderOptions opts;
    opts.workers = options_.workers;
    opts.sampling_bounds = fields.scene_bounds;
    image = render_image(*fields.scene, camera, sampler, opts);
    out["stats"] = nullptr;
  } else if (mode == "composed") {
    CompositionConfig cc;
    cc.collect_heatmaps = body.value("heatmaps", false);
    auto composed =
        render_image_composed(*fields.scene, fields.rois, camera, sampler, cc, options_.workers);
    image = std::move(composed.image);
    out["stats"] = json::parse(stats_to_json(composed.stats, cc.collect_heatmaps));
  } else {
    throw Error(ErrorCode::UnsupportedMode, "mode must be scene-only or composed");
  }
  out["mode"] = mode;
  out["width"] = image.width;
  out["height"] = image.height;
  out["png_base64"] = base64_encode(encode_png(image));
  return json_response(200, out);
}

int Service::bind(const std::string& host, int port) {
  server_ = std::make_unique<Server>();
  auto& http = server_->http;
  http.set_default_headers({{"Access-Control-Allow-Origin", options_.cors_origin},
                            {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                            {"Access-Control-Allow-Headers", "Content-Type"}});
  auto route = [this](const httplib::Request& in, httplib::Response& res) {
    HttpRequest req;
    req.method = in.method;
    req.path = in.path;
    for (const auto& [k, v] : in.params) req.query[k] = v;
    req.body = in.body;
    const HttpResponse out = handle(req);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  for (const char* path : {"/api/reconstruction", "/api/rois"}) http.Get(path, route);
  for (const char* path : {"/api/group", "/api/rois", "/api/preview"}) http.Post(path, route);
  http.Options(R"(/api/.*)", route);
  if (port == 0) {
    const int bound = http.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::Io, "cannot bind " + host);
    return bound;
  }
  if (!http.bind_to_port(host, port)) {
    throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void Service::listen() {
  if (!server_) throw Error(ErrorCode::InvalidArgument, "bind() before listen()");
  server_->http.listen_after_bind();
}

void Service::stop() {
  if (server_) server_->http.stop();
}

}  // namespace roi
