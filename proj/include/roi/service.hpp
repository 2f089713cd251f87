// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "roi/composition.hpp"
#include "roi/error.hpp"
#include "roi/grouping.hpp"
#include "roi/sfm.hpp"

namespace roi {

struct ServiceOptions {
  std::size_t point_budget = 20000;  // default for GET /api/reconstruction
  std::uint64_t seed = 0;
  ThresholdRule rule = ThresholdRule::Strict;
  SamplerConfig sampler;
  int workers = 1;
  int default_max_dim = 256;
  std::string cors_origin = "*";
  std::filesystem::path state_dir;  // where POST /api/rois persists; empty = memory only
};

/// Scene field and ROI runtimes used by preview renders.
struct LoadedFields {
  std::shared_ptr<const RadianceField> scene;
  std::optional<Aabb> scene_bounds;
  std::vector<RoiRuntime> rois;
};

/// Immutable view of everything a request may read. Writers build a new
/// snapshot and swap the pointer, so readers never see partial updates.
struct SessionState {
  std::shared_ptr<const Reconstruction> recon;
  std::shared_ptr<const LoadedFields> fields;
  std::vector<RoiSpec> rois;
  std::string rois_config_id;
};

struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Request handling independent of the transport; serve() attaches it to a socket.
class Service {
 public:
  explicit Service(ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  void load_reconstruction(Reconstruction recon);
  void load_fields(LoadedFields fields);
  std::shared_ptr<const SessionState> snapshot() const;
  const ServiceOptions& options() const { return options_; }

  /// Routes one request. Errors become JSON bodies {"error", "message"}.
  HttpResponse handle(const HttpRequest& request);

  /// Binds host:port (0 picks a free port) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Blocks until stop() is called. bind() must have succeeded.
  void listen();
  void stop();

 private:
  HttpResponse get_reconstruction(const HttpRequest& req) const;
  HttpResponse post_group(const HttpRequest& req) const;
  HttpResponse get_rois() const;
  HttpResponse post_rois(const HttpRequest& req);
  HttpResponse post_preview(const HttpRequest& req) const;

  ServiceOptions options_;
  mutable std::mutex mutex_;  // guards state_ pointer and serialises writers
  std::shared_ptr<const SessionState> state_;
  struct Server;
  std::unique_ptr<Server> server_;
};

/// Seeded uniform subsample of point ids, returned sorted. Budget at or above
/// the point count keeps every point.
std::vector<PointId> decimate_points(const Reconstruction& recon, std::size_t budget,
                                     std::uint64_t seed);

/// HTTP status used for a library error code.
int http_status(ErrorCode code);

}  // namespace roi
