// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#include "roi/fit.hpp"

#include <algorithm>
#include <cmath>

#include "roi/error.hpp"

namespace roi {

double& GridParams::operator[](std::size_t i) {
  return i < density.size() ? density[i] : rgb[i - density.size()];
}

double GridParams::operator[](std::size_t i) const {
  return i < density.size() ? density[i] : rgb[i - density.size()];
}

GridParams grid_params(const GridField& grid) {
  GridParams p;
  p.domain = grid.bounds();
  p.res = grid.resolution();
  p.density.assign(grid.density().begin(), grid.density().end());
  p.rgb.assign(grid.rgb().begin(), grid.rgb().end());
  return p;
}

GridField to_grid_field(const GridParams& params, std::string id) {
  std::vector<float> density(params.density.size()), rgb(params.rgb.size());
  for (std::size_t i = 0; i < density.size(); ++i) {
    density[i] = static_cast<float>(std::max(0.0, params.density[i]));
  }
  for (std::size_t i = 0; i < rgb.size(); ++i) {
    rgb[i] = static_cast<float>(std::clamp(params.rgb[i], 0.0, 1.0));
  }
  return GridField(std::move(id), params.domain, params.res, std::move(density), std::move(rgb));
}

namespace {

struct SamplePoint {
  TrilinearStencil stencil;
  double delta = 0.0;
  double sigma = 0.0;
  Vec3 rgb = Vec3::Zero();
};

double ray_loss(const GridParams& p, const Ray& ray, const Vec3& target, const FitConfig& cfg,
                double scale, GridParams* grad, std::vector<SamplePoint>& pts) {
  pts.clear();
  if (auto range = clip_ray(ray, p.domain); range && range->t_far > range->t_near) {
    const int n = cfg.samples_per_ray;
    const double width = (range->t_far - range->t_near) / n;
    for (int k = 0; k < n; ++k) {
      const double t = range->t_near + (k + 0.5) * width;
      auto st = trilinear_stencil(p.domain, p.res, range->at(t));
      if (!st) continue;
      SamplePoint sp;
      sp.stencil = *st;
      sp.delta = k + 1 < n ? width : 0.5 * width;
      for (int c = 0; c < 8; ++c) {
        const double w = st->weight[c];
        const std::size_t v = st->index[c];
        sp.sigma += w * p.density[v];
        for (int ch = 0; ch < 3; ++ch) sp.rgb[ch] += w * p.rgb[3 * v + ch];
      }
      pts.push_back(sp);
    }
  }
  // Forward pass.
  std::vector<double> trans(pts.size() + 1);
  std::vector<double> weight(pts.size());
  double depth = 0.0;
  Vec3 color = Vec3::Zero();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    trans[k] = std::exp(-depth);
    const double x = pts[k].sigma * pts[k].delta;
    weight[k] = trans[k] * -std::expm1(-x);
    color += weight[k] * pts[k].rgb;
    depth += x;
  }
  trans[pts.size()] = std::exp(-depth);
  color += trans[pts.size()] * cfg.background;
  const Vec3 residual = color - target;
  const double loss = scale * residual.squaredNorm();
  if (grad == nullptr) return loss;

  // Backward pass: dC/dx_k = T_{k+1} c_k - (sum_{i>k} w_i c_i + T_end bg).
  const Vec3 dl_dc = 2.0 * scale * residual;
  Vec3 behind = trans[pts.size()] * cfg.background;
  for (std::size_t kk = pts.size(); kk-- > 0;) {
    const auto& sp = pts[kk];
    const double t_next = trans[kk + 1];
    const double dl_dsigma = dl_dc.dot(t_next * sp.rgb - behind) * sp.delta;
    const Vec3 dl_drgb = weight[kk] * dl_dc;
    for (int c = 0; c < 8; ++c) {
      const double w = sp.stencil.weight[c];
      if (w == 0.0) continue;
      const std::size_t v = sp.stencil.index[c];
      grad->density[v] += w * dl_dsigma;
      for (int ch = 0; ch < 3; ++ch) grad->rgb[3 * v + ch] += w * dl_drgb[ch];
    }
    behind += weight[kk] * sp.rgb;
  }
  return loss;
}

}  // namespace

double photometric_loss(const GridParams& params, const std::vector<TrainingView>& views,
                        const FitConfig& config, GridParams* gradient) {
  if (views.empty()) throw Error(ErrorCode::EmptyTrainingSet, "fit_grid needs at least one view");
  if (config.samples_per_ray < 1) {
    throw Error(ErrorCode::InvalidArgument, "samples_per_ray must be >= 1");
  }
  std::size_t total_pixels = 0;
  for (const auto& v : views) {
    if (v.image.width != v.camera.intrinsics.width || v.image.height != v.camera.intrinsics.height) {
      throw Error(ErrorCode::ResolutionMismatch, "training image does not match its intrinsics");
    }
    total_pixels += v.image.pixel_count();
  }
  if (gradient) {
    gradient->domain = params.domain;
    gradient->res = params.res;
    gradient->density.assign(params.density.size(), 0.0);
    gradient->rgb.assign(params.rgb.size(), 0.0);
  }
  const double scale = 1.0 / (3.0 * static_cast<double>(total_pixels));
  std::vector<SamplePoint> scratch;
  double loss = 0.0;
  for (const auto& view : views) {
    for (int y = 0; y < view.image.height; ++y) {
      for (int x = 0; x < view.image.width; ++x) {
        const Ray ray = camera_ray(view.camera, x, y);
        loss += ray_loss(params, ray, view.image.pixel(x, y), config, scale, gradient, scratch);
      }
    }
  }
  return loss;
}

namespace {

void project(GridParams& p) {
  for (auto& s : p.density) s = std::max(0.0, s);
  for (auto& c : p.rgb) c = std::clamp(c, 0.0, 1.0);
}

void check_finite(double loss) {
  if (!std::isfinite(loss)) throw Error(ErrorCode::DivergedLoss, "loss became non-finite");
}

}  // namespace

GridField fit_grid(const std::vector<TrainingView>& views, const GridField& initial,
                   const FitConfig& config, FitReport* report) {
  if (views.empty()) throw Error(ErrorCode::EmptyTrainingSet, "fit_grid needs at least one view");
  if (config.steps < 0 || !(config.backtrack > 0.0 && config.backtrack < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "invalid fit configuration");
  }
  GridParams params = grid_params(initial);
  FitReport local;
  if (config.steps == 0) {
    local.losses.push_back(photometric_loss(params, views, config));
    if (report) *report = local;
    return initial;
  }
  GridParams grad;
  double loss = photometric_loss(params, views, config, &grad);
  check_finite(loss);
  local.losses.push_back(loss);
  double step = 1.0;
  for (int it = 0; it < config.steps; ++it) {
    bool accepted = false;
    for (int b = 0; b <= config.max_backtracks && !accepted; ++b, step *= config.backtrack) {
      GridParams trial = params;
      for (std::size_t i = 0; i < trial.density.size(); ++i) {
        trial.density[i] -= step * config.lr_density * grad.density[i];
      }
      for (std::size_t i = 0; i < trial.rgb.size(); ++i) {
        trial.rgb[i] -= step * config.lr_color * grad.rgb[i];
      }
      project(trial);
      const double trial_loss = photometric_loss(trial, views, config);
      check_finite(trial_loss);
      if (trial_loss < loss) {
        params = std::move(trial);
        accepted = true;
      }
    }
    if (!accepted) break;
    step = std::min(1.0, step / config.backtrack / config.backtrack);
    loss = photometric_loss(params, views, config, &grad);
    check_finite(loss);
    local.losses.push_back(loss);
    ++local.accepted_steps;
  }
  if (report) *report = local;
  return to_grid_field(params, initial.field_id());
}

}  // namespace roi
