// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "roi/camera.hpp"
#include "roi/fields.hpp"
#include "roi/rendering.hpp"

namespace roi {

struct TrainingView {
  PosedCamera camera;
  ImageBuffer image;  // target colours at the camera's resolution
};

/// Grid parameters in double precision; the optimiser works on these.
struct GridParams {
  Aabb domain;
  GridResolution res;
  std::vector<double> density;  // one per vertex, x-fastest
  std::vector<double> rgb;      // three per vertex

  std::size_t size() const { return density.size() + rgb.size(); }
  /// Flat access: densities first, then rgb.
  double& operator[](std::size_t i);
  double operator[](std::size_t i) const;
};

GridParams grid_params(const GridField& grid);
GridField to_grid_field(const GridParams& params, std::string id);

struct FitConfig {
  int steps = 100;
  int samples_per_ray = 32;  // stratified midpoints inside the grid domain
  double lr_density = 50.0;
  double lr_color = 1.0;
  double backtrack = 0.5;
  int max_backtracks = 12;
  Vec3 background = Vec3::Zero();
};

struct FitReport {
  std::vector<double> losses;  // loss of the current iterate after each accepted step (index 0: initial)
  int accepted_steps = 0;
};

/// Mean squared colour error over every pixel and channel of every view.
/// When `gradient` is non-null it receives dLoss/dparam with the same layout.
double photometric_loss(const GridParams& params, const std::vector<TrainingView>& views,
                        const FitConfig& config, GridParams* gradient = nullptr);

/// Projected gradient descent with backtracking: every accepted step lowers
/// the loss; density is clamped to >= 0 and rgb to [0,1] after each step.
GridField fit_grid(const std::vector<TrainingView>& views, const GridField& initial,
                   const FitConfig& config, FitReport* report = nullptr);

}  // namespace roi
