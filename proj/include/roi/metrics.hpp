// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "roi/camera.hpp"
#include "roi/geometry.hpp"
#include "roi/rendering.hpp"

namespace roi {

/// 10 log10(1 / MSE) over all channels; +inf for identical images.
double psnr(const ImageBuffer& image, const ImageBuffer& reference);

/// Mean SSIM on Rec.709 luma: 11x11 Gaussian window (sigma 1.5), K1 0.01,
/// K2 0.03, dynamic range 1, averaged over fully contained windows.
double ssim(const ImageBuffer& image, const ImageBuffer& reference);

/// Pixels whose camera ray (t >= 0) intersects `box`.
std::vector<bool> aabb_mask(const PosedCamera& camera, const Aabb& box);

double masked_psnr(const ImageBuffer& image, const ImageBuffer& reference,
                   const std::vector<bool>& mask);
double masked_psnr(const ImageBuffer& image, const ImageBuffer& reference, const Aabb& box,
                   const PosedCamera& camera);

std::vector<double> rec709_luma(const ImageBuffer& image);

}  // namespace roi
