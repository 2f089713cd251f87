// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#include "roi/metrics.hpp"

#include <array>
#include <cmath>

#include "roi/error.hpp"

namespace roi {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

void check_dims(const ImageBuffer& a, const ImageBuffer& b) {
  if (a.width != b.width || a.height != b.height) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(a.width) + "x" + std::to_string(a.height) + " vs " +
                    std::to_string(b.width) + "x" + std::to_string(b.height));
  }
}

double psnr_from_mse(double mse) {
  if (mse == 0.0) return kInf;
  return 10.0 * std::log10(1.0 / mse);
}

std::array<double, kWindow> gaussian_1d() {
  std::array<double, kWindow> g{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double x = i - kWindow / 2;
    g[i] = std::exp(-(x * x) / (2.0 * kSigma * kSigma));
    sum += g[i];
  }
  for (auto& v : g) v /= sum;
  return g;
}

// Separable "valid" filtering of a w x h plane.
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h,
                                 const std::array<double, kWindow>& g) {
  const int ow = w - kWindow + 1, oh = h - kWindow + 1;
  std::vector<double> tmp(std::size_t(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) s += g[k] * src[std::size_t(y) * w + x + k];
      tmp[std::size_t(y) * ow + x] = s;
    }
  }
  std::vector<double> out(std::size_t(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) s += g[k] * tmp[std::size_t(y + k) * ow + x];
      out[std::size_t(y) * ow + x] = s;
    }
  }
  return out;
}

}  // namespace

double psnr(const ImageBuffer& image, const ImageBuffer& reference) {
  check_dims(image, reference);
  double sum = 0.0;
  for (std::size_t i = 0; i < image.rgb.size(); ++i) {
    const double d = image.rgb[i] - reference.rgb[i];
    sum += d * d;
  }
  return psnr_from_mse(sum / static_cast<double>(image.rgb.size()));
}

std::vector<double> rec709_luma(const ImageBuffer& image) {
  std::vector<double> y(image.pixel_count());
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = 0.2126 * image.rgb[3 * i] + 0.7152 * image.rgb[3 * i + 1] + 0.0722 * image.rgb[3 * i + 2];
  }
  return y;
}

double ssim(const ImageBuffer& image, const ImageBuffer& reference) {
  check_dims(image, reference);
  if (image.width < kWindow || image.height < kWindow) {
    throw Error(ErrorCode::ImageTooSmall, "SSIM needs at least 11x11 pixels");
  }
  const int w = image.width, h = image.height;
  const auto a = rec709_luma(image), b = rec709_luma(reference);
  std::vector<double> aa(a.size()), bb(a.size()), ab(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    aa[i] = a[i] * a[i];
    bb[i] = b[i] * b[i];
    ab[i] = a[i] * b[i];
  }
  const auto g = gaussian_1d();
  const auto mu_a = filter_valid(a, w, h, g), mu_b = filter_valid(b, w, h, g);
  const auto e_aa = filter_valid(aa, w, h, g), e_bb = filter_valid(bb, w, h, g);
  const auto e_ab = filter_valid(ab, w, h, g);
  double sum = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double va = e_aa[i] - mu_a[i] * mu_a[i];
    const double vb = e_bb[i] - mu_b[i] * mu_b[i];
    const double cov = e_ab[i] - mu_a[i] * mu_b[i];
    sum += ((2 * mu_a[i] * mu_b[i] + kC1) * (2 * cov + kC2)) /
           ((mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + kC1) * (va + vb + kC2));
  }
  return sum / static_cast<double>(mu_a.size());
}

std::vector<bool> aabb_mask(const PosedCamera& camera, const Aabb& box) {
  const int w = camera.intrinsics.width, h = camera.intrinsics.height;
  std::vector<bool> mask(std::size_t(w) * h, false);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      mask[std::size_t(y) * w + x] = ray_aabb_intersect(camera_ray(camera, x, y), box).has_value();
    }
  }
  return mask;
}

double masked_psnr(const ImageBuffer& image, const ImageBuffer& reference,
                   const std::vector<bool>& mask) {
  check_dims(image, reference);
  if (mask.size() != image.pixel_count()) {
    throw Error(ErrorCode::DimensionMismatch, "mask size does not match image");
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t p = 0; p < mask.size(); ++p) {
    if (!mask[p]) continue;
    for (int c = 0; c < 3; ++c) {
      const double d = image.rgb[3 * p + c] - reference.rgb[3 * p + c];
      sum += d * d;
    }
    n += 3;
  }
  if (n == 0) throw Error(ErrorCode::EmptyMask, "no pixel ray intersects the box");
  return psnr_from_mse(sum / static_cast<double>(n));
}

double masked_psnr(const ImageBuffer& image, const ImageBuffer& reference, const Aabb& box,
                   const PosedCamera& camera) {
  return masked_psnr(image, reference, aabb_mask(camera, box));
}

}  // namespace roi
