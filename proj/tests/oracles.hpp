// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

// Brute-force reference implementations used to check the library. None of
// them call into the code paths they check.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "roi/fields.hpp"
#include "roi/rendering.hpp"
#include "roi/sfm.hpp"

namespace roi::oracle {

struct DenseResult {
  Vec3 color = Vec3::Zero();
  double opacity = 0.0;
  std::optional<double> depth;  // where the accumulated weight first reaches 0.5
};

/// Midpoint rule with n equal steps on [a, b], front to back.
inline DenseResult dense_march(const RadianceField& f, const Ray& r, double a, double b, int n,
                               const Vec3& background = Vec3::Zero()) {
  DenseResult out;
  if (!(b > a)) {
    out.color = background;
    return out;
  }
  const double dt = (b - a) / n;
  double trans = 1.0;
  for (int i = 0; i < n; ++i) {
    const double t = a + (i + 0.5) * dt;
    const auto s = f.query(r.origin + t * r.direction, r.direction);
    const double alpha = 1.0 - std::exp(-s.sigma * dt);
    const double w = trans * alpha;
    if (!out.depth && out.opacity + w >= 0.5 && w > 0.0) {
      // Weight is spread uniformly over the step.
      out.depth = (t - 0.5 * dt) + dt * (0.5 - out.opacity) / w;
    }
    out.color += w * s.rgb;
    out.opacity += w;
    trans *= 1.0 - alpha;
  }
  out.color += trans * background;
  return out;
}

/// Slab-free box test: samples the segment densely and reports the first and
/// last inside parameter.
inline std::optional<std::pair<double, double>> dense_box_hits(const Ray& r, const Aabb& box,
                                                               double t0, double t1, int n) {
  std::optional<std::pair<double, double>> out;
  for (int i = 0; i <= n; ++i) {
    const double t = t0 + (t1 - t0) * i / n;
    const Vec3 p = r.origin + t * r.direction;
    bool inside = true;
    for (int k = 0; k < 3; ++k) inside = inside && p[k] >= box.min[k] && p[k] <= box.max[k];
    if (!inside) continue;
    if (!out) out = std::make_pair(t, t);
    out->second = t;
  }
  return out;
}

inline double naive_psnr(const ImageBuffer& a, const ImageBuffer& b) {
  double se = 0.0;
  for (std::size_t i = 0; i < a.rgb.size(); ++i) se += (a.rgb[i] - b.rgb[i]) * (a.rgb[i] - b.rgb[i]);
  const double mse = se / double(a.rgb.size());
  return mse == 0.0 ? INFINITY : -10.0 * std::log10(mse);
}

/// SSIM with a direct 2-D Gaussian window evaluated per position.
inline double naive_ssim(const ImageBuffer& a, const ImageBuffer& b) {
  auto luma = [](const ImageBuffer& im, int x, int y) {
    const Vec3 c = im.pixel(x, y);
    return 0.2126 * c.x() + 0.7152 * c.y() + 0.0722 * c.z();
  };
  const int r = 5;
  const double sigma = 1.5, c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  double wsum = 0.0;
  double win[11][11];
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      win[dy + r][dx + r] = std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
      wsum += win[dy + r][dx + r];
    }
  }
  double total = 0.0;
  int count = 0;
  for (int y = r; y + r < a.height; ++y) {
    for (int x = r; x + r < a.width; ++x) {
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          const double w = win[dy + r][dx + r] / wsum;
          const double va = luma(a, x + dx, y + dy), vb = luma(b, x + dx, y + dy);
          ma += w * va;
          mb += w * vb;
          saa += w * va * va;
          sbb += w * vb * vb;
          sab += w * va * vb;
        }
      }
      const double va = saa - ma * ma, vb = sbb - mb * mb, cov = sab - ma * mb;
      total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++count;
    }
  }
  return total / count;
}

/// Views observing at least one in-box point, counted from observation lists
/// (not from tracks).
inline std::map<ViewId, int> recount_from_observations(const Reconstruction& recon, const Aabb& box,
                                                       int& total) {
  std::map<ViewId, int> counts;
  total = 0;
  auto inside = [&](const Vec3& p) {
    for (int k = 0; k < 3; ++k) {
      if (p[k] < box.min[k] || p[k] > box.max[k]) return false;
    }
    return true;
  };
  for (const auto& [pid, p] : recon.points) total += inside(p.position) ? 1 : 0;
  for (const auto& [vid, v] : recon.views) {
    std::vector<PointId> seen;
    for (const auto& o : v.observations) {
      if (o.point3d_id < 0) continue;
      if (!inside(recon.points.at(o.point3d_id).position)) continue;
      if (std::find(seen.begin(), seen.end(), o.point3d_id) == seen.end()) seen.push_back(o.point3d_id);
    }
    if (!seen.empty()) counts[vid] = static_cast<int>(seen.size());
  }
  return counts;
}

/// Depth-filter decision from dense marching: rejected when the scene's dense
/// depth lies in front of the box by more than `epsilon`, accepted when the
/// ROI field's dense depth falls inside the box interval.
inline bool dense_drf_accepts(const RadianceField& scene, const Aabb& scene_box,
                              const RadianceField& roi, const Aabb& roi_box, const Ray& ray,
                              double epsilon, int n) {
  const auto hit = ray_aabb_intersect(ray, roi_box);
  if (!hit) return false;
  if (const auto range = ray_aabb_intersect(ray, scene_box)) {
    const auto sd = dense_march(scene, ray, range->t_enter, range->t_exit, n).depth;
    if (sd && *sd < hit->t_enter - epsilon) return false;
  }
  const auto rd = dense_march(roi, ray, hit->t_enter, hit->t_exit, n).depth;
  return rd && hit->contains(*rd);
}

}  // namespace roi::oracle
