// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "roi/error.hpp"
#include "roi/fields.hpp"

namespace roi {

namespace {

void check_resolution(const GridResolution& res) {
  if (res.nx < 2 || res.ny < 2 || res.nz < 2) {
    throw Error(ErrorCode::ResolutionTooSmall, "grid needs at least 2 vertices per axis, got " +
                                                   std::to_string(res.nx) + "x" +
                                                   std::to_string(res.ny) + "x" +
                                                   std::to_string(res.nz));
  }
}

// Cell index and fractional offset along one axis. Coordinates within 1e-9
// cells of a vertex snap onto it so node queries reproduce stored values.
inline void axis_coord(double p, double lo, double hi, std::uint32_t n, std::size_t& cell,
                       double& frac) {
  const double cells = static_cast<double>(n - 1);
  double u = hi > lo ? (p - lo) / (hi - lo) * cells : 0.0;
  const double nearest = std::nearbyint(u);
  if (std::abs(u - nearest) <= 1e-9) u = nearest;
  u = std::clamp(u, 0.0, cells);
  double base = std::floor(u);
  if (base >= cells) base = cells - 1.0;
  cell = static_cast<std::size_t>(base);
  frac = u - base;
}

}  // namespace

std::optional<TrilinearStencil> trilinear_stencil(const Aabb& domain, const GridResolution& res,
                                                  const Vec3& p) {
  if (!point_in_aabb(p, domain)) return std::nullopt;
  std::size_t ci, cj, ck;
  double fx, fy, fz;
  axis_coord(p.x(), domain.min.x(), domain.max.x(), res.nx, ci, fx);
  axis_coord(p.y(), domain.min.y(), domain.max.y(), res.ny, cj, fy);
  axis_coord(p.z(), domain.min.z(), domain.max.z(), res.nz, ck, fz);
  TrilinearStencil st;
  const std::size_t sx = 1, sy = res.nx, sz = std::size_t(res.nx) * res.ny;
  const std::size_t base = ck * sz + cj * sy + ci * sx;
  for (int c = 0; c < 8; ++c) {
    const int dx = c & 1, dy = (c >> 1) & 1, dz = (c >> 2) & 1;
    st.index[c] = base + dx * sx + dy * sy + dz * sz;
    st.weight[c] = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy) * (dz ? fz : 1.0 - fz);
  }
  return st;
}

GridField::GridField(std::string id, const Aabb& domain, const GridResolution& res)
    : RadianceField(std::move(id)), domain_(domain), res_(res) {
  check_resolution(res);
  if (!domain.valid()) throw Error(ErrorCode::InvalidArgument, "invalid grid domain");
  density_.assign(res.vertex_count(), 0.0f);
  rgb_.assign(3 * res.vertex_count(), 0.0f);
}

GridField::GridField(std::string id, const Aabb& domain, const GridResolution& res,
                     std::vector<float> density, std::vector<float> rgb)
    : RadianceField(std::move(id)),
      domain_(domain),
      res_(res),
      density_(std::move(density)),
      rgb_(std::move(rgb)) {
  check_resolution(res);
  if (!domain.valid()) throw Error(ErrorCode::InvalidArgument, "invalid grid domain");
  if (density_.size() != res.vertex_count() || rgb_.size() != 3 * res.vertex_count()) {
    throw Error(ErrorCode::InvalidArgument, "grid value arrays do not match resolution");
  }
  for (float s : density_) {
    if (!(s >= 0.0f) || !std::isfinite(s)) {
      throw Error(ErrorCode::InvalidArgument, "grid density must be finite and >= 0");
    }
  }
  for (float c : rgb_) {
    if (!(c >= 0.0f && c <= 1.0f)) throw Error(ErrorCode::InvalidArgument, "grid rgb outside [0,1]");
  }
}

FieldSample GridField::query(const Vec3& position, const Vec3&) const {
  const auto st = trilinear_stencil(domain_, res_, position);
  if (!st) return {};
  FieldSample s;
  for (int c = 0; c < 8; ++c) {
    const double w = st->weight[c];
    const std::size_t i = st->index[c];
    s.sigma += w * density_[i];
    s.rgb.x() += w * rgb_[3 * i];
    s.rgb.y() += w * rgb_[3 * i + 1];
    s.rgb.z() += w * rgb_[3 * i + 2];
  }
  return s;
}

Vec3 GridField::vertex_position(std::uint32_t i, std::uint32_t j, std::uint32_t k) const {
  const Vec3 ext = domain_.max - domain_.min;
  return domain_.min + Vec3(ext.x() * (double(i) / (res_.nx - 1)),
                            ext.y() * (double(j) / (res_.ny - 1)),
                            ext.z() * (double(k) / (res_.nz - 1)));
}

void GridField::set_vertex(std::size_t index, double sigma, const Vec3& rgb) {
  density_[index] = static_cast<float>(std::max(0.0, sigma));
  for (int c = 0; c < 3; ++c) rgb_[3 * index + c] = static_cast<float>(std::clamp(rgb[c], 0.0, 1.0));
}

GridField bake_grid(const RadianceField& oracle, const Aabb& domain, const GridResolution& res,
                    std::string id) {
  GridField grid(std::move(id), domain, res);
  const Vec3 canonical = Vec3::UnitZ();
  for (std::uint32_t k = 0; k < res.nz; ++k) {
    for (std::uint32_t j = 0; j < res.ny; ++j) {
      for (std::uint32_t i = 0; i < res.nx; ++i) {
        const auto s = oracle.query(grid.vertex_position(i, j, k), canonical);
        grid.set_vertex(grid.vertex_index(i, j, k), s.sigma, s.rgb);
      }
    }
  }
  return grid;
}

void pad_empty_colors(GridField& grid, int passes) {
  const auto res = grid.resolution();
  const auto& density = grid.density();
  std::vector<bool> filled(density.size());
  for (std::size_t i = 0; i < density.size(); ++i) filled[i] = density[i] > 0.0f;
  for (int pass = 0; pass < passes; ++pass) {
    std::vector<std::pair<std::size_t, Vec3>> updates;
    for (std::uint32_t k = 0; k < res.nz; ++k) {
      for (std::uint32_t j = 0; j < res.ny; ++j) {
        for (std::uint32_t i = 0; i < res.nx; ++i) {
          const std::size_t idx = grid.vertex_index(i, j, k);
          if (filled[idx]) continue;
          Vec3 sum = Vec3::Zero();
          int n = 0;
          for (int dz = -1; dz <= 1; ++dz) {
            for (int dy = -1; dy <= 1; ++dy) {
              for (int dx = -1; dx <= 1; ++dx) {
                const long x = long(i) + dx, y = long(j) + dy, z = long(k) + dz;
                if (x < 0 || y < 0 || z < 0 || x >= long(res.nx) || y >= long(res.ny) ||
                    z >= long(res.nz)) {
                  continue;
                }
                const std::size_t nb = grid.vertex_index(x, y, z);
                if (!filled[nb]) continue;
                sum += Vec3(grid.rgb()[3 * nb], grid.rgb()[3 * nb + 1], grid.rgb()[3 * nb + 2]);
                ++n;
              }
            }
          }
          if (n > 0) updates.emplace_back(idx, sum / n);
        }
      }
    }
    if (updates.empty()) break;
    for (const auto& [idx, c] : updates) {
      grid.set_vertex(idx, density[idx], c);
      filled[idx] = true;
    }
  }
}

std::uint32_t estimate_n_max(const Aabb& box, std::span<const PosedCamera> cameras,
                             std::uint32_t cap) {
  const Vec3 center = aabb_center(box);
  const PosedCamera* nearest = nullptr;
  double best = kInf;
  for (const auto& cam : cameras) {
    const Vec3 c = cam.pose.center();
    if (point_in_aabb(c, box)) continue;
    const double d = (c - center).norm();
    if (d < best) {
      best = d;
      nearest = &cam;
    }
  }
  if (nearest == nullptr) {
    throw Error(ErrorCode::NoUsableView, "every camera centre lies inside the box");
  }
  const double focal = std::min(nearest->intrinsics.fx, nearest->intrinsics.fy);
  const double extent = (box.max - box.min).maxCoeff();
  // extent / (dist / focal), written to avoid rounding the footprint first.
  const double n = std::ceil(extent * focal / best - 1e-9);
  const double clamped = std::clamp(n, 2.0, static_cast<double>(std::max<std::uint32_t>(cap, 2)));
  return static_cast<std::uint32_t>(clamped);
}

}  // namespace roi
