// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include "roi/error.hpp"
#include "roi/fields.hpp"

namespace roi {

namespace {

bool in_unit_cube(const Vec3& c) {
  return (c.array() >= 0.0).all() && (c.array() <= 1.0).all();
}

Vec3 texture_color(const Material& m, const Vec3& p) {
  const auto& tex = m.texture;
  switch (tex.kind) {
    case Texture::Kind::None:
      return m.color;
    case Texture::Kind::Checker: {
      const long long parity = static_cast<long long>(std::floor(tex.frequency * p.x())) +
                               static_cast<long long>(std::floor(tex.frequency * p.y())) +
                               static_cast<long long>(std::floor(tex.frequency * p.z()));
      return (parity & 1LL) ? tex.alt_color : m.color;
    }
    case Texture::Kind::Stripes: {
      const double s = 0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * tex.frequency * p[tex.axis]);
      return (1.0 - s) * m.color + s * tex.alt_color;
    }
  }
  return m.color;
}

}  // namespace

AnalyticField::AnalyticField(std::string id, std::vector<Primitive> primitives,
                             std::optional<Aabb> bounds)
    : RadianceField(std::move(id)), primitives_(std::move(primitives)), bounds_(bounds) {
  for (const auto& prim : primitives_) {
    const auto& m = prim.material;
    if (!(m.density >= 0.0) || !std::isfinite(m.density)) {
      throw Error(ErrorCode::InvalidArgument, "primitive density must be finite and >= 0");
    }
    if (!in_unit_cube(m.color) || !in_unit_cube(m.texture.alt_color)) {
      throw Error(ErrorCode::InvalidArgument, "primitive colours must lie in [0,1]^3");
    }
    if (m.texture.kind != Texture::Kind::None && !(m.texture.frequency > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "texture frequency must be > 0");
    }
    if (m.texture.axis < 0 || m.texture.axis > 2) {
      throw Error(ErrorCode::InvalidArgument, "texture axis must be 0, 1 or 2");
    }
    if (!(m.view_tint >= 0.0 && m.view_tint <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "view_tint must lie in [0,1]");
    }
  }
  if (bounds_ && !bounds_->valid()) throw Error(ErrorCode::InvalidArgument, "invalid bounds");
}

FieldSample AnalyticField::query(const Vec3& position, const Vec3& direction) const {
  if (bounds_ && !point_in_aabb(position, *bounds_)) return {};
  const Primitive* best = nullptr;
  for (const auto& prim : primitives_) {
    if (!shape_contains(prim.shape, position)) continue;
    if (best == nullptr || prim.material.density > best->material.density) best = &prim;
  }
  if (best == nullptr) return {};
  FieldSample s;
  s.sigma = best->material.density;
  s.rgb = texture_color(best->material, position);
  if (best->material.view_tint > 0.0) {
    const double k = best->material.view_tint;
    const double cosine = std::abs(direction.normalized().dot(shape_normal(best->shape, position)));
    s.rgb *= (1.0 - k) + k * cosine;
  }
  return s;
}

}  // namespace roi
