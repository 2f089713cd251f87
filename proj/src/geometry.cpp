// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#include "roi/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "roi/error.hpp"

namespace roi {

bool Aabb::valid() const {
  return min.allFinite() && max.allFinite() && (min.array() <= max.array()).all();
}

Aabb make_aabb(const Vec3& min, const Vec3& max) {
  Aabb box{min, max};
  if (!box.valid()) {
    throw Error(ErrorCode::InvalidArgument, "AABB requires finite min <= max componentwise");
  }
  return box;
}

Vec3 aabb_center(const Aabb& box) { return 0.5 * (box.min + box.max); }

double aabb_diagonal(const Aabb& box) { return (box.max - box.min).norm(); }

bool point_in_aabb(const Vec3& p, const Aabb& box) {
  return (p.array() >= box.min.array()).all() && (p.array() <= box.max.array()).all();
}

Aabb expand(const Aabb& box, double margin) {
  return make_aabb(box.min.array() - margin, box.max.array() + margin);
}

Ray make_ray(const Vec3& origin, const Vec3& direction, double t_near, double t_far) {
  const double n = direction.norm();
  if (!origin.allFinite() || !(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::InvalidArgument, "ray needs a finite origin and non-zero direction");
  }
  if (!(t_near >= 0.0) || !(t_near < t_far)) {
    throw Error(ErrorCode::InvalidArgument, "ray requires 0 <= t_near < t_far");
  }
  return Ray{origin, direction / n, t_near, t_far};
}

std::optional<Interval> ray_aabb_intersect(const Ray& ray, const Aabb& box) {
  double t0 = ray.t_near;
  double t1 = ray.t_far;
  for (int axis = 0; axis < 3; ++axis) {
    const double o = ray.origin[axis];
    const double d = ray.direction[axis];
    if (d == 0.0) {
      if (o < box.min[axis] || o > box.max[axis]) return std::nullopt;
      continue;
    }
    const double inv = 1.0 / d;
    double ta = (box.min[axis] - o) * inv;
    double tb = (box.max[axis] - o) * inv;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::nullopt;
  }
  return Interval{t0, t1};
}

std::optional<Ray> clip_ray(const Ray& ray, const Aabb& box) {
  auto hit = ray_aabb_intersect(ray, box);
  if (!hit || !(hit->t_enter < hit->t_exit)) return std::nullopt;
  Ray out = ray;
  out.t_near = hit->t_enter;
  out.t_far = hit->t_exit;
  return out;
}

namespace {

std::optional<Interval> clip(double a, double b, const Ray& ray) {
  const double t0 = std::max(a, ray.t_near);
  const double t1 = std::min(b, ray.t_far);
  if (t0 > t1) return std::nullopt;
  return Interval{t0, t1};
}

}  // namespace

bool shape_contains(const Shape& shape, const Vec3& p) {
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          return (p - s.center).squaredNorm() <= s.radius * s.radius;
        } else if constexpr (std::is_same_v<T, Aabb>) {
          return point_in_aabb(p, s);
        } else {
          return p[s.axis] >= s.lo && p[s.axis] <= s.hi;
        }
      },
      shape);
}

std::optional<Interval> ray_shape_intersect(const Ray& ray, const Shape& shape) {
  return std::visit(
      [&](const auto& s) -> std::optional<Interval> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          const Vec3 oc = ray.origin - s.center;
          const double b = oc.dot(ray.direction);
          const double c = oc.squaredNorm() - s.radius * s.radius;
          const double disc = b * b - c;
          if (disc < 0.0) return std::nullopt;
          const double root = std::sqrt(disc);
          return clip(-b - root, -b + root, ray);
        } else if constexpr (std::is_same_v<T, Aabb>) {
          return ray_aabb_intersect(ray, s);
        } else {
          const double o = ray.origin[s.axis];
          const double d = ray.direction[s.axis];
          if (d == 0.0) {
            if (o < s.lo || o > s.hi) return std::nullopt;
            return clip(-kInf, kInf, ray);
          }
          double ta = (s.lo - o) / d;
          double tb = (s.hi - o) / d;
          if (ta > tb) std::swap(ta, tb);
          return clip(ta, tb, ray);
        }
      },
      shape);
}

Vec3 shape_normal(const Shape& shape, const Vec3& p) {
  return std::visit(
      [&](const auto& s) -> Vec3 {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          const Vec3 v = p - s.center;
          const double n = v.norm();
          return n > 0.0 ? Vec3(v / n) : Vec3::UnitZ();
        } else if constexpr (std::is_same_v<T, Aabb>) {
          int best_axis = 0;
          double best = kInf;
          double sign = 1.0;
          for (int a = 0; a < 3; ++a) {
            const double dlo = std::abs(p[a] - s.min[a]);
            const double dhi = std::abs(s.max[a] - p[a]);
            if (dlo < best) { best = dlo; best_axis = a; sign = -1.0; }
            if (dhi < best) { best = dhi; best_axis = a; sign = 1.0; }
          }
          Vec3 n = Vec3::Zero();
          n[best_axis] = sign;
          return n;
        } else {
          Vec3 n = Vec3::Zero();
          n[s.axis] = std::abs(p[s.axis] - s.hi) <= std::abs(p[s.axis] - s.lo) ? 1.0 : -1.0;
          return n;
        }
      },
      shape);
}

Aabb shape_bounds(const Shape& shape, const Aabb& clip_box) {
  return std::visit(
      [&](const auto& s) -> Aabb {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          return Aabb{s.center.array() - s.radius, s.center.array() + s.radius};
        } else if constexpr (std::is_same_v<T, Aabb>) {
          return s;
        } else {
          Aabb box = clip_box;
          box.min[s.axis] = s.lo;
          box.max[s.axis] = s.hi;
          return box;
        }
      },
      shape);
}

}  // namespace roi
