// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <limits>
#include <optional>
#include <variant>

namespace roi {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed axis-aligned box. Points on faces, edges and corners are inside.
struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  bool valid() const;
  bool operator==(const Aabb& other) const { return min == other.min && max == other.max; }
};

Aabb make_aabb(const Vec3& min, const Vec3& max);  // throws InvalidArgument unless min <= max
Vec3 aabb_center(const Aabb& box);
double aabb_diagonal(const Aabb& box);
bool point_in_aabb(const Vec3& p, const Aabb& box);
Aabb expand(const Aabb& box, double margin);

struct Interval {
  double t_enter = 0.0;
  double t_exit = 0.0;

  double length() const { return t_exit - t_enter; }
  bool contains(double t) const { return t >= t_enter && t <= t_exit; }
  bool operator==(const Interval& other) const = default;
};

/// r(t) = origin + t * direction for t in [t_near, t_far]; direction is unit length.
struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();
  double t_near = 0.0;
  double t_far = kInf;

  Vec3 at(double t) const { return origin + t * direction; }
};

Ray make_ray(const Vec3& origin, const Vec3& direction, double t_near = 0.0, double t_far = kInf);

/// Slab test clipped to [ray.t_near, ray.t_far]. Returns nullopt on a miss.
/// Zero direction components are handled without dividing by zero.
std::optional<Interval> ray_aabb_intersect(const Ray& ray, const Aabb& box);

/// Restricts a ray's parameter range to the part inside `box`.
std::optional<Ray> clip_ray(const Ray& ray, const Aabb& box);

struct Sphere {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
};

/// Region between two planes orthogonal to `axis`, unbounded along the others.
struct Slab {
  int axis = 2;
  double lo = 0.0;
  double hi = 0.0;
};

using Shape = std::variant<Sphere, Aabb, Slab>;

bool shape_contains(const Shape& shape, const Vec3& p);
std::optional<Interval> ray_shape_intersect(const Ray& ray, const Shape& shape);
/// Outward unit normal of the boundary nearest to `p`.
Vec3 shape_normal(const Shape& shape, const Vec3& p);
/// Bounding box of the shape; slabs are clipped to `clip`.
Aabb shape_bounds(const Shape& shape, const Aabb& clip);

}  // namespace roi
