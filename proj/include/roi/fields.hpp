// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "roi/camera.hpp"
#include "roi/geometry.hpp"

namespace roi {

struct FieldSample {
  double sigma = 0.0;           // density per scene unit, >= 0
  Vec3 rgb = Vec3::Zero();      // in [0,1]^3
};

/// Queryable density and view-dependent colour. Implementations are immutable
/// after construction and safe for concurrent queries.
class RadianceField {
 public:
  virtual ~RadianceField() = default;

  /// Must return sigma = 0 outside domain().
  virtual FieldSample query(const Vec3& position, const Vec3& direction) const = 0;
  /// nullopt means the field is defined everywhere.
  virtual std::optional<Aabb> domain() const = 0;

  const std::string& field_id() const { return id_; }

 protected:
  explicit RadianceField(std::string id) : id_(std::move(id)) {}

 private:
  std::string id_;
};

// --- analytic oracle -------------------------------------------------------

struct Texture {
  enum class Kind { None, Checker, Stripes };
  Kind kind = Kind::None;
  double frequency = 1.0;  // cells (checker) or periods (stripes) per scene unit
  int axis = 0;            // stripes only
  Vec3 alt_color = Vec3::Zero();
};

struct Material {
  double density = 0.0;
  Vec3 color = Vec3::Constant(0.5);
  Texture texture;
  /// Strength of a |d.n| Lambertian tint; 0 disables view dependence.
  double view_tint = 0.0;
};

struct Primitive {
  Shape shape;
  Material material;
};

/// Ground-truth field built from solid primitives. Overlaps resolve to the
/// primitive with the largest density (first in list order on ties).
class AnalyticField final : public RadianceField {
 public:
  AnalyticField(std::string id, std::vector<Primitive> primitives,
                std::optional<Aabb> bounds = std::nullopt);

  FieldSample query(const Vec3& position, const Vec3& direction) const override;
  std::optional<Aabb> domain() const override { return bounds_; }

  const std::vector<Primitive>& primitives() const { return primitives_; }

 private:
  std::vector<Primitive> primitives_;
  std::optional<Aabb> bounds_;
};

// --- voxel grid ------------------------------------------------------------

/// Vertices per axis; vertex (i,j,k) sits at min + (i,j,k)/(N-1) * extent.
struct GridResolution {
  std::uint32_t nx = 2;
  std::uint32_t ny = 2;
  std::uint32_t nz = 2;

  std::size_t vertex_count() const { return std::size_t(nx) * ny * nz; }
  bool operator==(const GridResolution& other) const = default;
};

/// The eight vertices around a point and their trilinear weights.
struct TrilinearStencil {
  std::array<std::size_t, 8> index{};
  std::array<double, 8> weight{};
};

/// nullopt outside the (closed) domain. Vertex index is x-fastest.
std::optional<TrilinearStencil> trilinear_stencil(const Aabb& domain, const GridResolution& res,
                                                  const Vec3& p);

/// Trilinearly interpolated density and direction-independent colour stored at
/// grid vertices. Vertex data uses f32 storage matching the on-disk format.
class GridField final : public RadianceField {
 public:
  GridField(std::string id, const Aabb& domain, const GridResolution& res);
  GridField(std::string id, const Aabb& domain, const GridResolution& res,
            std::vector<float> density, std::vector<float> rgb);

  FieldSample query(const Vec3& position, const Vec3& direction) const override;
  std::optional<Aabb> domain() const override { return domain_; }

  const Aabb& bounds() const { return domain_; }
  const GridResolution& resolution() const { return res_; }
  const std::vector<float>& density() const { return density_; }
  const std::vector<float>& rgb() const { return rgb_; }

  std::size_t vertex_index(std::uint32_t i, std::uint32_t j, std::uint32_t k) const {
    return (std::size_t(k) * res_.ny + j) * res_.nx + i;
  }
  Vec3 vertex_position(std::uint32_t i, std::uint32_t j, std::uint32_t k) const;
  /// Clamps sigma to >= 0 and rgb to [0,1].
  void set_vertex(std::size_t index, double sigma, const Vec3& rgb);

 private:
  Aabb domain_;
  GridResolution res_;
  std::vector<float> density_;
  std::vector<float> rgb_;  // 3 floats per vertex
};

/// Samples the oracle at every vertex with the canonical direction +z.
GridField bake_grid(const RadianceField& oracle, const Aabb& domain, const GridResolution& res,
                    std::string id = "grid");

/// Gives zero-density vertices the mean colour of their non-empty 26-neighbours,
/// repeated `passes` times. Rendering is unchanged in empty space; surface
/// samples stop blending towards black.
void pad_empty_colors(GridField& grid, int passes);

/// Grid resolution at which one voxel of the box matches one pixel of the
/// nearest camera outside the box, clamped to [2, cap].
std::uint32_t estimate_n_max(const Aabb& box, std::span<const PosedCamera> cameras,
                             std::uint32_t cap = 4096);

// --- grid file ("ROIGRID1") -------------------------------------------------

void save_grid(const GridField& grid, const std::filesystem::path& path);
GridField load_grid(const std::filesystem::path& path, std::string id = {});
std::vector<std::uint8_t> encode_grid(const GridField& grid);
GridField decode_grid(std::span<const std::uint8_t> bytes, std::string id = "grid");

}  // namespace roi
