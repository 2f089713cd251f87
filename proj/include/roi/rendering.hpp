// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "roi/camera.hpp"
#include "roi/fields.hpp"
#include "roi/geometry.hpp"

namespace roi {

struct RaySamples {
  std::vector<double> ts;      // ascending
  std::vector<double> deltas;  // t_{k+1} - t_k, last one t_far - t_last
  double t_near = 0.0;
  double t_far = 0.0;

  std::size_t count() const { return ts.size(); }
};

/// delta_k = t_{k+1} - t_k with delta_last = t_far - t_last.
std::vector<double> compute_deltas(std::span<const double> ts, double t_far);

struct ShadedSample {
  double t = 0.0;
  double delta = 0.0;
  double sigma = 0.0;
  Vec3 rgb = Vec3::Zero();
  std::uint16_t source = 0;  // 0 = scene field, i + 1 = ROI i
  bool visible = true;       // invisible samples are treated as sigma = 0
};

struct ShadedSamples {
  std::vector<ShadedSample> samples;
  double t_near = 0.0;
  double t_far = 0.0;

  std::size_t size() const { return samples.size(); }
};

/// Recomputes deltas over the visible samples (ascending in t); invisible
/// samples get delta 0.
void recompute_deltas(ShadedSamples& shaded);

struct QuadratureResult {
  Vec3 color = Vec3::Zero();
  std::vector<double> weights;  // w_k = T(t_k) * alpha(sigma_k * delta_k)
  double transmittance = 1.0;   // T after the last sample
  double opacity = 0.0;         // sum of weights
};

struct SamplerConfig {
  int n_coarse = 64;
  int n_fine = 64;
  bool jitter = false;
  std::uint64_t seed = 0;
  Vec3 background = Vec3::Zero();
  double near = 0.0;
  double far = 1000.0;

  int samples_per_ray() const { return n_coarse + n_fine; }
  void validate() const;
};

struct QueryCounter {
  std::uint64_t queries = 0;
};

/// One sample per equal sub-interval of [t_near, t_far]: midpoints, or a
/// uniform position within the stratum when jittered.
RaySamples stratified_samples(const Ray& ray, int n, bool jitter, std::mt19937_64& rng);

/// Fine positions by inverse-CDF over the piecewise-constant pdf given by
/// per-stratum weights on [t_near, t_far]; uniform when the weights vanish.
std::vector<double> sample_pdf(double t_near, double t_far, std::span<const double> weights,
                               int n_fine, bool jitter, std::mt19937_64& rng);

/// Draws n_fine positions from the coarse weights and merges them with the
/// coarse positions (sorted). `coarse` must come from stratified_samples.
RaySamples importance_resample(const Ray& ray, const ShadedSamples& coarse, int n_fine,
                               bool jitter, std::mt19937_64& rng);

/// Volume rendering sum; the result colour includes T_end * background.
/// Throws NumericalDomainError on NaN or negative density.
QuadratureResult quadrature(const ShadedSamples& shaded, const Vec3& background);

/// Position where the cumulative weight first reaches `threshold`, linearly
/// interpolated between consecutive visible samples; nullopt if never reached.
std::optional<double> depth_at_weight(const QuadratureResult& result, const ShadedSamples& shaded,
                                      double threshold = 0.5);

/// Queries `field` at the sample positions and stores sigma / rgb.
void shade_samples(const RadianceField& field, const Ray& ray, ShadedSamples& shaded,
                   QueryCounter& counter);

/// Coarse stratified pass, importance pass, merged and shaded: always returns
/// exactly sampler.samples_per_ray() samples. When the ray misses the field's
/// domain (or `bounds` when given) every sample is invisible at t = 0.
ShadedSamples march_field(const RadianceField& field, const Ray& ray, const SamplerConfig& sampler,
                          std::mt19937_64& rng, QueryCounter& counter, std::uint16_t source = 0,
                          const std::optional<Aabb>& bounds = std::nullopt);

/// Ray range used by march_field: ray clipped to bounds / field domain.
std::optional<Ray> sampling_range(const RadianceField& field, const Ray& ray,
                                  const std::optional<Aabb>& bounds);

struct ImageBuffer {
  int width = 0;
  int height = 0;
  std::vector<double> rgb;      // linear, 3 per pixel, row-major
  std::vector<double> depth;    // NaN where the ray escapes
  std::vector<double> opacity;

  ImageBuffer() = default;
  ImageBuffer(int w, int h);

  std::size_t pixel_count() const { return std::size_t(width) * height; }
  Vec3 pixel(int x, int y) const;
  void set_pixel(int x, int y, const Vec3& c);
  std::optional<double> depth_at(int x, int y) const;
  bool operator==(const ImageBuffer& other) const;
};

struct RenderOptions {
  int workers = 1;
  /// Overrides the field's domain as the sampling range.
  std::optional<Aabb> sampling_bounds;
  QueryCounter* counter = nullptr;
};

struct RayRender {
  Vec3 color = Vec3::Zero();
  std::optional<double> depth;
  double opacity = 0.0;
};

RayRender render_ray(const RadianceField& field, const Ray& ray, const SamplerConfig& sampler,
                     std::mt19937_64& rng, QueryCounter& counter,
                     const std::optional<Aabb>& bounds = std::nullopt);

/// Per pixel: camera ray, coarse + importance sampling, quadrature. The
/// per-pixel RNG is keyed by (seed, pixel) so the worker count never changes output.
ImageBuffer render_image(const RadianceField& field, const PosedCamera& camera,
                         const SamplerConfig& sampler, const RenderOptions& options = {});

/// Runs fn(row) for every row in [0, rows) on `workers` threads.
template <typename Fn>
void parallel_rows(int rows, int workers, Fn&& fn);

}  // namespace roi

#include "roi/detail/parallel.hpp"
