// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#include "roi/rendering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roi/error.hpp"
#include "roi/rng.hpp"

namespace roi {

std::vector<double> compute_deltas(std::span<const double> ts, double t_far) {
  std::vector<double> d(ts.size());
  for (std::size_t k = 0; k < ts.size(); ++k) {
    d[k] = (k + 1 < ts.size() ? ts[k + 1] : t_far) - ts[k];
  }
  return d;
}

void recompute_deltas(ShadedSamples& shaded) {
  ShadedSample* prev = nullptr;
  for (auto& s : shaded.samples) {
    if (!s.visible) {
      s.delta = 0.0;
      continue;
    }
    if (prev) prev->delta = s.t - prev->t;
    prev = &s;
  }
  if (prev) prev->delta = std::max(0.0, shaded.t_far - prev->t);
}

void SamplerConfig::validate() const {
  if (n_coarse < 1 || n_fine < 0) {
    throw Error(ErrorCode::InvalidArgument, "sampler needs n_coarse >= 1 and n_fine >= 0");
  }
  if (!(near >= 0.0) || !(far > near) || !std::isfinite(far)) {
    throw Error(ErrorCode::InvalidArgument, "sampler needs 0 <= near < far < inf");
  }
}

RaySamples stratified_samples(const Ray& ray, int n, bool jitter, std::mt19937_64& rng) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "stratified sampling needs n >= 1");
  if (!std::isfinite(ray.t_far)) {
    throw Error(ErrorCode::InvalidArgument, "stratified sampling needs a finite ray range");
  }
  RaySamples out;
  out.t_near = ray.t_near;
  out.t_far = ray.t_far;
  out.ts.resize(n);
  const double width = (ray.t_far - ray.t_near) / n;
  for (int k = 0; k < n; ++k) {
    const double u = jitter ? uniform01(rng) : 0.5;
    out.ts[k] = ray.t_near + (k + u) * width;
  }
  out.deltas = compute_deltas(out.ts, out.t_far);
  return out;
}

std::vector<double> sample_pdf(double t_near, double t_far, std::span<const double> weights,
                               int n_fine, bool jitter, std::mt19937_64& rng) {
  std::vector<double> out;
  if (n_fine <= 0) return out;
  const std::size_t bins = weights.size();
  if (bins == 0) throw Error(ErrorCode::InvalidArgument, "pdf sampling needs at least one bin");
  double total = 0.0;
  for (double w : weights) total += std::max(0.0, w);
  std::vector<double> cdf(bins + 1, 0.0);
  for (std::size_t b = 0; b < bins; ++b) {
    const double w = total > 1e-12 ? std::max(0.0, weights[b]) / total : 1.0 / bins;
    cdf[b + 1] = cdf[b] + w;
  }
  cdf[bins] = 1.0;
  const double width = (t_far - t_near) / bins;
  out.resize(n_fine);
  for (int j = 0; j < n_fine; ++j) {
    const double u = (j + (jitter ? uniform01(rng) : 0.5)) / n_fine;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t b = static_cast<std::size_t>(std::distance(cdf.begin(), it));
    b = std::clamp<std::size_t>(b, 1, bins) - 1;
    const double mass = cdf[b + 1] - cdf[b];
    const double frac = mass > 0.0 ? std::clamp((u - cdf[b]) / mass, 0.0, 1.0) : 0.5;
    out[j] = t_near + (b + frac) * width;
  }
  std::sort(out.begin(), out.end());
  return out;
}

RaySamples importance_resample(const Ray& ray, const ShadedSamples& coarse, int n_fine,
                               bool jitter, std::mt19937_64& rng) {
  const auto q = quadrature(coarse, Vec3::Zero());
  std::vector<double> coarse_ts;
  coarse_ts.reserve(coarse.size());
  for (const auto& s : coarse.samples) coarse_ts.push_back(s.t);
  const auto fine = sample_pdf(coarse.t_near, coarse.t_far, q.weights, n_fine, jitter, rng);
  RaySamples out;
  out.t_near = ray.t_near;
  out.t_far = ray.t_far;
  out.ts.resize(coarse_ts.size() + fine.size());
  std::merge(coarse_ts.begin(), coarse_ts.end(), fine.begin(), fine.end(), out.ts.begin());
  out.deltas = compute_deltas(out.ts, out.t_far);
  return out;
}

QuadratureResult quadrature(const ShadedSamples& shaded, const Vec3& background) {
  QuadratureResult r;
  r.weights.assign(shaded.size(), 0.0);
  double optical_depth = 0.0;
  for (std::size_t k = 0; k < shaded.size(); ++k) {
    const auto& s = shaded.samples[k];
    if (!s.visible) continue;
    if (std::isnan(s.sigma) || s.sigma < 0.0) {
      throw Error(ErrorCode::NumericalDomainError,
                  "density " + std::to_string(s.sigma) + " at t=" + std::to_string(s.t));
    }
    const double x = s.sigma * s.delta;
    const double w = std::exp(-optical_depth) * -std::expm1(-x);
    r.weights[k] = w;
    r.opacity += w;
    r.color += w * s.rgb;
    optical_depth += x;
  }
  r.transmittance = std::exp(-optical_depth);
  r.color += r.transmittance * background;
  return r;
}

std::optional<double> depth_at_weight(const QuadratureResult& result, const ShadedSamples& shaded,
                                      double threshold) {
  double cum = 0.0;
  const ShadedSample* prev = nullptr;
  for (std::size_t k = 0; k < shaded.size(); ++k) {
    const auto& s = shaded.samples[k];
    if (!s.visible) continue;
    const double before = cum;
    cum += result.weights[k];
    if (cum >= threshold) {
      if (prev == nullptr || cum <= before) return s.t;
      return prev->t + (threshold - before) / (cum - before) * (s.t - prev->t);
    }
    prev = &s;
  }
  return std::nullopt;
}

void shade_samples(const RadianceField& field, const Ray& ray, ShadedSamples& shaded,
                   QueryCounter& counter) {
  for (auto& s : shaded.samples) {
    if (!s.visible) continue;
    const auto f = field.query(ray.at(s.t), ray.direction);
    s.sigma = f.sigma;
    s.rgb = f.rgb;
    ++counter.queries;
  }
}

std::optional<Ray> sampling_range(const RadianceField& field, const Ray& ray,
                                  const std::optional<Aabb>& bounds) {
  const auto box = bounds ? bounds : field.domain();
  if (!box) {
    if (!std::isfinite(ray.t_far)) {
      throw Error(ErrorCode::InvalidArgument, "unbounded field needs a finite ray range");
    }
    return ray;
  }
  auto clipped = clip_ray(ray, *box);
  if (clipped && !(clipped->t_far > clipped->t_near)) return std::nullopt;
  return clipped;
}

namespace {

ShadedSamples to_shaded(const RaySamples& rs, std::uint16_t source) {
  ShadedSamples out;
  out.t_near = rs.t_near;
  out.t_far = rs.t_far;
  out.samples.resize(rs.count());
  for (std::size_t k = 0; k < rs.count(); ++k) {
    out.samples[k].t = rs.ts[k];
    out.samples[k].delta = rs.deltas[k];
    out.samples[k].source = source;
  }
  return out;
}

}  // namespace

ShadedSamples march_field(const RadianceField& field, const Ray& ray, const SamplerConfig& sampler,
                          std::mt19937_64& rng, QueryCounter& counter, std::uint16_t source,
                          const std::optional<Aabb>& bounds) {
  const auto range = sampling_range(field, ray, bounds);
  if (!range) {
    ShadedSamples empty;
    empty.t_near = empty.t_far = ray.t_near;
    empty.samples.resize(sampler.samples_per_ray());
    for (auto& s : empty.samples) {
      s.source = source;
      s.visible = false;
    }
    return empty;
  }
  auto coarse = to_shaded(stratified_samples(*range, sampler.n_coarse, sampler.jitter, rng), source);
  shade_samples(field, *range, coarse, counter);
  if (sampler.n_fine == 0) return coarse;

  const auto q = quadrature(coarse, Vec3::Zero());
  const auto fine_ts =
      sample_pdf(coarse.t_near, coarse.t_far, q.weights, sampler.n_fine, sampler.jitter, rng);
  ShadedSamples fine;
  fine.t_near = coarse.t_near;
  fine.t_far = coarse.t_far;
  fine.samples.resize(fine_ts.size());
  for (std::size_t j = 0; j < fine_ts.size(); ++j) {
    fine.samples[j].t = fine_ts[j];
    fine.samples[j].source = source;
  }
  shade_samples(field, *range, fine, counter);

  ShadedSamples merged;
  merged.t_near = coarse.t_near;
  merged.t_far = coarse.t_far;
  merged.samples.resize(coarse.size() + fine.size());
  std::merge(coarse.samples.begin(), coarse.samples.end(), fine.samples.begin(),
             fine.samples.end(), merged.samples.begin(),
             [](const ShadedSample& a, const ShadedSample& b) { return a.t < b.t; });
  recompute_deltas(merged);
  return merged;
}

RayRender render_ray(const RadianceField& field, const Ray& ray, const SamplerConfig& sampler,
                     std::mt19937_64& rng, QueryCounter& counter,
                     const std::optional<Aabb>& bounds) {
  const auto shaded = march_field(field, ray, sampler, rng, counter, 0, bounds);
  const auto q = quadrature(shaded, sampler.background);
  return {q.color, depth_at_weight(q, shaded), q.opacity};
}

ImageBuffer::ImageBuffer(int w, int h)
    : width(w),
      height(h),
      rgb(3 * std::size_t(w) * h, 0.0),
      depth(std::size_t(w) * h, std::numeric_limits<double>::quiet_NaN()),
      opacity(std::size_t(w) * h, 0.0) {
  if (w < 1 || h < 1) throw Error(ErrorCode::InvalidArgument, "image dimensions must be positive");
}

Vec3 ImageBuffer::pixel(int x, int y) const {
  const std::size_t i = 3 * (std::size_t(y) * width + x);
  return {rgb[i], rgb[i + 1], rgb[i + 2]};
}

void ImageBuffer::set_pixel(int x, int y, const Vec3& c) {
  const std::size_t i = 3 * (std::size_t(y) * width + x);
  rgb[i] = c.x();
  rgb[i + 1] = c.y();
  rgb[i + 2] = c.z();
}

std::optional<double> ImageBuffer::depth_at(int x, int y) const {
  const double d = depth[std::size_t(y) * width + x];
  if (std::isnan(d)) return std::nullopt;
  return d;
}

bool ImageBuffer::operator==(const ImageBuffer& other) const {
  if (width != other.width || height != other.height) return false;
  auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
  return rgb == other.rgb && opacity == other.opacity &&
         std::equal(depth.begin(), depth.end(), other.depth.begin(), same);
}

ImageBuffer render_image(const RadianceField& field, const PosedCamera& camera,
                         const SamplerConfig& sampler, const RenderOptions& options) {
  sampler.validate();
  const int w = camera.intrinsics.width, h = camera.intrinsics.height;
  ImageBuffer img(w, h);
  std::vector<std::uint64_t> row_queries(h, 0);
  parallel_rows(h, options.workers, [&](int y) {
    QueryCounter counter;
    for (int x = 0; x < w; ++x) {
      const std::size_t pix = std::size_t(y) * w + x;
      auto rng = ray_rng(sampler.seed, pix);
      const Ray ray = camera_ray(camera, x, y, sampler.near, sampler.far);
      const auto r = render_ray(field, ray, sampler, rng, counter, options.sampling_bounds);
      img.set_pixel(x, y, r.color);
      img.opacity[pix] = r.opacity;
      if (r.depth) img.depth[pix] = *r.depth;
    }
    row_queries[y] = counter.queries;
  });
  if (options.counter) {
    for (auto q : row_queries) options.counter->queries += q;
  }
  return img;
}

}  // namespace roi
