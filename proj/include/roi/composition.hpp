// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "roi/camera.hpp"
#include "roi/fields.hpp"
#include "roi/grouping.hpp"
#include "roi/rendering.hpp"

namespace roi {

struct RoiRuntime {
  RoiSpec spec;
  std::shared_ptr<const RadianceField> field;
  double d_max = kInf;
  SamplerConfig sampler;  // n_coarse / n_fine used when marching the ROI field
};

struct CompositionConfig {
  bool enable_rsr = true;
  bool enable_drf = true;
  bool enable_d_max = true;
  bool scene_occlusion_precheck = true;
  double depth_threshold = 0.5;
  bool collect_heatmaps = false;

  void validate() const;
};

enum class Verdict { Accepted, RejectedDepth, RejectedDistance, RejectedOccluded, NoIntersection };
const char* to_string(Verdict v);

struct RoiCandidate {
  std::size_t roi_index = 0;
  Interval interval;
};

struct RoiDecision {
  std::size_t roi_index = 0;
  Verdict verdict = Verdict::NoIntersection;
  Interval interval;
  std::optional<double> depth;
  ShadedSamples cache;           // ROI samples from the depth pass
  std::vector<Interval> pieces;  // filled by resolve_overlaps
};

/// ROIs whose box the ray hits and (when enabled) whose centre is within
/// d_max of the camera; ordered by t_enter, then index.
std::vector<RoiCandidate> roi_candidates(const Ray& ray, const Vec3& camera_center,
                                         std::span<const RoiRuntime> rois,
                                         const CompositionConfig& config);

/// Depth-based filtering of one candidate. `scene_depth` is the scene
/// field's depth on the same ray (used by the occlusion pre-check), `epsilon`
/// the pre-check tolerance. With DRF disabled the ROI is marched and accepted.
RoiDecision depth_filter(const Ray& ray, const RoiRuntime& roi, const RoiCandidate& candidate,
                         std::optional<double> scene_depth, double epsilon,
                         const CompositionConfig& config, std::mt19937_64& rng,
                         QueryCounter& counter);

/// Nearest depth keeps overlapping parts; ties go to the smaller name.
/// Decisions without a depth rank by t_enter. Returns decisions in priority order.
std::vector<RoiDecision> resolve_overlaps(std::vector<RoiDecision> accepted,
                                          std::span<const RoiRuntime> rois);

struct ComposedRay {
  ShadedSamples samples;  // fixed length, invisible samples first at t = 0
  std::size_t visible = 0;
};

/// Total composed length: n_scene + sum of every ROI's samples_per_ray.
std::size_t composed_sample_count(const SamplerConfig& scene_sampler,
                                  std::span<const RoiRuntime> rois);

/// Replaces scene samples inside accepted intervals by the cached ROI samples.
/// Never queries a field. `resolved` must come from resolve_overlaps.
ComposedRay compose_ray(const ShadedSamples& scene, std::span<const RoiDecision> resolved,
                        std::size_t total_count);

/// Variant without sample replacement: the ROI field is queried at the scene
/// sample positions inside the accepted intervals.
ComposedRay compose_ray_at_scene_positions(const Ray& ray, const ShadedSamples& scene,
                                           std::span<const RoiDecision> resolved,
                                           std::span<const RoiRuntime> rois,
                                           std::size_t total_count,
                                           std::vector<QueryCounter>& roi_counters);

struct RoiStats {
  std::string name;
  std::uint64_t rays_intersecting = 0;
  std::uint64_t culled_distance = 0;
  std::uint64_t occluded = 0;
  std::uint64_t rejected_depth = 0;
  std::uint64_t accepted = 0;
  std::uint64_t depth_queries = 0;    // ROI field queries while filtering
  std::uint64_t compose_queries = 0;  // ROI field queries while composing
  std::vector<double> heatmap;        // 1 accepted, 0.5 rejected, 0 not hit

  bool operator==(const RoiStats& other) const = default;
};

struct CompositionStats {
  int width = 0;
  int height = 0;
  std::uint64_t scene_queries = 0;
  std::size_t samples_per_ray = 0;
  std::vector<RoiStats> rois;

  bool operator==(const CompositionStats& other) const = default;
};

std::string stats_to_json(const CompositionStats& stats, bool include_heatmaps = false);
CompositionStats stats_from_json(std::string_view bytes);

struct ComposedImage {
  ImageBuffer image;
  CompositionStats stats;
};

/// Ray-level composition of the scene field with every ROI.
ComposedImage render_image_composed(const RadianceField& scene,
                                    std::span<const RoiRuntime> rois,
                                    const PosedCamera& camera, const SamplerConfig& sampler,
                                    const CompositionConfig& config, int workers = 1);

/// Full-frame render of a ROI field, sampled over `range` (typically the
/// scene domain) the way a stand-alone model would be rendered.
ImageBuffer render_roi_image(const RoiRuntime& roi, const PosedCamera& camera,
                             const SamplerConfig& sampler, const std::optional<Aabb>& range,
                             int workers = 1);

/// Pixel-level baseline: a pixel takes the ROI image's value when that
/// image's depth falls inside the ROI box along the pixel ray (nearest wins).
ImageBuffer pixel_level_compose(const ImageBuffer& scene_image,
                                std::span<const ImageBuffer> roi_images,
                                std::span<const RoiRuntime> rois, const PosedCamera& camera,
                                const CompositionConfig& config, double scene_diagonal);

}  // namespace roi
