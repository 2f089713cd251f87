// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#include "roi/composition.hpp"

#include <algorithm>
#include <cmath>

#include "json_util.hpp"
#include "roi/error.hpp"
#include "roi/rng.hpp"

namespace roi {

using nlohmann::json;

void CompositionConfig::validate() const {
  if (!(depth_threshold > 0.0 && depth_threshold < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "depth_threshold must lie in (0, 1)");
  }
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Accepted: return "accepted";
    case Verdict::RejectedDepth: return "rejected-depth";
    case Verdict::RejectedDistance: return "rejected-distance";
    case Verdict::RejectedOccluded: return "rejected-occluded";
    case Verdict::NoIntersection: return "no-intersection";
  }
  return "?";
}

std::vector<RoiCandidate> roi_candidates(const Ray& ray, const Vec3& camera_center,
                                         std::span<const RoiRuntime> rois,
                                         const CompositionConfig& config) {
  std::vector<RoiCandidate> out;
  for (std::size_t i = 0; i < rois.size(); ++i) {
    const auto hit = ray_aabb_intersect(ray, rois[i].spec.aabb);
    if (!hit) continue;
    if (config.enable_d_max &&
        (camera_center - aabb_center(rois[i].spec.aabb)).norm() > rois[i].d_max) {
      continue;
    }
    out.push_back({i, *hit});
  }
  std::stable_sort(out.begin(), out.end(), [](const RoiCandidate& a, const RoiCandidate& b) {
    return a.interval.t_enter < b.interval.t_enter;
  });
  return out;
}

RoiDecision depth_filter(const Ray& ray, const RoiRuntime& roi, const RoiCandidate& candidate,
                         std::optional<double> scene_depth, double epsilon,
                         const CompositionConfig& config, std::mt19937_64& rng,
                         QueryCounter& counter) {
  RoiDecision d;
  d.roi_index = candidate.roi_index;
  d.interval = candidate.interval;
  if (config.enable_drf && config.scene_occlusion_precheck && scene_depth &&
      *scene_depth < candidate.interval.t_enter - epsilon) {
    d.verdict = Verdict::RejectedOccluded;
    return d;
  }
  d.cache = march_field(*roi.field, ray, roi.sampler, rng, counter,
                        static_cast<std::uint16_t>(candidate.roi_index + 1));
  const auto q = quadrature(d.cache, Vec3::Zero());
  d.depth = depth_at_weight(q, d.cache, config.depth_threshold);
  if (!config.enable_drf) {
    d.verdict = Verdict::Accepted;
    return d;
  }
  d.verdict = d.depth && candidate.interval.contains(*d.depth) ? Verdict::Accepted
                                                               : Verdict::RejectedDepth;
  return d;
}

namespace {

// Interval minus a set of intervals, keeping pieces of positive length.
std::vector<Interval> subtract(const Interval& base, const std::vector<Interval>& cuts) {
  std::vector<Interval> pieces{base};
  for (const auto& cut : cuts) {
    std::vector<Interval> next;
    for (const auto& p : pieces) {
      if (cut.t_exit <= p.t_enter || cut.t_enter >= p.t_exit) {
        next.push_back(p);
        continue;
      }
      if (cut.t_enter > p.t_enter) next.push_back({p.t_enter, cut.t_enter});
      if (cut.t_exit < p.t_exit) next.push_back({cut.t_exit, p.t_exit});
    }
    pieces = std::move(next);
  }
  return pieces;
}

// Index into `resolved` of the decision owning parameter t, or -1.
int owner(std::span<const RoiDecision> resolved, double t) {
  for (std::size_t i = 0; i < resolved.size(); ++i) {
    if (resolved[i].interval.contains(t)) return static_cast<int>(i);
  }
  return -1;
}

void make_invisible(ShadedSample& s) {
  s.t = 0.0;
  s.delta = 0.0;
  s.sigma = 0.0;
  s.rgb.setZero();
  s.visible = false;
}

void check_disjoint(std::span<const RoiDecision> resolved) {
  std::vector<Interval> all;
  for (const auto& d : resolved) all.insert(all.end(), d.pieces.begin(), d.pieces.end());
  std::sort(all.begin(), all.end(),
            [](const Interval& a, const Interval& b) { return a.t_enter < b.t_enter; });
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (all[i].t_enter < all[i - 1].t_exit) {
      throw Error(ErrorCode::IntervalOverlapUnresolved, "accepted ROI intervals still overlap");
    }
  }
}

ComposedRay finish(ShadedSamples merged, std::size_t total_count) {
  if (merged.size() > total_count) {
    throw Error(ErrorCode::InvalidArgument, "composed ray exceeds the fixed sample count");
  }
  ShadedSample pad;
  make_invisible(pad);
  merged.samples.resize(total_count, pad);
  for (auto& s : merged.samples) {
    if (!s.visible) make_invisible(s);
  }
  std::stable_sort(merged.samples.begin(), merged.samples.end(),
                   [](const ShadedSample& a, const ShadedSample& b) {
                     if (a.visible != b.visible) return !a.visible;
                     return a.t < b.t;
                   });
  recompute_deltas(merged);
  ComposedRay out;
  out.visible = static_cast<std::size_t>(
      std::count_if(merged.samples.begin(), merged.samples.end(),
                    [](const ShadedSample& s) { return s.visible; }));
  out.samples = std::move(merged);
  return out;
}

}  // namespace

std::vector<RoiDecision> resolve_overlaps(std::vector<RoiDecision> accepted,
                                          std::span<const RoiRuntime> rois) {
  auto key = [](const RoiDecision& d) { return d.depth.value_or(d.interval.t_enter); };
  std::sort(accepted.begin(), accepted.end(), [&](const RoiDecision& a, const RoiDecision& b) {
    const double ka = key(a), kb = key(b);
    if (ka != kb) return ka < kb;
    const auto& na = rois[a.roi_index].spec.name;
    const auto& nb = rois[b.roi_index].spec.name;
    if (na != nb) return na < nb;
    return a.roi_index < b.roi_index;
  });
  std::vector<Interval> claimed;
  for (auto& d : accepted) {
    d.pieces = subtract(d.interval, claimed);
    claimed.push_back(d.interval);
  }
  return accepted;
}

std::size_t composed_sample_count(const SamplerConfig& scene_sampler,
                                  std::span<const RoiRuntime> rois) {
  std::size_t n = static_cast<std::size_t>(scene_sampler.samples_per_ray());
  for (const auto& r : rois) n += static_cast<std::size_t>(r.sampler.samples_per_ray());
  return n;
}

ComposedRay compose_ray(const ShadedSamples& scene, std::span<const RoiDecision> resolved,
                        std::size_t total_count) {
  check_disjoint(resolved);
  ShadedSamples merged;
  merged.t_near = scene.t_near;
  merged.t_far = scene.t_far;
  std::size_t needed = scene.size();
  for (const auto& d : resolved) needed += d.cache.size();
  merged.samples.reserve(std::max(needed, total_count));
  for (auto s : scene.samples) {
    if (s.visible && owner(resolved, s.t) >= 0) s.visible = false;
    merged.samples.push_back(s);
  }
  for (std::size_t i = 0; i < resolved.size(); ++i) {
    const auto& d = resolved[i];
    for (auto s : d.cache.samples) {
      if (s.visible && owner(resolved, s.t) != static_cast<int>(i)) s.visible = false;
      if (s.visible) merged.t_far = std::max(merged.t_far, d.cache.t_far);
      merged.samples.push_back(s);
    }
  }
  return finish(std::move(merged), total_count);
}

ComposedRay compose_ray_at_scene_positions(const Ray& ray, const ShadedSamples& scene,
                                           std::span<const RoiDecision> resolved,
                                           std::span<const RoiRuntime> rois,
                                           std::size_t total_count,
                                           std::vector<QueryCounter>& roi_counters) {
  check_disjoint(resolved);
  ShadedSamples merged = scene;
  for (auto& s : merged.samples) {
    if (!s.visible) continue;
    const int o = owner(resolved, s.t);
    if (o < 0) continue;
    const std::size_t idx = resolved[o].roi_index;
    const auto f = rois[idx].field->query(ray.at(s.t), ray.direction);
    ++roi_counters[idx].queries;
    s.sigma = f.sigma;
    s.rgb = f.rgb;
    s.source = static_cast<std::uint16_t>(idx + 1);
  }
  return finish(std::move(merged), total_count);
}

namespace {

struct PixelTally {
  std::vector<RoiStats> rois;
  std::uint64_t scene_queries = 0;
};

}  // namespace

ComposedImage render_image_composed(const RadianceField& scene,
                                    std::span<const RoiRuntime> rois,
                                    const PosedCamera& camera, const SamplerConfig& sampler,
                                    const CompositionConfig& config, int workers) {
  sampler.validate();
  config.validate();
  if (config.enable_rsr && !config.enable_drf && rois.size() > 1) {
    throw Error(ErrorCode::UnsupportedMode,
                "sample replacement without depth filtering supports a single ROI only");
  }
  for (const auto& r : rois) {
    if (!r.field) throw Error(ErrorCode::InvalidArgument, "ROI '" + r.spec.name + "' has no field");
    r.sampler.validate();
  }
  const int w = camera.intrinsics.width, h = camera.intrinsics.height;
  const auto scene_box = scene.domain();
  const double epsilon = 1e-3 * (scene_box ? aabb_diagonal(*scene_box) : sampler.far);
  const std::size_t total = composed_sample_count(sampler, rois);
  const Vec3 center = camera.pose.center();

  ComposedImage out;
  out.image = ImageBuffer(w, h);
  std::vector<PixelTally> rows(h);
  std::vector<std::vector<double>> heat(rois.size());
  if (config.collect_heatmaps) {
    for (auto& hm : heat) hm.assign(std::size_t(w) * h, 0.0);
  }

  parallel_rows(h, workers, [&](int y) {
    PixelTally& tally = rows[y];
    tally.rois.resize(rois.size());
    QueryCounter scene_counter;
    std::vector<QueryCounter> depth_counters(rois.size()), compose_counters(rois.size());
    for (int x = 0; x < w; ++x) {
      const std::size_t pix = std::size_t(y) * w + x;
      auto rng = ray_rng(sampler.seed, pix);
      const Ray ray = camera_ray(camera, x, y, sampler.near, sampler.far);
      const auto scene_samples = march_field(scene, ray, sampler, rng, scene_counter, 0);

      for (std::size_t i = 0; i < rois.size(); ++i) {
        if (ray_aabb_intersect(ray, rois[i].spec.aabb)) {
          ++tally.rois[i].rays_intersecting;
          if (config.collect_heatmaps) heat[i][pix] = 0.5;
        }
      }
      const auto candidates = roi_candidates(ray, center, rois, config);
      for (std::size_t i = 0; i < rois.size(); ++i) {
        if (config.enable_d_max && ray_aabb_intersect(ray, rois[i].spec.aabb) &&
            std::none_of(candidates.begin(), candidates.end(),
                         [&](const RoiCandidate& c) { return c.roi_index == i; })) {
          ++tally.rois[i].culled_distance;
        }
      }

      std::optional<double> scene_depth;
      const auto scene_q = quadrature(scene_samples, sampler.background);
      if (!candidates.empty()) scene_depth = depth_at_weight(scene_q, scene_samples);

      std::vector<RoiDecision> accepted;
      for (const auto& c : candidates) {
        RoiDecision d;
        if (!config.enable_rsr && !config.enable_drf) {
          d.roi_index = c.roi_index;
          d.interval = c.interval;
          d.verdict = Verdict::Accepted;
        } else {
          auto roi_rng = ray_rng(sampler.seed, pix, c.roi_index + 1);
          d = depth_filter(ray, rois[c.roi_index], c, scene_depth, epsilon, config, roi_rng,
                           depth_counters[c.roi_index]);
        }
        auto& st = tally.rois[c.roi_index];
        switch (d.verdict) {
          case Verdict::Accepted: ++st.accepted; break;
          case Verdict::RejectedDepth: ++st.rejected_depth; break;
          case Verdict::RejectedOccluded: ++st.occluded; break;
          default: break;
        }
        if (d.verdict == Verdict::Accepted) {
          if (config.collect_heatmaps) heat[c.roi_index][pix] = 1.0;
          accepted.push_back(std::move(d));
        }
      }

      if (accepted.empty()) {
        // Padding is a no-op for quadrature; reuse the scene result.
        out.image.set_pixel(x, y, scene_q.color);
        out.image.opacity[pix] = scene_q.opacity;
        if (auto dpt = depth_at_weight(scene_q, scene_samples)) out.image.depth[pix] = *dpt;
        continue;
      }
      const auto resolved = resolve_overlaps(std::move(accepted), rois);
      const ComposedRay composed =
          config.enable_rsr
              ? compose_ray(scene_samples, resolved, total)
              : compose_ray_at_scene_positions(ray, scene_samples, resolved, rois, total,
                                               compose_counters);
      const auto q = quadrature(composed.samples, sampler.background);
      out.image.set_pixel(x, y, q.color);
      out.image.opacity[pix] = q.opacity;
      if (auto dpt = depth_at_weight(q, composed.samples)) out.image.depth[pix] = *dpt;
    }
    tally.scene_queries = scene_counter.queries;
    for (std::size_t i = 0; i < rois.size(); ++i) {
      tally.rois[i].depth_queries = depth_counters[i].queries;
      tally.rois[i].compose_queries = compose_counters[i].queries;
    }
  });

  auto& stats = out.stats;
  stats.width = w;
  stats.height = h;
  stats.samples_per_ray = total;
  stats.rois.resize(rois.size());
  for (std::size_t i = 0; i < rois.size(); ++i) stats.rois[i].name = rois[i].spec.name;
  for (const auto& row : rows) {
    stats.scene_queries += row.scene_queries;
    for (std::size_t i = 0; i < rois.size(); ++i) {
      auto& a = stats.rois[i];
      const auto& b = row.rois[i];
      a.rays_intersecting += b.rays_intersecting;
      a.culled_distance += b.culled_distance;
      a.occluded += b.occluded;
      a.rejected_depth += b.rejected_depth;
      a.accepted += b.accepted;
      a.depth_queries += b.depth_queries;
      a.compose_queries += b.compose_queries;
    }
  }
  if (config.collect_heatmaps) {
    for (std::size_t i = 0; i < rois.size(); ++i) stats.rois[i].heatmap = std::move(heat[i]);
  }
  return out;
}

ImageBuffer render_roi_image(const RoiRuntime& roi, const PosedCamera& camera,
                             const SamplerConfig& sampler, const std::optional<Aabb>& range,
                             int workers) {
  SamplerConfig s = sampler;
  s.n_coarse = roi.sampler.n_coarse;
  s.n_fine = roi.sampler.n_fine;
  RenderOptions opts;
  opts.workers = workers;
  opts.sampling_bounds = range;
  return render_image(*roi.field, camera, s, opts);
}

ImageBuffer pixel_level_compose(const ImageBuffer& scene_image,
                                std::span<const ImageBuffer> roi_images,
                                std::span<const RoiRuntime> rois, const PosedCamera& camera,
                                const CompositionConfig& config, double scene_diagonal) {
  if (roi_images.size() != rois.size()) {
    throw Error(ErrorCode::InvalidArgument, "one ROI image per ROI required");
  }
  const int w = camera.intrinsics.width, h = camera.intrinsics.height;
  auto same_size = [&](const ImageBuffer& img) { return img.width == w && img.height == h; };
  if (!same_size(scene_image) || !std::all_of(roi_images.begin(), roi_images.end(), same_size)) {
    throw Error(ErrorCode::ResolutionMismatch, "pixel composition needs equal resolutions");
  }
  const double epsilon = 1e-3 * scene_diagonal;
  const Vec3 center = camera.pose.center();
  ImageBuffer out = scene_image;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Ray ray = camera_ray(camera, x, y);
      const auto scene_depth = scene_image.depth_at(x, y);
      std::optional<std::size_t> best;
      double best_depth = kInf;
      for (const auto& c : roi_candidates(ray, center, rois, config)) {
        const auto d = roi_images[c.roi_index].depth_at(x, y);
        if (config.enable_drf) {
          if (config.scene_occlusion_precheck && scene_depth &&
              *scene_depth < c.interval.t_enter - epsilon) {
            continue;
          }
          if (!d || !c.interval.contains(*d)) continue;
        }
        const double key = d.value_or(c.interval.t_enter);
        if (!best || key < best_depth) {
          best = c.roi_index;
          best_depth = key;
        }
      }
      if (!best) continue;
      const auto& src = roi_images[*best];
      const std::size_t pix = std::size_t(y) * w + x;
      out.set_pixel(x, y, src.pixel(x, y));
      out.opacity[pix] = src.opacity[pix];
      out.depth[pix] = src.depth[pix];
    }
  }
  return out;
}

std::string stats_to_json(const CompositionStats& stats, bool include_heatmaps) {
  json doc = {{"width", stats.width},
              {"height", stats.height},
              {"scene_queries", stats.scene_queries},
              {"samples_per_ray", stats.samples_per_ray}};
  json rois = json::array();
  for (const auto& r : stats.rois) {
    json j = {{"name", r.name},
              {"rays_intersecting", r.rays_intersecting},
              {"culled_distance", r.culled_distance},
              {"occluded", r.occluded},
              {"rejected_depth", r.rejected_depth},
              {"accepted", r.accepted},
              {"depth_queries", r.depth_queries},
              {"compose_queries", r.compose_queries}};
    if (include_heatmaps && !r.heatmap.empty()) j["heatmap"] = r.heatmap;
    rois.push_back(std::move(j));
  }
  doc["rois"] = std::move(rois);
  return doc.dump();
}

CompositionStats stats_from_json(std::string_view bytes) {
  const json doc = jsonutil::parse(bytes);
  CompositionStats s;
  try {
    s.width = doc.at("width").get<int>();
    s.height = doc.at("height").get<int>();
    s.scene_queries = doc.at("scene_queries").get<std::uint64_t>();
    s.samples_per_ray = doc.at("samples_per_ray").get<std::size_t>();
    for (const auto& j : doc.at("rois")) {
      RoiStats r;
      r.name = j.at("name").get<std::string>();
      r.rays_intersecting = j.at("rays_intersecting").get<std::uint64_t>();
      r.culled_distance = j.at("culled_distance").get<std::uint64_t>();
      r.occluded = j.at("occluded").get<std::uint64_t>();
      r.rejected_depth = j.at("rejected_depth").get<std::uint64_t>();
      r.accepted = j.at("accepted").get<std::uint64_t>();
      r.depth_queries = j.at("depth_queries").get<std::uint64_t>();
      r.compose_queries = j.at("compose_queries").get<std::uint64_t>();
      if (j.contains("heatmap")) r.heatmap = j["heatmap"].get<std::vector<double>>();
      s.rois.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
  return s;
}

}  // namespace roi
