// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <atomic>
#include <random>

#include "oracles.hpp"
#include "roi/composition.hpp"
#include "roi/error.hpp"
#include "roi/fixtures.hpp"
#include "roi/harness.hpp"
#include "roi/metrics.hpp"
#include "roi/rng.hpp"

using namespace roi;

namespace {

// Forwards to another field and counts every query.
class CountingField final : public RadianceField {
 public:
  explicit CountingField(std::shared_ptr<const RadianceField> inner)
      : RadianceField(inner->field_id()), inner_(std::move(inner)) {}
  FieldSample query(const Vec3& p, const Vec3& d) const override {
    ++count_;
    return inner_->query(p, d);
  }
  std::optional<Aabb> domain() const override { return inner_->domain(); }
  std::uint64_t count() const { return count_.load(); }

 private:
  std::shared_ptr<const RadianceField> inner_;
  mutable std::atomic<std::uint64_t> count_{0};
};

SamplerConfig small_sampler(int n = 32) {
  SamplerConfig s;
  s.n_coarse = n;
  s.n_fine = n;
  return s;
}

PosedCamera view(const Fixture& fx, const Vec3& position, int max_dim) {
  auto cam = make_camera(position, Vec3(0, 0, 0.5), fx.rig.intrinsics);
  cam.intrinsics = scale_intrinsics(cam.intrinsics, max_dim);
  return cam;
}

RoiRuntime runtime(const RoiSpec& spec, std::shared_ptr<const RadianceField> field,
                   const SamplerConfig& s, double d_max = kInf) {
  RoiRuntime r;
  r.spec = spec;
  r.field = std::move(field);
  r.sampler = s;
  r.d_max = d_max;
  return r;
}

ShadedSamples random_samples(std::mt19937_64& rng, double t0, double t1, int n,
                             std::uint16_t source) {
  ShadedSamples s;
  s.t_near = t0;
  s.t_far = t1;
  for (int k = 0; k < n; ++k) {
    ShadedSample x;
    x.t = t0 + (k + uniform01(rng)) * (t1 - t0) / n;
    x.sigma = 10.0 * uniform01(rng);
    x.rgb = Vec3(uniform01(rng), uniform01(rng), uniform01(rng));
    x.source = source;
    s.samples.push_back(x);
  }
  recompute_deltas(s);
  return s;
}

}  // namespace

TEST_SUITE("composition") {

TEST_CASE("replacing samples by identical ones leaves the ray unchanged") {
  std::mt19937_64 rng(1);
  for (int n = 0; n < 200; ++n) {
    const auto scene = random_samples(rng, 1.0, 6.0, 64, 0);
    RoiDecision d;
    d.interval = {0.5, 7.0};
    d.cache = scene;
    d.verdict = Verdict::Accepted;
    const std::vector<RoiDecision> resolved{d};
    const auto composed = compose_ray(scene, resolved, 128);
    CHECK(composed.samples.size() == 128u);
    CHECK(composed.visible == 64u);
    const auto a = quadrature(scene, Vec3(0.2, 0.2, 0.2));
    const auto b = quadrature(composed.samples, Vec3(0.2, 0.2, 0.2));
    CHECK((a.color - b.color).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("composed rays have a fixed length and padding is inert") {
  std::mt19937_64 rng(2);
  for (int n = 0; n < 300; ++n) {
    const auto scene = random_samples(rng, 0.0, 10.0, 48, 0);
    const double a0 = 10.0 * uniform01(rng), a1 = a0 + 3.0 * uniform01(rng);
    const double b0 = 10.0 * uniform01(rng), b1 = b0 + 3.0 * uniform01(rng);
    std::vector<RoiDecision> accepted(2);
    accepted[0].roi_index = 0;
    accepted[0].interval = {a0, a1};
    accepted[0].depth = a0 + 0.1;
    accepted[0].cache = random_samples(rng, a0, a1, 40, 1);
    accepted[1].roi_index = 1;
    accepted[1].interval = {b0, b1};
    accepted[1].depth = b0 + 0.1;
    accepted[1].cache = random_samples(rng, b0, b1, 24, 2);
    std::vector<RoiRuntime> rois(2);
    rois[0].spec.name = "a";
    rois[1].spec.name = "b";
    const auto resolved = resolve_overlaps(accepted, rois);
    const auto composed = compose_ray(scene, resolved, 48 + 40 + 24);
    REQUIRE(composed.samples.size() == 112u);

    ShadedSamples visible;
    visible.t_near = composed.samples.t_near;
    visible.t_far = composed.samples.t_far;
    bool seen_visible = false;
    for (const auto& s : composed.samples.samples) {
      if (s.visible) {
        seen_visible = true;
        visible.samples.push_back(s);
      } else {
        CHECK_FALSE(seen_visible);  // padding comes first
        CHECK(s.t == 0.0);
      }
    }
    CHECK(visible.size() == composed.visible);
    for (std::size_t k = 1; k < visible.size(); ++k) {
      CHECK(visible.samples[k].t >= visible.samples[k - 1].t);
    }
    const auto qa = quadrature(composed.samples, Vec3(0.5, 0.1, 0.9));
    const auto qb = quadrature(visible, Vec3(0.5, 0.1, 0.9));
    CHECK((qa.color - qb.color).cwiseAbs().maxCoeff() <= 1e-9);

    // Every visible sample sits in the region of its source.
    for (const auto& s : visible.samples) {
      const bool in_a = resolved[0].interval.contains(s.t);
      const bool in_b = resolved[1].interval.contains(s.t);
      if (s.source == 0) CHECK_FALSE((in_a || in_b));
    }
  }
}

TEST_CASE("overlapping ROIs resolve by depth then name") {
  std::vector<RoiRuntime> rois(3);
  rois[0].spec.name = "zeta";
  rois[1].spec.name = "alpha";
  rois[2].spec.name = "mid";
  std::vector<RoiDecision> d(3);
  d[0] = {0, Verdict::Accepted, {1.0, 3.0}, 1.5};
  d[1] = {1, Verdict::Accepted, {2.0, 4.0}, 2.5};
  d[2] = {2, Verdict::Accepted, {2.5, 5.0}, 1.5};
  const auto r = resolve_overlaps(d, rois);
  REQUIRE(r.size() == 3);
  // Depth 1.5 tie: "mid" before "zeta"; "alpha" is farther.
  CHECK(r[0].roi_index == 2);
  CHECK(r[1].roi_index == 0);
  CHECK(r[2].roi_index == 1);
  CHECK(r[0].pieces == std::vector<Interval>{{2.5, 5.0}});
  CHECK(r[1].pieces == std::vector<Interval>{{1.0, 2.5}});
  CHECK(r[2].pieces.empty());
}

TEST_CASE("unsupported composition mode") {
  const auto fx = make_fixture("two-spheres");
  const auto scene = bake_scene_grid(fx, 8);
  std::vector<RoiRuntime> rois;
  for (std::size_t i = 0; i < 2; ++i) rois.push_back(runtime(fx.rois[i], scene, small_sampler(4)));
  try {
    render_image_composed(*scene, rois, view(fx, Vec3(3, 0, 1), 8), small_sampler(4),
                          composition_for(RenderMode::AblationC));
    FAIL("multi-ROI replacement without filtering accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedMode);
  }
  rois.resize(1);
  CHECK_NOTHROW(render_image_composed(*scene, rois, view(fx, Vec3(3, 0, 1), 8), small_sampler(4),
                                      composition_for(RenderMode::AblationC)));
}

TEST_CASE("images: identity, no ROI, culling, determinism") {
  const auto fx = make_fixture("checker-table");
  const auto scene = bake_scene_grid(fx, 24);
  pad_empty_colors(*scene, 2);
  const auto cam = view(fx, Vec3(2.2, -1.8, 1.6), 48);
  const auto sc = small_sampler();
  const auto plain = render_image(*scene, cam, sc);

  SUBCASE("no ROI equals the plain render") {
    const auto out = render_image_composed(*scene, {}, cam, sc, {});
    CHECK(out.image == plain);
    CHECK(out.stats.samples_per_ray == 64u);
  }

  SUBCASE("ROI identical to the scene") {
    RoiSpec whole{"whole", fx.scene_bounds};
    const std::vector<RoiRuntime> rois{runtime(whole, scene, sc)};
    for (auto mode : {RenderMode::OursSingle, RenderMode::AblationC}) {
      const auto out = render_image_composed(*scene, rois, cam, sc, composition_for(mode));
      CHECK(out.stats.rois[0].accepted > 0);
      double worst = 0.0;
      for (std::size_t i = 0; i < plain.rgb.size(); ++i) {
        worst = std::max(worst, std::abs(out.image.rgb[i] - plain.rgb[i]));
      }
      CHECK(worst <= 1e-12);
    }
  }

  SUBCASE("every ROI culled by distance") {
    const auto roi = bake_roi_grid(fx, 0, 32);
    const std::vector<RoiRuntime> rois{runtime(fx.rois[0], roi, sc, 0.01)};
    const auto out = render_image_composed(*scene, rois, cam, sc, {});
    CHECK(out.image == plain);
    CHECK(out.stats.rois[0].culled_distance == out.stats.rois[0].rays_intersecting);
    CHECK(out.stats.rois[0].depth_queries == 0);
  }

  SUBCASE("worker count and repeat runs") {
    const auto roi = bake_roi_grid(fx, 0, 32);
    const std::vector<RoiRuntime> rois{runtime(fx.rois[0], roi, sc)};
    auto cc = composition_for(RenderMode::OursMultiple);
    cc.collect_heatmaps = true;
    const auto a = render_image_composed(*scene, rois, cam, sc, cc, 1);
    const auto b = render_image_composed(*scene, rois, cam, sc, cc, 3);
    CHECK(a.image == b.image);
    CHECK(a.stats == b.stats);
    CHECK(stats_from_json(stats_to_json(a.stats, true)) == a.stats);
    auto no_heat = a.stats;
    for (auto& r : no_heat.rois) r.heatmap.clear();
    CHECK(stats_from_json(stats_to_json(a.stats)) == no_heat);
    for (double h : a.stats.rois[0].heatmap) CHECK((h == 0.0 || h == 0.5 || h == 1.0));
  }
}

TEST_CASE("ROI queries happen only while filtering") {
  const auto fx = make_fixture("two-spheres");
  const auto scene = bake_scene_grid(fx, 16);
  const auto cam = view(fx, Vec3(0.5, -3.5, 1.5), 40);
  const auto sc = small_sampler(16);
  std::vector<std::shared_ptr<CountingField>> counters;
  std::vector<RoiRuntime> rois;
  for (std::size_t i = 0; i < fx.rois.size(); ++i) {
    counters.push_back(std::make_shared<CountingField>(bake_roi_grid(fx, i, 24)));
    rois.push_back(runtime(fx.rois[i], counters.back(), sc));
  }
  const auto out = render_image_composed(*scene, rois, cam, sc, {});
  std::uint64_t accepted = 0;
  for (std::size_t i = 0; i < rois.size(); ++i) {
    const auto& st = out.stats.rois[i];
    CHECK(counters[i]->count() == st.depth_queries);
    CHECK(st.compose_queries == 0);
    CHECK(st.depth_queries ==
          (st.rays_intersecting - st.culled_distance - st.occluded) * 32u);
    CHECK(st.accepted + st.rejected_depth + st.occluded + st.culled_distance ==
          st.rays_intersecting);
    accepted += st.accepted;
  }
  CHECK(accepted > 0);

  // Without replacement the ROI is queried again at scene positions.
  for (auto& c : counters) c = std::make_shared<CountingField>(c);
  for (std::size_t i = 0; i < rois.size(); ++i) rois[i].field = counters[i];
  const auto b = render_image_composed(*scene, rois, cam, sc, composition_for(RenderMode::AblationB));
  for (std::size_t i = 0; i < rois.size(); ++i) {
    const auto& st = b.stats.rois[i];
    CHECK(counters[i]->count() == st.depth_queries + st.compose_queries);
    if (st.accepted > 0) CHECK(st.compose_queries > 0);
  }
}

TEST_CASE("probe rays of the occluder scene are rejected") {
  const auto fx = make_fixture("occluder");
  const auto scene = bake_scene_grid(fx, 32);
  const auto roi = bake_roi_grid(fx, 0, 128);
  const SamplerConfig sc;
  const auto rt = runtime(fx.rois[0], roi, sc);
  const std::vector<RoiRuntime> rois{rt};
  const double eps = 1e-3 * aabb_diagonal(fx.scene_bounds);
  const Vec3 center = fx.probe_cameras[0].pose.center();
  std::map<std::string, Verdict> verdicts;
  for (const auto& probe : fx.probe_rays) {
    const CompositionConfig cc;
    const auto cand = roi_candidates(probe.ray, center, rois, cc);
    REQUIRE(cand.size() == 1);
    std::mt19937_64 rng(0);
    QueryCounter qc;
    const auto ss = march_field(*scene, probe.ray, sc, rng, qc);
    const auto sd = depth_at_weight(quadrature(ss, Vec3::Zero()), ss);
    verdicts[probe.name] = depth_filter(probe.ray, rt, cand[0], sd, eps, cc, rng, qc).verdict;
    CHECK_FALSE(oracle::dense_drf_accepts(*scene, fx.scene_bounds, *roi, fx.rois[0].aabb,
                                          probe.ray, eps, 4096));
  }
  CHECK(verdicts.at("A") == Verdict::RejectedDepth);
  CHECK(verdicts.at("D") == Verdict::RejectedOccluded);

  // With depth filtering off the same rays are accepted.
  CompositionConfig off;
  off.enable_drf = false;
  std::mt19937_64 rng(0);
  QueryCounter qc;
  const auto cand = roi_candidates(fx.probe_rays[0].ray, center, rois, off);
  CHECK(depth_filter(fx.probe_rays[0].ray, rt, cand[0], 0.0, eps, off, rng, qc).verdict ==
        Verdict::Accepted);
}

TEST_CASE("pixel-level baseline keeps scene pixels outside the boxes") {
  const auto fx = make_fixture("checker-table");
  const auto scene = bake_scene_grid(fx, 16);
  const auto roi = bake_roi_grid(fx, 0, 32);
  const auto cam = view(fx, Vec3(2.2, -1.8, 1.6), 32);
  const auto sc = small_sampler(16);
  const std::vector<RoiRuntime> rois{runtime(fx.rois[0], roi, sc)};
  const auto scene_img = render_image(*scene, cam, sc);
  const std::vector<ImageBuffer> roi_imgs{render_roi_image(rois[0], cam, sc, fx.scene_bounds)};
  const auto out = pixel_level_compose(scene_img, roi_imgs, rois, cam, {},
                                       aabb_diagonal(fx.scene_bounds));
  const auto mask = aabb_mask(cam, fx.rois[0].aabb);
  int replaced = 0;
  for (int y = 0; y < cam.intrinsics.height; ++y) {
    for (int x = 0; x < cam.intrinsics.width; ++x) {
      const bool changed = out.pixel(x, y) != scene_img.pixel(x, y);
      if (!mask[std::size_t(y) * cam.intrinsics.width + x]) CHECK_FALSE(changed);
      if (changed) {
        ++replaced;
        CHECK(out.pixel(x, y) == roi_imgs[0].pixel(x, y));
      }
    }
  }
  CHECK(replaced > 0);
  CHECK(composed_sample_count(sc, rois) == 64u);
}

}  // TEST_SUITE
