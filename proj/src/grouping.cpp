// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#include "roi/grouping.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "json_util.hpp"
#include "roi/error.hpp"
#include "roi/rng.hpp"

namespace roi {

using nlohmann::json;

void RoiSpec::validate() const {
  if (name.empty()) throw Error(ErrorCode::InvalidArgument, "ROI name must not be empty");
  if (!aabb.valid()) throw Error(ErrorCode::InvalidArgument, "ROI '" + name + "' has an invalid box");
  if (!(threshold_fraction > 0.0 && threshold_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "threshold_fraction must lie in (0, 1]");
  }
  if (!(scene_integration_fraction >= 0.0 && scene_integration_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "scene_integration_fraction must lie in [0, 1]");
  }
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "test_fraction must lie in [0, 1)");
  }
  if (d_max_override && !(*d_max_override > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "d_max_override must be > 0");
  }
}

VisibilityCounts count_visible_points(const Reconstruction& recon, const Aabb& aabb) {
  VisibilityCounts out;
  std::vector<ViewId> seen;
  for (const auto& [id, point] : recon.points) {
    if (!point_in_aabb(point.position, aabb)) continue;
    ++out.total_points;
    seen.clear();
    for (const auto& el : point.track) seen.push_back(el.view_id);
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (ViewId v : seen) ++out.counts[v];
  }
  return out;
}

std::vector<ViewId> select_from_counts(const VisibilityCounts& counts, double threshold_fraction,
                                       ThresholdRule rule) {
  if (counts.total_points == 0) throw Error(ErrorCode::EmptyRoi, "box contains no sparse point");
  const double bound = threshold_fraction * counts.total_points;
  std::vector<ViewId> out;
  for (const auto& [view, count] : counts.counts) {
    const bool pass = rule == ThresholdRule::Strict ? count > bound : count >= bound;
    if (pass) out.push_back(view);
  }
  return out;
}

std::vector<ViewId> select_roi_cameras(const Reconstruction& recon, const RoiSpec& spec,
                                       ThresholdRule rule) {
  spec.validate();
  return select_from_counts(count_visible_points(recon, spec.aabb), spec.threshold_fraction, rule);
}

TestSplit split_test_set(std::span<const ViewId> views, const Vec3& roi_center,
                         const std::map<ViewId, Vec3>& camera_centers, double test_fraction,
                         std::uint64_t seed, const Vec3& up) {
  if (views.size() < 2) {
    throw Error(ErrorCode::SetTooSmall, "test split needs at least 2 views, got " +
                                            std::to_string(views.size()));
  }
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "test_fraction must lie in [0, 1)");
  }
  TestSplit split;
  if (test_fraction == 0.0) {
    split.train.assign(views.begin(), views.end());
    std::sort(split.train.begin(), split.train.end());
    return split;
  }
  // Azimuth in the plane orthogonal to `up`.
  const Vec3 axis = up.normalized();
  Vec3 e1 = axis.unitOrthogonal();
  const Vec3 e2 = axis.cross(e1);
  std::vector<std::pair<double, ViewId>> order;
  order.reserve(views.size());
  for (ViewId v : views) {
    auto it = camera_centers.find(v);
    if (it == camera_centers.end()) {
      throw Error(ErrorCode::InvalidArgument, "no camera centre for view " + std::to_string(v));
    }
    const Vec3 d = it->second - roi_center;
    order.emplace_back(std::atan2(d.dot(e2), d.dot(e1)), v);
  }
  std::sort(order.begin(), order.end());

  const std::size_t n = order.size();
  const auto stride = static_cast<std::size_t>(std::floor(1.0 / test_fraction + 1e-9));
  const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(test_fraction * n - 1e-9)));
  std::mt19937_64 rng(derive_seed(seed, 0x7e57));
  const std::size_t offset = rng() % std::min(stride, n);
  std::vector<bool> is_test(n, false);
  for (std::size_t i = 0; i < k && offset + i * stride < n; ++i) is_test[offset + i * stride] = true;
  for (std::size_t i = 0; i < n; ++i) (is_test[i] ? split.test : split.train).push_back(order[i].second);
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

double compute_d_max(const Vec3& roi_center, std::span<const Vec3> camera_centers,
                     std::optional<double> override_value) {
  if (camera_centers.empty()) {
    throw Error(ErrorCode::EmptyTrainingSet, "d_max needs at least one training camera");
  }
  if (override_value) return *override_value;
  double best = 0.0;
  for (const auto& c : camera_centers) best = std::max(best, (c - roi_center).norm());
  return best;
}

std::vector<ViewId> build_scene_set(const Reconstruction& recon,
                                    std::span<const std::vector<ViewId>> roi_sets,
                                    std::span<const double> integration_fractions,
                                    std::uint64_t seed) {
  if (roi_sets.size() != integration_fractions.size()) {
    throw Error(ErrorCode::InvalidArgument, "one integration fraction per ROI set required");
  }
  std::set<ViewId> owned, scene;
  for (const auto& s : roi_sets) owned.insert(s.begin(), s.end());
  for (const auto& [id, view] : recon.views) {
    if (!owned.count(id)) scene.insert(id);
  }
  for (std::size_t r = 0; r < roi_sets.size(); ++r) {
    std::vector<ViewId> pool(roi_sets[r].begin(), roi_sets[r].end());
    std::sort(pool.begin(), pool.end());
    const double f = integration_fractions[r];
    const auto take = std::min(
        pool.size(), static_cast<std::size_t>(std::ceil(f * pool.size() - 1e-9)));
    std::mt19937_64 rng(derive_seed(seed, r, 0x5ce7e));
    std::shuffle(pool.begin(), pool.end(), rng);
    scene.insert(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
  }
  return {scene.begin(), scene.end()};
}

bool RoiGroup::operator==(const RoiGroup& other) const {
  return spec == other.spec && visibility.counts == other.visibility.counts &&
         visibility.total_points == other.visibility.total_points &&
         selected == other.selected && train == other.train && test == other.test &&
         d_max == other.d_max;
}

GroupingResult group_cameras(const Reconstruction& recon, std::span<const RoiSpec> specs,
                             const GroupingOptions& options) {
  std::set<std::string> names;
  for (const auto& s : specs) {
    s.validate();
    if (!names.insert(s.name).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate ROI name '" + s.name + "'");
    }
  }
  std::map<ViewId, Vec3> centers;
  for (const auto& [id, view] : recon.views) centers[id] = view.center();

  GroupingResult result;
  result.seed = options.seed;
  result.rule = options.rule;
  std::vector<std::vector<ViewId>> train_sets;
  std::vector<double> fractions;
  for (std::size_t r = 0; r < specs.size(); ++r) {
    RoiGroup g;
    g.spec = specs[r];
    g.visibility = count_visible_points(recon, g.spec.aabb);
    g.selected = select_from_counts(g.visibility, g.spec.threshold_fraction, options.rule);
    const Vec3 center = aabb_center(g.spec.aabb);
    auto split = split_test_set(g.selected, center, centers, g.spec.test_fraction,
                                derive_seed(options.seed, r, 0x9a11), options.up);
    g.train = std::move(split.train);
    g.test = std::move(split.test);
    std::vector<Vec3> train_centers;
    for (ViewId v : g.train) train_centers.push_back(centers.at(v));
    g.d_max = compute_d_max(center, train_centers, g.spec.d_max_override);
    train_sets.push_back(g.train);
    fractions.push_back(g.spec.scene_integration_fraction);
    result.rois.push_back(std::move(g));
  }
  result.scene_view_ids = build_scene_set(recon, train_sets, fractions, options.seed);
  return result;
}

namespace {

json spec_to_json(const RoiSpec& s) {
  json j = {{"name", s.name},
            {"aabb", jsonutil::aabb(s.aabb)},
            {"threshold_fraction", s.threshold_fraction},
            {"scene_integration_fraction", s.scene_integration_fraction},
            {"test_fraction", s.test_fraction}};
  j["d_max_override"] = s.d_max_override ? json(*s.d_max_override) : json(nullptr);
  return j;
}

RoiSpec spec_from_json(const json& j) {
  RoiSpec s;
  s.name = j.at("name").get<std::string>();
  s.aabb = jsonutil::aabb(j.at("aabb"));
  s.threshold_fraction = j.value("threshold_fraction", s.threshold_fraction);
  s.scene_integration_fraction = j.value("scene_integration_fraction", s.scene_integration_fraction);
  s.test_fraction = j.value("test_fraction", s.test_fraction);
  if (j.contains("d_max_override") && !j["d_max_override"].is_null()) {
    s.d_max_override = j["d_max_override"].get<double>();
  }
  s.validate();
  return s;
}

const char* rule_name(ThresholdRule r) { return r == ThresholdRule::Strict ? "strict" : "at-least"; }

ThresholdRule rule_from(const std::string& s) {
  if (s == "strict") return ThresholdRule::Strict;
  if (s == "at-least") return ThresholdRule::AtLeast;
  throw Error(ErrorCode::MalformedJson, "unknown threshold rule '" + s + "'");
}

}  // namespace

std::string write_groups_json(const GroupingResult& result) {
  json doc;
  doc["schema"] = kGroupsSchema;
  doc["seed"] = result.seed;
  doc["threshold_rule"] = rule_name(result.rule);
  json rois = json::array();
  for (const auto& g : result.rois) {
    json counts = json::array();
    for (const auto& [v, c] : g.visibility.counts) counts.push_back(json::array({v, c}));
    rois.push_back({{"spec", spec_to_json(g.spec)},
                    {"nb_total_points", g.visibility.total_points},
                    {"counts", std::move(counts)},
                    {"selected", g.selected},
                    {"train", g.train},
                    {"test", g.test},
                    {"d_max", g.d_max}});
  }
  doc["rois"] = std::move(rois);
  doc["scene_view_ids"] = result.scene_view_ids;
  return doc.dump(2) + "\n";
}

GroupingResult parse_groups_json(std::string_view bytes) {
  const json doc = jsonutil::parse(bytes);
  jsonutil::expect_schema(doc, kGroupsSchema);
  GroupingResult r;
  try {
    r.seed = doc.at("seed").get<std::uint64_t>();
    r.rule = rule_from(doc.at("threshold_rule").get<std::string>());
    for (const auto& jg : doc.at("rois")) {
      RoiGroup g;
      g.spec = spec_from_json(jg.at("spec"));
      g.visibility.total_points = jg.at("nb_total_points").get<int>();
      for (const auto& pair : jg.at("counts")) {
        g.visibility.counts[pair.at(0).get<ViewId>()] = pair.at(1).get<int>();
      }
      g.selected = jg.at("selected").get<std::vector<ViewId>>();
      g.train = jg.at("train").get<std::vector<ViewId>>();
      g.test = jg.at("test").get<std::vector<ViewId>>();
      g.d_max = jg.at("d_max").get<double>();
      r.rois.push_back(std::move(g));
    }
    r.scene_view_ids = doc.at("scene_view_ids").get<std::vector<ViewId>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
  return r;
}

std::string write_roi_specs_json(std::span<const RoiSpec> specs) {
  json doc;
  doc["schema"] = kGroupsSchema;
  json rois = json::array();
  for (const auto& s : specs) rois.push_back({{"spec", spec_to_json(s)}});
  doc["rois"] = std::move(rois);
  return doc.dump(2) + "\n";
}

std::vector<RoiSpec> parse_roi_specs_json(std::string_view bytes) {
  const json doc = jsonutil::parse(bytes);
  jsonutil::expect_schema(doc, kGroupsSchema);
  std::vector<RoiSpec> specs;
  std::set<std::string> names;
  try {
    for (const auto& jg : doc.at("rois")) {
      auto s = spec_from_json(jg.contains("spec") ? jg.at("spec") : jg);
      if (!names.insert(s.name).second) {
        throw Error(ErrorCode::InvalidArgument, "duplicate ROI name '" + s.name + "'");
      }
      specs.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
  return specs;
}

}  // namespace roi
