// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "roi/geometry.hpp"
#include "roi/sfm.hpp"

namespace roi {

struct RoiSpec {
  std::string name;
  Aabb aabb;
  double threshold_fraction = 0.10;
  double scene_integration_fraction = 0.50;
  double test_fraction = 0.15;
  std::optional<double> d_max_override;

  void validate() const;
  bool operator==(const RoiSpec& other) const = default;
};

/// Strict matches "count > fraction * total"; AtLeast uses ">=".
enum class ThresholdRule { Strict, AtLeast };

struct VisibilityCounts {
  std::map<ViewId, int> counts;  // only views that see at least one in-box point
  int total_points = 0;
};

VisibilityCounts count_visible_points(const Reconstruction& recon, const Aabb& aabb);

/// Sorted view ids passing the threshold. Throws EmptyRoi when the box holds no point.
std::vector<ViewId> select_roi_cameras(const Reconstruction& recon, const RoiSpec& spec,
                                       ThresholdRule rule = ThresholdRule::Strict);
std::vector<ViewId> select_from_counts(const VisibilityCounts& counts, double threshold_fraction,
                                       ThresholdRule rule = ThresholdRule::Strict);

struct TestSplit {
  std::vector<ViewId> train;  // sorted
  std::vector<ViewId> test;   // sorted
};

/// Azimuth-ordered stride selection about `up`. Throws SetTooSmall for fewer than 2 views.
TestSplit split_test_set(std::span<const ViewId> views, const Vec3& roi_center,
                         const std::map<ViewId, Vec3>& camera_centers, double test_fraction,
                         std::uint64_t seed, const Vec3& up = Vec3::UnitZ());

/// Largest distance from the centre; `override_value` wins when set.
double compute_d_max(const Vec3& roi_center, std::span<const Vec3> camera_centers,
                     std::optional<double> override_value = std::nullopt);

/// Views outside every ROI set plus a seeded ceil(fraction * |set|) subset of each set.
std::vector<ViewId> build_scene_set(const Reconstruction& recon,
                                    std::span<const std::vector<ViewId>> roi_sets,
                                    std::span<const double> integration_fractions,
                                    std::uint64_t seed);

struct RoiGroup {
  RoiSpec spec;
  VisibilityCounts visibility;
  std::vector<ViewId> selected;
  std::vector<ViewId> train;
  std::vector<ViewId> test;
  double d_max = 0.0;

  bool operator==(const RoiGroup& other) const;
};

struct GroupingOptions {
  std::uint64_t seed = 0;
  ThresholdRule rule = ThresholdRule::Strict;
  Vec3 up = Vec3::UnitZ();
};

struct GroupingResult {
  std::vector<RoiGroup> rois;
  std::vector<ViewId> scene_view_ids;
  std::uint64_t seed = 0;
  ThresholdRule rule = ThresholdRule::Strict;

  bool operator==(const GroupingResult& other) const = default;
};

/// Full grouping: selection, test split, d_max from the training views and
/// the scene set (built from the ROI training sets, so test views stay held out).
GroupingResult group_cameras(const Reconstruction& recon, std::span<const RoiSpec> specs,
                             const GroupingOptions& options = {});

inline constexpr std::string_view kGroupsSchema = "roi-groups v1";

std::string write_groups_json(const GroupingResult& result);
GroupingResult parse_groups_json(std::string_view bytes);

/// A "roi-groups v1" document carrying only specs (results optional).
std::string write_roi_specs_json(std::span<const RoiSpec> specs);
/// Accepts any "roi-groups v1" document and returns its specs. Rejects
/// invalid specs and duplicate names with InvalidArgument.
std::vector<RoiSpec> parse_roi_specs_json(std::string_view bytes);

}  // namespace roi
