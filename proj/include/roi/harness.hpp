// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "roi/composition.hpp"
#include "roi/grouping.hpp"
#include "roi/rendering.hpp"

namespace roi {

enum class RenderMode {
  RoiOnly,
  SceneOnly,
  OursSingle,
  OursMultiple,
  PixelBaseline,
  AblationA,  // no replacement, no depth filter
  AblationB,  // depth filter only
  AblationC,  // replacement without depth filter (single ROI only)
  AblationD,  // full pipeline
};

const char* to_string(RenderMode mode);
RenderMode mode_from_string(std::string_view name);
std::vector<RenderMode> all_modes();

/// Composition toggles of the ablation modes and the two "ours" modes.
CompositionConfig composition_for(RenderMode mode);

struct ExperimentConfig {
  std::string fixture = "checker-table";
  std::optional<std::filesystem::path> reconstruction;  // defaults to the fixture's synthetic one
  std::vector<RoiSpec> rois;                            // defaults to the fixture's ROIs
  std::uint32_t scene_resolution = 32;
  std::uint32_t roi_resolution = 128;
  bool auto_n_max = false;
  std::uint32_t n_max_cap = 4096;
  int color_padding = 2;  // pad_empty_colors passes applied after baking
  SamplerConfig sampler;
  SamplerConfig reference_sampler{256, 256};
  std::vector<RenderMode> modes{RenderMode::SceneOnly, RenderMode::OursSingle};
  std::uint64_t seed = 0;
  int image_size = 200;      // long side of rendered test views
  int max_test_views = 0;    // 0 = every test view
  int timing_repeats = 3;
  int workers = 1;
  bool ablation_multiple = false;
  bool heatmaps = false;
  std::filesystem::path output_dir;  // empty = keep results in memory only

  void validate() const;
};

/// Parses an experiment JSON document; unknown keys are rejected.
ExperimentConfig parse_experiment_config(std::string_view bytes);

struct CellResult {
  RenderMode mode = RenderMode::SceneOnly;
  std::string roi;
  ViewId view = 0;
  bool ok = true;
  std::string error;
  double psnr = 0.0;
  double ssim = 0.0;
  double masked_psnr = 0.0;
  double seconds = 0.0;
  std::optional<CompositionStats> stats;

  bool operator==(const CellResult& other) const;
};

struct ModeSummary {
  RenderMode mode = RenderMode::SceneOnly;
  int cells = 0;
  int errors = 0;
  double psnr = 0.0;
  double ssim = 0.0;
  double masked_psnr = 0.0;
  double seconds = 0.0;
};

struct RenderReport {
  std::string fixture;
  std::uint64_t seed = 0;
  std::vector<RenderMode> modes;
  std::vector<CellResult> cells;

  std::vector<ModeSummary> summary() const;
  bool operator==(const RenderReport& other) const;
};

inline constexpr std::string_view kReportSchema = "roi-report v1";

RenderReport run_experiment(const ExperimentConfig& config);

std::string report_to_json(const RenderReport& report, bool include_timing = true);
RenderReport report_from_json(std::string_view bytes);
/// RFC 4180 table, one row per mode.
std::string report_to_csv(const RenderReport& report);

}  // namespace roi
