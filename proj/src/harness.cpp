// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#include "roi/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json_util.hpp"
#include "roi/error.hpp"
#include "roi/fixtures.hpp"
#include "roi/image_io.hpp"
#include "roi/metrics.hpp"

namespace roi {

using nlohmann::json;

namespace {

constexpr std::pair<RenderMode, const char*> kModeNames[] = {
    {RenderMode::RoiOnly, "roi-only"},
    {RenderMode::SceneOnly, "scene-only"},
    {RenderMode::OursSingle, "ours-single"},
    {RenderMode::OursMultiple, "ours-multiple"},
    {RenderMode::PixelBaseline, "pixel-baseline"},
    {RenderMode::AblationA, "ablation-a"},
    {RenderMode::AblationB, "ablation-b"},
    {RenderMode::AblationC, "ablation-c"},
    {RenderMode::AblationD, "ablation-d"},
};

}  // namespace

const char* to_string(RenderMode mode) {
  for (const auto& [m, name] : kModeNames) {
    if (m == mode) return name;
  }
  return "?";
}

RenderMode mode_from_string(std::string_view name) {
  for (const auto& [m, n] : kModeNames) {
    if (name == n) return m;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown render mode '" + std::string(name) + "'");
}

std::vector<RenderMode> all_modes() {
  std::vector<RenderMode> out;
  for (const auto& [m, name] : kModeNames) out.push_back(m);
  return out;
}

CompositionConfig composition_for(RenderMode mode) {
  CompositionConfig c;
  switch (mode) {
    case RenderMode::AblationA:
      c.enable_rsr = false;
      c.enable_drf = false;
      break;
    case RenderMode::AblationB:
      c.enable_rsr = false;
      break;
    case RenderMode::AblationC:
      c.enable_drf = false;
      break;
    default:
      break;
  }
  return c;
}

void ExperimentConfig::validate() const {
  make_fixture(fixture);  // throws for unknown names
  if (modes.empty()) throw Error(ErrorCode::InvalidArgument, "experiment needs at least one mode");
  if (scene_resolution < 2 || (!auto_n_max && roi_resolution < 2)) {
    throw Error(ErrorCode::ResolutionTooSmall, "grid resolutions must be >= 2");
  }
  if (image_size < 1 || timing_repeats < 1 || workers < 1 || max_test_views < 0 ||
      color_padding < 0) {
    throw Error(ErrorCode::InvalidArgument, "invalid experiment sizes");
  }
  sampler.validate();
  reference_sampler.validate();
}

namespace {

SamplerConfig sampler_from_json(const json& j, SamplerConfig s) {
  static const std::set<std::string> keys{"n_coarse", "n_fine", "jitter", "background", "near", "far"};
  for (const auto& [k, v] : j.items()) {
    if (!keys.count(k)) throw Error(ErrorCode::InvalidArgument, "unknown sampler key '" + k + "'");
  }
  s.n_coarse = j.value("n_coarse", s.n_coarse);
  s.n_fine = j.value("n_fine", s.n_fine);
  s.jitter = j.value("jitter", s.jitter);
  if (j.contains("background")) s.background = jsonutil::vec3(j["background"]);
  s.near = j.value("near", s.near);
  s.far = j.value("far", s.far);
  return s;
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view bytes) {
  const json doc = jsonutil::parse(bytes);
  if (!doc.is_object()) throw Error(ErrorCode::MalformedJson, "experiment config must be an object");
  static const std::set<std::string> keys{
      "fixture",         "reconstruction",    "rois",           "scene_resolution",
      "roi_resolution",  "auto_n_max",        "n_max_cap",      "color_padding",
      "sampler",         "reference_sampler", "modes",          "seed",
      "image_size",      "max_test_views",    "timing_repeats", "workers",
      "ablation_multiple", "heatmaps",        "output_dir"};
  for (const auto& [k, v] : doc.items()) {
    if (!keys.count(k)) throw Error(ErrorCode::InvalidArgument, "unknown config key '" + k + "'");
  }
  ExperimentConfig c;
  try {
    c.fixture = doc.value("fixture", c.fixture);
    if (doc.contains("reconstruction") && !doc["reconstruction"].is_null()) {
      c.reconstruction = doc["reconstruction"].get<std::string>();
    }
    if (doc.contains("rois") && !doc["rois"].is_null()) {
      json wrapper = {{"schema", kGroupsSchema}, {"rois", doc["rois"]}};
      c.rois = parse_roi_specs_json(wrapper.dump());
    }
    c.scene_resolution = doc.value("scene_resolution", c.scene_resolution);
    c.roi_resolution = doc.value("roi_resolution", c.roi_resolution);
    c.auto_n_max = doc.value("auto_n_max", c.auto_n_max);
    c.n_max_cap = doc.value("n_max_cap", c.n_max_cap);
    c.color_padding = doc.value("color_padding", c.color_padding);
    if (doc.contains("sampler")) c.sampler = sampler_from_json(doc["sampler"], c.sampler);
    if (doc.contains("reference_sampler")) {
      c.reference_sampler = sampler_from_json(doc["reference_sampler"], c.reference_sampler);
    }
    if (doc.contains("modes")) {
      c.modes.clear();
      for (const auto& m : doc["modes"]) c.modes.push_back(mode_from_string(m.get<std::string>()));
    }
    c.seed = doc.value("seed", c.seed);
    c.image_size = doc.value("image_size", c.image_size);
    c.max_test_views = doc.value("max_test_views", c.max_test_views);
    c.timing_repeats = doc.value("timing_repeats", c.timing_repeats);
    c.workers = doc.value("workers", c.workers);
    c.ablation_multiple = doc.value("ablation_multiple", c.ablation_multiple);
    c.heatmaps = doc.value("heatmaps", c.heatmaps);
    if (doc.contains("output_dir")) c.output_dir = doc["output_dir"].get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
  c.validate();
  return c;
}

bool CellResult::operator==(const CellResult& o) const {
  auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
  return mode == o.mode && roi == o.roi && view == o.view && ok == o.ok && error == o.error &&
         same(psnr, o.psnr) && same(ssim, o.ssim) && same(masked_psnr, o.masked_psnr) &&
         same(seconds, o.seconds) && stats == o.stats;
}

bool RenderReport::operator==(const RenderReport& o) const {
  return fixture == o.fixture && seed == o.seed && modes == o.modes && cells == o.cells;
}

std::vector<ModeSummary> RenderReport::summary() const {
  std::vector<ModeSummary> out;
  for (RenderMode m : modes) {
    ModeSummary s;
    s.mode = m;
    for (const auto& c : cells) {
      if (c.mode != m) continue;
      if (!c.ok) {
        ++s.errors;
        continue;
      }
      ++s.cells;
      s.psnr += c.psnr;
      s.ssim += c.ssim;
      s.masked_psnr += c.masked_psnr;
      s.seconds += c.seconds;
    }
    if (s.cells > 0) {
      s.psnr /= s.cells;
      s.ssim /= s.cells;
      s.masked_psnr /= s.cells;
      s.seconds /= s.cells;
    }
    out.push_back(s);
  }
  return out;
}

namespace {

struct Scene {
  std::shared_ptr<GridField> field;
  std::vector<RoiRuntime> rois;
  Aabb bounds;
};

template <typename Fn>
double median_seconds(int repeats, Fn&& fn) {
  std::vector<double> times;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

CellResult run_cell(RenderMode mode, std::size_t roi_index, ViewId view, const Scene& scene,
                    const PosedCamera& camera, const ImageBuffer& reference,
                    const std::vector<bool>& mask, const ExperimentConfig& cfg,
                    const SamplerConfig& sampler) {
  CellResult cell;
  cell.mode = mode;
  cell.roi = scene.rois[roi_index].spec.name;
  cell.view = view;
  const std::span<const RoiRuntime> single(&scene.rois[roi_index], 1);
  const std::span<const RoiRuntime> all(scene.rois);
  try {
    ImageBuffer image;
    std::optional<CompositionStats> stats;
    auto composed = [&](std::span<const RoiRuntime> set) {
      auto cc = composition_for(mode);
      cc.collect_heatmaps = cfg.heatmaps;
      auto out = render_image_composed(*scene.field, set, camera, sampler, cc, cfg.workers);
      image = std::move(out.image);
      stats = std::move(out.stats);
    };
    auto render = [&] {
      switch (mode) {
        case RenderMode::RoiOnly:
          image = render_roi_image(scene.rois[roi_index], camera, sampler, scene.bounds, cfg.workers);
          break;
        case RenderMode::SceneOnly: {
          RenderOptions opts;
          opts.workers = cfg.workers;
          image = render_image(*scene.field, camera, sampler, opts);
          break;
        }
        case RenderMode::OursSingle:
        case RenderMode::AblationD:
          composed(single);
          break;
        case RenderMode::OursMultiple:
          composed(all);
          break;
        case RenderMode::AblationA:
        case RenderMode::AblationB:
        case RenderMode::AblationC:
          composed(cfg.ablation_multiple ? all : single);
          break;
        case RenderMode::PixelBaseline: {
          RenderOptions opts;
          opts.workers = cfg.workers;
          const auto base = render_image(*scene.field, camera, sampler, opts);
          std::vector<ImageBuffer> roi_images;
          for (const auto& r : scene.rois) {
            roi_images.push_back(render_roi_image(r, camera, sampler, scene.bounds, cfg.workers));
          }
          image = pixel_level_compose(base, roi_images, all, camera,
                                      composition_for(RenderMode::OursSingle),
                                      aabb_diagonal(scene.bounds));
          break;
        }
      }
    };
    cell.seconds = median_seconds(cfg.timing_repeats, render);
    cell.psnr = psnr(image, reference);
    cell.ssim = ssim(image, reference);
    cell.masked_psnr = masked_psnr(image, reference, mask);
    if (stats && !cfg.output_dir.empty() && cfg.heatmaps) {
      for (const auto& rs : stats->rois) {
        if (rs.heatmap.empty()) continue;
        const auto name = std::string("heat_") + to_string(mode) + "_" + cell.roi + "_v" +
                          std::to_string(view) + "_" + rs.name + ".pfm";
        write_pfm_gray(rs.heatmap, stats->width, stats->height, cfg.output_dir / name);
      }
    }
    if (stats) {
      for (auto& rs : stats->rois) rs.heatmap.clear();
    }
    cell.stats = std::move(stats);
  } catch (const Error& e) {
    cell.ok = false;
    cell.error = e.what();
  }
  return cell;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

RenderReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Fixture fixture = make_fixture(config.fixture);
  const Reconstruction recon = config.reconstruction
                                   ? parse_reconstruction_json(read_file(*config.reconstruction))
                                   : fixture_reconstruction(fixture, config.seed);
  const std::vector<RoiSpec> specs = config.rois.empty() ? fixture.rois : config.rois;
  GroupingOptions gopts;
  gopts.seed = config.seed;
  const GroupingResult grouping = group_cameras(recon, specs, gopts);

  SamplerConfig sampler = config.sampler;
  sampler.seed = config.seed;
  SamplerConfig reference_sampler = config.reference_sampler;
  reference_sampler.seed = config.seed;

  Scene scene;
  scene.bounds = fixture.scene_bounds;
  scene.field = bake_scene_grid(fixture, config.scene_resolution);
  pad_empty_colors(*scene.field, config.color_padding);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& g = grouping.rois[i];
    std::uint32_t res = config.roi_resolution;
    if (config.auto_n_max) {
      std::vector<PosedCamera> cams;
      for (ViewId v : g.train) cams.push_back(recon.camera(v));
      res = estimate_n_max(specs[i].aabb, cams, config.n_max_cap);
    }
    RoiRuntime r;
    r.spec = specs[i];
    auto grid = std::make_shared<GridField>(
        bake_grid(*fixture.oracle, specs[i].aabb, cube_resolution(res), specs[i].name));
    pad_empty_colors(*grid, config.color_padding);
    r.field = std::move(grid);
    r.d_max = g.d_max;
    r.sampler = sampler;
    scene.rois.push_back(std::move(r));
  }

  if (!config.output_dir.empty()) std::filesystem::create_directories(config.output_dir);

  RenderReport report;
  report.fixture = config.fixture;
  report.seed = config.seed;
  report.modes = config.modes;
  for (std::size_t i = 0; i < scene.rois.size(); ++i) {
    auto views = grouping.rois[i].test;
    if (config.max_test_views > 0 && views.size() > std::size_t(config.max_test_views)) {
      views.resize(config.max_test_views);
    }
    for (ViewId v : views) {
      PosedCamera camera = recon.camera(v);
      camera.intrinsics = scale_intrinsics(camera.intrinsics, config.image_size);
      RenderOptions ropts;
      ropts.workers = config.workers;
      const ImageBuffer reference = render_image(*fixture.oracle, camera, reference_sampler, ropts);
      const auto mask = aabb_mask(camera, specs[i].aabb);
      for (RenderMode m : config.modes) {
        report.cells.push_back(run_cell(m, i, v, scene, camera, reference, mask, config, sampler));
      }
    }
  }
  if (!config.output_dir.empty()) {
    std::ofstream(config.output_dir / "report.json") << report_to_json(report);
    std::ofstream(config.output_dir / "report.csv") << report_to_csv(report);
  }
  return report;
}

std::string report_to_json(const RenderReport& report, bool include_timing) {
  json doc;
  doc["schema"] = kReportSchema;
  doc["fixture"] = report.fixture;
  doc["seed"] = report.seed;
  json modes = json::array();
  for (auto m : report.modes) modes.push_back(to_string(m));
  doc["modes"] = modes;
  json cells = json::array();
  for (const auto& c : report.cells) {
    json j = {{"mode", to_string(c.mode)}, {"roi", c.roi},   {"view", c.view},
              {"ok", c.ok},                {"error", c.error},
              {"psnr", jsonutil::number(c.psnr)},
              {"ssim", jsonutil::number(c.ssim)},
              {"masked_psnr", jsonutil::number(c.masked_psnr)}};
    if (include_timing) j["seconds"] = c.seconds;
    j["stats"] = c.stats ? json::parse(stats_to_json(*c.stats)) : json(nullptr);
    cells.push_back(std::move(j));
  }
  doc["cells"] = std::move(cells);
  json summary = json::array();
  for (const auto& s : report.summary()) {
    json j = {{"mode", to_string(s.mode)},
              {"cells", s.cells},
              {"errors", s.errors},
              {"psnr", jsonutil::number(s.psnr)},
              {"ssim", jsonutil::number(s.ssim)},
              {"masked_psnr", jsonutil::number(s.masked_psnr)}};
    if (include_timing) j["seconds"] = s.seconds;
    summary.push_back(std::move(j));
  }
  doc["summary"] = std::move(summary);
  return doc.dump(2) + "\n";
}

RenderReport report_from_json(std::string_view bytes) {
  const json doc = jsonutil::parse(bytes);
  jsonutil::expect_schema(doc, kReportSchema);
  RenderReport r;
  try {
    r.fixture = doc.at("fixture").get<std::string>();
    r.seed = doc.at("seed").get<std::uint64_t>();
    for (const auto& m : doc.at("modes")) r.modes.push_back(mode_from_string(m.get<std::string>()));
    for (const auto& j : doc.at("cells")) {
      CellResult c;
      c.mode = mode_from_string(j.at("mode").get<std::string>());
      c.roi = j.at("roi").get<std::string>();
      c.view = j.at("view").get<ViewId>();
      c.ok = j.at("ok").get<bool>();
      c.error = j.at("error").get<std::string>();
      c.psnr = jsonutil::number(j.at("psnr"));
      c.ssim = jsonutil::number(j.at("ssim"));
      c.masked_psnr = jsonutil::number(j.at("masked_psnr"));
      if (j.contains("seconds")) c.seconds = j["seconds"].get<double>();
      if (!j.at("stats").is_null()) c.stats = stats_from_json(j["stats"].dump());
      r.cells.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
  return r;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string report_to_csv(const RenderReport& report) {
  std::string out = "mode,cells,errors,psnr,ssim,masked_psnr,render_seconds\r\n";
  for (const auto& s : report.summary()) {
    out += csv_field(to_string(s.mode)) + "," + std::to_string(s.cells) + "," +
           std::to_string(s.errors) + "," + csv_number(s.psnr) + "," + csv_number(s.ssim) + "," +
           csv_number(s.masked_psnr) + "," + csv_number(s.seconds) + "\r\n";
  }
  return out;
}

}  // namespace roi
