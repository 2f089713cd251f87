// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#include "roi/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <fstream>
#include <map>
#include <sstream>

#include "roi/composition.hpp"
#include "roi/fields.hpp"
#include "roi/fit.hpp"
#include "roi/fixtures.hpp"
#include "roi/grouping.hpp"
#include "roi/harness.hpp"
#include "roi/image_io.hpp"
#include "roi/service.hpp"
#include "roi/sfm.hpp"

namespace roi {

using nlohmann::json;

int exit_code(ErrorCode code) {
  switch (category(code)) {
    case ErrorCategory::Io: return kExitIo;
    case ErrorCategory::Validation: return kExitValidation;
    case ErrorCategory::Numeric: return kExitNumeric;
  }
  return kExitValidation;
}

void save_image(const ImageBuffer& image, const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".png") {
    write_png(image, path);
  } else if (ext == ".pfm") {
    write_pfm(image, path);
  } else if (ext == ".ppm") {
    write_ppm(image, path);
  } else {
    throw Error(ErrorCode::InvalidArgument, "image extension must be .png, .pfm or .ppm");
  }
}

namespace {

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw Error(ErrorCode::Io, "cannot write " + path);
}

Aabb parse_aabb(const std::vector<double>& v) {
  if (v.size() != 6) throw Error(ErrorCode::InvalidArgument, "--aabb takes 6 numbers");
  const Vec3 lo(v[0], v[1], v[2]), hi(v[3], v[4], v[5]);
  if (!(lo.array() <= hi.array()).all()) {
    throw Error(ErrorCode::InvalidArgument, "aabb min must not exceed max");
  }
  return {lo, hi};
}

// "name=path" for repeatable ROI grids.
std::pair<std::string, std::string> split_named(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) {
    throw Error(ErrorCode::InvalidArgument, "--roi expects name=grid_path, got '" + s + "'");
  }
  return {s.substr(0, eq), s.substr(eq + 1)};
}

struct SamplerFlags {
  int n_coarse = 64;
  int n_fine = 64;
  std::uint64_t seed = 0;
  bool jitter = false;

  void add(CLI::App* app) {
    app->add_option("--n-coarse", n_coarse, "Stratified samples per ray")->capture_default_str();
    app->add_option("--n-fine", n_fine, "Importance samples per ray")->capture_default_str();
    app->add_option("--seed", seed, "Random seed")->capture_default_str();
    app->add_flag("--jitter", jitter, "Jitter sample positions");
  }
  SamplerConfig config() const {
    SamplerConfig s;
    s.n_coarse = n_coarse;
    s.n_fine = n_fine;
    s.seed = seed;
    s.jitter = jitter;
    s.validate();
    return s;
  }
};

PosedCamera view_camera(const Reconstruction& recon, ViewId view, int max_dim) {
  PosedCamera cam = recon.camera(view);
  if (max_dim > 0) cam.intrinsics = scale_intrinsics(cam.intrinsics, max_dim);
  return cam;
}

std::shared_ptr<const RadianceField> load_field(const std::string& grid_path,
                                                const std::string& oracle) {
  if (!oracle.empty()) return make_fixture(oracle).oracle;
  return std::make_shared<GridField>(load_grid(grid_path));
}

// ROI runtimes from name=grid pairs; the box is the grid's domain and d_max
// comes from a groups file when one is given.
std::vector<RoiRuntime> load_rois(const std::vector<std::string>& named,
                                  const std::string& groups_path, const SamplerConfig& sampler) {
  std::map<std::string, const RoiGroup*> groups;
  GroupingResult grouping;
  if (!groups_path.empty()) {
    grouping = parse_groups_json(read_text(groups_path));
    for (const auto& g : grouping.rois) groups[g.spec.name] = &g;
  }
  std::vector<RoiRuntime> rois;
  for (const auto& s : named) {
    auto [name, path] = split_named(s);
    auto grid = std::make_shared<GridField>(load_grid(path, name));
    RoiRuntime r;
    r.spec.name = name;
    r.spec.aabb = grid->bounds();
    if (auto it = groups.find(name); it != groups.end()) {
      r.spec = it->second->spec;
      r.d_max = it->second->d_max;
    }
    r.field = std::move(grid);
    r.sampler = sampler;
    rois.push_back(std::move(r));
  }
  return rois;
}

Service* g_running_service = nullptr;

void on_signal(int) {
  if (g_running_service) g_running_service->stop();
}

int run(int argc, const char* const* argv, std::ostream& out) {
  CLI::App app{"Compositional volumetric rendering of regions of interest", "roi-compose"};
  app.require_subcommand(1);
  app.set_config("--settings", "", "TOML file with per-command defaults ([command] sections)");
  app.allow_config_extras(CLI::config_extras_mode::error);

  auto sub = [&](const char* name, const char* help) {
    auto* s = app.add_subcommand(name, help);
    s->allow_config_extras(CLI::config_extras_mode::error);
    return s;
  };

  // ingest
  std::string colmap_dir, ingest_out;
  auto* ingest = sub("ingest", "Convert a COLMAP text model to reconstruction JSON");
  ingest->add_option("colmap_dir", colmap_dir, "Directory with cameras.txt, images.txt, points3D.txt")
      ->required();
  ingest->add_option("-o,--output", ingest_out, "Output JSON (stdout when omitted)");

  // synth
  std::string synth_fixture, synth_out, synth_colmap;
  std::uint64_t synth_seed = 0;
  auto* synth = sub("synth", "Synthesise a reconstruction of a built-in fixture");
  synth->add_option("--fixture", synth_fixture, "checker-table, two-spheres or occluder")
      ->required();
  synth->add_option("--seed", synth_seed, "Random seed")->capture_default_str();
  synth->add_option("-o,--output", synth_out, "Output JSON (stdout when omitted)");
  synth->add_option("--colmap-dir", synth_colmap, "Also write a COLMAP text model here");

  // group
  std::string group_recon, group_rois, group_out, group_rule = "strict";
  std::uint64_t group_seed = 0;
  auto* group = sub("group", "Select training cameras per ROI");
  group->add_option("--recon", group_recon, "Reconstruction JSON")->required();
  group->add_option("--rois", group_rois, "ROI specs (roi-groups v1)")->required();
  group->add_option("-o,--output", group_out, "Output JSON (stdout when omitted)");
  group->add_option("--seed", group_seed, "Random seed")->capture_default_str();
  group->add_option("--rule", group_rule, "strict or at-least")
      ->check(CLI::IsMember({"strict", "at-least"}))
      ->capture_default_str();

  // bake
  std::string bake_oracle, bake_roi, bake_out, bake_recon;
  std::vector<double> bake_aabb;
  std::uint32_t bake_res = 64, bake_cap = 4096;
  bool bake_auto = false, bake_scene = false;
  int bake_pad = 2;
  std::uint64_t bake_seed = 0;
  auto* bake = sub("bake", "Sample an analytic fixture onto a voxel grid");
  bake->add_option("--oracle", bake_oracle, "Fixture name")->required();
  auto* bake_box = bake->add_option("--aabb", bake_aabb, "minx miny minz maxx maxy maxz")
                       ->expected(6)
                       ->delimiter(',');
  auto* bake_named = bake->add_option("--roi", bake_roi, "Use the box of a fixture ROI");
  auto* bake_whole = bake->add_flag("--scene", bake_scene, "Use the fixture's scene bounds");
  bake_box->excludes(bake_named)->excludes(bake_whole);
  bake_named->excludes(bake_whole);
  bake->add_option("--res", bake_res, "Vertices per axis")->capture_default_str();
  bake->add_flag("--auto-nmax", bake_auto, "Pick the resolution from camera footprints");
  bake->add_option("--nmax-cap", bake_cap, "Upper bound for --auto-nmax")->capture_default_str();
  bake->add_option("--recon", bake_recon, "Cameras for --auto-nmax (default: fixture synth)");
  bake->add_option("--seed", bake_seed, "Seed of the synthetic cameras")->capture_default_str();
  bake->add_option("--pad", bake_pad, "Colour padding passes into empty vertices")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  bake->add_option("-o,--output", bake_out, "Output .roigrid")->required();

  // fit
  std::string fit_oracle, fit_roi, fit_out;
  std::uint32_t fit_res = 8;
  int fit_steps = 50, fit_max_dim = 32, fit_views = 8;
  std::uint64_t fit_seed = 0;
  auto* fit = sub("fit", "Fit a voxel grid to renders of a fixture ROI");
  fit->add_option("--oracle", fit_oracle, "Fixture name")->required();
  fit->add_option("--roi", fit_roi, "Fixture ROI name")->required();
  fit->add_option("--res", fit_res, "Vertices per axis")->capture_default_str();
  fit->add_option("--steps", fit_steps, "Optimiser steps")->capture_default_str();
  fit->add_option("--max-dim", fit_max_dim, "Training image size")->capture_default_str();
  fit->add_option("--views", fit_views, "Training views used")->capture_default_str();
  fit->add_option("--seed", fit_seed, "Random seed")->capture_default_str();
  fit->add_option("-o,--output", fit_out, "Output .roigrid")->required();

  // render
  std::string render_field, render_oracle, render_recon, render_out;
  ViewId render_view = 0;
  int render_max_dim = 0;
  SamplerFlags render_sampler;
  auto* render = sub("render", "Render one field from a reconstruction view");
  auto* rf = render->add_option("--field", render_field, "Grid file");
  auto* ro = render->add_option("--oracle", render_oracle, "Render a fixture's analytic field");
  rf->excludes(ro);
  render->add_option("--recon", render_recon, "Reconstruction JSON")->required();
  render->add_option("--view", render_view, "View id")->required();
  render->add_option("--max-dim", render_max_dim, "Long side in pixels (0 = native)");
  render_sampler.add(render);
  render->add_option("-o,--output", render_out, "Image (.png, .pfm, .ppm)")->required();

  // compose
  std::string compose_scene, compose_recon, compose_out, compose_groups, compose_stats,
      compose_mode = "ours-multiple";
  std::vector<std::string> compose_rois;
  ViewId compose_view = 0;
  int compose_max_dim = 0;
  SamplerFlags compose_sampler;
  auto* compose = sub("compose", "Render a scene grid composed with ROI grids");
  compose->add_option("--scene-field", compose_scene, "Scene grid file")->required();
  compose->add_option("--roi", compose_rois, "name=grid_path, repeatable");
  compose->add_option("--groups", compose_groups, "Grouping output providing d_max per ROI");
  compose->add_option("--mode", compose_mode, "ours-single, ours-multiple or ablation-a..d")
      ->check(CLI::IsMember({"ours-single", "ours-multiple", "ablation-a", "ablation-b",
                             "ablation-c", "ablation-d"}))
      ->capture_default_str();
  compose->add_option("--recon", compose_recon, "Reconstruction JSON")->required();
  compose->add_option("--view", compose_view, "View id")->required();
  compose->add_option("--max-dim", compose_max_dim, "Long side in pixels (0 = native)");
  compose->add_option("--stats", compose_stats, "Write CompositionStats JSON here");
  compose_sampler.add(compose);
  compose->add_option("-o,--output", compose_out, "Image (.png, .pfm, .ppm)")->required();

  // evaluate
  std::string eval_config, eval_output_dir;
  int eval_workers = 0;
  auto* evaluate = sub("evaluate", "Run an experiment and write report.json / report.csv");
  evaluate->add_option("--config", eval_config, "Experiment JSON")->required();
  evaluate->add_option("--output-dir", eval_output_dir, "Overrides output_dir of the experiment");
  evaluate->add_option("--workers", eval_workers, "Overrides workers of the experiment");

  // serve
  std::string serve_recon, serve_host = "127.0.0.1", serve_scene, serve_groups, serve_state,
      serve_cors = "*";
  std::vector<std::string> serve_rois;
  int serve_port = 8080, serve_workers = 1;
  std::size_t serve_budget = 20000;
  std::uint64_t serve_seed = 0;
  auto* serve = sub("serve", "Serve the HTTP API for the ROI studio");
  serve->add_option("--recon", serve_recon, "Reconstruction JSON")->required();
  serve->add_option("--host", serve_host, "Bind address")->capture_default_str();
  serve->add_option("--port", serve_port, "Port (0 picks a free one)")->capture_default_str();
  serve->add_option("--scene-field", serve_scene, "Scene grid enabling previews");
  serve->add_option("--roi", serve_rois, "name=grid_path, repeatable");
  serve->add_option("--groups", serve_groups, "Grouping output providing d_max per ROI");
  serve->add_option("--budget", serve_budget, "Default point budget")->capture_default_str();
  serve->add_option("--seed", serve_seed, "Decimation and render seed")->capture_default_str();
  serve->add_option("--state-dir", serve_state, "Where POST /api/rois persists configs");
  serve->add_option("--cors-origin", serve_cors, "Access-Control-Allow-Origin value")
      ->capture_default_str();
  serve->add_option("--workers", serve_workers, "Render threads")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg, err;
    const int code = app.exit(e, msg, err);
    out << msg.str();
    if (code == 0) return kExitOk;
    throw;
  }

  if (*ingest) {
    const auto recon = parse_colmap_text(colmap_dir);
    write_text(write_reconstruction_json(recon), ingest_out, out);
  } else if (*synth) {
    const auto fixture = make_fixture(synth_fixture);
    const auto recon = fixture_reconstruction(fixture, synth_seed);
    write_text(write_reconstruction_json(recon), synth_out, out);
    if (!synth_colmap.empty()) {
      std::filesystem::create_directories(synth_colmap);
      write_colmap_text(recon, synth_colmap);
    }
  } else if (*group) {
    const auto recon = parse_reconstruction_json(read_text(group_recon));
    const auto specs = parse_roi_specs_json(read_text(group_rois));
    GroupingOptions opts;
    opts.seed = group_seed;
    opts.rule = group_rule == "strict" ? ThresholdRule::Strict : ThresholdRule::AtLeast;
    write_text(write_groups_json(group_cameras(recon, specs, opts)), group_out, out);
  } else if (*bake) {
    const auto fixture = make_fixture(bake_oracle);
    Aabb box = fixture.scene_bounds;
    std::string id = "scene";
    if (!bake_aabb.empty()) {
      box = parse_aabb(bake_aabb);
      id = "grid";
    } else if (!bake_roi.empty()) {
      const auto it = std::find_if(fixture.rois.begin(), fixture.rois.end(),
                                   [&](const RoiSpec& s) { return s.name == bake_roi; });
      if (it == fixture.rois.end()) {
        throw Error(ErrorCode::InvalidArgument, "fixture has no ROI '" + bake_roi + "'");
      }
      box = it->aabb;
      id = it->name;
    }
    std::uint32_t res = bake_res;
    if (bake_auto) {
      const auto recon = bake_recon.empty() ? fixture_reconstruction(fixture, bake_seed)
                                            : parse_reconstruction_json(read_text(bake_recon));
      RoiSpec spec;
      spec.name = id;
      spec.aabb = box;
      std::vector<PosedCamera> cams;
      for (ViewId v : select_roi_cameras(recon, spec)) cams.push_back(recon.camera(v));
      if (cams.empty()) throw Error(ErrorCode::NoUsableView, "no camera selects the box");
      res = estimate_n_max(box, cams, bake_cap);
    }
    auto grid = bake_grid(*fixture.oracle, box, cube_resolution(res), id);
    pad_empty_colors(grid, bake_pad);
    save_grid(grid, bake_out);
    out << json({{"output", bake_out}, {"resolution", res}}).dump() << "\n";
  } else if (*fit) {
    const auto fixture = make_fixture(fit_oracle);
    const auto it = std::find_if(fixture.rois.begin(), fixture.rois.end(),
                                 [&](const RoiSpec& s) { return s.name == fit_roi; });
    if (it == fixture.rois.end()) {
      throw Error(ErrorCode::InvalidArgument, "fixture has no ROI '" + fit_roi + "'");
    }
    const auto recon = fixture_reconstruction(fixture, fit_seed);
    GroupingOptions gopts;
    gopts.seed = fit_seed;
    const auto grouping = group_cameras(recon, std::span(&*it, 1), gopts);
    std::vector<TrainingView> views;
    SamplerConfig ref{128, 128};
    ref.seed = fit_seed;
    for (ViewId v : grouping.rois[0].train) {
      if (int(views.size()) >= fit_views) break;
      TrainingView tv;
      tv.camera = view_camera(recon, v, fit_max_dim);
      RenderOptions ro_opts;
      ro_opts.sampling_bounds = it->aabb;
      tv.image = render_image(*fixture.oracle, tv.camera, ref, ro_opts);
      views.push_back(std::move(tv));
    }
    FitConfig fc;
    fc.steps = fit_steps;
    FitReport report;
    const auto grid = fit_grid(views, GridField(it->name, it->aabb, cube_resolution(fit_res)), fc,
                               &report);
    save_grid(grid, fit_out);
    out << json({{"output", fit_out},
                 {"views", views.size()},
                 {"initial_loss", report.losses.empty() ? 0.0 : report.losses.front()},
                 {"final_loss", report.losses.empty() ? 0.0 : report.losses.back()}})
               .dump()
        << "\n";
  } else if (*render) {
    if (render_field.empty() && render_oracle.empty()) {
      throw CLI::RequiredError("--field or --oracle");
    }
    const auto recon = parse_reconstruction_json(read_text(render_recon));
    const auto field = load_field(render_field, render_oracle);
    const auto image =
        render_image(*field, view_camera(recon, render_view, render_max_dim), render_sampler.config());
    save_image(image, render_out);
  } else if (*compose) {
    const auto recon = parse_reconstruction_json(read_text(compose_recon));
    const auto sampler = compose_sampler.config();
    const GridField scene = load_grid(compose_scene, "scene");
    const auto rois = load_rois(compose_rois, compose_groups, sampler);
    const auto mode = mode_from_string(compose_mode);
    if (mode == RenderMode::OursSingle && rois.size() > 1) {
      throw Error(ErrorCode::UnsupportedMode, "ours-single takes exactly one ROI");
    }
    const auto result =
        render_image_composed(scene, rois, view_camera(recon, compose_view, compose_max_dim),
                              sampler, composition_for(mode));
    save_image(result.image, compose_out);
    if (!compose_stats.empty()) write_text(stats_to_json(result.stats), compose_stats, out);
  } else if (*evaluate) {
    auto config = parse_experiment_config(read_text(eval_config));
    if (!eval_output_dir.empty()) config.output_dir = eval_output_dir;
    if (eval_workers > 0) config.workers = eval_workers;
    const auto report = run_experiment(config);
    out << report_to_csv(report);
  } else if (*serve) {
    ServiceOptions opts;
    opts.point_budget = serve_budget;
    opts.seed = serve_seed;
    opts.state_dir = serve_state;
    opts.cors_origin = serve_cors;
    opts.workers = serve_workers;
    Service service(opts);
    service.load_reconstruction(parse_reconstruction_json(read_text(serve_recon)));
    if (!serve_scene.empty()) {
      LoadedFields fields;
      auto scene = std::make_shared<GridField>(load_grid(serve_scene, "scene"));
      fields.scene_bounds = scene->bounds();
      fields.scene = std::move(scene);
      fields.rois = load_rois(serve_rois, serve_groups, opts.sampler);
      service.load_fields(std::move(fields));
    }
    const int port = service.bind(serve_host, serve_port);
    out << json({{"listening", serve_host + ":" + std::to_string(port)}}).dump() << std::endl;
    g_running_service = &service;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    service.listen();
    g_running_service = nullptr;
  }
  return kExitOk;
}

void report(std::ostream& err, const std::string& code, const std::string& category,
            const std::string& message) {
  err << json({{"error", code}, {"category", category}, {"message", message}}).dump() << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    return run(argc, argv, out);
  } catch (const CLI::Error& e) {
    report(err, e.get_name(), "usage", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    static const char* names[] = {"io", "validation", "numeric"};
    report(err, to_string(e.code()), names[static_cast<int>(category(e.code()))], e.what());
    return exit_code(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    report(err, "Io", "io", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    report(err, "Internal", "validation", e.what());
    return kExitValidation;
  }
}

}  // namespace roi
