// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "roi/composition.hpp"
#include "roi/error.hpp"
#include "roi/fields.hpp"
#include "roi/fixtures.hpp"
#include "roi/grouping.hpp"
#include "roi/harness.hpp"
#include "roi/metrics.hpp"
#include "roi/sfm.hpp"

namespace py = pybind11;
using namespace roi;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_numpy(const ImageBuffer& img) {
  Array out({img.height, img.width, 3});
  std::memcpy(out.mutable_data(), img.rgb.data(), img.rgb.size() * sizeof(double));
  return out;
}

ImageBuffer from_numpy(const Array& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw Error(ErrorCode::DimensionMismatch, "expected (H, W, 3)");
  ImageBuffer img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  std::memcpy(img.rgb.data(), a.data(), img.rgb.size() * sizeof(double));
  return img;
}

Aabb to_aabb(const std::array<double, 6>& b) {
  return make_aabb(Vec3(b[0], b[1], b[2]), Vec3(b[3], b[4], b[5]));
}

std::array<double, 6> from_aabb(const Aabb& b) {
  return {b.min.x(), b.min.y(), b.min.z(), b.max.x(), b.max.y(), b.max.z()};
}

SamplerConfig sampler(int n_coarse, int n_fine, std::uint64_t seed) {
  SamplerConfig s;
  s.n_coarse = n_coarse;
  s.n_fine = n_fine;
  s.seed = seed;
  s.validate();
  return s;
}

PosedCamera view_camera(const std::string& recon_json, ViewId view, int max_dim) {
  const auto recon = parse_reconstruction_json(recon_json);
  auto cam = recon.camera(view);
  if (max_dim > 0) cam.intrinsics = scale_intrinsics(cam.intrinsics, max_dim);
  return cam;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Compositional rendering of voxel-grid fields";

  static py::exception<Error> roi_error(m, "RoiError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = roi_error;
      py::object instance = exc(e.what());
      instance.attr("code") = to_string(e.code());
      PyErr_SetObject(roi_error.ptr(), instance.ptr());
    }
  });

  py::class_<GridField, std::shared_ptr<GridField>>(m, "Grid")
      .def_property_readonly("resolution",
                             [](const GridField& g) {
                               const auto& r = g.resolution();
                               return std::array<std::uint32_t, 3>{r.nx, r.ny, r.nz};
                             })
      .def_property_readonly("bounds", [](const GridField& g) { return from_aabb(g.bounds()); })
      .def("query",
           [](const GridField& g, std::array<double, 3> p) {
             const auto s = g.query(Vec3(p[0], p[1], p[2]), Vec3::UnitZ());
             return py::make_tuple(s.sigma, std::array<double, 3>{s.rgb.x(), s.rgb.y(), s.rgb.z()});
           })
      .def("save", [](const GridField& g, const std::string& path) { save_grid(g, path); })
      .def_static("load", [](const std::string& path) {
        return std::make_shared<GridField>(load_grid(path));
      });

  m.def("fixture_names", &fixture_names);

  m.def(
      "synth_reconstruction",
      [](const std::string& fixture, std::uint64_t seed) {
        return write_reconstruction_json(fixture_reconstruction(make_fixture(fixture), seed));
      },
      py::arg("fixture"), py::arg("seed") = 0, "Reconstruction JSON of a built-in fixture.");

  m.def(
      "ingest_colmap",
      [](const std::string& dir) { return write_reconstruction_json(parse_colmap_text(dir)); },
      py::arg("directory"));

  m.def(
      "group_cameras",
      [](const std::string& recon_json, const std::string& rois_json, std::uint64_t seed,
         const std::string& rule) {
        GroupingOptions opts;
        opts.seed = seed;
        if (rule != "strict" && rule != "at-least") {
          throw Error(ErrorCode::InvalidArgument, "rule must be strict or at-least");
        }
        opts.rule = rule == "strict" ? ThresholdRule::Strict : ThresholdRule::AtLeast;
        return write_groups_json(group_cameras(parse_reconstruction_json(recon_json),
                                               parse_roi_specs_json(rois_json), opts));
      },
      py::arg("recon_json"), py::arg("rois_json"), py::arg("seed") = 0,
      py::arg("rule") = "strict");

  m.def(
      "bake",
      [](const std::string& fixture, std::optional<std::array<double, 6>> aabb,
         std::uint32_t resolution, int pad) {
        const auto f = make_fixture(fixture);
        auto grid = std::make_shared<GridField>(bake_grid(
            *f.oracle, aabb ? to_aabb(*aabb) : f.scene_bounds, cube_resolution(resolution)));
        pad_empty_colors(*grid, pad);
        return grid;
      },
      py::arg("fixture"), py::arg("aabb") = std::nullopt, py::arg("resolution") = 32,
      py::arg("pad") = 2, "Samples a fixture onto a grid; aabb is (minx, miny, minz, maxx, maxy, maxz).");

  m.def(
      "render",
      [](const GridField& field, const std::string& recon_json, ViewId view, int max_dim,
         int n_coarse, int n_fine, std::uint64_t seed) {
        const auto cam = view_camera(recon_json, view, max_dim);
        const auto s = sampler(n_coarse, n_fine, seed);
        ImageBuffer img;
        {
          py::gil_scoped_release release;
          img = render_image(field, cam, s);
        }
        return to_numpy(img);
      },
      py::arg("field"), py::arg("recon_json"), py::arg("view"), py::arg("max_dim") = 0,
      py::arg("n_coarse") = 64, py::arg("n_fine") = 64, py::arg("seed") = 0);

  m.def(
      "compose",
      [](const GridField& scene, const std::vector<std::pair<std::string, std::shared_ptr<GridField>>>& rois,
         const std::string& recon_json, ViewId view, int max_dim, const std::string& mode,
         int n_coarse, int n_fine, std::uint64_t seed) {
        const auto cam = view_camera(recon_json, view, max_dim);
        const auto s = sampler(n_coarse, n_fine, seed);
        std::vector<RoiRuntime> runtimes;
        for (const auto& [name, grid] : rois) {
          RoiRuntime r;
          r.spec.name = name;
          r.spec.aabb = grid->bounds();
          r.field = grid;
          r.sampler = s;
          runtimes.push_back(std::move(r));
        }
        ComposedImage out;
        {
          py::gil_scoped_release release;
          out = render_image_composed(scene, runtimes, cam, s, composition_for(mode_from_string(mode)));
        }
        return py::make_tuple(to_numpy(out.image), stats_to_json(out.stats));
      },
      py::arg("scene"), py::arg("rois"), py::arg("recon_json"), py::arg("view"),
      py::arg("max_dim") = 0, py::arg("mode") = "ours-multiple", py::arg("n_coarse") = 64,
      py::arg("n_fine") = 64, py::arg("seed") = 0,
      "Returns (image, stats_json); rois is a list of (name, Grid) pairs.");

  m.def("psnr", [](const Array& a, const Array& b) { return psnr(from_numpy(a), from_numpy(b)); });
  m.def("ssim", [](const Array& a, const Array& b) { return ssim(from_numpy(a), from_numpy(b)); });

  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        const auto config = parse_experiment_config(config_json);
        RenderReport report;
        {
          py::gil_scoped_release release;
          report = run_experiment(config);
        }
        return report_to_json(report);
      },
      py::arg("config_json"), "Runs an experiment and returns the report JSON.");
}
