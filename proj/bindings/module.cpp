#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cuspfit/gradients.hpp"
#include "cuspfit/io.hpp"
#include "cuspfit/metrics.hpp"
#include "cuspfit/pipeline.hpp"
#include "cuspfit/synthdata.hpp"

namespace py = pybind11;
using namespace cuspfit;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

py::array_t<double> vecs_to_array(const std::vector<Vec3>& v) {
  py::array_t<double> arr({static_cast<py::ssize_t>(v.size()),
                           static_cast<py::ssize_t>(3)});
  auto r = arr.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < r.shape(0); ++i)
    for (py::ssize_t c = 0; c < 3; ++c) r(i, c) = v[i][c];
  return arr;
}

std::vector<Vec3> array_to_vecs(const DoubleArray& arr) {
  if (arr.ndim() != 2 || arr.shape(1) != 3)
    throw ArgumentError("expected an (N, 3) array");
  auto r = arr.unchecked<2>();
  std::vector<Vec3> out(static_cast<std::size_t>(r.shape(0)));
  for (py::ssize_t i = 0; i < r.shape(0); ++i)
    out[i] = Vec3(r(i, 0), r(i, 1), r(i, 2));
  return out;
}

py::array_t<double> grid_to_array(const VecGrid& g) {
  py::array_t<double> arr({static_cast<py::ssize_t>(g.rows),
                           static_cast<py::ssize_t>(g.cols),
                           static_cast<py::ssize_t>(3)});
  auto r = arr.mutable_unchecked<3>();
  for (int i = 0; i < g.rows; ++i)
    for (int j = 0; j < g.cols; ++j)
      for (int c = 0; c < 3; ++c) r(i, j, c) = g(i, j)[c];
  return arr;
}

VecGrid array_to_grid(const DoubleArray& arr) {
  if (arr.ndim() != 3 || arr.shape(2) != 3)
    throw ArgumentError("expected a (rows, cols, 3) array");
  auto r = arr.unchecked<3>();
  VecGrid g(static_cast<int>(r.shape(0)), static_cast<int>(r.shape(1)));
  for (int i = 0; i < g.rows; ++i)
    for (int j = 0; j < g.cols; ++j)
      g(i, j) = Vec3(r(i, j, 0), r(i, j, 1), r(i, j, 2));
  return g;
}

py::array_t<double> doubles_to_array(const std::vector<double>& v) {
  py::array_t<double> arr(static_cast<py::ssize_t>(v.size()));
  auto r = arr.mutable_unchecked<1>();
  for (py::ssize_t i = 0; i < r.shape(0); ++i) r(i) = v[i];
  return arr;
}

py::array_t<bool> flags_to_array(const std::vector<std::uint8_t>& v) {
  py::array_t<bool> arr(static_cast<py::ssize_t>(v.size()));
  auto r = arr.mutable_unchecked<1>();
  for (py::ssize_t i = 0; i < r.shape(0); ++i) r(i) = v[i] != 0;
  return arr;
}

std::vector<std::string> cloud_labels(const PointCloud& c) {
  std::vector<std::string> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    out[i] = label_to_string(c.label(i));
  return out;
}

}  // namespace

PYBIND11_MODULE(_cuspfit, m) {
  m.doc() = "Deformable periodic B-spline surface fitting for valve point "
            "clouds";

  py::class_<PointCloud>(m, "PointCloud")
      .def(py::init([](const DoubleArray& pts,
                       const std::optional<std::vector<std::string>>& labels) {
             PointCloud c;
             c.points = array_to_vecs(pts);
             if (labels) {
               if (labels->size() != c.points.size())
                 throw ArgumentError("labels length must match point count");
               c.labels.reserve(labels->size());
               for (const auto& l : *labels)
                 c.labels.push_back(label_from_string(l));
             }
             return c;
           }),
           py::arg("points"), py::arg("labels") = py::none())
      .def_property_readonly(
          "points", [](const PointCloud& c) { return vecs_to_array(c.points); })
      .def_property_readonly("labels", &cloud_labels)
      .def("__len__", &PointCloud::size)
      .def("__repr__", [](const PointCloud& c) {
        std::ostringstream os;
        os << "PointCloud(" << c.size() << " points"
           << (c.has_labels() ? ", labeled" : "") << ")";
        return os.str();
      });

  py::class_<SplineSurface>(m, "SplineSurface")
      .def_readonly("degree_axial", &SplineSurface::degree_axial)
      .def_readonly("degree_circ", &SplineSurface::degree_circ)
      .def_readonly("periodic_circ", &SplineSurface::periodic_circ)
      .def_property_readonly(
          "knots_axial",
          [](const SplineSurface& s) {
            return doubles_to_array(s.knots_axial.values);
          })
      .def_property_readonly(
          "knots_circ",
          [](const SplineSurface& s) {
            return doubles_to_array(s.knots_circ.values);
          })
      .def_property(
          "control_points",
          [](const SplineSurface& s) { return grid_to_array(s.free_grid); },
          [](SplineSurface& s, const DoubleArray& arr) {
            VecGrid g = array_to_grid(arr);
            if (!g.same_shape(s.free_grid))
              throw ArgumentError("control grid shape must stay fixed");
            s.free_grid = std::move(g);
          })
      .def_property_readonly("n_axial", &SplineSurface::n_axial)
      .def_property_readonly("n_circ_free", &SplineSurface::n_circ_free)
      .def_property_readonly("circ_period", &SplineSurface::circ_period)
      .def("point",
           [](const SplineSurface& s, double u, double v) {
             const Vec3 p = surface_point(s, u, v);
             return py::make_tuple(p[0], p[1], p[2]);
           },
           py::arg("u"), py::arg("v"))
      .def("normal",
           [](const SplineSurface& s, double u, double v) {
             const Vec3 n = unit_normal(s, u, v);
             return py::make_tuple(n[0], n[1], n[2]);
           },
           py::arg("u"), py::arg("v"))
      .def("__repr__", [](const SplineSurface& s) {
        std::ostringstream os;
        os << "SplineSurface(" << s.n_axial() << "x" << s.n_circ_free()
           << (s.periodic_circ ? ", periodic" : ", open") << ")";
        return os.str();
      });

  py::class_<SurfaceSamples>(m, "SurfaceSamples")
      .def_readonly("n_u", &SurfaceSamples::n_u)
      .def_readonly("n_v", &SurfaceSamples::n_v)
      .def_readonly("degenerate_count", &SurfaceSamples::degenerate_count)
      .def_property_readonly(
          "points",
          [](const SurfaceSamples& s) { return vecs_to_array(s.points); })
      .def_property_readonly(
          "tangent_u",
          [](const SurfaceSamples& s) { return vecs_to_array(s.tangent_u); })
      .def_property_readonly(
          "tangent_v",
          [](const SurfaceSamples& s) { return vecs_to_array(s.tangent_v); })
      .def_property_readonly(
          "normals",
          [](const SurfaceSamples& s) { return vecs_to_array(s.normals); })
      .def_property_readonly(
          "boundary",
          [](const SurfaceSamples& s) { return flags_to_array(s.boundary); })
      .def_property_readonly(
          "degenerate",
          [](const SurfaceSamples& s) { return flags_to_array(s.degenerate); })
      .def("__len__", &SurfaceSamples::size);

  py::class_<TemplateSpec>(m, "TemplateSpec")
      .def(py::init<>())
      .def_readwrite("radius", &TemplateSpec::radius)
      .def_readwrite("height", &TemplateSpec::height)
      .def_readwrite("leaflet_count", &TemplateSpec::leaflet_count)
      .def_readwrite("degree_axial", &TemplateSpec::degree_axial)
      .def_readwrite("degree_circ", &TemplateSpec::degree_circ)
      .def_readwrite("n_axial", &TemplateSpec::n_axial)
      .def_readwrite("n_circ_free", &TemplateSpec::n_circ_free)
      .def_readwrite("scallop_depth", &TemplateSpec::scallop_depth);

  py::class_<SynthStage>(m, "SynthStage")
      .def(py::init<>())
      .def_readwrite("closure", &SynthStage::closure)
      .def_readwrite("amplitude", &SynthStage::amplitude)
      .def_readwrite("base", &SynthStage::base)
      .def_readwrite("seed", &SynthStage::seed);

  py::class_<LossWeights>(m, "LossWeights")
      .def(py::init<>())
      .def_readwrite("w_cd", &LossWeights::w_cd)
      .def_readwrite("w_hd", &LossWeights::w_hd)
      .def_readwrite("w_a", &LossWeights::w_a)
      .def_readwrite("w_orth", &LossWeights::w_orth)
      .def_readwrite("w_tpe", &LossWeights::w_tpe)
      .def_readwrite("w_norm", &LossWeights::w_norm)
      .def_readwrite("tpe_alpha", &LossWeights::tpe_alpha)
      .def_static("validation", &LossWeights::validation);

  py::class_<LossBreakdown>(m, "LossBreakdown")
      .def_readonly("total", &LossBreakdown::total)
      .def_readonly("fidelity", &LossBreakdown::fidelity)
      .def_readonly("regularization", &LossBreakdown::regularization)
      .def_readonly("d_cd", &LossBreakdown::d_cd)
      .def_readonly("d_hd", &LossBreakdown::d_hd)
      .def_readonly("d_a", &LossBreakdown::d_a)
      .def_readonly("r_orth", &LossBreakdown::r_orth)
      .def_readonly("r_tpe", &LossBreakdown::r_tpe)
      .def_readonly("r_norm", &LossBreakdown::r_norm)
      .def_readonly("degenerate_samples", &LossBreakdown::degenerate_samples)
      .def_readonly("tpe_capped", &LossBreakdown::tpe_capped)
      .def("__repr__", [](const LossBreakdown& b) {
        std::ostringstream os;
        os << "LossBreakdown(total=" << b.total << ", d_cd=" << b.d_cd
           << ", d_hd=" << b.d_hd << ", d_a=" << b.d_a
           << ", r_orth=" << b.r_orth << ", r_tpe=" << b.r_tpe
           << ", r_norm=" << b.r_norm << ")";
        return os.str();
      });

  py::class_<AdamParams>(m, "AdamParams")
      .def(py::init<>())
      .def_readwrite("beta1", &AdamParams::beta1)
      .def_readwrite("beta2", &AdamParams::beta2)
      .def_readwrite("epsilon", &AdamParams::epsilon);

  py::class_<FitConfig>(m, "FitConfig")
      .def(py::init<>())
      .def_readwrite("weights", &FitConfig::weights)
      .def_readwrite("delta", &FitConfig::delta)
      .def_readwrite("t_max", &FitConfig::t_max)
      .def_readwrite("sample_nu", &FitConfig::sample_nu)
      .def_readwrite("sample_nv", &FitConfig::sample_nv)
      .def_readwrite("record_every", &FitConfig::record_every)
      .def_readwrite("plain_descent", &FitConfig::plain_descent)
      .def_readwrite("early_stop", &FitConfig::early_stop)
      .def_readwrite("early_stop_rel_tol", &FitConfig::early_stop_rel_tol)
      .def_readwrite("early_stop_patience", &FitConfig::early_stop_patience)
      .def_readwrite("threads", &FitConfig::threads)
      .def_readwrite("adam", &FitConfig::adam);

  py::class_<HistoryEntry>(m, "HistoryEntry")
      .def_readonly("iteration", &HistoryEntry::iteration)
      .def_readonly("loss", &HistoryEntry::loss);

  py::enum_<FitStatus>(m, "FitStatus")
      .value("completed", FitStatus::completed)
      .value("early_stopped", FitStatus::early_stopped)
      .value("failed_degenerate", FitStatus::failed_degenerate);

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("surface", &FitResult::surface)
      .def_readonly("history", &FitResult::history)
      .def_readonly("iterations", &FitResult::iterations)
      .def_readonly("wall_seconds", &FitResult::wall_seconds)
      .def_readonly("status", &FitResult::status)
      .def_readonly("message", &FitResult::message);

  py::class_<SimilarityTransform>(m, "SimilarityTransform")
      .def_readonly("scale", &SimilarityTransform::scale)
      .def_property_readonly(
          "rotation",
          [](const SimilarityTransform& t) {
            py::array_t<double> arr({static_cast<py::ssize_t>(3),
                                     static_cast<py::ssize_t>(3)});
            auto r = arr.mutable_unchecked<2>();
            for (int i = 0; i < 3; ++i)
              for (int j = 0; j < 3; ++j) r(i, j) = t.rotation(i, j);
            return arr;
          })
      .def_property_readonly(
          "translation",
          [](const SimilarityTransform& t) {
            return py::make_tuple(t.translation[0], t.translation[1],
                                  t.translation[2]);
          })
      .def("apply", [](const SimilarityTransform& t, const DoubleArray& pts) {
        return vecs_to_array([&] {
          std::vector<Vec3> v = array_to_vecs(pts);
          for (Vec3& x : v) x = t.apply(x);
          return v;
        }());
      });

  py::class_<SnndReport>(m, "SnndReport")
      .def_property_readonly(
          "values",
          [](const SnndReport& r) { return doubles_to_array(r.values); })
      .def_readonly("min_value", &SnndReport::min_value)
      .def_readonly("max_value", &SnndReport::max_value)
      .def_readonly("mean_value", &SnndReport::mean_value)
      .def_readonly("area", &SnndReport::area)
      .def_property_readonly(
          "bin_edges",
          [](const SnndReport& r) { return doubles_to_array(r.bin_edges); })
      .def_property_readonly(
          "bin_percent",
          [](const SnndReport& r) { return doubles_to_array(r.bin_percent); });

  py::class_<Frame>(m, "Frame")
      .def(py::init([](std::string label, const PointCloud& cloud) {
             return Frame{std::move(label), cloud};
           }),
           py::arg("label"), py::arg("cloud"))
      .def_readwrite("label", &Frame::label)
      .def_readwrite("cloud", &Frame::cloud);

  m.def("make_template", &make_template, py::arg("spec") = TemplateSpec{});
  m.def("synth_valve_surface", &synth_valve_surface, py::arg("stage"));
  m.def("sample_poisson_disk", &sample_poisson_disk, py::arg("surface"),
        py::arg("target_count"), py::arg("seed"));
  m.def("add_gaussian_noise", &add_gaussian_noise, py::arg("cloud"),
        py::arg("sd"), py::arg("seed"));
  m.def("sample_surface", &sample_surface, py::arg("surface"), py::arg("n_u"),
        py::arg("n_v"), py::arg("threads") = 1);
  m.def("surface_area", &surface_area, py::arg("surface"),
        py::arg("quad_order") = 4);
  m.def("min_nonneighbor_distance", &min_nonneighbor_distance,
        py::arg("samples"), py::arg("window") = 2);

  m.def("total_loss", &total_loss, py::arg("surface"), py::arg("cloud"),
        py::arg("weights"), py::arg("n_u") = 40, py::arg("n_v") = 120,
        py::arg("threads") = 1);
  m.def("chamfer_one_sided", &chamfer_one_sided, py::arg("samples"),
        py::arg("cloud"), py::arg("threads") = 1);
  m.def("hausdorff", &hausdorff, py::arg("samples"), py::arg("cloud"),
        py::arg("threads") = 1);
  m.def("annulus_loss", &annulus_loss, py::arg("samples"), py::arg("cloud"),
        py::arg("threads") = 1);
  m.def("orthogonality_energy", &orthogonality_energy, py::arg("samples"));
  m.def("tangent_point_energy", &tangent_point_energy, py::arg("samples"),
        py::arg("alpha") = 4.0, py::arg("threads") = 1);
  m.def("normal_deviation_energy", &normal_deviation_energy,
        py::arg("samples"));

  m.def("loss_gradient",
        [](const SplineSurface& s, const PointCloud& c, const LossWeights& w,
           int n_u, int n_v, int threads) {
          const auto [loss, grad] = loss_gradient(s, c, w, n_u, n_v, threads);
          return py::make_tuple(loss, grid_to_array(grad));
        },
        py::arg("surface"), py::arg("cloud"), py::arg("weights"),
        py::arg("n_u") = 40, py::arg("n_v") = 120, py::arg("threads") = 1);
  m.def("finite_difference_gradient",
        [](const SplineSurface& s, const PointCloud& c, const LossWeights& w,
           int n_u, int n_v, double step) {
          return grid_to_array(
              finite_difference_gradient(s, c, w, n_u, n_v, step));
        },
        py::arg("surface"), py::arg("cloud"), py::arg("weights"),
        py::arg("n_u") = 40, py::arg("n_v") = 120, py::arg("step") = 1e-5);

  m.def("fit_single", &fit_single, py::arg("initial"), py::arg("cloud"),
        py::arg("config"), py::arg("progress") = ProgressFn{});
  m.def("fit_sequence", &fit_sequence, py::arg("template_surface"),
        py::arg("frames"), py::arg("config"),
        py::arg("realign_each_frame") = false,
        py::arg("progress") = ProgressFn{});
  m.def("compute_prealign", &compute_prealign, py::arg("surface"),
        py::arg("cloud"));
  m.def("affine_prealign", &affine_prealign, py::arg("surface"),
        py::arg("cloud"));

  m.def("snnd_report",
        [](const DoubleArray& values, double area, int bin_count) {
          auto r = values.unchecked<1>();
          std::vector<double> v(static_cast<std::size_t>(r.shape(0)));
          for (py::ssize_t i = 0; i < r.shape(0); ++i) v[i] = r(i);
          return snnd_report(std::move(v), area, bin_count);
        },
        py::arg("values"), py::arg("area"), py::arg("bin_count") = 20);
  m.def("evaluate_fit", &evaluate_fit, py::arg("surface"), py::arg("cloud"),
        py::arg("n_u") = 40, py::arg("n_v") = 120, py::arg("bin_count") = 20,
        py::arg("threads") = 1);

  m.def("load_point_cloud", &load_point_cloud, py::arg("path"));
  m.def("save_point_cloud", &save_point_cloud, py::arg("cloud"),
        py::arg("path"));
  m.def("load_surface", &load_surface, py::arg("path"));
  m.def("save_surface", &save_surface, py::arg("surface"), py::arg("path"));
  m.def("save_quad_mesh", &save_quad_mesh, py::arg("surface"),
        py::arg("path"), py::arg("n_u") = 40, py::arg("n_v") = 120);

  m.attr("__version__") = "0.1.0";
}
