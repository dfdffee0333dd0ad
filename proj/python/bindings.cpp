// Thin pybind11 layer. Configs cross the boundary as JSON text; images as
// (ny, nx) arrays with row j holding y index j.

#include "mrxi/errors.hpp"
#include "mrxi/experiment.hpp"
#include "mrxi/phantoms.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace mrxi;
using nlohmann::json;

namespace {

using RowImage = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

ExperimentConfig parse_config(const std::string& text) {
  if (text.empty()) return ExperimentConfig::default_setup();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(e.what());
  }
  return ExperimentConfig::from_json(j);
}

// x-fastest storage of a (ny, nx) row-major image is its row-major flattening.
DensityField to_field(const RowImage& image) {
  const PixelGrid grid = PixelGrid::square(static_cast<std::size_t>(image.cols()), static_cast<std::size_t>(image.rows()));
  return {grid, Eigen::Map<const Vector>(image.data(), image.size())};
}

RowImage to_image(const DensityField& f) {
  return Eigen::Map<const RowImage>(f.values.data(), static_cast<Eigen::Index>(f.grid.ny()),
                                    static_cast<Eigen::Index>(f.grid.nx()));
}

py::dict report_dict(const SolverReport& r) {
  py::dict d;
  d["solution"] = r.solution;
  d["iterations"] = r.iterations;
  d["termination"] = std::string(to_string(r.termination));
  d["final_objective"] = r.final_objective;
  d["final_misfit"] = r.final_misfit;
  d["converged"] = r.converged();
  d["outer_misfit"] = r.outer_misfit;
  return d;
}

std::array<std::size_t, 3> line_or_image(const Matrix& K, std::optional<std::array<std::size_t, 2>> shape) {
  if (shape) return {(*shape)[0], (*shape)[1], 1};
  return {static_cast<std::size_t>(K.cols()), 1, 1};
}

AdmmParams admm_params(double alpha, double rho, std::size_t max_iterations, double tolerance, bool positivity) {
  AdmmParams p;
  p.alpha = alpha;
  p.rho = rho;
  p.max_iterations = max_iterations;
  p.primal_tolerance = tolerance;
  p.dual_tolerance = tolerance;
  p.positivity = positivity;
  p.history_stride = std::max<std::size_t>(1, max_iterations / 10);
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Magnetorelaxometry imaging core";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<GeometryError>(m, "GeometryError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  m.def("default_config", [] { return ExperimentConfig::default_setup().to_json().dump(); },
        "Default experiment config as JSON text.");
  m.def("normalize_config", [](const std::string& text) { return parse_config(text).to_json().dump(); },
        py::arg("config"), "Validate a config and return its fully expanded JSON.");

  m.def("layout", [](const std::string& config) { return layout_json(make_layout(parse_config(config))).dump(); },
        py::arg("config") = "");

  m.def(
      "assemble",
      [](const std::string& config, const std::string& grid) {
        const ExperimentConfig c = parse_config(config);
        if (grid != "simulation" && grid != "reconstruction") {
          throw ConfigError("grid must be 'simulation' or 'reconstruction'");
        }
        const PixelGrid g = grid == "simulation" ? simulation_grid(c) : reconstruction_grid(c);
        py::gil_scoped_release release;
        return build_operator(c, make_layout(c), g).matrix;
      },
      py::arg("config") = "", py::arg("grid") = "reconstruction");

  m.def(
      "phantom",
      [](const std::string& kind, std::size_t nx, std::size_t ny) {
        return to_image(rasterize(PhantomSpec::defaults(phantom_kind_from_string(kind)), PixelGrid::square(nx, ny)));
      },
      py::arg("kind"), py::arg("nx"), py::arg("ny"));

  m.def(
      "add_noise",
      [](const Vector& g, double snr_db, std::uint64_t seed) { return add_gaussian_noise(g, snr_db, seed).data; },
      py::arg("data"), py::arg("snr_db"), py::arg("seed"));

  m.def(
      "ssim", [](const RowImage& x, const RowImage& y, double dynamic_range) {
        return ssim(to_field(x), to_field(y), dynamic_range);
      },
      py::arg("x"), py::arg("y"), py::arg("dynamic_range"));

  m.def(
      "solve_tikhonov",
      [](const Matrix& K, const Vector& g, double alpha, bool positivity, double rho, std::size_t max_iterations,
         double tolerance) {
        const AdmmParams p = admm_params(alpha, rho, max_iterations, tolerance, positivity);
        py::gil_scoped_release release;
        const SolverReport r = solve_tikhonov(K, g, alpha, positivity, p);
        py::gil_scoped_acquire acquire;
        return report_dict(r);
      },
      py::arg("K"), py::arg("g"), py::arg("alpha"), py::arg("positivity") = true, py::arg("rho") = 1.0,
      py::arg("max_iterations") = 2000, py::arg("tolerance") = 1e-6);

  m.def(
      "solve_tv_admm",
      [](const Matrix& K, const Vector& g, double alpha, std::optional<std::array<std::size_t, 2>> shape,
         bool positivity, double rho, std::size_t max_iterations, double tolerance) {
        const AdmmParams p = admm_params(alpha, rho, max_iterations, tolerance, positivity);
        py::gil_scoped_release release;
        const SolverReport r = solve_tv_admm(K, g, line_or_image(K, shape), p);
        py::gil_scoped_acquire acquire;
        return report_dict(r);
      },
      py::arg("K"), py::arg("g"), py::arg("alpha"), py::arg("shape") = py::none(), py::arg("positivity") = true,
      py::arg("rho") = 1.0, py::arg("max_iterations") = 2000, py::arg("tolerance") = 1e-6);

  m.def(
      "solve_bregman",
      [](const Matrix& K, const Vector& g, double alpha, std::optional<std::array<std::size_t, 2>> shape,
         std::optional<double> noise_level, std::size_t max_outer, bool positivity, double rho,
         std::size_t max_iterations, double tolerance) {
        BregmanParams bp;
        bp.alpha = alpha;
        bp.inner = admm_params(alpha, rho, max_iterations, tolerance, positivity);
        bp.noise_level = noise_level;
        bp.max_outer = max_outer;
        py::gil_scoped_release release;
        const SolverReport r = solve_bregman(K, g, line_or_image(K, shape), bp);
        py::gil_scoped_acquire acquire;
        return report_dict(r);
      },
      py::arg("K"), py::arg("g"), py::arg("alpha"), py::arg("shape") = py::none(), py::arg("noise_level") = py::none(),
      py::arg("max_outer") = 50, py::arg("positivity") = true, py::arg("rho") = 1.0, py::arg("max_iterations") = 2000,
      py::arg("tolerance") = 1e-6);

  m.def(
      "run_experiment",
      [](const std::string& config, bool write_artifacts) {
        const ExperimentConfig c = parse_config(config);
        RunOptions options;
        options.write_artifacts = write_artifacts;
        ExperimentResult r;
        {
          py::gil_scoped_release release;
          r = run_experiment(c, options);
        }
        json best = json::array();
        for (const auto& e : r.best) best.push_back(evaluation_json(e));
        return best.dump();
      },
      py::arg("config"), py::arg("write_artifacts") = true,
      "Runs the full pipeline; returns the best-alpha evaluation records as JSON text.");
}
