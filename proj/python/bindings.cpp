#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "czlab/config.hpp"
#include "czlab/errors.hpp"
#include "czlab/experiments.hpp"
#include "czlab/kernel.hpp"
#include "czlab/shift_family.hpp"
#include "czlab/verify.hpp"

namespace py = pybind11;
using namespace czlab;

namespace {

DyadicPoint to_point(const std::vector<std::int64_t>& coords) { return make_point(coords); }

ShiftFamilySpec make_spec(double delta, int complexity_cap, const std::string& lambda_rule, const std::string& family,
                          std::uint64_t coeff_seed, const std::map<std::pair<int, int>, double>& lambda_table) {
  ShiftFamilySpec s;
  s.delta = delta;
  s.complexity_cap = complexity_cap;
  s.lambda_rule = parse_lambda_rule(lambda_rule);
  s.family = parse_coefficient_family(family);
  s.coeff_seed = coeff_seed;
  s.lambda_table = lambda_table;
  s.validate();
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Random dyadic grids, Haar shifts and their averaged kernels";

  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  py::class_<ScaleWindow>(m, "ScaleWindow")
      .def(py::init([](int k_min, int k_max, int dim) {
             ScaleWindow w{k_min, k_max, dim};
             w.validate();
             return w;
           }),
           py::arg("k_min") = -14, py::arg("k_max") = 6, py::arg("dim") = 1)
      .def_readonly("k_min", &ScaleWindow::k_min)
      .def_readonly("k_max", &ScaleWindow::k_max)
      .def_readonly("dim", &ScaleWindow::dim)
      .def("unit", &ScaleWindow::unit)
      .def("__repr__", [](const ScaleWindow& w) {
        return "ScaleWindow(k_min=" + std::to_string(w.k_min) + ", k_max=" + std::to_string(w.k_max) +
               ", dim=" + std::to_string(w.dim) + ")";
      });

  py::class_<ShiftFamilySpec>(m, "ShiftFamilySpec")
      .def(py::init(&make_spec), py::arg("delta") = 0.5, py::arg("complexity_cap") = -1,
           py::arg("lambda_rule") = "default", py::arg("family") = "cancellative", py::arg("coeff_seed") = 0,
           py::arg("lambda_table") = std::map<std::pair<int, int>, double>{})
      .def_readonly("delta", &ShiftFamilySpec::delta)
      .def_property_readonly("cap", &ShiftFamilySpec::cap)
      .def_property_readonly("family", [](const ShiftFamilySpec& s) { return to_string(s.family); })
      .def_property_readonly("lambda_rule", [](const ShiftFamilySpec& s) { return to_string(s.lambda_rule); })
      .def_readonly("coeff_seed", &ShiftFamilySpec::coeff_seed);

  py::class_<GridShift>(m, "GridShift")
      .def(py::init<ScaleWindow>(), py::arg("window"))
      .def_static("sample", &sample_grid, py::arg("window"), py::arg("seed"), py::arg("index") = 0)
      .def("offset", [](const GridShift& g, int k) {
        const Coords& c = g.offset(k);
        return std::vector<std::int64_t>(c.begin(), c.begin() + g.window().dim);
      })
      .def_property_readonly("digest", &GridShift::digest)
      .def("to_json", [](const GridShift& g) { return g.to_json().dump(); });

  m.def("cube_at", [](const std::vector<std::int64_t>& x, int k, const GridShift& g) {
    const DyadicCube q = cube_at(to_point(x), k, g);
    return py::make_tuple(std::vector<std::int64_t>(q.corner.begin(), q.corner.begin() + q.dim), q.side);
  }, py::arg("x"), py::arg("k"), py::arg("omega"), "Corner and side (base units) of the scale-k cube holding x.");

  m.def("kernel_omega", [](const std::vector<std::int64_t>& x, const std::vector<std::int64_t>& y, const GridShift& g,
                           const ShiftFamilySpec& spec) { return kernel_omega(to_point(x), to_point(y), g, spec); },
        py::arg("x"), py::arg("y"), py::arg("omega"), py::arg("spec"));

  m.def("estimate_kernel",
        [](const std::vector<std::int64_t>& x, const std::vector<std::int64_t>& y, const ShiftFamilySpec& spec,
           const ScaleWindow& w, std::uint64_t n_samples, std::uint64_t seed, unsigned threads) {
          SamplingOptions opt;
          opt.threads = threads;
          const KernelEstimate e = estimate_kernel(to_point(x), to_point(y), spec, w, n_samples, seed, opt);
          return to_json(e, w, spec_digest(w, spec)).dump();
        },
        py::arg("x"), py::arg("y"), py::arg("spec"), py::arg("window"), py::arg("n_samples"), py::arg("seed") = 1,
        py::arg("threads") = 1);

  m.def("boundary_probability", &boundary_probability, py::arg("tau"), py::arg("dim"));
  m.def("complexity_tail", &complexity_tail, py::arg("delta"), py::arg("cap"));
  m.def("window_constant", &window_constant, py::arg("window"), py::arg("r"));
  m.def("size_bound", &size_bound, py::arg("spec"), py::arg("window"), py::arg("r"));
  m.def("truncation_tail_bound", [](const ShiftFamilySpec& spec, const ScaleWindow& w, double r) {
    const TruncationBound b = truncation_tail_bound(spec, w, r);
    return py::dict(py::arg("complexity_tail") = b.complexity_tail, py::arg("above_window") = b.above_window,
                    py::arg("below_window") = b.below_window, py::arg("total") = b.total());
  }, py::arg("spec"), py::arg("window"), py::arg("r"));
  m.def("lambda_value", &lambda, py::arg("spec"), py::arg("m"), py::arg("n"), py::arg("omega_digest") = 0);

  m.def("spec_digest", &spec_digest, py::arg("window"), py::arg("spec"));
  m.def("canonical_config", [](const std::string& text) { return serialize(parse_config(text)); }, py::arg("text"),
        "Parse a key = value config and return its canonical text.");
  m.def("run", [](const std::string& text) {
    const RunConfig c = parse_config(text);
    SweepReport r;
    {
      py::gil_scoped_release release;
      r = run_experiment(c);
    }
    return report_json_with_config(r, c).dump();
  }, py::arg("config_text"), "Run an experiment; returns the JSON summary.");
  m.def("report_csv", [](const std::string& text) { return to_csv(run_experiment(parse_config(text))); },
        py::arg("config_text"));
}
