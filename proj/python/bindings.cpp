#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "freqinv/pipeline.hpp"
#include "freqinv/verify.hpp"

namespace py = pybind11;
using namespace freqinv;

namespace {

// Nodal field as an (n, n, n) array indexed [i1, i2, i3] along x1, x2, x3.
template <typename Scalar>
py::array_t<Scalar> as_cube(const Grid3& g, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& f) {
  const auto n = static_cast<py::ssize_t>(g.nodes_per_axis());
  const auto s = static_cast<py::ssize_t>(sizeof(Scalar));
  py::array_t<Scalar> out({n, n, n}, {s, s * n, s * n * n});
  std::copy(f.data(), f.data() + f.size(), out.mutable_data());
  return out;
}

py::dict summary_dict(const Summary& s) {
  py::dict d;
  d["max_c"] = s.max_c;
  d["argmax"] = s.argmax;
  d["centroids"] = s.centroids;
  d["true_max"] = s.true_max;
  d["relative_error_pct"] = s.relative_error_pct;
  d["stage_seconds"] = s.stage_seconds;
  return d;
}

}  // namespace

PYBIND11_MODULE(_freqinv, m) {
  m.doc() = "Frequency-stepping reconstruction of a dielectric coefficient";

  // Translators run newest first, so the base class goes in first.
  py::register_exception<Error>(m, "FreqinvError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<Inclusion>(m, "Inclusion")
      .def(py::init<>())
      .def(py::init([](Point c, double side, double contrast) {
             return Inclusion{c, side, contrast};
           }),
           py::arg("center"), py::arg("side"), py::arg("contrast"))
      .def_readwrite("center", &Inclusion::center)
      .def_readwrite("side", &Inclusion::side)
      .def_readwrite("contrast", &Inclusion::contrast);

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("name", &Scenario::name)
      .def_readwrite("A", &Scenario::A)
      .def_readwrite("A1", &Scenario::A1)
      .def_readwrite("step", &Scenario::step)
      .def_readwrite("k_low", &Scenario::k_low)
      .def_readwrite("k_high", &Scenario::k_high)
      .def_readwrite("h", &Scenario::h)
      .def_readwrite("m", &Scenario::m)
      .def_readwrite("n_bar", &Scenario::n_bar)
      .def_readwrite("noise_level", &Scenario::noise_level)
      .def_readwrite("seed", &Scenario::seed)
      .def_property(
          "tail_mode", [](const Scenario& s) { return std::string(to_string(s.tail_mode)); },
          [](Scenario& s, const std::string& v) { s.tail_mode = tail_mode_from_string(v); })
      .def_readwrite("inclusions", &Scenario::inclusions)
      .def("validate", [](const Scenario& s) { validate(s); })
      .def("to_json", &serialize_scenario)
      .def("__eq__", [](const Scenario& a, const Scenario& b) { return a == b; });

  m.def("parse_scenario", &parse_scenario, py::arg("text"));
  m.def("load_scenario", &load_scenario, py::arg("path"));

  m.def(
      "ladder",
      [](double k_low, double k_high, double h) {
        const FrequencyLadder l = FrequencyLadder::make(k_low, k_high, h);
        std::vector<double> k, a;
        for (int n = 0; n <= l.N; ++n) k.push_back(l.k(n));
        for (int n = 1; n <= l.N; ++n) a.push_back(l.A(n));
        return py::make_tuple(k, a);
      },
      py::arg("k_low"), py::arg("k_high"), py::arg("h"),
      "Frequencies k_0 = k_high > ... > k_N = k_low and the weights A_1..A_N.");

  py::class_<ForwardResult>(m, "ForwardResult")
      .def_property_readonly("seconds", [](const ForwardResult& r) { return r.seconds; })
      .def_property_readonly("coefficient",
                             [](const ForwardResult& r) {
                               return as_cube(r.medium.grid, r.medium.c);
                             })
      .def_property_readonly("u_kbar",
                             [](const ForwardResult& r) {
                               return as_cube(r.field_kbar.grid, r.field_kbar.u);
                             })
      .def_property_readonly("trace_points",
                             [](const ForwardResult& r) {
                               std::vector<Point> p;
                               for (std::size_t idx : r.data.measured.nodes)
                                 p.push_back(r.data.measured.grid.point(idx));
                               return p;
                             })
      .def_property_readonly("traces", [](const ForwardResult& r) {
        const auto& v = r.data.measured.values;
        const auto rows = static_cast<py::ssize_t>(v.size());
        const auto cols = static_cast<py::ssize_t>(v.empty() ? 0 : v[0].size());
        py::array_t<cplx> out({rows, cols});
        for (py::ssize_t n = 0; n < rows; ++n)
          std::copy(v[n].data(), v[n].data() + cols, out.mutable_data(n, 0));
        return out;
      });

  m.def("forward", [](const Scenario& s) { return run_forward(s); }, py::arg("scenario"),
        py::call_guard<py::gil_scoped_release>(),
        "Builds the medium on G and solves the forward problem over the ladder.");

  py::class_<InversionResult>(m, "InversionResult")
      .def_property_readonly("c",
                             [](const InversionResult& r) {
                               return as_cube(r.state.grid, r.state.c);
                             })
      .def_property_readonly("summary",
                             [](const InversionResult& r) { return summary_dict(r.summary); })
      .def_property_readonly("cylinders",
                             [](const InversionResult& r) {
                               std::vector<std::pair<double, double>> c;
                               for (const auto& cy : r.state.cylinders) c.emplace_back(cy.x1, cy.x2);
                               return c;
                             })
      .def_property_readonly("history", [](const InversionResult& r) {
        py::list out;
        for (const auto& rec : r.state.history) {
          py::dict d;
          d["n"] = rec.n;
          d["i"] = rec.i;
          d["k"] = rec.k;
          d["max_c"] = rec.max_c;
          d["min_c"] = rec.min_c;
          d["error_max"] = rec.error_max;
          out.append(d);
        }
        return out;
      });

  m.def(
      "invert",
      [](const Scenario& s, const ForwardResult& f, const std::string& coupling,
         bool track_error) {
        InversionRunOptions o;
        o.coupling = q_coupling_from_string(coupling);
        o.track_error = track_error;
        py::gil_scoped_release release;
        return run_inversion(s, f.data, o);
      },
      py::arg("scenario"), py::arg("forward"), py::arg("coupling") = "implicit",
      py::arg("track_error") = false,
      "Adds noise to the measured traces and runs the frequency sweep.");

  m.def(
      "write_field_vtk",
      [](const std::filesystem::path& path, const InversionResult& r) {
        write_field_vtk(path, r.state.grid, r.state.c, "c");
      },
      py::arg("path"), py::arg("result"));

  m.def("plane_wave_error", [](double a, double step, double k) {
    return plane_wave_error(a, step, k);
  }, py::arg("half_width"), py::arg("step"), py::arg("k"));

  m.def(
      "verify",
      [](bool full, double tolerance) {
        std::vector<std::tuple<std::string, bool, std::string>> out;
        for (const auto& r : run_verify({full, tolerance}))
          out.emplace_back(r.name, r.passed, r.detail);
        return out;
      },
      py::arg("full") = false, py::arg("tolerance") = 1e-8,
      py::call_guard<py::gil_scoped_release>());
}
