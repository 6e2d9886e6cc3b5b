#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qqm/errors.hpp"
#include "qqm/identities.hpp"
#include "qqm/quaternion.hpp"
#include "qqm/scenario.hpp"

namespace py = pybind11;
using namespace qqm;

namespace {

QVector3 to_qvec(const std::vector<Quaternion>& v) {
  if (v.size() != 3) throw py::value_error("expected three quaternions");
  return {{v[0], v[1], v[2]}};
}

std::vector<Quaternion> from_qvec(const QVector3& v) { return {v[0], v[1], v[2]}; }

ScenarioConfig config_from_text(const std::string& text) {
  ParseResult r = parse_config(text);
  if (!r.config) {
    std::string msg;
    for (const auto& e : r.errors) msg += (msg.empty() ? "" : "\n") + e;
    throw ConfigError(msg);
  }
  return *r.config;
}

}  // namespace

PYBIND11_MODULE(_qqmlab, m) {
  m.doc() = "Quaternionic wave mechanics on a lattice";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<Quaternion>(m, "Quaternion")
      .def(py::init<>())
      .def(py::init<double, double, double, double>(), py::arg("x0"), py::arg("x1") = 0.0,
           py::arg("x2") = 0.0, py::arg("x3") = 0.0)
      .def_property_readonly("x0", &Quaternion::x0)
      .def_property_readonly("x1", &Quaternion::x1)
      .def_property_readonly("x2", &Quaternion::x2)
      .def_property_readonly("x3", &Quaternion::x3)
      .def("components", [](const Quaternion& q) { return q.components(); })
      .def("conj", [](const Quaternion& q) { return qconj(q); })
      .def("norm2", [](const Quaternion& q) { return norm2(q); })
      .def("__abs__", [](const Quaternion& q) { return abs(q); })
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(py::self * py::self)
      .def("inverse", [](const Quaternion& q) {
        if (norm2(q) == 0.0) throw py::value_error("zero quaternion has no inverse");
        return qconj(q) / norm2(q);
      })
      .def(double() * py::self)
      .def(py::self == py::self)
      .def("__repr__", [](const Quaternion& q) {
        std::ostringstream s;
        s.precision(17);
        s << "Quaternion(" << q.x0() << ", " << q.x1() << ", " << q.x2() << ", " << q.x3() << ")";
        return s.str();
      });

  m.def("qcross", [](const std::vector<Quaternion>& x, const std::vector<Quaternion>& y) {
    return from_qvec(qcross(to_qvec(x), to_qvec(y)));
  }, "Quaternionic vector product of two 3-vectors of quaternions.");
  m.def("ordered_cross", [](const std::vector<Quaternion>& x, const std::vector<Quaternion>& y) {
    return from_qvec(ordered_cross(to_qvec(x), to_qvec(y)));
  });

  m.def(
      "check_identities",
      [](int dims, int n1d, int n3d, double min_order, bool flip_kappa, unsigned long long seed) {
        IdentityOptions o;
        o.dims = dims;
        o.n1d = n1d;
        o.n3d = n3d;
        o.min_order = min_order;
        o.flip_kappa = flip_kappa;
        o.seed = seed;
        std::vector<IdentityResult> results;
        {
          py::gil_scoped_release release;
          results = check_identities(o);
        }
        py::list out;
        for (const auto& r : results) {
          py::dict d;
          d["name"] = r.name;
          d["gauge"] = r.gauge;
          d["status"] = r.status;
          d["coarse"] = r.coarse;
          d["fine"] = r.fine;
          d["order"] = r.order;
          d["scale"] = r.scale;
          out.append(d);
        }
        return out;
      },
      py::arg("dims") = 3, py::arg("n1d") = 256, py::arg("n3d") = 32, py::arg("min_order") = 1.9,
      py::arg("flip_kappa") = false, py::arg("seed") = 2024);

  m.def(
      "parse_config",
      [](const std::string& text) {
        ParseResult r = parse_config(text);
        py::dict d;
        d["errors"] = r.errors;
        d["warnings"] = r.warnings;
        d["canonical"] = r.config ? py::cast(format_config(*r.config)) : py::none();
        return d;
      },
      "Parses config text. Returns errors, warnings and the canonical text (None on error).");

  m.def(
      "run_scenario",
      [](const std::string& text, int resolution_scale) {
        ScenarioResult r;
        {
          py::gil_scoped_release release;
          r = run_scenario(scaled(config_from_text(text), resolution_scale));
        }
        py::dict d;
        d["report"] = r.report.dump();
        d["meta"] = r.meta.dump();
        d["csv"] = r.csv;
        return d;
      },
      py::arg("text"), py::arg("resolution_scale") = 1,
      "Runs a scenario given as config text; report and meta come back as JSON strings.");

  m.def("known_suites", &known_suites);
  m.def("potential_catalog", &potential_catalog);
}
