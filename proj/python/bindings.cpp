#include "crequiv/suites.hpp"
#include "crequiv/vecfield.hpp"

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace crequiv;

namespace {

Letter letterFromName(const std::string& name) {
  for (Letter l : kLetters)
    if (letterName(l) == name) return l;
  throw py::value_error("unknown frame letter " + name);
}

std::string runCommand(const std::string& command, const std::vector<std::string>& checks, bool flat, bool trace,
                       const std::string& goldens) {
  RunConfig cfg{command};
  cfg.checks = checks;
  cfg.flat = flat;
  cfg.trace = trace;
  if (!goldens.empty()) cfg.goldensPath = goldens;
  validateConfig(cfg);
  Report r;
  {
    py::gil_scoped_release release;
    r = run(cfg);
  }
  return toJson(r).dump();
}

}  // namespace

PYBIND11_MODULE(_crequiv, m) {
  m.doc() = "Cartan equivalence engine for Class III_1 CR manifolds";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ScalarError>(m, "ScalarError", PyExc_ValueError);

  py::class_<ScalarExpr>(m, "Scalar")
      .def(py::init([](const std::string& text) { return ScalarExpr::parse(text); }), py::arg("text"))
      .def(py::init([](long v) { return ScalarExpr(v); }))
      .def("conjugate", [](const ScalarExpr& x) { return conjugate(x); })
      .def("derive", [](const ScalarExpr& x, const std::string& l) { return derive(x, letterFromName(l)); },
           py::arg("letter"))
      .def("flatten", [](const ScalarExpr& x) { return flatten(x); })
      .def("is_zero", &ScalarExpr::isZero)
      .def("has_group", &ScalarExpr::hasGroup)
      .def("latex", &ScalarExpr::latex)
      .def("__len__", &ScalarExpr::size)
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(py::self * py::self)
      .def(py::self / py::self)
      .def(-py::self)
      .def(py::self == py::self)
      .def("__hash__", [](const ScalarExpr& x) { return py::hash(py::str(x.str())); })
      .def("__str__", &ScalarExpr::str)
      .def("__repr__", [](const ScalarExpr& x) { return "Scalar('" + x.str() + "')"; });

  m.def("reorder", [](const std::vector<std::string>& word, const std::string& symbol) {
        Word w;
        for (const auto& s : word) w.push_back(letterFromName(s));
        ScalarExpr x = ScalarExpr::parse(symbol);
        return applyWord(w, x);
      },
      py::arg("word"), py::arg("symbol"), "Apply a derivation word (outermost first) and return the canonical form.");

  py::class_<LieAlgebra>(m, "LieAlgebra")
      .def_static("from_json", &LieAlgebra::fromJson)
      .def_property_readonly("labels", &LieAlgebra::labels)
      .def_property_readonly("dim", &LieAlgebra::dim)
      .def("bracket",
           [](const LieAlgebra& l, const std::string& x, const std::string& y) {
             py::dict out;
             auto v = l.bracket(l.index(x), l.index(y));
             for (std::size_t k = 0; k < v.size(); ++k)
               if (!v[k].isZero()) out[py::str(l.labels()[k])] = v[k].str();
             return out;
           })
      .def("jacobi_violations", [](const LieAlgebra& l) {
        std::vector<std::tuple<std::string, std::string, std::string>> out;
        for (const auto& v : l.jacobiResidual()) out.emplace_back(l.labels()[v.i], l.labels()[v.j], l.labels()[v.k]);
        return out;
      });

  m.def("g7", &g7);
  m.def("g7_printed", &g7Printed);
  m.def("n54", &n54);
  m.def("automorphism_table", &autTable);

  m.def("automorphism_fields", [] {
    std::vector<std::pair<std::string, std::map<std::string, std::string>>> out;
    for (const auto& [name, f] : automorphismFields()) {
      std::map<std::string, std::string> comps;
      for (const auto& v : f.chart().vars) {
        const Poly& p = f.component(v);
        if (!p.isZero()) comps[v] = p.str(f.chart().vars);
      }
      out.emplace_back(name, comps);
    }
    return out;
  }, "The 7 automorphism fields on (z, w1, w2, w3) as {coordinate: polynomial} maps.");

  m.def("commands", &commandNames);
  m.def("check_names", &checkNames, py::return_value_policy::copy);
  m.def("run_json", &runCommand, py::arg("command"), py::arg("checks") = std::vector<std::string>{},
        py::arg("flat") = false, py::arg("trace") = false, py::arg("goldens") = std::string());
}
