// Python bindings: models, suites, brackets, determining systems.
#include "pk/numcheck.hpp"
#include "pk/suites.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace pk;

namespace {

py::dict suite_dict(const SuiteReport& r) {
  py::dict d;
  d["model"] = r.model;
  d["suite"] = r.suite;
  d["passed"] = r.passed();
  d["text"] = r.to_text();
  d["json"] = r.to_json();
  return d;
}

}  // namespace

PYBIND11_MODULE(pksym, mod) {
  mod.doc() = "Symbolic symmetry, superalgebra and numeric checks for Schroedinger-Pauli models";
  mod.attr("DEFAULT_SEED") = kDefaultSeed;
  mod.attr("DEFAULT_TRIALS") = kDefaultTrials;

  py::register_exception<ModelError>(mod, "ModelError", PyExc_ValueError);
  py::register_exception<UnknownSuite>(mod, "UnknownSuite", PyExc_ValueError);

  py::class_<ModelSpec>(mod, "Model")
      .def_readonly("name", &ModelSpec::name)
      .def_readonly("family", &ModelSpec::family)
      .def_readonly("dim", &ModelSpec::dim)
      .def_readonly("generator_names", &ModelSpec::generator_names)
      .def_readonly("operator_names", &ModelSpec::op_order)
      .def_readonly("document", &ModelSpec::document)
      .def_property_readonly("tables", [](const ModelSpec& m) {
        std::vector<std::string> out;
        for (const auto& t : m.tables) out.push_back(t.name);
        return out;
      })
      .def_property_readonly("relations", [](const ModelSpec& m) {
        std::vector<std::string> out;
        for (const auto& r : m.relations) out.push_back(r.name);
        return out;
      })
      .def_property_readonly("solution_count", [](const ModelSpec& m) { return m.solutions.size(); })
      .def_property_readonly("has_ansatz", [](const ModelSpec& m) { return m.ansatz.has_value(); })
      .def("canonical", [](const ModelSpec& m, const std::string& text) { return m.parse_expr(text).str(); },
           py::arg("text"), "canonical form of an expression over the model's symbols")
      .def("__repr__", [](const ModelSpec& m) { return "<Model " + m.name + ">"; });

  mod.def("builtin_names", &builtin_names);
  mod.def("load", &resolve_model, py::arg("id_or_path"), "builtin id or model file");
  mod.def("jc_generalized", &jc_generalized, py::arg("alpha") = "alpha", py::arg("beta") = "beta",
          py::arg("phi") = "0");
  mod.def("export", &export_model, py::arg("model"));
  mod.def("save", &save_model, py::arg("model"), py::arg("path"));

  mod.def("canonical", [](const std::string& text) { return parse(text).str(); }, py::arg("text"));
  mod.def(
      "is_zero", [](const std::string& text, uint64_t seed, int trials) { return is_zero(parse(text), seed, trials).zero; },
      py::arg("text"), py::arg("seed") = kDefaultSeed, py::arg("trials") = kDefaultTrials);

  mod.def("suite_names", &suite_names);
  mod.def(
      "verify",
      [](const ModelSpec& m, const std::string& suite, uint64_t seed, int trials, bool shift) {
        return suite_dict(run_suite(m, suite, {seed, trials, shift}));
      },
      py::arg("model"), py::arg("suite") = "all", py::arg("seed") = kDefaultSeed,
      py::arg("trials") = kDefaultTrials, py::arg("alpha_beta_shift") = false);

  mod.def(
      "bracket",
      [](const ModelSpec& m, const std::string& a, const std::string& b, uint64_t seed, int trials) {
        BracketResult r = bracket_names(m, a, b, seed, trials);
        py::dict d;
        d["kind"] = r.kind;
        d["in_span"] = r.expansion.in_span;
        d["basis"] = r.basis;
        d["text"] = r.str();
        py::dict coeffs;
        if (r.expansion.in_span)
          for (size_t k = 0; k < r.expansion.names.size(); ++k)
            if (!r.expansion.coeffs[k].is_zero()) coeffs[py::str(r.expansion.names[k])] = r.expansion.coeffs[k].str();
        d["coefficients"] = coeffs;
        return d;
      },
      py::arg("model"), py::arg("a"), py::arg("b"), py::arg("seed") = kDefaultSeed,
      py::arg("trials") = kDefaultTrials);

  mod.def(
      "verify_table",
      [](const ModelSpec& m, const std::string& table, uint64_t seed, int trials) {
        TableReport r = verify_table(m, table, seed, trials);
        py::dict d;
        d["passed"] = r.passed();
        d["matches"] = r.matches();
        d["cells"] = r.cells.size();
        d["json"] = r.to_json();
        return d;
      },
      py::arg("model"), py::arg("table"), py::arg("seed") = kDefaultSeed, py::arg("trials") = kDefaultTrials);

  mod.def(
      "check_relation",
      [](const ModelSpec& m, const std::string& name, uint64_t seed, int trials) {
        for (const auto& r : m.relations)
          if (r.name == name) return check_relation(m, r, seed, trials).pass();
        throw py::key_error(name);
      },
      py::arg("model"), py::arg("name"), py::arg("seed") = kDefaultSeed, py::arg("trials") = kDefaultTrials);

  mod.def(
      "derive",
      [](const ModelSpec& m, int order) {
        DeterminingSystem det = determining_system(m, order);
        py::dict d;
        d["count"] = det.equations.size();
        d["findings"] = det.findings;
        d["json"] = det.to_json();
        return d;
      },
      py::arg("model"), py::arg("order") = 2);

  mod.def(
      "check_ansatz",
      [](const ModelSpec& m, uint64_t seed, int trials) { return check_ansatz(m, seed, trials).passed(); },
      py::arg("model"), py::arg("seed") = kDefaultSeed, py::arg("trials") = kDefaultTrials);

  mod.def(
      "generator_residual",
      [](const ModelSpec& m, const std::string& gen, size_t solution, uint64_t seed) {
        if (solution >= m.solutions.size()) throw py::index_error("no solution " + std::to_string(solution));
        return generator_residual(m, m.op(gen.empty() ? gen : canonical_op_name(gen)), m.solutions[solution], seed)
            .value;
      },
      py::arg("model"), py::arg("generator"), py::arg("solution") = 0, py::arg("seed") = kDefaultSeed);

  mod.def(
      "finite_suite", [](const ModelSpec& m, double lambda, uint64_t seed) { return finite_json(finite_suite(m, lambda, seed)); },
      py::arg("model"), py::arg("lam") = 0.3, py::arg("seed") = kDefaultSeed, "JSON rows");
}
