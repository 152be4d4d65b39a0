#include "pk/models.hpp"

#include "json.hpp"

#include <cmath>
#include <mutex>
#include <numeric>
#include <set>

namespace pk {

using json = nlohmann::ordered_json;

namespace {

using Strs = std::vector<std::string>;

json dependents(int q) {
  json a = json::array();
  for (int k = 1; k <= q; ++k) a.push_back({{"name", "u" + std::to_string(k)}});
  for (int k = 1; k <= q; ++k)
    a.push_back({{"name", "cu" + std::to_string(k)}, {"conjugate_of", "u" + std::to_string(k)}});
  return a;
}

json real(const std::string& n) { return {{"name", n}, {"domain", "real"}}; }
json cpx(const std::string& n, const std::string& c) { return {{"name", n}, {"domain", "complex"}, {"conjugate", c}}; }
json def(const std::string& n, const std::string& d) { return {{"name", n}, {"definition", d}}; }

json op(const std::string& n, const std::string& text, const std::string& parity = "even", int dim = 0) {
  json o = {{"name", n}, {"op", text}, {"parity", parity}};
  if (dim) o["dim"] = dim;
  return o;
}

json product(const std::string& n, const Strs& factors, const std::string& scale, const std::string& parity) {
  return {{"name", n}, {"factors", factors}, {"scale", scale}, {"parity", parity}};
}

struct TableDef {
  std::string name;
  Strs rows, cols, basis;
  bool graded;
  std::string mode;
  std::vector<Strs> values;  // row-major, "" for cells not tabulated
  std::set<std::pair<std::string, std::string>> suspect;
  std::string substitution = {};
};

json table(const TableDef& t) {
  json cells = json::array();
  for (size_t r = 0; r < t.rows.size(); ++r)
    for (size_t c = 0; c < t.cols.size(); ++c) {
      const std::string& v = t.values[r][c];
      if (v.empty()) continue;
      json cell = {{"row", t.rows[r]}, {"col", t.cols[c]}, {"value", v}};
      if (t.suspect.count({t.rows[r], t.cols[c]})) cell["suspect"] = true;
      cells.push_back(cell);
    }
  json j = {{"name", t.name},   {"rows", t.rows},         {"cols", t.cols}, {"basis", t.basis.empty() ? t.cols : t.basis},
            {"graded", t.graded}, {"mode", t.mode}};
  if (!t.substitution.empty()) j["substitution"] = t.substitution;
  j["cells"] = cells;
  return j;
}

json rel(const std::string& n, const std::string& lhs, const std::string& rhs, const std::string& mode = "exact",
         const std::string& subst = "", bool expect = true) {
  json r = {{"name", n}, {"lhs", lhs}, {"rhs", rhs}, {"mode", mode}};
  if (!subst.empty()) r["substitution"] = subst;
  r["expect_equal"] = expect;
  return r;
}

json closure(const std::string& n, const Strs& basis, bool graded, const std::string& mode, const std::string& subst,
             bool expect, const json& probes = json::array()) {
  json c = {{"name", n}, {"basis", basis}, {"graded", graded}, {"mode", mode}};
  if (!subst.empty()) c["substitution"] = subst;
  c["expect_closed"] = expect;
  c["probes"] = probes;
  return c;
}

Strs names(const std::string& prefix, int from, int to) {
  Strs out;
  for (int k = from; k <= to; ++k) out.push_back(prefix + std::to_string(k));
  return out;
}

// Stores solutions 0..n in the document, then reparses so the document is canonical.
ModelSpec finish(json doc, int n) {
  ModelSpec m = model_from_json(doc.dump());
  json sols = json::array();
  for (const auto& s : exact_solutions(m, n)) {
    json row = json::array();
    for (const auto& c : s) row.push_back(c.str());
    sols.push_back(row);
  }
  doc["solutions"] = sols;
  return model_from_json(doc.dump());
}

// ---------------------------------------------------------------- supersymmetric oscillator

json oscillator_doc() {
  json d;
  d["name"] = "susy_oscillator";
  d["family"] = "susy_oscillator";
  d["coordinates"] = {"t", "x"};
  d["dependents"] = dependents(2);
  d["parameters"] = {real("w"), real("M")};
  d["hamiltonian"] = "(-1/(2*M)*Dx^2 + M*w^2*x^2/2)*s0 - w/2*s3";
  d["grading"] = "s3";
  d["operators"] = {
      op("ax", "1/sqrt(2*M*w)*(M*w*x + Dx)"),
      op("axd", "1/sqrt(2*M*w)*(M*w*x - Dx)"),
      op("H0", "i*Dt + w/2*s3"),
      op("Cm", "exp(2*i*w*t)/2*((Dt + i*w*x*Dx + i*M*w^2*x^2 + i*w/2)*s0 - i*w/2*s3)"),
      op("Cp", "exp(-2*i*w*t)/2*((Dt - i*w*x*Dx + i*M*w^2*x^2 - i*w/2)*s0 - i*w/2*s3)"),
      op("Am", "1/sqrt(2*M*w)*exp(i*w*t)*(M*w*x + Dx)"),
      op("Ap", "1/sqrt(2*M*w)*exp(-i*w*t)*(M*w*x - Dx)"),
      op("I", "s0"),
      op("Tp", "exp(i*w*t)*sp", "odd"),
      op("Tm", "exp(-i*w*t)*sm", "odd"),
      op("Y", "s3/2"),
  };
  d["generators"] = {
      op("X1", "1/(2*w)*sin(2*w*t)*Dt + x/2*cos(2*w*t)*Dx + 1/4*cos(2*w*t) + i*M*w*x^2/2*sin(2*w*t)"
               " - i/4*sin(2*w*t)*s3"),
      op("X2", "-1/(2*w)*cos(2*w*t)*Dt + x/2*sin(2*w*t)*Dx + 1/4*sin(2*w*t) - i*M*w*x^2/2*cos(2*w*t)"
               " + i/4*cos(2*w*t)*s3"),
      op("X3", "Dt - i*w/2*s3"),
      op("X4", "cos(w*t)*Dx + i*M*w*x*sin(w*t)"),
      op("X5", "sin(w*t)*Dx - i*M*w*x*cos(w*t)"),
      op("X6", "-i*s0"),
      op("X7", "-exp(i*w*t)*sp", "odd"),
      op("X8", "-exp(-i*w*t)*sm", "odd"),
      op("X9", "s3"),
      op("X10", "i*exp(i*w*t)*sp", "odd"),
      op("X11", "i*exp(-i*w*t)*sm", "odd"),
      op("X12", "-i*s3"),
      op("X13", "-s0"),
  };
  d["products"] = {
      product("Qp", {"Tp", "Ap"}, "sqrt(w)", "odd"),
      product("Qm", {"Tm", "Am"}, "sqrt(w)", "odd"),
      product("Sp", {"Tp", "Am"}, "sqrt(w)", "odd"),
      product("Sm", {"Tm", "Ap"}, "sqrt(w)", "odd"),
  };

  Strs t1 = names("X", 1, 6);
  TableDef T1{"bosonic", t1, t1, {}, false, "exact",
              {{"0", "1/(2*w)*X3", "2*w*X2", "-1/2*X4", "1/2*X5", "0"},
               {"-1/(2*w)*X3", "0", "-2*w*X1", "-1/2*X5", "-1/2*X4", "0"},
               {"-2*w*X2", "2*w*X1", "0", "-w*X5", "w*X4", "0"},
               {"1/2*X4", "1/2*X5", "w*X5", "0", "M*w*X6", "0"},
               {"-1/2*X5", "1/2*X4", "-w*X4", "-M*w*X6", "0", "0"},
               {"0", "0", "0", "0", "0", "0"}},
              {}};
  Strs t2 = names("X", 7, 12);
  TableDef T2{"spin", t2, t2, {}, false, "exact",
              {{"0", "X9", "-2*X7", "0", "X12", "-2*X10"},
               {"-X9", "0", "2*X8", "-X12", "0", "2*X11"},
               {"2*X7", "-2*X8", "0", "2*X10", "-2*X11", "0"},
               {"0", "X12", "-2*X10", "0", "-X9", "2*X7"},
               {"-X12", "0", "2*X11", "X9", "0", "-2*X8"},
               {"2*X10", "-2*X11", "0", "-2*X7", "2*X8", "0"}},
              {}};
  Strs all12 = names("X", 1, 12);
  TableDef T2c{"central", {"X13"}, all12, names("X", 1, 13), false, "exact", {Strs(12, "0")}, {}};
  Strs osp = {"H0", "Cm", "Cp", "Y", "Qm", "Qp", "Sm", "Sp"};
  TableDef T3{"osp22", osp, osp, {}, true, "onshell",
              {{"0", "-2*w*Cm", "2*w*Cp", "0", "-w*Qm", "w*Qp", "w*Sm", "-w*Sp"},
               {"2*w*Cm", "0", "-w*H0", "0", "0", "i*w*Sp", "i*w*Qm", "0"},
               {"-2*w*Cp", "w*H0", "0", "0", "-i*w*Sm", "0", "0", "-i*w*Qp"},
               {"0", "0", "0", "0", "-Qm", "Qp", "-Sm", "Sp"},
               {"w*Qm", "0", "i*w*Sm", "Qm", "0", "H0 - w*Y", "0", "-2*i*Cm"},
               {"w*Qp", "i*w*Sp", "0", "-Qp", "H0 - w*Y", "0", "-2*i*Cp", "0"},
               {"-w*Sm", "-i*w*Qm", "0", "2*Sm", "0", "-2*i*Cp", "0", "H0 + w*Y"},
               {"w*Sp", "0", "i*w*Qp", "-2*Sm", "-2*i*Cm", "0", "H0 + w*Y", "0"}},
              {{"Qp", "H0"}, {"Qp", "Cm"}, {"Sm", "Y"}, {"Sp", "Y"}}};
  Strs t4rows = {"Am", "Ap", "I", "Tm", "Tp"};
  Strs t4basis = osp;
  t4basis.insert(t4basis.end(), t4rows.begin(), t4rows.end());
  TableDef T4{"osp22_extension", t4rows, osp, t4basis, true, "onshell",
              {{"w*Am", "0", "i*w*Ap", "0", "0", "sqrt(w)*Tp", "sqrt(w)*Tm", "0"},
               {"-w*Ap", "-i*w*Am", "0", "0", "-sqrt(w)*Tm", "0", "0", "-sqrt(w)*Tp"},
               Strs(8, "0"),
               {"0", "0", "0", "Tm", "0", "sqrt(w)*Ap", "0", "sqrt(w)*Am"},
               {"0", "0", "0", "-Tp", "sqrt(w)*Am", "0", "sqrt(w)*Ap", "0"}},
              {}};
  d["tables"] = {table(T1), table(T2), table(T2c), table(T3), table(T4)};
  d["relations"] = {
      rel("QpQm_onshell", "anti(Qp,Qm)", "H0 - w*Y", "onshell"),
      rel("QpQm_hamiltonian", "anti(Qp,Qm)", "H"),
      rel("Qp_nilpotent", "Qp*Qp", "0"),
      rel("Qm_nilpotent", "Qm*Qm", "0"),
      rel("H_Qp", "comm(H,Qp)", "0"),
      rel("H_Qm", "comm(H,Qm)", "0"),
      rel("SmSp_onshell", "anti(Sm,Sp)", "H0 + w*Y", "onshell"),
      rel("QpSm", "anti(Qp,Sm)", "-2*i*Cp", "onshell"),
      rel("Sp_symmetry", "comm(i*Dt - H, Sp)", "0"),
      rel("Sm_symmetry", "comm(i*Dt - H, Sm)", "0"),
  };
  d["closures"] = {closure("generators", names("X", 1, 13), true, "onshell", "", true)};
  d["dictionary"] = {"1", "w", "w^2", "M", "M*w", "1/w", "sqrt(w)", "1/sqrt(w)", "M*w^2"};
  d["ansatz"] = {
      {"unknowns", {{{"name", "A0"}}, {{"name", "B0"}}}},
      {"constants", names("d", 1, 13)},
      {"functions",
       {{"xi1", "1/(2*w)*(d1*sin(2*w*t) - d2*cos(2*w*t)) + d3"},
        {"xi2", "1/2*(d1*cos(2*w*t) + d2*sin(2*w*t))*x + d4*cos(w*t) + d5*sin(w*t)"},
        {"Phi1", "A0(t,x) + (-1/4*(exp(-2*i*w*t) + 2*i*M*w*x^2*sin(2*w*t))*d1"
                 " - i/4*(exp(-2*i*w*t) - 2*M*w*x^2*cos(2*w*t))*d2"
                 " - i*M*w*x*(d4*sin(w*t) - d5*cos(w*t)) + d13 + i*d6)*u1 + (d7 - i*d10)*exp(i*w*t)*u2"},
        {"Phi2", "B0(t,x) + (d8 - i*d11)*exp(-i*w*t)*u1 + (-1/4*(exp(2*i*w*t) + 2*i*M*w*x^2*sin(2*w*t))*d1"
                 " + i/4*(exp(2*i*w*t) + 2*M*w*x^2*cos(2*w*t))*d2"
                 " - i*M*w*x*(d4*sin(w*t) - d5*cos(w*t)) + d9 + i*d12)*u2"}}},
      {"instances",
       {{{"A0", "x*exp(-M*w*x^2/2 - i*w*t)"}, {"B0", "exp(-M*w*x^2/2 - i*w*t)"}}}},
  };
  return d;
}

// ---------------------------------------------------------------- Pauli electron in a plane

json pauli_doc() {
  json d;
  d["name"] = "pauli_2d";
  d["family"] = "pauli_2d";
  d["coordinates"] = {"t", "x", "y"};
  d["dependents"] = dependents(2);
  d["parameters"] = {real("e"), real("B"), real("M"), def("w", "e*B/(2*M)")};
  d["hamiltonian"] = "(-(Dx^2 + Dy^2)/(2*M) + i*w*(x*Dy - y*Dx) + M*w^2*(x^2 + y^2)/2)*s0 - w*s3";
  d["grading"] = "s3";
  const std::string c = "cos(2*w*t)", s = "sin(2*w*t)";
  d["operators"] = {
      op("H0", "i*Dt - i*w*(x*Dy - y*Dx) + w*s3"),
      op("Cm", "exp(2*i*w*t)/2*((Dt - w*(x*Dy - y*Dx) + i*w*(x*Dx + y*Dy) + i*w + i*M*w^2*(x^2 + y^2))*s0 - i*w*s3)"),
      op("Cp", "exp(-2*i*w*t)/2*((Dt - w*(x*Dy - y*Dx) - i*w*(x*Dx + y*Dy) - i*w + i*M*w^2*(x^2 + y^2))*s0 - i*w*s3)"),
      op("L", "-i*(x*Dy - y*Dx)"),
      op("Acal", "exp(2*i*w*t)/(2*sqrt(w*M))*(-i*Dx + Dy - i*M*w*(x + i*y))"),
      op("Acald", "exp(-2*i*w*t)/(2*sqrt(w*M))*(-i*Dx - Dy + i*M*w*(x - i*y))"),
      op("Acal0", "1/(2*sqrt(w*M))*(-i*Dx + Dy - i*M*w*(x + i*y))"),
      op("Acald0", "1/(2*sqrt(w*M))*(-i*Dx - Dy + i*M*w*(x - i*y))"),
      op("I", "s0"),
      op("Am", "1/(2*sqrt(M*w))*(-i*Dx - Dy - i*M*w*(x - i*y))"),
      op("Ap", "1/(2*sqrt(M*w))*(-i*Dx + Dy + i*M*w*(x + i*y))"),
      op("Tp", "exp(2*i*w*t)*sp", "odd"),
      op("Tm", "exp(-2*i*w*t)*sm", "odd"),
      op("Y", "s3"),
  };
  d["generators"] = {
      op("X0", "Dt - w*(x*Dy - y*Dx) - i*w*s3"),
      op("X1", c + "*Dt - w*(x*" + s + " - y*" + c + ")*Dx - w*(x*" + c + " + y*" + s + ")*Dy + i*M*w^2*(x^2 + y^2)*" +
                   c + " - w*" + s + " - i*w*" + c + "*s3"),
      op("X2", "-" + s + "*Dt - w*(x*" + c + " + y*" + s + ")*Dx + w*(x*" + s + " - y*" + c +
                   ")*Dy - i*M*w^2*(x^2 + y^2)*" + s + " - w*" + c + " + i*w*" + s + "*s3"),
      op("X3", "x*Dy - y*Dx"),
      op("X4", "-1/(2*w)*(" + c + "*Dx - " + s + "*Dy) - i*M/2*(x*" + s + " + y*" + c + ")"),
      op("X5", "1/(2*w)*(" + s + "*Dx + " + c + "*Dy) - i*M/2*(x*" + c + " - y*" + s + ")"),
      op("X6", "-i*s0"),
      op("X7", "Dx - i*M*w*y"),
      op("X8", "Dy + i*M*w*x"),
      op("X9", "-exp(2*i*w*t)*sp", "odd"),
      op("X10", "-exp(-2*i*w*t)*sm", "odd"),
      op("X11", "s3"),
      op("X12", "i*exp(2*i*w*t)*sp", "odd"),
      op("X13", "i*exp(-2*i*w*t)*sm", "odd"),
      op("X14", "-i*s3"),
      op("X15", "-s0"),
  };
  d["products"] = {
      product("Qm", {"Acal", "Tm"}, "sqrt(2*w)", "odd"),  product("Qp", {"Acald", "Tp"}, "sqrt(2*w)", "odd"),
      product("Sm", {"Ap", "Tm"}, "sqrt(2*w)", "odd"),    product("Sp", {"Am", "Tp"}, "sqrt(2*w)", "odd"),
      product("Um", {"Am", "Tm"}, "sqrt(2*w)", "odd"),    product("Up", {"Ap", "Tp"}, "sqrt(2*w)", "odd"),
      product("Vp", {"Acal", "Tp"}, "sqrt(2*w)", "odd"),  product("Vm", {"Acald", "Tm"}, "sqrt(2*w)", "odd"),
  };
  Strs t5 = names("X", 0, 8);
  TableDef T5{"bosonic", t5, t5, {}, false, "exact",
              {{"0", "2*X2", "-2*w*X1", "0", "w*X5", "-w*X4", "0", "w*X8", "-w*X7"},
               {"-2*w*X2", "0", "-2*w*X0", "0", "1/2*X8", "1/2*X7", "0", "2*w^2*X5", "2*w^2*X4"},
               {"2*w*X1", "2*w*X0", "0", "0", "-1/2*X7", "1/2*X8", "0", "-2*w^2*X4", "2*w^2*X5"},
               {"0", "0", "0", "0", "X5", "-X4", "0", "-X8", "X7"},
               {"-w*X5", "-1/2*X8", "1/2*X7", "-X5", "0", "-M/(2*w)*X6", "0", "0", "0"},
               {"w*X4", "-1/2*X7", "-1/2*X8", "X4", "M/(2*w)*X6", "0", "0", "0", "0"},
               Strs(9, "0"),
               {"-w*X8", "-2*w^2*X5", "2*w^2*X4", "X8", "0", "0", "0", "0", "-2*M*w*X6"},
               {"w*X7", "-2*w^2*X4", "-2*w^2*X5", "-X7", "0", "0", "0", "2*M*w*X6", "0"}},
              {{"X0", "X1"}, {"X1", "X0"}}};
  d["tables"] = {table(T5)};
  d["relations"] = {
      rel("QmQp_onshell", "anti(Qm,Qp)", "H0 - w*L - w*Y", "onshell"),
      rel("QmQp_hamiltonian", "anti(Qm,Qp)", "H"),
      rel("Qp_nilpotent", "Qp*Qp", "0"),
      rel("Qm_nilpotent", "Qm*Qm", "0"),
      rel("Sp_nilpotent", "Sp*Sp", "0"),
      rel("Sm_nilpotent", "Sm*Sm", "0"),
      rel("Up_nilpotent", "Up*Up", "0"),
      rel("Um_nilpotent", "Um*Um", "0"),
      rel("Vp_nilpotent", "Vp*Vp", "0"),
      rel("Vm_nilpotent", "Vm*Vm", "0"),
      rel("H_Qp", "comm(H,Qp)", "0"),
      rel("H_Qm", "comm(H,Qm)", "0"),
      rel("Sp_symmetry", "comm(i*Dt - H, Sp)", "0"),
      rel("Sm_symmetry", "comm(i*Dt - H, Sm)", "0"),
      rel("SmSp_onshell", "anti(Sm,Sp)", "H0 + w*L + w*Y", "onshell"),
      rel("H0_Qp", "comm(H0,Qp)", "w*Qp", "onshell"),
      rel("H0_Qm", "comm(H0,Qm)", "-w*Qm", "onshell"),
      rel("H0_Sp", "comm(H0,Sp)", "-w*Sp", "onshell"),
      rel("H0_Sm", "comm(H0,Sm)", "w*Sm", "onshell"),
      rel("Cp_Qm", "comm(Cp,Qm)", "i*w*Sm", "onshell"),
      rel("Cm_Qp", "comm(Cm,Qp)", "-i*w*Sp", "onshell"),
      rel("Y_Qp", "comm(Y,Qp)", "2*Qp"),
      rel("Y_Qm", "comm(Y,Qm)", "-2*Qm"),
      rel("Y_Sp", "comm(Y,Sp)", "2*Sp"),
      rel("Y_Sm", "comm(Y,Sm)", "-2*Sm"),
      rel("QmSp", "anti(Qm,Sp)", "2*i*Cm", "onshell"),
      rel("QpSm", "anti(Qp,Sm)", "2*i*Cp", "onshell"),
  };
  json probes = json::array({{{"expr", "anti(Um,Up)"}, {"expect", ""}}, {{"expr", "anti(Vm,Vp)"}, {"expect", ""}}});
  d["closures"] = {closure("superalgebra",
                           {"H0", "Cm", "Cp", "Y", "L", "Qm", "Qp", "Sm", "Sp", "Acal", "Acald", "Am", "Ap", "I", "Tm",
                            "Tp"},
                           true, "onshell", "", true, probes)};
  d["dictionary"] = {"1", "w", "w^2", "M", "M*w", "1/w", "M/w", "sqrt(w)", "sqrt(2*w)", "1/sqrt(w)", "M*w^2"};
  return d;
}

// ---------------------------------------------------------------- Jaynes-Cummings family

const char* kAcal = "1/sqrt(2*e*B)*(-i*Dx + Dy - i*e*B/2*x + e*B/2*y)";
const char* kAcald = "1/sqrt(2*e*B)*(-i*Dx - Dy + i*e*B/2*x + e*B/2*y)";
const char* kAm = "1/sqrt(2*e*B)*(-i*Dx - Dy - i*e*B/2*x - e*B/2*y)";
const char* kAp = "1/sqrt(2*e*B)*(-i*Dx + Dy + i*e*B/2*x - e*B/2*y)";
const char* kHP =
    "(-(Dx^2 + Dy^2)/(2*M) + i*e*B/(2*M)*(x*Dy - y*Dx) + e^2*B^2/(8*M)*(x^2 + y^2))*s0 - e*B/(2*M)*s3";
const char* kKappaPhys = "i*e*E*sqrt(2*e*B)/(4*M^2)";

// shift applied to the common coefficient of the two transverse-field blocks
json jc_substitutions() {
  return {{"kappa_physical", {{"kappa", kKappaPhys}, {"kappab", std::string("-") + kKappaPhys}}}};
}

Strs jc_ansatz_xi() { return {"d1", "-d2*y + d3", "d2*x + d4"}; }

json jc_doc() {
  json d;
  d["name"] = "jc";
  d["family"] = "jc";
  d["coordinates"] = {"t", "x", "y"};
  d["dependents"] = dependents(2);
  d["parameters"] = {real("e"), real("B"), real("M"), real("E"), cpx("kappa", "kappab"), def("wt", "e*B/M"),
                     def("w", "e*B/(2*M)")};
  d["substitutions"] = jc_substitutions();
  d["blocks"] = {op("Acal", kAcal), op("Acald", kAcald)};
  d["hamiltonian"] = "wt*(Acald*Acal + 1/2)*s0 - wt/2*s3 + kappa*Acald*sp + kappab*Acal*sm";
  d["grading"] = "s3";
  d["operators"] = {
      op("HP", kHP),
      op("HJCexplicit", std::string(kHP) +
                            " + e*E/(4*M^2)*((Dx - i*Dy - e*B/2*x + i*e*B/2*y)*sp"
                            " - (Dx + i*Dy + e*B/2*x + i*e*B/2*y)*sm)",
         "neither"),
      op("HJC", "H", "neither"),
      op("J", "-i*(x*Dy - y*Dx) + 1/2*s3"),
      op("Am", kAm),
      op("Ap", kAp),
      op("I", "s0"),
      op("Qp", "sqrt(2*w)*Acald*sp", "odd"),
      op("Qm", "sqrt(2*w)*Acal*sm", "odd"),
      op("Qd", "Qp - Qm", "odd"),
      op("Qcal", "1/sqrt(2*w)*(kappa*Qp + kappab*Qm)", "odd"),
  };
  d["generators"] = {
      op("X1", "Dt"),
      op("X2", "(x*Dy - y*Dx) + i/2*s3"),
      op("X3", "Dx - i*e*B/2*y"),
      op("X4", "Dy + i*e*B/2*x"),
      op("X5", "-i*s0"),
      op("X6", "-s0"),
  };
  Strs g = names("X", 1, 6);
  std::vector<Strs> v(6, Strs(6, "0"));
  v[1][2] = "-X4";
  v[2][1] = "X4";
  v[1][3] = "X3";
  v[3][1] = "-X3";
  v[2][3] = "-e*B*X5";
  v[3][2] = "e*B*X5";
  d["tables"] = {table({"symmetries", g, g, {}, false, "exact", v, {}})};
  d["relations"] = {
      rel("H_J", "comm(H,J)", "0"),
      rel("H_Am", "comm(H,Am)", "0"),
      rel("H_Ap", "comm(H,Ap)", "0"),
      rel("H_I", "comm(H,I)", "0"),
      rel("Am_Ap", "comm(Am,Ap)", "I"),
      rel("H_Qcal", "comm(H,Qcal)", "0"),
      rel("H_split", "H", "HP + kappa*Acald*sp + kappab*Acal*sm"),
      rel("H_explicit", "H", "HJCexplicit", "exact", "kappa_physical"),
      rel("time_translation", "i*X1", "H", "onshell"),
  };
  d["closures"] = {
      closure("lie", {"HJC", "Am", "Ap", "I", "J", "Qd"}, false, "exact", "kappa_physical", true),
      closure("graded", {"HJC", "Am", "Ap", "I", "J", "Qd"}, true, "exact", "kappa_physical", false,
              json::array({{{"expr", "anti(Qd,Qd)"}, {"expect", "not-in-span"}}})),
  };
  d["dictionary"] = {"1", "e*B", "wt", "sqrt(wt)", "kappa", "kappab", "e*E/M^2"};
  Strs xi = jc_ansatz_xi();
  const std::string rot = "-i*e*B/2*(d4*x - d3*y)";
  d["ansatz"] = {
      {"unknowns", {{{"name", "A0"}}, {{"name", "C0"}}}},
      {"constants", names("d", 1, 6)},
      {"functions",
       {{"xi1", xi[0]},
        {"xi2", xi[1]},
        {"xi3", xi[2]},
        {"Phi1", "A0(t,x,y) + (" + rot + " - i*d2/2 + d6 + i*d5)*u1"},
        {"Phi2", "C0(t,x,y) + (" + rot + " + i*d2/2 + d6 + i*d5)*u2"}}},
      {"instances", {{{"A0", "exp(-e*B*(x^2 + y^2)/4)"}, {"C0", "0"}}}},
  };
  return d;
}

json jc_generalized_doc(const std::string& alpha, const std::string& beta, const std::string& phi) {
  bool defaults = alpha == "alpha" && beta == "beta" && phi == "0";
  json d;
  d["name"] = defaults ? "jc_generalized" : "jc_generalized(" + alpha + "," + beta + "," + phi + ")";
  d["family"] = "jc_generalized";
  d["coordinates"] = {"t", "x", "y"};
  d["dependents"] = dependents(4);
  json params = {real("e"), real("B"), real("M"), real("E"), cpx("kappa", "kappab")};
  for (const auto& [n, v] : {std::pair{"alpha", alpha}, {"beta", beta}, {"phi", phi}}) {
    if (v == n)
      params.push_back(real(n));
    else
      params.push_back(def(n, v));
  }
  params.push_back(def("wt", "e*B/M"));
  params.push_back(def("w", "e*B/(2*M)"));
  params.push_back(def("wab", "e*B*(alpha - beta)/(2*M)"));
  d["parameters"] = params;
  json subs = jc_substitutions();
  if (beta == "beta") {
    const std::string printed = "-e*E/(8*M^2*B) - alpha", corrected = "-e*E^2/(8*M^2*B) - alpha";
    subs["alpha_beta_shift"] = {{"beta", printed}};
    subs["alpha_beta_shift_corrected"] = {{"beta", corrected}};
    json both = subs["kappa_physical"];
    both["beta"] = printed;
    subs["kappa_physical+alpha_beta_shift"] = both;
    both["beta"] = corrected;
    subs["kappa_physical+alpha_beta_shift_corrected"] = both;
  }
  d["substitutions"] = subs;
  d["blocks"] = {
      op("Acal", kAcal, "even", 2),
      op("Acald", kAcald, "even", 2),
      op("Am2", kAm, "even", 2),
      op("Ap2", kAp, "even", 2),
      op("J2", "-i*(x*Dy - y*Dx) + 1/2*s3", "even", 2),
      op("HJC", "wt*(Acald*Acal + 1/2)*s0 - wt/2*s3 + kappa*Acald*sp + kappab*Acal*sm", "neither", 2),
      op("HJCphi",
         "wt*(Acald*Acal + 1/2)*s0 - wt/2*s3 + kappa*exp(i*phi)*Acald*sp + kappab*exp(-i*phi)*Acal*sm", "neither",
         2),
      op("Qp2", "sqrt(wt)*Acald*sp", "odd", 2),
      op("Qm2", "sqrt(wt)*Acal*sm", "odd", 2),
  };
  d["hamiltonian"] = "[[HJC - e*B/(2*M)*alpha, 0], [0, HJCphi - e*B/(2*M)*beta]]";
  d["grading"] = "[[s0, 0], [0, -s0]]";
  d["operators"] = {
      op("Y", "[[s0, 0], [0, -s0]]"),
      op("Tp", "exp(i*wab*t)*[[0, [[1, 0], [0, exp(i*phi)]]], [0, 0]]", "odd"),
      op("Tm", "exp(-i*wab*t)*[[0, 0], [[[1, 0], [0, exp(-i*phi)]], 0]]", "odd"),
      op("Tp0", "[[0, [[1, 0], [0, exp(i*phi)]]], [0, 0]]", "odd"),
      op("Tm0", "[[0, 0], [[[1, 0], [0, exp(-i*phi)]], 0]]", "odd"),
      op("I", "1"),
      op("J", "[[J2, 0], [0, J2]]"),
      op("Am", "[[Am2, 0], [0, Am2]]"),
      op("Ap", "[[Ap2, 0], [0, Ap2]]"),
      op("H0", "wt*[[Ap2*Am2 + 1/2, 0], [0, Ap2*Am2 + 1/2]]"),
      op("Cm", "i*wt/2*Am*Am"),
      op("Cp", "i*wt/2*Ap*Ap"),
      op("HH", "i*Dt + wab/2*Y"),
      op("Hsym", "[[HJC - e*B/(4*M)*(alpha + beta), 0], [0, HJCphi - e*B/(4*M)*(alpha + beta)]]", "neither"),
      op("QQp", "kappab/(2*sqrt(wt))*Tp0 + sqrt(wt)*[[0, exp(i*phi)*Qp2 - Qm2], [0, 0]]", "odd"),
      op("QQm", "kappa/(2*sqrt(wt))*Tm0 + sqrt(wt)*[[0, 0], [exp(-i*phi)*Qm2 - Qp2, 0]]", "odd"),
      op("QQ0", "[[Qp2 - Qm2, 0], [0, exp(i*phi)*Qp2 - exp(-i*phi)*Qm2]]", "neither"),
      op("QQpc", "kappab/(2*sqrt(wt))*Tp0 + sqrt(wt)*[[0, exp(i*phi)*Acald*sp - Acal*sm], [0, 0]]", "odd"),
      op("QQmc", "kappa/(2*sqrt(wt))*Tm0 + sqrt(wt)*[[0, 0], [exp(-i*phi)*Acal*sm - Acald*sp, 0]]", "odd"),
  };
  d["generators"] = {
      op("X1", "Dt - i*wab/2*Y"),
      op("X2", "(x*Dy - y*Dx) + i/2*[[s3, 0], [0, s3]]"),
      op("X3", "Dx - i*e*B/2*y"),
      op("X4", "Dy + i*e*B/2*x"),
      op("X5", "-i"),
      op("X6", "-1"),
      op("X7", "-Tp", "odd"),
      op("X8", "-Tm", "odd"),
      op("X9", "Y"),
      op("X10", "i*Tp", "odd"),
      op("X11", "i*Tm", "odd"),
      op("X12", "i*Y"),
  };
  d["products"] = {
      product("Sm", {"Ap", "Tm"}, "sqrt(wt)", "odd"),
      product("Sp", {"Am", "Tp"}, "sqrt(wt)", "odd"),
      product("Um", {"Am", "Tm"}, "sqrt(wt)", "odd"),
      product("Up", {"Ap", "Tp"}, "sqrt(wt)", "odd"),
  };
  Strs b6 = {"H0", "Cm", "Cp", "Y", "Sm", "Sp", "Um", "Up"};
  TableDef T6{"superalgebra", b6, b6, {}, true, "exact",
              {{"0", "-2*wt*Cm", "2*wt*Cp", "0", "wt*Sm", "-wt*Sp", "-wt*Um", "wt*Up"},
               {"2*wt*Cm", "0", "-wt*H0", "0", "i*wt*Um", "0", "0", "i*wt*Sp"},
               {"-2*wt*Cp", "wt*H0", "0", "0", "0", "-i*wt*Up", "-i*wt*Sm", "0"},
               {"0", "0", "0", "0", "-2*Sm", "2*Sp", "-2*Um", "2*Up"},
               {"-wt*Sm", "-i*wt*Um", "0", "2*Sm", "0", "H0 + wt/2*Y", "0", "-2*i*Cp"},
               {"wt*Sp", "0", "i*wt*Up", "-2*Sp", "H0 + wt/2*Y", "0", "-2*i*Cm", "0"},
               {"wt*Um", "0", "i*wt*Sm", "2*Um", "0", "-2*i*Cm", "0", "H0 - wt/2*Y"},
               {"-wt*Up", "-i*wt*Sp", "0", "-2*Up", "-2*i*Cp", "0", "H0 - wt/2*Y", "0"}},
              {}};
  Strs r7 = {"J", "Am", "Ap", "I", "Tm", "Tp"};
  Strs b7 = b6;
  b7.insert(b7.end(), r7.begin(), r7.end());
  TableDef T7{"superalgebra_extension", r7, b6, b7, true, "exact",
              {{"0", "-2*Cm", "2*Cp", "0", "Sm", "-Sp", "-Um", "Up"},
               {"wt*Am", "0", "i*wt*Ap", "0", "sqrt(wt)*Tm", "0", "0", "sqrt(wt)*Tp"},
               {"-wt*Ap", "-i*wt*Am", "0", "0", "0", "-sqrt(wt)*Tp", "-sqrt(wt)*Tm", "0"},
               Strs(8, "0"),
               {"0", "0", "0", "2*Tm", "0", "sqrt(wt)*Am", "0", "sqrt(wt)*Ap"},
               {"0", "0", "0", "-2*Tp", "sqrt(wt)*Ap", "0", "sqrt(wt)*Am", "0"}},
              {}};
  d["tables"] = {table(T6), table(T7)};
  json rels = {
      rel("SmSp", "anti(Sm,Sp)", "H0 + wt/2*Y"),
      rel("UmUp", "anti(Um,Up)", "H0 - wt/2*Y"),
      rel("SmUp", "anti(Sm,Up)", "-2*i*Cp"),
      rel("SmUp_product", "anti(Sm,Up)", "wt*Ap*Ap"),
  };
  Strs commuting = names("X", 1, 12);
  for (const char* n : {"H0", "Cm", "Cp", "Y", "Sm", "Sp", "Um", "Up", "J", "Am", "Ap", "Tm", "Tp"})
    commuting.push_back(n);
  for (const auto& n : commuting) rels.push_back(rel("HH_" + n, "comm(HH," + n + ")", "0"));
  if (beta == "beta") {
    const std::string sh = "kappa_physical+alpha_beta_shift";
    rels.push_back(rel("QQ_anti", "anti(QQp,QQm)", "Hsym", "exact", sh));
    rels.push_back(rel("Hsym_QQp", "comm(Hsym,QQp)", "0", "exact", sh));
    rels.push_back(rel("Hsym_QQm", "comm(Hsym,QQm)", "0", "exact", sh));
    rels.push_back(rel("Y_QQp", "comm(Y,QQp)", "2*QQp", "exact", sh));
    rels.push_back(rel("Y_QQm", "comm(Y,QQm)", "-2*QQm", "exact", sh));
    rels.push_back(rel("Tp0_QQm", "anti(Tp0,QQm)", "kappa/(2*sqrt(wt)) - sqrt(wt)*QQ0", "exact", sh));
    rels.push_back(rel("Tm0_QQp", "anti(Tm0,QQp)", "kappab/(2*sqrt(wt)) + sqrt(wt)*QQ0", "exact", sh));
    rels.push_back(rel("QQ_anti_unshifted", "anti(QQp,QQm)", "Hsym", "exact", "kappa_physical", false));
    rels.push_back(rel("QQ_anti_corrected", "anti(QQpc,QQmc)", "Hsym", "exact",
                       "kappa_physical+alpha_beta_shift_corrected"));
  }
  d["relations"] = rels;
  d["dictionary"] = {"1", "wt", "sqrt(wt)", "2", "i*wt", "kappa", "kappab", "e*B/M^2"};
  Strs xi = jc_ansatz_xi();
  const std::string rot = "-i*e*B/2*(d4*x - d3*y)";
  const std::string f = "(d9 - i*d11)*exp(i*wab*t)", g = "(d10 - i*d12)*exp(-i*wab*t)";
  d["ansatz"] = {
      {"unknowns", {{{"name", "A0"}}, {{"name", "C0"}}, {{"name", "D0"}}, {{"name", "F0"}}}},
      {"constants", names("d", 1, 12)},
      {"functions",
       {{"xi1", xi[0]},
        {"xi2", xi[1]},
        {"xi3", xi[2]},
        {"Phi1", "A0(t,x,y) + (" + rot + " - i*d2/2 + i*wab/2*d1 + d7 + i*d5)*u1 + " + f + "*u3"},
        {"Phi2", "C0(t,x,y) + (" + rot + " + i*d2/2 + i*wab/2*d1 + d7 + i*d5)*u2 + " + f + "*exp(i*phi)*u4"},
        {"Phi3", "D0(t,x,y) + " + g + "*u1 + (" + rot + " - i*d2/2 - i*wab/2*d1 + d8 + i*d6)*u3"},
        {"Phi4", "F0(t,x,y) + " + g + "*exp(-i*phi)*u2 + (" + rot + " + i*d2/2 - i*wab/2*d1 + d8 + i*d6)*u4"}}},
      {"instances",
       {{{"A0", "exp(-e*B*(x^2 + y^2)/4 + i*e*B/(2*M)*alpha*t)"}, {"C0", "0"}, {"D0", "0"}, {"F0", "0"}}}},
  };
  return d;
}

json jc_standard_susy_doc() {
  json d;
  d["name"] = "jc_standard_susy";
  d["family"] = "jc_standard_susy";
  d["coordinates"] = {"t", "x", "y"};
  d["dependents"] = dependents(4);
  d["parameters"] = {real("e"), real("B"), real("M"), def("wt", "e*B/M")};
  d["blocks"] = {
      op("Acal", kAcal, "even", 2),
      op("Acald", kAcald, "even", 2),
      op("Ap2", kAp, "even", 2),
      op("At", "Acal + i*sp", "neither", 2),
      op("Atd", "Acald - i*sm", "neither", 2),
      op("HJC", "wt*(Acald*Acal + 1/2)*s0 - wt/2*s3 + i*wt*Acald*sp - i*wt*Acal*sm", "neither", 2),
  };
  d["hamiltonian"] = "wt*[[Atd*At, 0], [0, At*Atd]]";
  d["grading"] = "[[s0, 0], [0, -s0]]";
  d["operators"] = {
      op("Y", "[[s0, 0], [0, -s0]]"),
      op("Qtp", "sqrt(wt)*[[0, Atd], [0, 0]]", "odd"),
      op("Qtm", "sqrt(wt)*[[0, 0], [At, 0]]", "odd"),
  };
  d["generators"] = {
      op("X1", "Dt"),
      op("X2", "(x*Dy - y*Dx) + i/2*[[s3, 0], [0, s3]]"),
      op("X3", "Dx - i*e*B/2*y"),
      op("X4", "Dy + i*e*B/2*x"),
      op("X5", "-i"),
      op("X6", "-1"),
      op("X7", "-[[s0, 0], [0, 0]]"),
      op("X8", "-[[0, 0], [0, s0]]"),
      op("X9", "-i*[[s0, 0], [0, 0]]"),
      op("X10", "-i*[[0, 0], [0, s0]]"),
  };
  d["relations"] = {
      rel("At_Atd", "comm(At,Atd)", "s0 + s3"),
      rel("QtpQtm", "anti(Qtp,Qtm)", "H"),
      rel("Qtp_nilpotent", "Qtp*Qtp", "0"),
      rel("Qtm_nilpotent", "Qtm*Qtm", "0"),
      rel("H_Qtp", "comm(H,Qtp)", "0"),
      rel("H_Qtm", "comm(H,Qtm)", "0"),
      rel("block_form_printed", "H", "[[HJC, 0], [0, HJC + wt*[[0, 0], [0, 1]]]]"),
      rel("block_form", "H", "[[HJC, 0], [0, HJC + wt*(s0 + s3)]]"),
  };
  d["dictionary"] = {"1", "wt", "sqrt(wt)"};
  return d;
}

// ---------------------------------------------------------------- exact solutions

using Solution = std::vector<Expr>;

Expr with_energy(const Expr& f, const Expr& E) {
  if (E.is_zero()) return f;
  return f * exp(-Expr::imag_unit() * E * sym(coord(0)));
}

Expr act(const MatrixDiffOp& a, const Expr& f) { return pk::apply(a, {f, Expr()})[0]; }

Expr act_n(const MatrixDiffOp& a, Expr f, int n) {
  for (int k = 0; k < n; ++k) f = act(a, f);
  return f;
}

// Landau-level states of one Jaynes-Cummings block: ground, A+ excitations, spin doublets.
struct BlockState {
  Expr top, bottom, energy;
};

std::vector<BlockState> jc_block(const ModelSpec& m, int n, const Expr& kappa, const Expr& kappab,
                                 const MatrixDiffOp& acald, const MatrixDiffOp& ap) {
  Expr g = m.parse_expr("exp(-e*B*(x^2 + y^2)/4)");
  Expr wt = m.parse_expr("e*B/M");
  std::vector<BlockState> out;
  out.push_back({g, Expr(), Expr()});
  for (int k = 1; k <= n; ++k) out.push_back({act_n(ap, g, k), Expr(), Expr()});
  for (int k = 0; k < n; ++k) {
    Expr root = sqrt(Expr(k + 1) * kappa * kappab);
    for (int s : {1, -1}) {
      Expr c = Expr(s) * root / kappa;
      out.push_back({act_n(acald, g, k + 1), c * act_n(acald, g, k), wt * Expr(k + 1) + Expr(s) * root});
    }
  }
  return out;
}

// Energy of a stationary candidate as a small rational multiple of `unit`, if the ratio is constant.
std::optional<Expr> stationary_energy(const ModelSpec& m, const Solution& psi, const Expr& unit) {
  auto hpsi = pk::apply(m.hamiltonian, psi);
  size_t c = 0;
  while (c < psi.size() && psi[c].is_zero()) ++c;
  if (c == psi.size()) return std::nullopt;
  Sampler smp(kDefaultSeed);
  std::vector<Expr> all = psi;
  all.push_back(unit);
  Point p = smp.draw(sample_symbols(all));
  cplx r = eval_numeric(hpsi[c], p) / eval_numeric(psi[c], p) / eval_numeric(unit, p);
  if (std::abs(r.imag()) > 1e-8) return std::nullopt;
  long num = std::lround(r.real() * 12);
  if (std::abs(r.real() * 12 - static_cast<double>(num)) > 1e-8) return std::nullopt;
  long den = 12, gcd = std::gcd(std::abs(num), den);
  Expr E = Expr::ratio(num / (gcd ? gcd : 1), den / (gcd ? gcd : 1)) * unit;
  for (size_t k = 0; k < psi.size(); ++k)
    if (!is_zero(hpsi[k] - E * psi[k]).zero) return std::nullopt;
  return E;
}

std::vector<Solution> oscillator_solutions(const ModelSpec& m, int n) {
  Expr g = m.parse_expr("sqrt(sqrt(M*w/pi))*exp(-M*w*x^2/2)");
  Expr w = m.parse_expr("w");
  const MatrixDiffOp& axd = m.op("axd").op;
  std::vector<Solution> out;
  for (int k = 0; k <= n; ++k) {
    Expr f = act_n(axd, g, k);
    out.push_back({with_energy(f, Expr(k) * w), Expr()});
    out.push_back({Expr(), with_energy(f, Expr(k + 1) * w)});
  }
  return out;
}

std::vector<Solution> pauli_solutions(const ModelSpec& m, int n) {
  Expr g = m.parse_expr("exp(-e*B*(x^2 + y^2)/4)");
  Expr w = m.parse_expr("w");
  std::vector<Solution> out;
  for (int total = 0; total <= n; ++total)
    for (int a = 0; a <= total; ++a) {
      Expr f = act_n(m.op("Ap").op, act_n(m.op("Acald0").op, g, a), total - a);
      for (int comp = 0; comp < 2; ++comp) {
        Solution psi{Expr(), Expr()};
        psi[static_cast<size_t>(comp)] = f;
        auto E = stationary_energy(m, psi, w);
        if (!E) continue;
        for (auto& c : psi) c = with_energy(c, *E);
        out.push_back(psi);
      }
    }
  return out;
}

std::vector<Solution> jc_solutions(const ModelSpec& m, int n) {
  std::vector<Solution> out;
  for (const auto& s : jc_block(m, n, m.parse_expr("kappa"), m.parse_expr("kappab"), m.op("Acald").op, m.op("Ap").op))
    out.push_back({with_energy(s.top, s.energy), with_energy(s.bottom, s.energy)});
  return out;
}

std::vector<Solution> jc_generalized_solutions(const ModelSpec& m, int n) {
  std::vector<Solution> out;
  const MatrixDiffOp &acald = m.op("Acald").op, &ap = m.op("Ap2").op;
  Expr kappa = m.parse_expr("kappa"), kappab = m.parse_expr("kappab");
  Expr up_shift = m.parse_expr("-e*B/(2*M)*alpha"), low_shift = m.parse_expr("-e*B/(2*M)*beta");
  for (const auto& s : jc_block(m, n, kappa, kappab, acald, ap)) {
    Expr E = s.energy + up_shift;
    out.push_back({with_energy(s.top, E), with_energy(s.bottom, E), Expr(), Expr()});
  }
  Expr ph = m.parse_expr("exp(i*phi)"), mph = m.parse_expr("exp(-i*phi)");
  for (const auto& s : jc_block(m, n, kappa * ph, kappab * mph, acald, ap)) {
    Expr E = s.energy + low_shift;
    out.push_back({Expr(), Expr(), with_energy(s.top, E), with_energy(s.bottom, E)});
  }
  return out;
}

std::vector<Solution> jc_standard_susy_solutions(const ModelSpec& m, int n) {
  std::vector<Solution> out;
  Expr wt = m.parse_expr("wt");
  const MatrixDiffOp &acald = m.op("Acald").op, &ap = m.op("Ap2").op;
  Expr kappa = Expr::imag_unit() * wt;
  for (const auto& s : jc_block(m, n, kappa, -kappa, acald, ap))
    out.push_back({with_energy(s.top, s.energy), with_energy(s.bottom, s.energy), Expr(), Expr()});
  Expr g = m.parse_expr("exp(-e*B*(x^2 + y^2)/4)");
  for (int k = 0; k <= n; ++k)
    out.push_back({Expr(), Expr(), with_energy(act_n(ap, g, k), Expr(2) * wt), Expr()});
  return out;
}

}  // namespace

std::vector<std::vector<Expr>> exact_solutions(const ModelSpec& m, int n) {
  if (n < 0 || n > 3) throw std::invalid_argument("excitation level must be in 0..3");
  if (m.family == "susy_oscillator") return oscillator_solutions(m, n);
  if (m.family == "pauli_2d") return pauli_solutions(m, n);
  if (m.family == "jc") return jc_solutions(m, n);
  if (m.family == "jc_generalized") return jc_generalized_solutions(m, n);
  if (m.family == "jc_standard_susy") return jc_standard_susy_solutions(m, n);
  return m.solutions;
}

std::vector<std::string> builtin_names() {
  return {"susy_oscillator", "pauli_2d", "jc", "jc_generalized", "jc_standard_susy"};
}

ModelSpec jc_generalized(const std::string& alpha, const std::string& beta, const std::string& phi) {
  return finish(jc_generalized_doc(alpha, beta, phi), 1);
}

ModelSpec builtin(const std::string& name) {
  static std::mutex mu;
  static std::map<std::string, ModelSpec> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = cache.find(name); it != cache.end()) return it->second;
  ModelSpec m;
  if (name == "susy_oscillator") {
    m = finish(oscillator_doc(), 1);
  } else if (name == "pauli_2d") {
    m = finish(pauli_doc(), 1);
  } else if (name == "jc") {
    m = finish(jc_doc(), 1);
  } else if (name == "jc_generalized") {
    m = jc_generalized();
  } else if (name == "jc_standard_susy") {
    m = finish(jc_standard_susy_doc(), 1);
  } else if (name.rfind("jc_generalized(", 0) == 0 && name.back() == ')') {
    std::string inner = name.substr(15, name.size() - 16);
    std::vector<std::string> args;
    int depth = 0;
    std::string cur;
    for (char c : inner) {
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if (c == ',' && depth == 0) {
        args.push_back(cur);
        cur.clear();
      } else if (!std::isspace(static_cast<unsigned char>(c))) {
        cur += c;
      }
    }
    args.push_back(cur);
    if (args.size() != 3) throw std::invalid_argument("jc_generalized takes (alpha,beta,phi)");
    m = jc_generalized(args[0], args[1], args[2]);
  } else {
    throw std::invalid_argument("unknown model " + name);
  }
  cache[name] = m;
  return m;
}

}  // namespace pk
