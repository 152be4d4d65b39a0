#include "pk/models.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>

namespace pk {

using json = nlohmann::ordered_json;

const TableCell* StructureTable::cell(const std::string& r, const std::string& c) const {
  for (const auto& x : cells)
    if (x.row == r && x.col == c) return &x;
  return nullptr;
}

MatrixDiffOp substitute(const MatrixDiffOp& a, const Bindings& b) {
  if (b.empty()) return a;
  return a.map_coeffs([&](const Expr& e) { return substitute(e, b); });
}

const GradedGenerator& ModelSpec::op(const std::string& name) const {
  auto it = ops.find(name);
  if (it == ops.end()) throw std::invalid_argument("model " + this->name + " has no operator " + name);
  return it->second.gen;
}

std::vector<GradedGenerator> ModelSpec::generators() const {
  std::vector<GradedGenerator> out;
  for (const auto& n : generator_names) out.push_back(op(n));
  return out;
}

OpEnv ModelSpec::env() const {
  OpEnv e;
  e.symbols = &symbols;
  e.dim = dim;
  for (const auto& [n, o] : ops) e.ops[n] = o.gen.op;
  e.ops["H"] = hamiltonian;
  return e;
}

namespace {

bool dimension_error(const ParseError& e) { return std::string(e.what()).find("operator has dimension") == 0; }

MatrixDiffOp parse_any_dim(const std::string& text, OpEnv env) {
  try {
    return parse_operator(text, env);
  } catch (const ParseError& e) {
    if (!dimension_error(e) || env.dim == 2) throw;
    env.dim = 2;
    return parse_operator(text, env);
  }
}

}  // namespace

MatrixDiffOp ModelSpec::parse_op(const std::string& text) const { return parse_any_dim(text, env()); }

Expr ModelSpec::parse_expr(const std::string& text) const { return parse(text, symbols); }

const Bindings& ModelSpec::substitution(const std::string& name) const {
  static const Bindings none;
  if (name.empty()) return none;
  auto it = substitutions.find(name);
  if (it == substitutions.end()) throw std::invalid_argument("model " + this->name + " has no substitution " + name);
  return it->second;
}

// ---------------------------------------------------------------- document reading

namespace {

struct Reader {
  std::string where(const std::string& base, const std::string& key) const { return base + "/" + key; }

  static const json& field(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) throw ModelError(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ModelError(path + "/" + key, "missing");
    return *it;
  }
  static std::string str(const json& j, const std::string& path) {
    if (!j.is_string()) throw ModelError(path, "expected a string");
    return j.get<std::string>();
  }
  static std::string str(const json& j, const std::string& key, const std::string& path) {
    return str(field(j, key, path), path + "/" + key);
  }
  static std::string opt_str(const json& j, const std::string& key, const std::string& path,
                             const std::string& dflt = "") {
    if (!j.contains(key)) return dflt;
    return str(j.at(key), path + "/" + key);
  }
  static const json& arr(const json& j, const std::string& key, const std::string& path) {
    const json& a = field(j, key, path);
    if (!a.is_array()) throw ModelError(path + "/" + key, "expected an array");
    return a;
  }
  static std::vector<std::string> str_list(const json& j, const std::string& path) {
    if (!j.is_array()) throw ModelError(path, "expected an array");
    std::vector<std::string> out;
    for (size_t k = 0; k < j.size(); ++k) out.push_back(str(j[k], path + "/" + std::to_string(k)));
    return out;
  }
};

Parity parity_from(const std::string& s, const std::string& path) {
  if (s == "even") return Parity::Even;
  if (s == "odd") return Parity::Odd;
  if (s == "neither" || s.empty()) return Parity::Neither;
  throw ModelError(path, "parity must be even, odd or neither");
}

Mode mode_from(const std::string& s, const std::string& path) {
  if (s == "exact" || s.empty()) return Mode::Exact;
  if (s == "onshell") return Mode::OnShell;
  throw ModelError(path, "mode must be exact or onshell");
}

template <class F>
auto at_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ModelError&) {
    throw;
  } catch (const std::exception& e) {
    throw ModelError(path, e.what());
  }
}

// Linear combination of basis names; coefficients must not involve the names.
std::map<std::string, Expr> parse_combination(const std::string& text, const ModelSpec& m,
                                              const std::vector<std::string>& basis, const std::string& path) {
  SymbolTable tab = m.symbols;
  std::map<std::string, AtomP> marks;
  for (const auto& b : basis) {
    AtomP a = param("#" + b);
    marks[b] = a;
    tab.params[b] = a;
    tab.definitions.erase(b);
  }
  Expr e = at_path(path, [&] { return parse(text, tab); });
  std::map<std::string, Expr> out;
  Expr rest = e;
  for (const auto& [b, a] : marks) {
    Expr c = differentiate(e, a);
    if (c.is_zero()) continue;
    for (const auto& [_, a2] : marks)
      if (depends_on(c, a2)) throw ModelError(path, "not linear in the basis: " + text);
    out[b] = c;
    rest -= c * sym(a);
  }
  if (!rest.is_zero()) throw ModelError(path, "term outside the basis: " + rest.str());
  return out;
}

// i u_a,t - sum_b H_ab u_b for each component, then the conjugate equations.
std::vector<Expr> equations_from(const MatrixDiffOp& H, int q, bool with_conj) {
  std::vector<Expr> out;
  for (int a = 0; a < q; ++a) {
    Expr e = Expr::imag_unit() * sym(jet(a + 1, false, MultiIndex(1, 0, 0)));
    for (int b = 0; b < q; ++b)
      for (const auto& [J, c] : H.at(a, b)) e -= c * sym(jet(b + 1, false, J));
    out.push_back(e);
  }
  if (with_conj)
    for (int a = 0; a < q; ++a) out.push_back(conj(out[static_cast<size_t>(a)]));
  return out;
}

}  // namespace

ModelSpec model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    throw ModelError("", std::string("malformed document: ") + e.what());
  }
  using R = Reader;
  ModelSpec m;
  m.name = R::str(doc, "name", "");
  m.family = R::opt_str(doc, "family", "", "custom");

  // coordinates and dependents
  SymbolTable& tab = m.symbols;
  for (const auto& c : R::str_list(R::field(doc, "coordinates", ""), "/coordinates"))
    tab.coordinates.push_back(at_path("/coordinates", [&] { return coord(c); }));
  const json& deps = R::arr(doc, "dependents", "");
  int q = 0;
  bool with_conj = false;
  for (size_t k = 0; k < deps.size(); ++k) {
    std::string p = "/dependents/" + std::to_string(k);
    std::string n = R::str(deps[k], "name", p);
    if (deps[k].contains("conjugate_of")) {
      with_conj = true;
      if ("c" + R::str(deps[k], "conjugate_of", p) != n) throw ModelError(p, "conjugate of uA must be named cuA");
    } else {
      ++q;
      if (n != "u" + std::to_string(q)) throw ModelError(p + "/name", "dependents are named u1, u2, ...");
    }
  }
  tab.dependents = q;
  m.dim = q;

  // parameters, with definitions parsed in order
  const json& params = R::arr(doc, "parameters", "");
  for (size_t k = 0; k < params.size(); ++k) {
    std::string p = "/parameters/" + std::to_string(k);
    std::string n = R::str(params[k], "name", p);
    if (params[k].contains("definition")) {
      std::string d = R::str(params[k], "definition", p);
      tab.define(n, at_path(p + "/definition", [&] { return parse(d, tab); }));
      continue;
    }
    std::string dom = R::opt_str(params[k], "domain", p, "real");
    if (dom == "real") {
      tab.declare_param(n);
    } else if (dom == "complex") {
      std::string c = R::str(params[k], "conjugate", p);
      tab.declare_complex_pair(n, c);
    } else {
      throw ModelError(p + "/domain", "domain must be real or complex");
    }
  }

  // named substitutions
  if (doc.contains("substitutions")) {
    const json& subs = doc.at("substitutions");
    if (!subs.is_object()) throw ModelError("/substitutions", "expected an object");
    for (const auto& [sname, body] : subs.items()) {
      std::string p = "/substitutions/" + sname;
      if (!body.is_object()) throw ModelError(p, "expected an object");
      Bindings b;
      for (const auto& [var, val] : body.items()) {
        auto it = tab.params.find(var);
        if (it == tab.params.end()) throw ModelError(p + "/" + var, "not a parameter");
        std::string v = R::str(val, p + "/" + var);
        b[it->second] = at_path(p + "/" + var, [&] { return parse(v, tab); });
      }
      m.substitutions[sname] = b;
    }
  }

  // operators, in document order so later entries may use earlier ones
  OpEnv env;
  env.symbols = &tab;
  auto add_op = [&](const json& e, const std::string& p, bool generator) {
    NamedOp o;
    o.name = R::str(e, "name", p);
    if (m.ops.count(o.name) || o.name == "H") throw ModelError(p + "/name", "duplicate operator " + o.name);
    int d = e.contains("dim") ? at_path(p + "/dim", [&] { return e.at("dim").get<int>(); }) : m.dim;
    env.dim = d;
    if (e.contains("factors")) {
      o.factors = R::str_list(e.at("factors"), p + "/factors");
      o.scale = R::opt_str(e, "scale", p, "1");
      MatrixDiffOp r = MatrixDiffOp::scalar(d, at_path(p + "/scale", [&] { return parse(o.scale, tab); }));
      for (size_t k = 0; k < o.factors.size(); ++k) {
        auto it = env.ops.find(o.factors[k]);
        if (it == env.ops.end()) throw ModelError(p + "/factors/" + std::to_string(k), "unknown operator");
        r = at_path(p + "/factors", [&] { return compose(r, it->second); });
      }
      o.gen.op = r;
    } else {
      o.text = R::str(e, "op", p);
      o.gen.op = at_path(p + "/op", [&] { return parse_operator(o.text, env); });
    }
    o.gen.name = o.name;
    o.gen.parity = parity_from(R::opt_str(e, "parity", p), p + "/parity");
    env.ops[o.name] = o.gen.op;
    m.op_order.push_back(o.name);
    if (generator) m.generator_names.push_back(o.name);
    m.ops[o.name] = std::move(o);
  };

  env.dim = m.dim;
  std::string ham = R::str(doc, "hamiltonian", "");
  std::string grad = R::str(doc, "grading", "");
  // the Hamiltonian may use 2x2 building blocks, which come first
  if (doc.contains("blocks")) {
    const json& bl = R::arr(doc, "blocks", "");
    for (size_t k = 0; k < bl.size(); ++k) add_op(bl[k], "/blocks/" + std::to_string(k), false);
  }
  env.dim = m.dim;
  m.hamiltonian = at_path("/hamiltonian", [&] { return parse_operator(ham, env); });
  m.grading = at_path("/grading", [&] { return parse_operator(grad, env); });
  env.ops["H"] = m.hamiltonian;
  for (const char* sec : {"operators", "generators", "products"}) {
    if (!doc.contains(sec)) continue;
    const json& a = R::arr(doc, sec, "");
    for (size_t k = 0; k < a.size(); ++k)
      add_op(a[k], std::string("/") + sec + "/" + std::to_string(k), std::string(sec) == "generators");
  }

  // equations, derived from the Hamiltonian when absent
  if (!doc.contains("equations")) {
    json arr = json::array();
    for (const auto& e : equations_from(m.hamiltonian, q, with_conj)) arr.push_back(e.str());
    doc["equations"] = arr;
  }
  std::vector<Expr> eqs;
  const json& ej = R::arr(doc, "equations", "");
  for (size_t k = 0; k < ej.size(); ++k) {
    std::string p = "/equations/" + std::to_string(k);
    std::string s = R::str(ej[k], p);
    eqs.push_back(at_path(p, [&] { return parse(s, tab); }));
  }
  m.system = at_path("/equations", [&] { return PDESystem(tab.coordinates, q, with_conj, eqs); });

  // tables
  if (doc.contains("tables")) {
    const json& ta = R::arr(doc, "tables", "");
    for (size_t k = 0; k < ta.size(); ++k) {
      std::string p = "/tables/" + std::to_string(k);
      StructureTable t;
      t.name = R::str(ta[k], "name", p);
      t.rows = R::str_list(R::field(ta[k], "rows", p), p + "/rows");
      t.cols = R::str_list(R::field(ta[k], "cols", p), p + "/cols");
      t.basis = ta[k].contains("basis") ? R::str_list(ta[k].at("basis"), p + "/basis") : t.cols;
      t.graded = ta[k].value("graded", false);
      t.mode = mode_from(R::opt_str(ta[k], "mode", p), p + "/mode");
      t.substitution = R::opt_str(ta[k], "substitution", p);
      for (const auto& v : {t.rows, t.cols, t.basis})
        for (const auto& n : v)
          if (!m.ops.count(n)) throw ModelError(p, "unknown basis name " + n);
      const json& cells = R::arr(ta[k], "cells", p);
      for (size_t c = 0; c < cells.size(); ++c) {
        std::string cp = p + "/cells/" + std::to_string(c);
        TableCell cell;
        cell.row = R::str(cells[c], "row", cp);
        cell.col = R::str(cells[c], "col", cp);
        cell.value = R::str(cells[c], "value", cp);
        cell.suspect = cells[c].value("suspect", false);
        cell.coeffs = parse_combination(cell.value, m, t.basis, cp + "/value");
        t.cells.push_back(std::move(cell));
      }
      m.tables.push_back(std::move(t));
    }
  }

  if (doc.contains("relations")) {
    const json& ra = R::arr(doc, "relations", "");
    for (size_t k = 0; k < ra.size(); ++k) {
      std::string p = "/relations/" + std::to_string(k);
      Relation r;
      r.name = R::str(ra[k], "name", p);
      r.lhs = R::str(ra[k], "lhs", p);
      r.rhs = R::str(ra[k], "rhs", p);
      r.mode = mode_from(R::opt_str(ra[k], "mode", p), p + "/mode");
      r.substitution = R::opt_str(ra[k], "substitution", p);
      r.expect_equal = ra[k].value("expect_equal", true);
      at_path(p + "/lhs", [&] { return m.parse_op(r.lhs); });
      at_path(p + "/rhs", [&] { return m.parse_op(r.rhs); });
      m.relations.push_back(std::move(r));
    }
  }

  if (doc.contains("closures")) {
    const json& ca = R::arr(doc, "closures", "");
    for (size_t k = 0; k < ca.size(); ++k) {
      std::string p = "/closures/" + std::to_string(k);
      ClosureSpec c;
      c.name = R::str(ca[k], "name", p);
      c.basis = R::str_list(R::field(ca[k], "basis", p), p + "/basis");
      for (const auto& n : c.basis)
        if (!m.ops.count(n)) throw ModelError(p + "/basis", "unknown operator " + n);
      c.graded = ca[k].value("graded", true);
      c.mode = mode_from(R::opt_str(ca[k], "mode", p), p + "/mode");
      c.substitution = R::opt_str(ca[k], "substitution", p);
      c.expect_closed = ca[k].value("expect_closed", true);
      if (ca[k].contains("probes")) {
        const json& pr = R::arr(ca[k], "probes", p);
        for (size_t j = 0; j < pr.size(); ++j) {
          std::string pp = p + "/probes/" + std::to_string(j);
          ClosureProbe cp{R::str(pr[j], "expr", pp), R::opt_str(pr[j], "expect", pp)};
          if (cp.expect != "" && cp.expect != "in-span" && cp.expect != "not-in-span")
            throw ModelError(pp + "/expect", "expect must be in-span or not-in-span");
          at_path(pp + "/expr", [&] { return m.parse_op(cp.expr); });
          c.probes.push_back(cp);
        }
      }
      m.closures.push_back(std::move(c));
    }
  }

  if (doc.contains("dictionary")) {
    m.dictionary = R::str_list(doc.at("dictionary"), "/dictionary");
    for (size_t k = 0; k < m.dictionary.size(); ++k)
      at_path("/dictionary/" + std::to_string(k), [&] { return parse(m.dictionary[k], tab); });
  }

  if (doc.contains("solutions")) {
    const json& sa = R::arr(doc, "solutions", "");
    for (size_t k = 0; k < sa.size(); ++k) {
      std::string p = "/solutions/" + std::to_string(k);
      auto comps = R::str_list(sa[k], p);
      if (static_cast<int>(comps.size()) != m.dim) throw ModelError(p, "solution needs one entry per component");
      std::vector<Expr> v;
      for (size_t c = 0; c < comps.size(); ++c)
        v.push_back(at_path(p + "/" + std::to_string(c), [&] { return parse(comps[c], tab); }));
      m.solutions.push_back(std::move(v));
    }
  }

  if (doc.contains("ansatz")) {
    const json& a = doc.at("ansatz");
    const std::string p = "/ansatz";
    SymbolTable atab = tab;
    const json& unk = R::arr(a, "unknowns", p);
    std::vector<std::string> unknown_names;
    for (size_t k = 0; k < unk.size(); ++k) {
      std::string up = p + "/unknowns/" + std::to_string(k);
      std::string n = R::str(unk[k], "name", up), c = "c" + n;
      size_t arity = tab.coordinates.size();
      atab.declare_function(n, arity, c);
      atab.declare_function(c, arity, n);
      unknown_names.push_back(n);
    }
    AnsatzSolution sol;
    for (const auto& c : R::str_list(R::field(a, "constants", p), p + "/constants")) {
      if (tab.params.count(c) || tab.definitions.count(c)) throw ModelError(p + "/constants", "name clash: " + c);
      sol.constants.push_back(atab.declare_param(c));
    }
    JetVectorField general = JetVectorField::general(m.system);
    std::vector<AtomP> args = general.base_symbols();
    const json& fns = R::field(a, "functions", p);
    if (!fns.is_object()) throw ModelError(p + "/functions", "expected an object");
    for (const auto& [fname, body] : fns.items()) {
      std::string fp = p + "/functions/" + fname;
      std::string s = R::str(body, fp);
      Expr e = at_path(fp, [&] { return parse(s, atab); });
      sol.functions[fname] = {args, e};
      // conjugate partner of a Phi component
      if (fname.rfind("Phi", 0) == 0) sol.functions["c" + fname] = {args, conj(e)};
    }
    sol.solution_functions = unknown_names;
    const json& inst = R::arr(a, "instances", p);
    std::vector<AtomP> fargs = tab.coordinates;
    for (size_t k = 0; k < inst.size(); ++k) {
      std::string ip = p + "/instances/" + std::to_string(k);
      FunctionBindings fb;
      for (const auto& n : unknown_names) {
        std::string s = R::str(inst[k], n, ip);
        Expr e = at_path(ip + "/" + n, [&] { return parse(s, tab); });
        fb[n] = {fargs, e};
        fb["c" + n] = {fargs, conj(e)};
      }
      sol.instances.push_back(std::move(fb));
    }
    m.ansatz = std::move(sol);
  }

  m.document = doc.dump(2);
  validate(m);
  return m;
}

void validate(const ModelSpec& m, uint64_t seed, int trials) {
  if (m.grading.dim() != m.dim) throw ValidationError("grading has the wrong dimension");
  if (auto r = equals(compose(m.grading, m.grading), MatrixDiffOp::identity(m.dim), seed, trials); !r)
    throw ValidationError("grading does not square to the identity: " + r.str());
  if (m.hamiltonian.max_order(0) > 0) throw ValidationError("Hamiltonian contains Dt");
  MatrixDiffOp L = MatrixDiffOp::scalar(m.dim, Expr::imag_unit(), MultiIndex(1, 0, 0)) - m.hamiltonian;
  for (size_t k = 0; k < m.solutions.size(); ++k) {
    auto res = pk::apply(L, m.solutions[k]);
    for (size_t c = 0; c < res.size(); ++c)
      if (auto z = is_zero(res[c], seed, trials); !z)
        throw ValidationError("solution " + std::to_string(k) + " component " + std::to_string(c) +
                              " is not annihilated by i*Dt - H: " + (z.witness ? z.witness->str() : ""));
  }
}

std::string export_model(const ModelSpec& m) { return m.document + "\n"; }

ModelSpec load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("", "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

void save_model(const ModelSpec& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << export_model(m);
}

ModelSpec resolve_model(const std::string& id) {
  for (const auto& n : builtin_names())
    if (id == n) return builtin(id);
  if (id.rfind("jc_generalized(", 0) == 0) return builtin(id);
  return load_model(id);
}

}  // namespace pk

namespace pk {

DeterminingSystem determining_system(const ModelSpec& m, int order) {
  return collect_determining(invariance_residual(JetVectorField::general(m.system), m.system, order));
}

AnsatzReport check_ansatz(const ModelSpec& m, uint64_t seed, int trials) {
  if (!m.ansatz) throw ModelError("/ansatz", "model " + m.name + " has no ansatz");
  return verify_ansatz(determining_system(m, m.system.order()), *m.ansatz, seed, trials);
}

}  // namespace pk
