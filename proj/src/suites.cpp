#include "pk/suites.hpp"

#include "pk/numcheck.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace pk {

using json = nlohmann::ordered_json;

namespace {

constexpr double kGeneratorTol = 1e-9;
constexpr double kResidualTol = 1e-5, kGroupTol = 1e-8, kConsistencyTol = 1e-6;
const std::string kShiftSubstitution = "kappa_physical+alpha_beta_shift";

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

std::vector<SuiteSection> algebra(const ModelSpec& m, const SuiteOptions& opt) {
  std::vector<SuiteSection> out;
  for (const auto& t : m.tables) {
    TableReport r = verify_table(m, t, opt.seed, opt.trials);
    SuiteSection s{"algebra", "table " + t.name, r.passed(), {}, {}, r.to_text(), r.to_json()};
    for (const auto& c : r.cells)
      if (c.suspect && c.status != CellStatus::Match)
        s.warnings.push_back("suspect printed cell (" + c.row + ", " + c.col + "): printed " + c.expected +
                             ", computed " + c.computed + (c.adjudicated ? " (antisymmetric to mirror)" : ""));
    out.push_back(std::move(s));
  }
  for (const auto& c : m.closures) {
    ClosureReport r = closure_check(m, c, opt.seed, opt.trials);
    bool ok = r.error.empty() && r.closed() == c.expect_closed && r.jacobi_holds() && r.probes_pass();
    SuiteSection s{"algebra", "closure " + c.name, ok, {}, {}, r.to_text(), r.to_json()};
    if (!c.expect_closed && !r.closed()) s.notes.push_back("not closed, as expected");
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<SuiteSection> supercharges(const ModelSpec& m, const SuiteOptions& opt) {
  std::vector<SuiteSection> out;
  std::vector<RelationReport> rs;
  int skipped = 0;
  for (const auto& r : m.relations) {
    if (r.substitution == kShiftSubstitution && !opt.alpha_beta_shift) {
      ++skipped;
      continue;
    }
    rs.push_back(check_relation(m, r, opt.seed, opt.trials));
  }
  if (!rs.empty()) {
    std::ostringstream os;
    bool ok = true;
    for (const auto& r : rs) {
      ok = ok && r.pass();
      os << (r.pass() ? "PASS " : "FAIL ") << r.name << ": " << r.lhs << (r.expect_equal ? " == " : " != ") << r.rhs;
      if (!r.substitution.empty()) os << "  [" << r.substitution << "]";
      os << "\n";
      if (!r.pass() && !r.witness.empty()) os << "  witness: " << r.witness << "\n";
    }
    SuiteSection s{"supercharges", "relations", ok, {}, {}, os.str(), relations_json(m.name, rs)};
    if (skipped)
      s.notes.push_back(std::to_string(skipped) + " relations under " + kShiftSubstitution +
                        " skipped; pass --alpha-beta-shift to run them");
    out.push_back(std::move(s));
  }
  // designed (non-)closure probes
  for (const auto& c : m.closures) {
    if (c.probes.empty()) continue;
    ClosureSpec only = c;
    ClosureReport r = closure_check(m, only, opt.seed, opt.trials, false);
    std::ostringstream os;
    json pr = json::array();
    for (const auto& p : r.probes) {
      os << (p.pass() ? "PASS " : "FAIL ") << p.expr << ": "
         << (p.expansion.in_span ? "in span, = " + p.expansion.str() : std::string("not in span"));
      if (!p.expect.empty()) os << " (expected " << p.expect << ")";
      os << "\n";
      pr.push_back({{"expr", p.expr}, {"expect", p.expect}, {"in_span", p.expansion.in_span}, {"pass", p.pass()}});
    }
    json j = {{"model", m.name}, {"closure", c.name}, {"probes", pr}};
    out.push_back({"supercharges", "probes " + c.name, r.probes_pass(), {}, {}, os.str(), j.dump(2)});
  }
  return out;
}

std::vector<SuiteSection> solutions(const ModelSpec& m, const SuiteOptions& opt) {
  std::vector<SuiteSection> out;
  SuiteSection v{"solutions", "validate", true, {}, {}, {}, {}};
  try {
    validate(m, opt.seed, opt.trials);
    v.text = "Gamma^2 = Id and all " + std::to_string(m.solutions.size()) + " stored solutions solve the equation\n";
  } catch (const std::exception& e) {
    v.pass = false;
    v.text = std::string("FAIL ") + e.what() + "\n";
  }
  v.json = json{{"model", m.name}, {"solutions", m.solutions.size()}, {"pass", v.pass}}.dump(2);
  out.push_back(std::move(v));

  SuiteSection g{"solutions", "generator residuals", true, {}, {}, {}, {}};
  std::ostringstream os;
  json arr = json::array();
  for (const auto& gen : m.generators()) {
    double worst = 0;
    for (size_t k = 0; k < m.solutions.size(); ++k) {
      NumResult r = generator_residual(m, gen, m.solutions[k], opt.seed);
      worst = std::max(worst, r.value);
      if (!(r.value <= kGeneratorTol)) os << "FAIL " << gen.name << " on solution " << k << ": " << r.str() << "\n";
    }
    g.pass = g.pass && worst <= kGeneratorTol;
    arr.push_back({{"generator", gen.name}, {"max_residual", worst}, {"pass", worst <= kGeneratorTol}});
  }
  os << m.generator_names.size() << " generators on " << m.solutions.size() << " solutions, tolerance "
     << sci(kGeneratorTol) << ": " << (g.pass ? "all within" : "failures above") << "\n";
  g.text = os.str();
  g.json = json{{"model", m.name}, {"generators", arr}}.dump(2);
  out.push_back(std::move(g));
  return out;
}

std::vector<SuiteSection> ansatz(const ModelSpec& m, const SuiteOptions& opt) {
  std::vector<SuiteSection> out;
  DeterminingSystem det = determining_system(m, m.system.order());
  std::ostringstream os;
  os << det.equations.size() << " determining equations\n";
  for (const auto& f : det.findings) os << "  " << f << "\n";
  json jd = {{"model", m.name}, {"equations", det.equations.size()}, {"findings", det.findings}};
  bool forced = !det.findings.empty();
  out.push_back({"ansatz", "jet independence", forced, {}, {}, os.str(), jd.dump(2)});

  if (!m.ansatz) {
    out.back().notes.push_back("model has no closed-form ansatz");
    return out;
  }
  AnsatzReport r = verify_ansatz(det, *m.ansatz, opt.seed, opt.trials);
  std::ostringstream at;
  at << (r.passed() ? "PASS" : "FAIL") << " ansatz: " << r.independent_constants << " constants, "
     << r.instances << " instances, " << r.checks.size() << " checks\n"
     << r.str();
  json ja = {{"model", m.name},
             {"constants", r.independent_constants},
             {"instances", r.instances},
             {"checks", r.checks.size()},
             {"pass", r.passed()}};
  out.push_back({"ansatz", "closed-form ansatz", r.passed(), {}, {}, at.str(), ja.dump(2)});
  return out;
}

std::vector<SuiteSection> finite(const ModelSpec& m, const SuiteOptions& opt) {
  std::vector<FiniteRow> rows = finite_suite(m, 0.3, opt.seed);
  SuiteSection s{"finite", "finite transformations", true, {}, {}, {}, finite_json(rows)};
  std::ostringstream os;
  for (const auto& r : rows) {
    bool ok = r.pass(kResidualTol, kGroupTol, kConsistencyTol);
    double res = r.residual.empty() ? 0 : *std::max_element(r.residual.begin(), r.residual.end());
    os << (r.printed ? "INFO " : ok ? "PASS " : "FAIL ") << r.transformation << " (" << r.generator
       << "): residual " << sci(res) << ", group " << sci(r.group) << ", consistency " << sci(r.consistency) << "\n";
    if (r.printed)
      s.notes.push_back(r.transformation + " is the literal printed form, kept for comparison");
    else
      s.pass = s.pass && ok;
  }
  if (rows.empty()) s.notes.push_back("model lists no finite transformations");
  s.text = os.str();
  return {s};
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> n{"algebra", "ansatz", "supercharges", "solutions", "finite", "all"};
  return n;
}

SuiteReport run_suite(const ModelSpec& m, const std::string& suite, const SuiteOptions& opt) {
  if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
    throw UnknownSuite("unknown suite " + suite);
  SuiteReport rep{m.name, suite, opt, {}};
  auto add = [&](std::vector<SuiteSection> s) {
    for (auto& x : s) rep.sections.push_back(std::move(x));
  };
  bool all = suite == "all";
  if (all || suite == "algebra") add(algebra(m, opt));
  if (all || suite == "supercharges") add(supercharges(m, opt));
  if (all || suite == "solutions") add(solutions(m, opt));
  if (all || suite == "ansatz") add(ansatz(m, opt));
  if (all || suite == "finite") add(finite(m, opt));
  return rep;
}

bool SuiteReport::passed() const {
  return std::all_of(sections.begin(), sections.end(), [](const SuiteSection& s) { return s.pass; });
}

std::string SuiteReport::to_text() const {
  std::ostringstream os;
  for (const auto& s : sections) {
    os << "== " << s.suite << ": " << s.name << " [" << (s.pass ? "PASS" : "FAIL") << "]\n" << s.text;
    for (const auto& w : s.warnings) os << "warning: " << w << "\n";
    for (const auto& n : s.notes) os << "note: " << n << "\n";
  }
  int pass = 0;
  for (const auto& s : sections) pass += s.pass;
  os << model << " " << suite << ": " << pass << "/" << sections.size() << " sections pass -> "
     << (passed() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

std::string SuiteReport::to_json() const {
  json secs = json::array();
  for (const auto& s : sections) {
    json j = {{"suite", s.suite}, {"name", s.name}, {"pass", s.pass}};
    if (!s.warnings.empty()) j["warnings"] = s.warnings;
    if (!s.notes.empty()) j["notes"] = s.notes;
    j["report"] = s.json.empty() ? json(nullptr) : json::parse(s.json);
    secs.push_back(std::move(j));
  }
  json out = {{"model", model},
              {"suite", suite},
              {"seed", options.seed},
              {"trials", options.trials},
              {"alpha_beta_shift", options.alpha_beta_shift},
              {"pass", passed()},
              {"sections", secs}};
  return out.dump(2);
}

std::string canonical_op_name(const std::string& name) {
  if (name.size() > 1 && name.back() == '+') return name.substr(0, name.size() - 1) + "p";
  if (name.size() > 1 && name.back() == '-') return name.substr(0, name.size() - 1) + "m";
  return name;
}

std::string BracketResult::str() const {
  if (expansion.in_span) return kind + " = " + expansion.str();
  std::string s = kind + ": not in span of {";
  for (size_t k = 0; k < basis.size(); ++k) s += (k ? ", " : "") + basis[k];
  s += "}";
  if (expansion.witness) s += "; residual " + expansion.witness->str();
  return s;
}

BracketResult bracket_names(const ModelSpec& m, const std::string& a, const std::string& b, uint64_t seed,
                            int trials) {
  BracketResult out;
  out.a = canonical_op_name(a);
  out.b = canonical_op_name(b);
  for (const auto& n : {out.a, out.b})
    if (!m.has_op(n)) throw std::out_of_range("model " + m.name + " has no operator " + n);

  auto holds = [&](const std::vector<std::string>& basis) {
    return std::find(basis.begin(), basis.end(), out.a) != basis.end() &&
           std::find(basis.begin(), basis.end(), out.b) != basis.end();
  };
  bool graded = true;
  Mode mode = Mode::Exact;
  std::string subst;
  out.basis = m.generator_names;
  out.basis_source = "generators";
  bool found = false;
  // graded bases first, so odd pairs get anticommutators
  for (bool want_graded : {true, false}) {
    for (const auto& t : m.tables)
      if (!found && t.graded == want_graded && holds(t.basis)) {
        out.basis = t.basis, graded = t.graded, mode = t.mode, subst = t.substitution;
        out.basis_source = "table " + t.name, found = true;
      }
    for (const auto& c : m.closures)
      if (!found && c.graded == want_graded && holds(c.basis)) {
        out.basis = c.basis, graded = c.graded, mode = c.mode, subst = c.substitution;
        out.basis_source = "closure " + c.name, found = true;
      }
  }
  if (!found && !m.closures.empty()) {
    const ClosureSpec& c = m.closures.back();
    out.basis = c.basis, graded = c.graded, mode = c.mode, subst = c.substitution;
    out.basis_source = "closure " + c.name;
  }

  const Bindings& b_ = m.substitution(subst);
  auto gen = [&](const std::string& n) {
    GradedGenerator g = m.op(n);
    g.op = substitute(g.op, b_);
    return g;
  };
  GradedGenerator ga = gen(out.a), gb = gen(out.b);
  BracketKind k = BracketKind::Commutator;
  if (graded && ga.parity == Parity::Odd && gb.parity == Parity::Odd) k = BracketKind::Anticommutator;
  out.kind = k == BracketKind::Anticommutator ? "anticommutator" : "commutator";

  std::vector<GradedGenerator> basis;
  for (const auto& n : out.basis) basis.push_back(gen(n));
  MatrixDiffOp H = substitute(m.hamiltonian, b_);
  ExpandOptions eo = model_expand_options(m, mode, b_, &H, seed, trials);
  out.expansion = expand_in_basis(bracket(ga.op, gb.op, k), basis, eo);
  return out;
}

}  // namespace pk
