#include "doctest.h"
#include "pk/algebra.hpp"
#include "random_expr.hpp"

using namespace pk;

namespace {

std::vector<GradedGenerator> pick(const ModelSpec& m, const std::vector<std::string>& names) {
  std::vector<GradedGenerator> out;
  for (const auto& n : names) out.push_back(m.op(n));
  return out;
}

ExpandOptions opts(const ModelSpec& m, Mode mode = Mode::Exact) {
  return model_expand_options(m, mode, {}, &m.hamiltonian, kDefaultSeed, kDefaultTrials);
}

bool same(const std::optional<Expr>& a, const Expr& b) { return a && is_zero(*a - b).zero; }

const CellReport& cell(const TableReport& r, const std::string& row, const std::string& col) {
  for (const auto& c : r.cells)
    if (c.row == row && c.col == col) return c;
  throw std::runtime_error("no cell " + row + "," + col);
}

}  // namespace

TEST_CASE("expand_in_basis: jc translations") {
  ModelSpec m = builtin("jc");
  auto basis = pick(m, {"X1", "X2", "X3", "X4", "X5", "X6"});
  // [X2, X3] = -X4
  BasisExpansion e = expand_in_basis(commutator(m.op("X2").op, m.op("X3").op), basis, opts(m));
  REQUIRE(e.in_span);
  CHECK(same(e.coeff("X4"), Expr(-1)));
  for (const char* n : {"X1", "X2", "X3", "X5", "X6"}) CHECK(same(e.coeff(n), Expr()));
  // [X3, X4] = -eB X5: parameter-dependent structure constant
  BasisExpansion f = expand_in_basis(commutator(m.op("X3").op, m.op("X4").op), basis, opts(m));
  REQUIRE(f.in_span);
  CHECK(same(f.coeff("X5"), m.parse_expr("-e*B")));
}

TEST_CASE("expand_in_basis: oscillator supercharges on shell") {
  ModelSpec m = builtin("susy_oscillator");
  auto basis = pick(m, {"H0", "Cm", "Cp", "Y", "Qm", "Qp", "Sm", "Sp"});
  BasisExpansion e =
      expand_in_basis(anticommutator(m.op("Qp").op, m.op("Qm").op), basis, opts(m, Mode::OnShell));
  REQUIRE(e.in_span);
  CHECK(same(e.coeff("H0"), Expr(1)));
  CHECK(same(e.coeff("Y"), m.parse_expr("-w")));
  CHECK(same(e.coeff("Cm"), Expr()));
}

TEST_CASE("expand_in_basis: zero and out-of-span inputs") {
  ModelSpec m = builtin("susy_oscillator");
  auto basis = pick(m, {"X1", "X2", "X3", "X4", "X5", "X6"});
  BasisExpansion z = expand_in_basis(MatrixDiffOp::zero(2), basis, opts(m));
  REQUIRE(z.in_span);
  for (const auto& c : z.coeffs) CHECK(c.is_zero());
  CHECK(z.str() == "0");
  // x^3 d/dx is not a symmetry
  BasisExpansion n = expand_in_basis(m.parse_op("x^3*Dx"), basis, opts(m));
  CHECK_FALSE(n.in_span);
  REQUIRE(n.witness);
  CHECK_FALSE(n.witness->equal);
}

TEST_CASE("property: expand_in_basis is a left inverse of linear combination") {
  ModelSpec m = builtin("susy_oscillator");
  std::vector<std::string> names{"X1", "X2", "X3", "X4", "X5", "X6", "X7", "X8", "X9"};
  auto basis = pick(m, names);
  Expander ex(basis, opts(m));
  pktest::RandomExpr g(5);
  Expr w = m.parse_expr("w");
  for (int trial = 0; trial < 12; ++trial) {
    std::vector<Expr> c;
    MatrixDiffOp sum(2);
    for (size_t k = 0; k < basis.size(); ++k) {
      Expr ck = Expr::ratio(g.pick(9) - 4, g.pick(4) + 1);
      if (g.pick(3) == 0) ck = ck * w;
      if (g.pick(4) == 0) ck = ck * Expr::imag_unit();
      c.push_back(ck);
      sum = sum + ck * basis[k].op;
    }
    BasisExpansion e = ex.expand(sum);
    REQUIRE(e.in_span);
    for (size_t k = 0; k < basis.size(); ++k) CHECK(same(e.coeff(names[k]), c[k]));
  }
}

TEST_CASE("property: brackets are graded antisymmetric") {
  ModelSpec m = builtin("susy_oscillator");
  auto ops = pick(m, {"H0", "Cm", "Qp", "Sm", "Y", "Tp"});
  for (const auto& a : ops)
    for (const auto& b : ops) {
      MatrixDiffOp ab = graded_bracket(a, b), ba = graded_bracket(b, a);
      bool both_odd = a.parity == Parity::Odd && b.parity == Parity::Odd;
      CHECK(ab == (both_odd ? ba : -ba));
      // grading consistency: bracket parity is the sum of parities
      Parity p = classify_parity(ab, m.grading);
      if (!ab.is_zero()) CHECK(p == ((a.parity == b.parity) ? Parity::Even : Parity::Odd));
    }
}

TEST_CASE("verify_table: oscillator bosonic table matches everywhere") {
  ModelSpec m = builtin("susy_oscillator");
  TableReport r = verify_table(m, "bosonic");
  CHECK(r.cells.size() == 36);
  CHECK(r.matches() == 36);
  CHECK(r.passed());
  // [X1, X2] = X3/(2w)
  CHECK(cell(r, "X1", "X2").status == CellStatus::Match);
  CHECK(cell(r, "X4", "X5").expected == "M*w*X6");
}

TEST_CASE("verify_table: osp(2/2) with printed typos adjudicated") {
  ModelSpec m = builtin("susy_oscillator");
  TableReport r = verify_table(m, "osp22");
  CHECK(cell(r, "Sm", "Sp").status == CellStatus::Match);
  CHECK(cell(r, "Qp", "Qm").status == CellStatus::Match);
  CHECK(cell(r, "Qp", "Sm").status == CellStatus::Match);
  // printed -2 S-, antisymmetry with the (Y, S+) cell gives -S+
  const CellReport& c = cell(r, "Sp", "Y");
  CHECK(c.status == CellStatus::Mismatch);
  CHECK(c.suspect);
  CHECK(c.adjudicated);
  REQUIRE(c.expansion);
  CHECK(same(c.expansion->coeff("Sp"), Expr(-1)));
  CHECK(same(c.expansion->coeff("Sm"), Expr()));
  CHECK(r.mismatches() == 4);
  CHECK(r.passed());
  CHECK(verify_table(m, "osp22_extension").passed());
}

TEST_CASE("verify_table: pauli antisymmetry typo") {
  ModelSpec m = builtin("pauli_2d");
  TableReport r = verify_table(m, "bosonic");
  const CellReport& c = cell(r, "X0", "X1");
  CHECK(c.status == CellStatus::Mismatch);
  REQUIRE(c.expansion);
  // [X0, X1] = 2w X2, the negative of the printed (X1, X0) entry
  CHECK(same(c.expansion->coeff("X2"), m.parse_expr("2*w")));
  CHECK(c.adjudicated);
  CHECK(cell(r, "X1", "X0").status == CellStatus::Match);
  CHECK(r.mismatches() == 1);
}

TEST_CASE("verify_table: report formats") {
  ModelSpec m = builtin("jc");
  TableReport r = verify_table(m, "symmetries");
  CHECK(r.passed());
  std::string j = r.to_json();
  CHECK(j.find("\"model\": \"jc\"") != std::string::npos);
  CHECK(j.find("\"status\": \"match\"") != std::string::npos);
  CHECK(r.to_text().find("36/36") != std::string::npos);
  CHECK_THROWS_AS(verify_table(m, "nope"), std::invalid_argument);
}

TEST_CASE("closure: jc closes as a Lie algebra only") {
  ModelSpec m = builtin("jc");
  ClosureReport lie = closure_check(m, m.closures[0]);
  CHECK(lie.error.empty());
  CHECK(lie.closed());
  CHECK(lie.jacobi_holds());
  ClosureReport graded = closure_check(m, m.closures[1]);
  REQUIRE(graded.probes.size() == 1);
  // (Q+ - Q-)^2 is not a combination of the basis
  CHECK_FALSE(graded.probes[0].expansion.in_span);
  CHECK(graded.probes[0].pass());
  CHECK_FALSE(graded.closed());
}

TEST_CASE("closure: trivial basis, mixed parity, dimension errors") {
  ModelSpec m = builtin("susy_oscillator");
  ClosureReport one = closure_check({m.op("I")}, true, opts(m));
  CHECK(one.closed());
  CHECK(one.pairs.empty());
  // mixed-parity elements take commutators
  GradedGenerator mixed{"mixed", m.parse_op("s0 + sp"), Parity::Neither};
  ClosureReport r = closure_check({m.op("I"), mixed}, true, opts(m));
  REQUIRE(r.pairs.size() == 1);
  CHECK(r.pairs[0].kind == "commutator");
  CHECK(r.closed());
  GradedGenerator big{"big", MatrixDiffOp::identity(4), Parity::Even};
  ClosureReport err = closure_check({m.op("I"), big}, true, opts(m));
  CHECK_FALSE(err.error.empty());
  CHECK_FALSE(err.closed());
}

TEST_CASE("closure: oscillator superalgebra with super-Jacobi") {
  ModelSpec m = builtin("susy_oscillator");
  ClosureSpec c;
  c.basis = {"H0", "Cm", "Cp", "Y", "Qm", "Qp", "Sm", "Sp", "Am", "Ap", "I", "Tm", "Tp"};
  c.mode = Mode::OnShell;
  ClosureReport r = closure_check(m, c);
  CHECK(r.closed());
  CHECK(r.jacobi_holds());
  CHECK(r.jacobi.size() == 455);  // unordered triples with repetition of 13 elements
}

TEST_CASE("supercharge suite outcomes") {
  auto find = [](const std::vector<RelationReport>& rs, const std::string& n) {
    for (const auto& r : rs)
      if (r.name == n) return r;
    throw std::runtime_error("no relation " + n);
  };
  auto osc = supercharge_suite(builtin("susy_oscillator"));
  for (const auto& r : osc) CHECK_MESSAGE(r.pass(), r.name);
  auto gen = supercharge_suite(builtin("jc_generalized"));
  CHECK_FALSE(find(gen, "QQ_anti").equal);
  CHECK(find(gen, "QQ_anti_corrected").equal);
  CHECK_FALSE(find(gen, "QQ_anti_unshifted").equal);
  CHECK(find(gen, "Tp0_QQm").equal);
  auto std_susy = supercharge_suite(builtin("jc_standard_susy"));
  CHECK_FALSE(find(std_susy, "block_form_printed").equal);
  CHECK(find(std_susy, "block_form").equal);
  CHECK(find(std_susy, "QtpQtm").equal);
  CHECK(relations_json("jc_standard_susy", std_susy).find("block_form_printed") != std::string::npos);
}
