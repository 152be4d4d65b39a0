#include "doctest.h"
#include "pk/operator.hpp"
#include "random_expr.hpp"

using namespace pk;

namespace {

MatrixDiffOp op(const std::string& s, int n = 2) { return parse_operator(s, n); }

OpEnv susy_env() {
  OpEnv env;
  env.dim = 2;
  env.ops["ax"] = op("1/sqrt(2*M*w)*(M*w*x + Dx)");
  env.ops["axd"] = op("1/sqrt(2*M*w)*(M*w*x - Dx)");
  env.ops["Am"] = op("1/sqrt(2*M*w)*exp(i*w*t)*(M*w*x + Dx)");
  env.ops["Ap"] = op("1/sqrt(2*M*w)*exp(-i*w*t)*(M*w*x - Dx)");
  env.ops["Tp"] = op("exp(i*w*t)*sp");
  env.ops["Tm"] = op("exp(-i*w*t)*sm");
  env.ops["H0"] = op("i*Dt + w/2*s3");
  env.ops["Y"] = op("1/2*s3");
  env.ops["H"] = op("(-1/(2*M)*Dx^2 + M*w^2*x^2/2)*s0 - w/2*s3");
  return env;
}

}  // namespace

TEST_CASE("compose: one-variable Leibniz") {
  CHECK(compose(op("Dx"), op("x")) == op("x*Dx + 1"));
  CHECK(compose(op("Dx^2"), op("x^2")) == op("x^2*Dx^2 + 4*x*Dx + 2"));
  CHECK(compose(op("Dt*Dx"), op("t*x")) == op("t*x*Dt*Dx + t*Dt + x*Dx + 1"));
  CHECK_THROWS_AS(compose(op("Dx"), op("Dx", 4)), std::invalid_argument);
}

TEST_CASE("operator literal round trip") {
  MatrixDiffOp h = op("[[i*Dt + (1/(2*M))*Dx^2 - (M*w^2/2)*x^2 + w/2, 0],[0, i*Dt + (1/(2*M))*Dx^2 - (M*w^2/2)*x^2 - w/2]]");
  CHECK(op(h.str()) == h);
  CHECK(h.at(0, 0).size() == 3);
  CHECK(op("[[0, x*Dx],[Dt, 1]]").str() == "[[0, x*Dx], [Dt, 1]]");
  // 2x2 blocks inside a 4x4 literal
  MatrixDiffOp big = op("[[s3, 0],[0, Dx]]", 4);
  CHECK(big.at(1, 1) == ScalarOp{{MultiIndex{}, Expr(-1)}});
  CHECK(big.at(3, 3) == ScalarOp{{MultiIndex(0, 1, 0), Expr(1)}});
  CHECK_THROWS_AS(op("[[1, 2],[3]]"), ParseError);
}

TEST_CASE("products of the oscillator realization") {
  OpEnv env = susy_env();
  auto e = [&](const std::string& s) { return parse_operator(s, env); };
  // T+ A+ is the time-independent a^dagger sigma+
  CHECK(equals(compose(e("Tp"), e("Ap")), e("axd*sp")));
  CHECK(equals(commutator(e("ax"), e("axd")), e("1")));
  CHECK(equals(commutator(e("Am"), e("Ap")), e("s0")));
  CHECK(equals(anticommutator(e("Tm"), e("Tp")), e("s0")));
  CHECK(equals(e("H"), e("w*(axd*ax + 1/2)*s0 - w/2*s3")));
  // {Q+, Q-} = H0 - w Y holds on solutions only
  MatrixDiffOp Qp = e("sqrt(w)*Tp*Ap"), Qm = e("sqrt(w)*Tm*Am");
  MatrixDiffOp H = e("H");
  CHECK_FALSE(equals(anticommutator(Qp, Qm), e("H0 - w*Y")));
  CHECK(equals(anticommutator(Qp, Qm), e("H0 - w*Y"), Mode::OnShell, &H));
  CHECK(equals(anticommutator(Qp, Qm), H));
  CHECK(commutator(e("H0"), e("H0")).is_zero());
}

TEST_CASE("equals reports the differing entry") {
  auto r = equals(sigma(0), sigma(3));
  CHECK_FALSE(r.equal);
  CHECK(r.row == 1);
  CHECK(r.col == 1);
  REQUIRE(r.witness);
  CHECK(equals(sigma(2), sigma(2)));
}

TEST_CASE("classify_parity") {
  MatrixDiffOp g = sigma(3);
  CHECK(classify_parity(op("exp(i*w*t)*sp"), g) == Parity::Odd);
  CHECK(classify_parity(op("Dt"), g) == Parity::Even);
  CHECK(classify_parity(op("s0 + sp"), g) == Parity::Neither);
  GradedGenerator a{"A", op("s0 + sp"), Parity::Neither}, b{"B", op("Dx"), Parity::Even};
  CHECK_THROWS_AS(graded_bracket(a, b), BracketKindError);
  GradedGenerator q{"Q", op("x*sp"), Parity::Odd};
  CHECK(graded_bracket(q, q) == anticommutator(q.op, q.op));
  CHECK(graded_bracket(b, q) == commutator(b.op, q.op));
}

TEST_CASE("apply") {
  OpEnv env = susy_env();
  auto e = [&](const std::string& s) { return parse_operator(s, env); };
  std::vector<Expr> psi{parse("exp(-M*w*x^2/2)"), parse("x*exp(-M*w*x^2/2)")};
  CHECK((pk::apply(MatrixDiffOp::identity(2), psi) == psi));
  auto killed = pk::apply(e("ax"), {psi[0], Expr(0)});
  CHECK(is_zero(killed[0]).zero);
  CHECK(killed[1].is_zero());
  // n = 0 upper component is a zero-energy state of H_SUSY
  auto res = pk::apply(e("i*Dt - H"), {psi[0], Expr(0)});
  CHECK(is_zero(res[0]).zero);
  CHECK(res[1].is_zero());
  CHECK_THROWS_AS(pk::apply(e("H"), {psi[0]}), std::invalid_argument);
}

TEST_CASE("on-shell reduction") {
  MatrixDiffOp H = op("-1/2*Dx^2 + x^2/2");
  MatrixDiffOp r = reduce_on_shell(op("Dt"), H);
  CHECK(r == op("i/2*Dx^2 - i/2*x^2"));
  CHECK_THROWS_AS(reduce_on_shell(op("Dt"), op("Dt")), std::invalid_argument);
  CHECK_THROWS_AS(reduce_on_shell(op("Dt"), op("t")), std::invalid_argument);
  // idempotent
  MatrixDiffOp s = op("x*Dt^2 + Dx*Dt");
  CHECK(reduce_on_shell(reduce_on_shell(s, H), H) == reduce_on_shell(s, H));
}

namespace {

MatrixDiffOp random_op(pktest::RandomExpr& g, int n) {
  MatrixDiffOp m(n);
  static const MultiIndex idx[] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 2, 0}, {1, 1, 0}, {0, 0, 1}};
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      for (int k = 0; k < 2; ++k) m.add_term(r, c, idx[g.pick(6)], g.polynomial(2));
  return m;
}

}  // namespace

TEST_CASE("property: composition is associative, brackets are graded") {
  pktest::RandomExpr g(5);
  for (int k = 0; k < 20; ++k) {
    MatrixDiffOp A = random_op(g, 2), B = random_op(g, 2), C = random_op(g, 2);
    REQUIRE(compose(A, compose(B, C)) == compose(compose(A, B), C));
    REQUIRE(commutator(A, B) == -commutator(B, A));
    REQUIRE(anticommutator(A, B) == anticommutator(B, A));
  }
  // odd x odd -> even, even x odd -> odd
  MatrixDiffOp g3 = sigma(3);
  for (int k = 0; k < 10; ++k) {
    MatrixDiffOp A = random_op(g, 2), B = random_op(g, 2);
    MatrixDiffOp odd1 = A - compose(g3, compose(A, g3));  // anti-diagonal part (times 2)
    MatrixDiffOp odd2 = B - compose(g3, compose(B, g3));
    MatrixDiffOp even1 = A + compose(g3, compose(A, g3));
    if (odd1.is_zero() || odd2.is_zero() || even1.is_zero()) continue;
    CHECK(classify_parity(odd1, g3) == Parity::Odd);
    CHECK(classify_parity(anticommutator(odd1, odd2), g3) == Parity::Even);
    CHECK(classify_parity(commutator(even1, odd1), g3) == Parity::Odd);
  }
}

TEST_CASE("property: apply is compatible with compose") {
  pktest::RandomExpr g(9);
  for (int k = 0; k < 15; ++k) {
    MatrixDiffOp A = random_op(g, 2), B = random_op(g, 2);
    std::vector<Expr> psi{g.any(3) * parse("exp(i*t + x)"), g.polynomial(3)};
    auto lhs = pk::apply(compose(A, B), psi);
    auto rhs = pk::apply(A, pk::apply(B, psi));
    for (int r = 0; r < 2; ++r) REQUIRE(lhs[static_cast<size_t>(r)] == rhs[static_cast<size_t>(r)]);
  }
}
