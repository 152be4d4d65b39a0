#include "doctest.h"
#include "pk/expr.hpp"
#include "pk/numeric.hpp"
#include "pk/parse.hpp"
#include "random_expr.hpp"

#include <cmath>
#include <numbers>

using namespace pk;

TEST_CASE("parse literals and grammar") {
  CHECK(parse("1/2") == Expr::ratio(1, 2));
  CHECK(parse("0.25") == Expr::ratio(1, 4));
  CHECK(parse("-x^2") == -(parse("x") * parse("x")));
  CHECK(parse("x^-1") * parse("x") == Expr(1));
  CHECK(parse("x^(-2)") == pow(parse("x"), -2));

  Expr e = parse("exp(2*i*w*t)*sin(w*t)");
  REQUIRE(e.size() == 1);
  CHECK(e.terms()[0].m.size() == 2);
  CHECK(e.terms()[0].c.is_one());

  // exponentials with the same base merge
  CHECK(parse("exp(i*w*t)*exp(i*w*t)") == parse("exp(2*i*w*t)"));
  CHECK(parse("exp(i*w*t)*exp(-i*w*t)") == Expr(1));

  Expr pot = parse("M*w^2*x^2/2");
  CHECK(pot.str() == "1/2*M*w^2*x^2");
}

TEST_CASE("parse errors carry offsets and declared symbols") {
  try {
    parse("x + * 2");
    FAIL("expected a syntax error");
  } catch (const ParseError& err) {
    CHECK(err.offset == 4);
  }
  try {
    parse("x + zeta");
    FAIL("expected an unknown identifier");
  } catch (const UnknownIdentifier& err) {
    CHECK(err.name == "zeta");
    CHECK(err.offset == 4);
    CHECK(std::string(err.what()).find("kappa") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("sin(x"), ParseError);
  CHECK_THROWS_AS(parse("1/0"), ParseError);
}

TEST_CASE("jet names") {
  Expr j = parse("u2_tx");
  auto s = j.as_symbol();
  REQUIRE(s);
  CHECK((*s)->kind == AtomKind::Jet);
  CHECK((*s)->index == 2);
  CHECK((*s)->J == MultiIndex(1, 1, 0));
  CHECK(parse("cu1_x").str() == "cu1_x");
  CHECK(parse("u1_xt") == parse("u1_tx"));
  CHECK(conj(parse("u1_x")) == parse("cu1_x"));
}

TEST_CASE("differentiate") {
  AtomP x = coord("x"), t = coord("t");
  CHECK(differentiate(parse("M*w^2*x^2/2"), x) == parse("M*w^2*x"));
  CHECK(differentiate(parse("exp(2*i*w*t)"), t) == parse("2*i*w*exp(2*i*w*t)"));
  CHECK(differentiate(parse("sin(x)"), x) == parse("cos(x)"));
  CHECK(differentiate(parse("cos(x^2)"), x) == parse("-2*x*sin(x^2)"));
  CHECK(differentiate(parse("sqrt(x)"), x) == parse("1/2*sqrt(x)^-1"));
  CHECK(differentiate(parse("x^-2"), x) == parse("-2*x^-3"));
  CHECK(differentiate(parse("w*M"), x).is_zero());

  // A1(t,x)*u1: derivative in u1 is the coefficient
  SymbolTable tab = SymbolTable::standard();
  tab.declare_function("A1", 2);
  Expr e = parse("A1(t,x)*u1", tab);
  AtomP u1 = *parse("u1").as_symbol();
  CHECK(differentiate(e, u1) == parse("A1(t,x)", tab));
  Expr dx = differentiate(e, x);
  CHECK(dx.str() == "u1*diff(A1(t,x),x)");
  CHECK(parse(dx.str(), tab) == dx);
  CHECK(differentiate(differentiate(e, x), t) == differentiate(differentiate(e, t), x));
}

TEST_CASE("substitute") {
  Expr e = parse("u1_t + x*u1");
  AtomP ut = *parse("u1_t").as_symbol();
  Expr rep = parse("i*(1/2*u1_xx - x^2*u1)");
  CHECK(substitute(e, {{ut, rep}}) == rep + parse("x*u1"));
  CHECK(substitute(e, {}) == e);
  // simultaneous, not sequential
  AtomP x = coord("x"), t = coord("t");
  CHECK(substitute(parse("x + 2*t"), {{x, sym(t)}, {t, sym(x)}}) == parse("t + 2*x"));
  CHECK(substitute(parse("sin(x)^2"), {{x, Expr(0)}}).is_zero());
}

TEST_CASE("conjugation") {
  Expr e = parse("i*kappa*u1 + exp(i*w*t)*cu2_x");
  CHECK(conj(e) == parse("-i*kappab*cu1 + exp(-i*w*t)*u2_x"));
  CHECK(conj(conj(e)) == e);
}

TEST_CASE("eval_numeric") {
  CHECK(eval_numeric(parse("1/2"), {}) == cplx(0.5));
  cplx v = eval_numeric(parse("exp(i*pi)"), {});
  CHECK(std::abs(v + 1.0) < 1e-12);

  // ground state (M w / pi)^(1/4) exp(-M w x^2 / 2) at x = 0 with M = w = 1
  SymbolTable tab = SymbolTable::standard();
  Expr g = parse("sqrt(sqrt(M*w/pi))*exp(-M*w*x^2/2)", tab);
  Point p{{param("M"), 1.0}, {param("w"), 1.0}, {coord("x"), 0.0}};
  double oracle = std::pow(1.0 / std::numbers::pi, 0.25);
  CHECK(std::abs(eval_numeric(g, p) - oracle) < 1e-14);

  CHECK_THROWS_AS(eval_numeric(parse("x"), {}), EvalError);
}

TEST_CASE("is_zero oracle") {
  CHECK(is_zero(parse("sin(w*t)^2 + cos(w*t)^2 - 1")).zero);
  CHECK(is_zero(parse("exp(i*w*t)*exp(-i*w*t) - 1")).zero);
  auto r = is_zero(parse("x*u1"));
  CHECK_FALSE(r.zero);
  REQUIRE(r.witness);
  CHECK(std::abs(r.witness->value) > 0);
  CHECK(is_zero(parse("tan(w*t)*cos(w*t) - sin(w*t)")).zero);
  CHECK(is_zero(parse("kappa*kappab - conj(kappa)*kappa")).zero);
  CHECK_FALSE(is_zero(parse("kappa - kappab")).zero);
}

TEST_CASE("property: canonical form is idempotent and prints round-trip") {
  pktest::RandomExpr gen(7);
  for (int k = 0; k < 300; ++k) {
    Expr e = gen.any(6);
    Expr again = Expr::from_terms(e.terms());
    REQUIRE(again == e);
    Expr back = parse(e.str());
    INFO(e.str());
    REQUIRE(back == e);
  }
}

TEST_CASE("property: partial derivatives commute, conj commutes with d/dx") {
  pktest::RandomExpr gen(11);
  AtomP x = coord("x"), t = coord("t");
  for (int k = 0; k < 150; ++k) {
    Expr e = gen.any(4);
    INFO(e.str());
    REQUIRE(differentiate(differentiate(e, t), x) == differentiate(differentiate(e, x), t));
    REQUIRE(conj(differentiate(e, x)) == differentiate(conj(e), x));
    REQUIRE(conj(conj(e)) == e);
  }
}

TEST_CASE("property: derivative agrees with a finite difference") {
  pktest::RandomExpr gen(13);
  AtomP x = coord("x");
  int checked = 0;
  for (int k = 0; k < 100; ++k) {
    Expr e = gen.any(4);
    Expr d = differentiate(e, x);
    Sampler s(100 + static_cast<uint64_t>(k));
    Point p = s.draw(sample_symbols({e, d}));
    p[x] = 0.37;
    try {
      const double h = 1e-5;
      Point pp = p, pm = p;
      pp[x] += h;
      pm[x] -= h;
      cplx fd = (eval_numeric(e, pp) - eval_numeric(e, pm)) / (2 * h);
      cplx an = eval_numeric(d, p);
      INFO(e.str());
      CHECK(std::abs(fd - an) <= 1e-5 * (1 + std::abs(an)));
      ++checked;
    } catch (const SingularPoint&) {
    }
  }
  CHECK(checked > 80);
}

TEST_CASE("property: random nonzero monomials are rejected") {
  std::mt19937_64 rng(3);
  const char* names[] = {"w", "M", "kappa", "kappab", "t", "x", "y", "u1", "cu1", "u2_x", "cu2_tx", "u3_yy"};
  int rejected = 0;
  for (int k = 0; k < 1000; ++k) {
    Expr m = Expr::ratio(static_cast<long>(rng() % 7) + 1, static_cast<long>(rng() % 5) + 1);
    int nf = 1 + static_cast<int>(rng() % 4);
    for (int f = 0; f < nf; ++f) m = m * pow(parse(names[rng() % 12]), 1 + static_cast<int>(rng() % 3));
    if (!is_zero(m, rng(), 20).zero) ++rejected;
  }
  CHECK(rejected == 1000);
}
