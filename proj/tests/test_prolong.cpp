#include "doctest.h"
#include "pk/prolong.hpp"
#include "random_expr.hpp"

using namespace pk;

namespace {

AtomP T() { return coord(0); }
AtomP X() { return coord(1); }

// Parses with unknown functions declared at the given arity.
Expr pf(const char* text, std::initializer_list<std::pair<const char*, size_t>> fns) {
  SymbolTable tab = SymbolTable::standard();
  for (const auto& [n, a] : fns) tab.declare_function(n, a);
  return parse(text, tab);
}

// i psi_t + psi_xx/(2M) - M w^2 x^2 psi/2 + (w_a/2) psi = 0 with w_1 = w, w_2 = -w, plus conjugates.
PDESystem oscillator() {
  std::vector<Expr> eqs{
      parse("i*u1_t + u1_xx/(2*M) - M*w^2*x^2*u1/2 + w/2*u1"),
      parse("i*u2_t + u2_xx/(2*M) - M*w^2*x^2*u2/2 - w/2*u2"),
      parse("-i*cu1_t + cu1_xx/(2*M) - M*w^2*x^2*cu1/2 + w/2*cu1"),
      parse("-i*cu2_t + cu2_xx/(2*M) - M*w^2*x^2*cu2/2 - w/2*cu2"),
  };
  return PDESystem({T(), X()}, 2, true, eqs);
}

}  // namespace

TEST_CASE("total_derivative") {
  CHECK(total_derivative(parse("u1"), X()) == parse("u1_x"));
  CHECK(total_derivative(parse("x*u1_t"), X()) == parse("u1_t + x*u1_tx"));
  CHECK(total_derivative(parse("cu2*t"), T()) == parse("cu2_t*t + cu2"));
  // unknown functions of jets pick up chain terms
  Expr f = pf("xi1(t,x,u1)", {{"xi1", 3}});
  CHECK(total_derivative(f, X()) == pf("diff(xi1(t,x,u1),x) + u1_x*diff(xi1(t,x,u1),u1)", {{"xi1", 3}}));
  CHECK(total_derivative(Expr(7), X()).is_zero());
  CHECK_THROWS_AS(total_derivative(f, parse("w").as_symbol().value()), std::invalid_argument);
}

TEST_CASE("property: total derivatives commute") {
  pktest::RandomExpr g(21);
  for (int k = 0; k < 40; ++k) {
    Expr e = g.any(4) * parse("u1_x + cu1*x");
    Expr a = total_derivative(total_derivative(total_derivative(e, T()), T()), X());
    Expr b = total_derivative(total_derivative(total_derivative(e, X()), T()), T());
    REQUIRE(a == b);
  }
}

TEST_CASE("prolong: hand-computed cases") {
  JetVectorField zero({T(), X()}, {Expr(), Expr()}, {{{1, false}, Expr()}});
  for (const auto& [a, phi] : zero.prolongation(3)) CHECK(phi.is_zero());

  // v = x d/dx + u d/du with one independent variable
  JetVectorField v({X()}, {parse("x")}, {{{1, false}, parse("u1")}});
  CHECK(v.coefficient({1, false}, MultiIndex(0, 1, 0)).is_zero());
  CHECK(v.coefficient({1, false}, MultiIndex(0, 2, 0)) == parse("-u1_xx"));
  CHECK(v.coefficient({1, false}, MultiIndex(0, 3, 0)) == parse("-2*u1_xxx"));
  CHECK(v.prolongation(2).size() == 2);

  // Galilean-type field: xi2 = t, Phi = i M x u
  JetVectorField gal({T(), X()}, {Expr(), parse("t")}, {{{1, false}, parse("i*M*x*u1")}});
  CHECK(gal.coefficient({1, false}, MultiIndex(1, 0, 0)) == parse("i*M*x*u1_t - u1_x"));
  CHECK(gal.coefficient({1, false}, MultiIndex(0, 1, 0)) == parse("i*M*u1 + i*M*x*u1_x"));
}

TEST_CASE("PDESystem solved form and on-shell substitution") {
  PDESystem s = oscillator();
  REQUIRE(s.equations().size() == 4);
  CHECK(s.equations()[0].leading == jet(1, false, MultiIndex(1, 0, 0)));
  CHECK(s.equations()[2].leading == jet(1, true, MultiIndex(1, 0, 0)));
  CHECK(s.order() == 2);
  CHECK(s.self_conjugate());

  OnShell os(s);
  Expr lhs0 = s.equations()[0].lhs;
  CHECK(os(lhs0).is_zero());
  // u1_tx is the x-derivative of the solved form
  CHECK(os(parse("u1_tx")) == total_derivative(s.equations()[0].solved, X()));
  Expr e = parse("x*u1_tt + cu2_tx*u1 + u2_x");
  CHECK(os(os(e)) == os(e));

  CHECK_THROWS_AS(PDESystem({T(), X()}, 1, false, {parse("u1_t^2 + u1_x")}), std::invalid_argument);
  CHECK_THROWS_AS(PDESystem({T(), X()}, 1, false, {parse("x*u1_t + u1_xx")}), std::invalid_argument);
  CHECK_FALSE(PDESystem({T(), X()}, 1, true, {parse("i*u1_t + u1_xx"), parse("i*cu1_t + cu1_xx")}).self_conjugate());
}

TEST_CASE("invariance_residual") {
  PDESystem s = oscillator();
  std::map<DepKey, Expr> none{{{1, false}, Expr()}, {{2, false}, Expr()}, {{1, true}, Expr()}, {{2, true}, Expr()}};
  JetVectorField dt({T(), X()}, {Expr(1), Expr()}, none);
  for (const auto& r : invariance_residual(dt, s, 2)) CHECK(r.is_zero());

  // scaling x d/dx is not a symmetry of the oscillator
  JetVectorField scale({T(), X()}, {Expr(), parse("x")}, none);
  auto res = invariance_residual(scale, s, 2);
  auto z = is_zero(res[0]);
  CHECK_FALSE(z.zero);
  CHECK(z.witness);

  // phase rotation of the first component
  std::map<DepKey, Expr> phase = none;
  phase[{1, false}] = parse("i*u1");
  phase[{1, true}] = parse("-i*cu1");
  for (const auto& r : invariance_residual(JetVectorField({T(), X()}, {Expr(), Expr()}, phase), s, 2))
    CHECK(r.is_zero());

  CHECK_THROWS_AS(invariance_residual(dt, s, 1), std::invalid_argument);
}

TEST_CASE("collect_determining") {
  Expr r = pf("diff(xi1(t,x),x)*u1_x + diff(F(t,x),t) - w", {{"xi1", 2}, {"F", 2}});
  DeterminingSystem d = collect_determining({r});
  REQUIRE(d.equations.size() == 2);
  CHECK(d.equations[0].expr == pf("diff(F(t,x),t) - w", {{"F", 2}}));
  CHECK(d.equations[1].expr == pf("diff(xi1(t,x),x)", {{"xi1", 2}}));
  CHECK(d.equations[1].monomial == "u1_x");
  // duplicates up to a constant factor collapse
  DeterminingSystem d2 = collect_determining({r, Expr(3) * r});
  CHECK(d2.equations.size() == 2);
  CHECK(d2.to_text() == d.equations[0].expr.str() + "\n" + d.equations[1].expr.str() + "\n");
}

TEST_CASE("determining system of the oscillator and the closed-form ansatz") {
  PDESystem s = oscillator();
  JetVectorField v = JetVectorField::general(s);
  DeterminingSystem det = collect_determining(invariance_residual(v, s, 2));
  CHECK(det.equations.size() > 10);
  // every jet-independence condition on xi shows up
  for (const char* f : {"xi1", "xi2"})
    for (const char* u : {"u1", "u2", "cu1", "cu2"}) {
      std::string want = std::string("d") + f + "/d" + u + " = 0";
      CHECK_MESSAGE(std::find(det.findings.begin(), det.findings.end(), want) != det.findings.end(), want);
    }

  SymbolTable tab = SymbolTable::standard();
  tab.declare_function("A0", 2, "cA0");
  tab.declare_function("B0", 2, "cB0");
  tab.declare_function("cA0", 2, "A0");
  tab.declare_function("cB0", 2, "B0");
  auto P = [&](const char* txt) { return parse(txt, tab); };
  std::vector<AtomP> args = v.base_symbols();
  AnsatzSolution sol;
  sol.functions["xi1"] = {args, P("1/(2*w)*(d1*sin(2*w*t) - d2*cos(2*w*t)) + d3")};
  sol.functions["xi2"] = {args, P("1/2*(d1*cos(2*w*t) + d2*sin(2*w*t))*x + d4*cos(w*t) + d5*sin(w*t)")};
  Expr A1 = P("-1/4*(exp(-2*i*w*t) + 2*i*M*w*x^2*sin(2*w*t))*d1 - i/4*(exp(-2*i*w*t) - 2*M*w*x^2*cos(2*w*t))*d2"
              " - i*M*w*x*(d4*sin(w*t) - d5*cos(w*t)) + d13 + i*d6");
  Expr A2 = P("(d7 - i*d10)*exp(i*w*t)");
  Expr B1 = P("(d8 - i*d11)*exp(-i*w*t)");
  Expr B2 = P("-1/4*(exp(2*i*w*t) + 2*i*M*w*x^2*sin(2*w*t))*d1 + i/4*(exp(2*i*w*t) + 2*M*w*x^2*cos(2*w*t))*d2"
              " - i*M*w*x*(d4*sin(w*t) - d5*cos(w*t)) + d9 + i*d12");
  Expr phi1 = P("A0(t,x)") + A1 * P("u1") + A2 * P("u2");
  Expr phi2 = P("B0(t,x)") + B1 * P("u1") + B2 * P("u2");
  sol.functions["Phi1"] = {args, phi1};
  sol.functions["Phi2"] = {args, phi2};
  sol.functions["cPhi1"] = {args, conj(phi1)};
  sol.functions["cPhi2"] = {args, conj(phi2)};
  for (int k = 1; k <= 13; ++k) sol.constants.push_back(find_param("d" + std::to_string(k)));
  sol.solution_functions = {"A0", "B0"};
  AtomP t = T(), x = X();
  Expr g = P("exp(-M*w*x^2/2 - i*w*t)");
  sol.instances.push_back({{"A0", {{t, x}, P("x") * g}},
                           {"B0", {{t, x}, g}},
                           {"cA0", {{t, x}, conj(P("x") * g)}},
                           {"cB0", {{t, x}, conj(g)}}});

  AnsatzReport rep = verify_ansatz(det, sol);
  CHECK(rep.passed());
  CHECK(rep.independent_constants == 13);
  CHECK(rep.solution_function_count == 2);
  CHECK(rep.instances == 2);  // zero function plus the exact solution

  // the zero ansatz passes trivially
  AnsatzSolution zero;
  for (const char* f : {"xi1", "xi2", "Phi1", "Phi2", "cPhi1", "cPhi2"}) zero.functions[f] = {args, Expr()};
  AnsatzReport zr = verify_ansatz(det, zero);
  CHECK(zr.passed());
  CHECK(zr.independent_constants == 0);

  // dropping the delta_1 part of xi1 breaks it
  AnsatzSolution bad = sol;
  bad.functions["xi1"] = {args, P("-1/(2*w)*d2*cos(2*w*t) + d3")};
  CHECK_FALSE(verify_ansatz(det, bad).passed());

  AnsatzSolution missing = sol;
  missing.functions.erase("Phi2");
  CHECK_THROWS_AS(verify_ansatz(det, missing), std::invalid_argument);
}


TEST_CASE("property: prolongation is linear and respects brackets") {
  pktest::RandomExpr g(77);
  for (int k = 0; k < 50; ++k) {
    JetVectorField v1 = pktest::random_field(g), v2 = pktest::random_field(g);
    Expr c1 = Expr::ratio(g.pick(5) + 1, 2), c2 = Expr::ratio(-(g.pick(5) + 1), 3);
    JetVectorField lin = v1.scaled(c1) + v2.scaled(c2);
    auto p1 = v1.prolongation(2), p2 = v2.prolongation(2), pl = lin.prolongation(2);
    REQUIRE(pl.size() == p1.size());
    for (size_t j = 0; j < pl.size(); ++j) REQUIRE(pl[j].second == c1 * p1[j].second + c2 * p2[j].second);

    // pr[v1, v2] = [pr v1, pr v2] as derivations on the jet space
    auto pb = bracket(v1, v2).prolongation(2);
    for (size_t j = 0; j < pb.size(); ++j) {
      Expr comm = v1.act(p2[j].second, 2) - v2.act(p1[j].second, 2);
      REQUIRE(pb[j].second == comm);
    }
  }
}

TEST_CASE("property: recurrence agrees with the closed form") {
  pktest::RandomExpr g(13);
  std::vector<MultiIndex> Js{{1, 0, 0}, {0, 1, 0}, {2, 0, 0}, {1, 1, 0}, {0, 2, 0}};
  for (int k = 0; k < 10; ++k) {
    JetVectorField v({T(), X()}, {g.any(2) + parse("u2*x"), g.any(2) * parse("u1")},
                     {{{1, false}, g.any(3)}, {{2, false}, g.any(2) * parse("u1 + t")}});
    for (int a = 1; a <= 2; ++a) {
      // Q = Phi - sum xi_j u_{x_j};  phi^J = D_J Q + sum xi_j u_{J + e_j}
      Expr Q = v.phi().at({a, false}) - v.xi()[0] * sym(jet(a, false, MultiIndex(1, 0, 0))) -
               v.xi()[1] * sym(jet(a, false, MultiIndex(0, 1, 0)));
      for (const auto& J : Js) {
        Expr closed = total_derivative(Q, J) + v.xi()[0] * sym(jet(a, false, J + MultiIndex(1, 0, 0))) +
                      v.xi()[1] * sym(jet(a, false, J + MultiIndex(0, 1, 0)));
        auto z = is_zero(v.coefficient({a, false}, J) - closed);
        REQUIRE(z.zero);
      }
    }
  }
}
