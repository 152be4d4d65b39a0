#include "doctest.h"
#include "pk/numcheck.hpp"

#include <cmath>

using namespace pk;

namespace {

const FiniteTransformation& find(const std::vector<FiniteTransformation>& ts, const std::string& n) {
  for (const auto& t : ts)
    if (t.name == n) return t;
  throw std::runtime_error("no transformation " + n);
}

}  // namespace

TEST_CASE("generator_residual: identity, listed generators, non-symmetry") {
  ModelSpec m = builtin("susy_oscillator");
  GradedGenerator id{"I", MatrixDiffOp::identity(2), Parity::Even};
  CHECK(generator_residual(m, id, m.solutions[0]).value == 0);
  for (const auto& g : m.generators())
    for (const auto& s : m.solutions) CHECK_MESSAGE(generator_residual(m, g, s).value <= 1e-9, g.name);
  // multiplication by x breaks the eigen-equation
  GradedGenerator xs{"x", m.parse_op("x*s0"), Parity::Even};
  NumResult r = generator_residual(m, xs, m.solutions[0]);
  CHECK(r.value > 1e-3);
  CHECK(r.worst.has_value());
}

TEST_CASE("finite transformations: identity at zero and inverse maps") {
  for (std::string name : {"susy_oscillator", "jc", "jc_generalized"}) {
    ModelSpec m = builtin(name);
    Point params = model_parameters(m, 7);
    Sampler smp(11);
    for (const auto& T : finite_transformations(m, params)) {
      for (int k = 0; k < 20; ++k) {
        Coords c{smp.uniform(-2, 2), smp.uniform(-2, 2), smp.uniform(-2, 2)};
        if (!T.regular(c)) continue;
        Coords f0 = T.forward(c, 0);
        CMatrix M0 = T.multiplier(c, 0);
        for (int j = 0; j < 3; ++j) CHECK(std::abs(f0[j] - c[j]) <= 1e-12);
        CHECK((M0 - CMatrix::Identity(T.dim, T.dim)).cwiseAbs().maxCoeff() <= 1e-12);
        double l = smp.uniform(-0.5, 0.5);
        Coords f = T.forward(c, l);
        if (!T.regular(f)) continue;
        Coords back = T.inverse(f, l);
        for (int j = 0; j < 3; ++j) CHECK_MESSAGE(std::abs(back[j] - c[j]) <= 1e-10, T.name);
      }
    }
  }
}

TEST_CASE("finite_residual: oscillator examples") {
  ModelSpec m = builtin("susy_oscillator");
  Point params = model_parameters(m, kDefaultSeed);
  auto ts = finite_transformations(m, params);
  NumResult floor = finite_residual(m, find(ts, "X1"), 0, m.solutions[0], params);
  CHECK(floor.value <= 1e-5);
  NumResult x1 = finite_residual(m, find(ts, "X1"), 0.3, m.solutions[0], params);
  CHECK(x1.value <= 1e-5);
  CHECK(x1.value <= 10 * std::max(floor.value, 1e-9));
  CHECK(finite_residual(m, find(ts, "X4"), 0.4, m.solutions[1], params).value <= 1e-5);
  // literal multiplier: doubled spin phase
  CHECK(finite_residual(m, find(ts, "X1_printed"), 0.3, m.solutions[0], params).value > 1e-3);
}

TEST_CASE("group_law") {
  ModelSpec m = builtin("susy_oscillator");
  auto ts = finite_transformations(m, model_parameters(m, kDefaultSeed));
  for (const char* n : {"X3", "X4", "X5"}) CHECK(group_law(find(ts, n), 0.2, 0.25).value <= 1e-10);
  CHECK(group_law(find(ts, "X1"), 0.1, 0.1).value <= 1e-8);
  CHECK(group_law(find(ts, "X2"), 0.1, 0.1).value <= 1e-8);
  CHECK(group_law(find(ts, "X1"), 0.3, 0).value <= 1e-14);
  ModelSpec j = builtin("jc");
  auto js = finite_transformations(j, model_parameters(j, kDefaultSeed));
  CHECK(group_law(find(js, "X2"), 0.2, 0.3).value <= 1e-10);
}

TEST_CASE("vector_field and consistency") {
  ModelSpec m = builtin("susy_oscillator");
  Point params = model_parameters(m, kDefaultSeed);
  auto ts = finite_transformations(m, params);
  // phase map e^{i l}: Phi_a = i u_a
  JetVectorField v6 = vector_field(m, m.op("X6"));
  CHECK(is_zero(v6.phi().at({1, false}) - Expr::imag_unit() * sym(jet(1, false))).zero);
  CHECK(is_zero(v6.phi().at({1, true}) + Expr::imag_unit() * sym(jet(1, true))).zero);
  CHECK(consistency_vector_field(find(ts, "X6"), v6, params).value <= 1e-6);
  // time translation: xi_t = 1
  JetVectorField v3 = vector_field(m, m.op("X3"));
  CHECK(v3.xi()[0] == Expr(1));
  CHECK(consistency_vector_field(find(ts, "X3"), v3, params).value <= 1e-6);
  // X1: xi_t = sin(2wt)/(2w)
  JetVectorField v1 = vector_field(m, m.op("X1"));
  CHECK(is_zero(v1.xi()[0] - m.parse_expr("sin(2*w*t)/(2*w)")).zero);
  CHECK(consistency_vector_field(find(ts, "X1"), v1, params).value <= 1e-6);
  CHECK(consistency_vector_field(find(ts, "X1_printed"), v1, params).value > 1e-2);
  // a different generator is rejected
  CHECK(consistency_vector_field(find(ts, "X4"), vector_field(m, m.op("X5")), params).value > 1e-2);
  CHECK_THROWS_AS(vector_field(m, GradedGenerator{"k", m.parse_op("Dx^2"), Parity::Even}), std::invalid_argument);
  CHECK_THROWS_AS(vector_field(m, GradedGenerator{"s", m.parse_op("Dx*s3"), Parity::Even}), std::invalid_argument);
}

TEST_CASE("finite_suite covers every listed transformation") {
  for (std::string name : {"susy_oscillator", "jc", "jc_generalized"}) {
    ModelSpec m = builtin(name);
    auto rows = finite_suite(m);
    CHECK(!rows.empty());
    for (const auto& r : rows) {
      CHECK(r.residual.size() == m.solutions.size());
      if (r.printed)
        CHECK_FALSE(r.pass(1e-5, 1e-8, 1e-6));
      else
        CHECK_MESSAGE(r.pass(1e-5, 1e-8, 1e-6), std::string(name + " " + r.transformation));
    }
    CHECK(finite_json(rows).find("\"transformation\"") != std::string::npos);
  }
  CHECK(finite_suite(builtin("pauli_2d")).empty());
}
