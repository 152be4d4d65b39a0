#include "doctest.h"
#include "pk/suites.hpp"

using namespace pk;

TEST_CASE("operator name aliases") {
  CHECK(canonical_op_name("Q+") == "Qp");
  CHECK(canonical_op_name("U-") == "Um");
  CHECK(canonical_op_name("X6") == "X6");
  CHECK(canonical_op_name("+") == "+");
}

TEST_CASE("bracket_names") {
  ModelSpec m = builtin("susy_oscillator");
  BracketResult r = bracket_names(m, "Q+", "Q-");
  CHECK(r.kind == "anticommutator");
  CHECK(r.str() == "anticommutator = H0 - w*Y");
  CHECK(bracket_names(m, "X6", "X6").str() == "commutator = 0");
  CHECK(bracket_names(m, "X4", "X5").str() == "commutator = M*w*X6");
  CHECK_THROWS_AS(bracket_names(m, "Q+", "nope"), std::out_of_range);
  BracketResult jc = bracket_names(builtin("jc"), "Qd", "Qd");
  CHECK_FALSE(jc.expansion.in_span);
  CHECK(jc.str().find("not in span") != std::string::npos);
}

TEST_CASE("run_suite: exit contract inputs") {
  ModelSpec m = builtin("jc");
  CHECK_THROWS_AS(run_suite(m, "bogus"), UnknownSuite);
  SuiteReport s = run_suite(m, "supercharges");
  CHECK(s.passed());
  CHECK(s.to_json() == run_suite(m, "supercharges").to_json());
  CHECK(s.to_text().find("PASS anti(Qd,Qd): not in span") != std::string::npos);

  ModelSpec g = builtin("jc_generalized");
  SuiteReport plain = run_suite(g, "supercharges");
  CHECK(plain.passed());
  CHECK(plain.to_text().find("QQ_anti:") == std::string::npos);
  SuiteReport shifted = run_suite(g, "supercharges", {kDefaultSeed, kDefaultTrials, true});
  CHECK(shifted.to_text().find("FAIL QQ_anti:") != std::string::npos);
  CHECK(shifted.to_text().find("PASS QQ_anti_corrected") != std::string::npos);
  CHECK_FALSE(shifted.passed());
}

TEST_CASE("run_suite: oscillator suites pass, suspect cells warn") {
  ModelSpec m = builtin("susy_oscillator");
  SuiteReport a = run_suite(m, "algebra");
  CHECK(a.passed());
  size_t warnings = 0;
  for (const auto& s : a.sections) warnings += s.warnings.size();
  CHECK(warnings == 4);
  for (const char* s : {"solutions", "ansatz", "finite"}) CHECK_MESSAGE(run_suite(m, s).passed(), s);
}
