#pragma once

#include "pk/expr.hpp"
#include "pk/numeric.hpp"
#include "pk/parse.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pk {

// Dependent variable: (index alpha, conjugate flag).
using DepKey = std::pair<int, bool>;

// D_k E = d_k E + sum over jets u^J in E of u^{J + e_k} dE/du^J.
Expr total_derivative(const Expr& e, AtomP coordinate);
Expr total_derivative(const Expr& e, const MultiIndex& J);

struct PDEEquation {
  Expr lhs;
  AtomP leading = nullptr;  // u_{alpha,t}
  Expr solved;              // leading = solved on solutions
};

// Evolution system, each equation first order in t in exactly one dependent variable.
class PDESystem {
 public:
  PDESystem() = default;
  PDESystem(std::vector<AtomP> coords, int dependents, bool with_conj, const std::vector<Expr>& eqs);

  const std::vector<AtomP>& coords() const { return coords_; }
  int dependents() const { return q_; }
  bool with_conj() const { return conj_; }
  const std::vector<PDEEquation>& equations() const { return eqs_; }
  std::vector<DepKey> dep_keys() const;
  int order() const;

  const PDEEquation* solved_for(const DepKey& d) const;
  // conj of each equation matches the equation of the conjugate variable, up to a constant factor.
  bool self_conjugate(uint64_t seed = kDefaultSeed, int trials = kDefaultTrials) const;

 private:
  std::vector<AtomP> coords_;
  int q_ = 0;
  bool conj_ = false;
  std::vector<PDEEquation> eqs_;
};

// Replaces every jet with a t-derivative by the corresponding consequence of the solved form.
class OnShell {
 public:
  explicit OnShell(const PDESystem& s) : s_(s) {}
  Expr operator()(const Expr& e);

 private:
  Expr value(AtomP jet);
  const PDESystem& s_;
  std::unordered_map<AtomP, Expr> memo_;
};

class JetVectorField {
 public:
  JetVectorField() = default;
  JetVectorField(std::vector<AtomP> coords, std::vector<Expr> xi, std::map<DepKey, Expr> phi);
  JetVectorField(const JetVectorField& o) : coords_(o.coords_), xi_(o.xi_), phi_(o.phi_) {}
  JetVectorField& operator=(const JetVectorField& o);

  // Unknown xi_j and Phi_alpha (cPhi_alpha for conjugates) over the coordinates and order-0 jets.
  static JetVectorField general(const PDESystem& s);

  const std::vector<AtomP>& coords() const { return coords_; }
  const std::vector<Expr>& xi() const { return xi_; }
  const std::map<DepKey, Expr>& phi() const { return phi_; }
  // Coordinates followed by the order-0 jets of the field.
  std::vector<AtomP> base_symbols() const;

  // phi_alpha^J from the recurrence, cached.
  Expr coefficient(const DepKey& d, const MultiIndex& J) const;
  // (jet u_alpha^J, phi_alpha^J) for 1 <= |J| <= n, dependents in key order, J in graded order.
  std::vector<std::pair<AtomP, Expr>> prolongation(int n) const;
  // pr^(n) v applied to f.
  Expr act(const Expr& f, int n) const;

  JetVectorField operator+(const JetVectorField& o) const;
  JetVectorField scaled(const Expr& c) const;

 private:
  std::vector<AtomP> coords_;
  std::vector<Expr> xi_;
  std::map<DepKey, Expr> phi_;
  mutable std::map<std::pair<DepKey, MultiIndex>, Expr> cache_;
  mutable std::mutex mu_;
};

// Bracket of base fields, v1(v2^c) - v2(v1^c) per component.
JetVectorField bracket(const JetVectorField& a, const JetVectorField& b);

// pr^(n) v applied to each equation, then reduced on shell.
std::vector<Expr> invariance_residual(const JetVectorField& v, const PDESystem& s, int n);

struct DetEquation {
  Expr expr;             // = 0
  std::string monomial;  // jet monomial it multiplies, "1" for the jet-free part
};

struct DeterminingSystem {
  std::vector<DetEquation> equations;
  // "dxi1/du1 = 0" style statements read off single-term equations.
  std::vector<std::string> findings;

  std::string to_text() const;
  std::string to_json() const;
};

DeterminingSystem collect_determining(const std::vector<Expr>& residuals);

struct AnsatzSolution {
  FunctionBindings functions;                   // every unknown of the determining system
  std::vector<AtomP> constants;                 // free real constants
  std::vector<std::string> solution_functions;  // free functions that must solve the system (not conjugates)
  std::vector<FunctionBindings> instances;      // exact solutions for them and their conjugates
};

struct AnsatzCheck {
  size_t equation;
  std::string instance;  // "zero" or "solution k"
  bool pass;
  std::optional<Witness> witness;
};

struct AnsatzReport {
  std::vector<AnsatzCheck> checks;
  int independent_constants = 0;
  int solution_function_count = 0;
  int instances = 0;
  bool passed() const;
  std::string str() const;
};

AnsatzReport verify_ansatz(const DeterminingSystem& det, const AnsatzSolution& sol, uint64_t seed = kDefaultSeed,
                           int trials = kDefaultTrials);

}  // namespace pk
