#pragma once

#include "pk/operator.hpp"
#include "pk/prolong.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace pk {

// Bad model document; `path` locates the offending node ("/generators/3/op").
struct ModelError : std::runtime_error {
  ModelError(const std::string& path, const std::string& msg)
      : std::runtime_error(path.empty() ? msg : path + ": " + msg), path(path) {}
  std::string path;
};

// A named operator. dim may differ from the model dimension for 2x2 building blocks of 4x4 models.
struct NamedOp {
  std::string name;
  std::string text;  // source: operator expression, or empty for products
  GradedGenerator gen;
  std::vector<std::string> factors;  // products only
  std::string scale;                 // products only
};

struct TableCell {
  std::string row, col;
  std::string value;  // linear combination of basis names, "0" for vanishing brackets
  bool suspect = false;
  std::map<std::string, Expr> coeffs;  // parsed from value
};

struct StructureTable {
  std::string name;
  std::vector<std::string> rows, cols, basis;
  bool graded = false;   // bracket kind follows parity; otherwise commutators throughout
  Mode mode = Mode::Exact;
  std::string substitution;  // optional named substitution applied before comparison
  std::vector<TableCell> cells;

  const TableCell* cell(const std::string& r, const std::string& c) const;
};

// lhs == rhs (or, with expect_equal false, a documented inequality).
struct Relation {
  std::string name;
  std::string lhs, rhs;
  Mode mode = Mode::Exact;
  std::string substitution;
  bool expect_equal = true;
};

// Extra element whose expansion over a closure basis is reported, e.g. "anti(Qd,Qd)".
struct ClosureProbe {
  std::string expr;
  std::string expect;  // "in-span", "not-in-span", or empty for report-only
};

struct ClosureSpec {
  std::string name;
  std::vector<std::string> basis;
  bool graded = true;
  Mode mode = Mode::Exact;
  std::string substitution;
  bool expect_closed = true;
  std::vector<ClosureProbe> probes;
};

struct ModelSpec {
  std::string name;
  std::string family;  // susy_oscillator, pauli_2d, jc, jc_generalized, jc_standard_susy, or custom
  std::string document;  // canonical JSON the model was built from

  SymbolTable symbols;
  int dim = 2;
  PDESystem system;
  MatrixDiffOp hamiltonian;
  MatrixDiffOp grading;

  std::vector<std::string> generator_names;  // listed symmetry generators, in order
  std::map<std::string, NamedOp> ops;        // generators, operators and products by name
  std::vector<std::string> op_order;

  std::vector<StructureTable> tables;
  std::vector<Relation> relations;
  std::vector<ClosureSpec> closures;
  std::map<std::string, Bindings> substitutions;
  std::vector<std::string> dictionary;  // structure-constant monomials
  std::vector<std::vector<Expr>> solutions;
  std::optional<AnsatzSolution> ansatz;

  const GradedGenerator& op(const std::string& name) const;
  bool has_op(const std::string& name) const { return ops.count(name) > 0; }
  std::vector<GradedGenerator> generators() const;
  OpEnv env() const;
  // Operator expression over the named operators of the model.
  MatrixDiffOp parse_op(const std::string& text) const;
  Expr parse_expr(const std::string& text) const;
  const Bindings& substitution(const std::string& name) const;
};

MatrixDiffOp substitute(const MatrixDiffOp& a, const Bindings& b);

std::vector<std::string> builtin_names();
// name: susy_oscillator, pauli_2d, jc, jc_generalized, jc_standard_susy; jc_generalized accepts
// optional arguments "jc_generalized(alpha,beta,phi)" with expression strings.
ModelSpec builtin(const std::string& name);
ModelSpec jc_generalized(const std::string& alpha = "alpha", const std::string& beta = "beta",
                         const std::string& phi = "0");

// Excitations 0..n (n <= 3) of the model, each a solution of i dt Psi = H Psi.
std::vector<std::vector<Expr>> exact_solutions(const ModelSpec& m, int n);

// Validation failures carry a witness in the message.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ModelSpec model_from_json(const std::string& text);
ModelSpec load_model(const std::string& path);
std::string export_model(const ModelSpec& m);
void save_model(const ModelSpec& m, const std::string& path);
// Gamma^2 = Id and (i dt - H) solution = 0 for every stored solution.
void validate(const ModelSpec& m, uint64_t seed = kDefaultSeed, int trials = kDefaultTrials);

// Determining equations of the model's evolution system, prolonged to `order`.
DeterminingSystem determining_system(const ModelSpec& m, int order = 2);
// verify_ansatz with the model's closed-form ansatz; ModelError when the model has none.
AnsatzReport check_ansatz(const ModelSpec& m, uint64_t seed = kDefaultSeed, int trials = kDefaultTrials);

// Model id or file path.
ModelSpec resolve_model(const std::string& id_or_path);

}  // namespace pk
