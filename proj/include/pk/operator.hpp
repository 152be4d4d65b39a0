#pragma once

#include "pk/expr.hpp"
#include "pk/numeric.hpp"
#include "pk/parse.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pk {

// Scalar differential operator: sum of coeff * d^J, at most one term per J, sorted by J.
using ScalarOp = std::vector<std::pair<MultiIndex, Expr>>;

ScalarOp scalar_add(const ScalarOp& a, const ScalarOp& b);
ScalarOp scalar_scale(const Expr& f, const ScalarOp& a);
// (f d^a)(g d^b) = sum_{c <= a} C(a,c) f (d^c g) d^{a-c+b}
ScalarOp scalar_compose(const ScalarOp& a, const ScalarOp& b);
// d^J g for coefficient g, J over (t, x, y).
Expr partial(const Expr& g, const MultiIndex& J);

class MatrixDiffOp {
 public:
  explicit MatrixDiffOp(int n = 2) : n_(n), e_(static_cast<size_t>(n * n)) {}

  static MatrixDiffOp zero(int n) { return MatrixDiffOp(n); }
  static MatrixDiffOp identity(int n) { return scalar(n, Expr(1)); }
  static MatrixDiffOp scalar(int n, const Expr& f, const MultiIndex& J = {});
  // Constant numeric matrix given row-major.
  static MatrixDiffOp constant(int n, const std::vector<Expr>& entries);

  int dim() const { return n_; }
  const ScalarOp& at(int r, int c) const { return e_[static_cast<size_t>(r * n_ + c)]; }
  ScalarOp& at(int r, int c) { return e_[static_cast<size_t>(r * n_ + c)]; }
  void add_term(int r, int c, const MultiIndex& J, const Expr& f);

  bool is_zero() const;
  int max_order() const;
  int max_order(int var) const;
  bool depends_on(AtomP s) const;

  MatrixDiffOp operator+(const MatrixDiffOp& o) const;
  MatrixDiffOp operator-(const MatrixDiffOp& o) const;
  MatrixDiffOp operator-() const;
  friend MatrixDiffOp operator*(const Expr& f, const MatrixDiffOp& a);  // left multiplication by a function
  friend bool operator==(const MatrixDiffOp& a, const MatrixDiffOp& b);

  // Entries of the block (r0..r0+k, c0..c0+k).
  MatrixDiffOp block(int r0, int c0, int k) const;
  static MatrixDiffOp from_blocks(const std::vector<MatrixDiffOp>& blocks, int nb);

  MatrixDiffOp map_coeffs(const std::function<Expr(const Expr&)>& f) const;

  // Operator literal: [[a, b], [c, d]] with coefficients left of Dt/Dx/Dy tokens.
  std::string str() const;
  static std::string entry_str(const ScalarOp& s);

 private:
  int n_;
  std::vector<ScalarOp> e_;
};

MatrixDiffOp compose(const MatrixDiffOp& a, const MatrixDiffOp& b);
MatrixDiffOp power(const MatrixDiffOp& a, int k);
MatrixDiffOp commutator(const MatrixDiffOp& a, const MatrixDiffOp& b);
MatrixDiffOp anticommutator(const MatrixDiffOp& a, const MatrixDiffOp& b);

enum class Parity { Even, Odd, Neither };
std::string parity_name(Parity p);

struct GradedGenerator {
  std::string name;
  MatrixDiffOp op;
  Parity parity = Parity::Neither;
};

struct BracketKindError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class BracketKind { Commutator, Anticommutator };
BracketKind bracket_kind(Parity a, Parity b);  // throws BracketKindError on Neither
MatrixDiffOp graded_bracket(const GradedGenerator& a, const GradedGenerator& b);
MatrixDiffOp bracket(const MatrixDiffOp& a, const MatrixDiffOp& b, BracketKind k);

// How two operators are compared.
//   Exact:   coefficient by coefficient, including dt terms
//   OnShell: dt^k is first replaced by (-i H)^k, valid on solutions of i dt Psi = H Psi
enum class Mode { Exact, OnShell };
std::string mode_name(Mode m);

// Replaces every dt^k by (-iH)^k composed after the spatial part. H must be t-independent and
// free of dt.
MatrixDiffOp reduce_on_shell(const MatrixDiffOp& a, const MatrixDiffOp& H);

struct OpEquality {
  bool equal = true;
  int row = -1, col = -1;
  MultiIndex J;
  std::optional<Witness> witness;
  explicit operator bool() const { return equal; }
  std::string str() const;
};

OpEquality equals(const MatrixDiffOp& a, const MatrixDiffOp& b, uint64_t seed = kDefaultSeed,
                  int trials = kDefaultTrials);
OpEquality equals(const MatrixDiffOp& a, const MatrixDiffOp& b, Mode mode, const MatrixDiffOp* H,
                  uint64_t seed = kDefaultSeed, int trials = kDefaultTrials);

Parity classify_parity(const MatrixDiffOp& a, const MatrixDiffOp& gamma, uint64_t seed = kDefaultSeed,
                       int trials = kDefaultTrials);

std::vector<Expr> apply(const MatrixDiffOp& a, const std::vector<Expr>& psi);

// Operator expressions: scalar grammar plus Dt/Dx/Dy, named operators, 2x2 constants
// s0 s1 s2 s3 sp sm, comm(A,B), anti(A,B), and (block) matrix literals.
struct OpEnv {
  const SymbolTable* symbols = nullptr;
  int dim = 2;
  std::map<std::string, MatrixDiffOp> ops;
};

MatrixDiffOp parse_operator(std::string_view text, const OpEnv& env);
MatrixDiffOp parse_operator(std::string_view text, int dim = 2);

// Pauli-type constants.
MatrixDiffOp sigma(int k);  // 0..3
MatrixDiffOp sigma_plus();
MatrixDiffOp sigma_minus();

}  // namespace pk
