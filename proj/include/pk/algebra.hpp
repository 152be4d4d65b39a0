#pragma once

#include "pk/models.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pk {

struct BasisExpansion {
  bool in_span = false;
  std::vector<std::string> names;
  std::vector<Expr> coeffs;  // one per basis element; empty when no fit was found
  MatrixDiffOp residual;     // A - sum c_k G_k, zero under the oracle when in_span
  std::optional<OpEquality> witness;

  std::optional<Expr> coeff(const std::string& name) const;
  // "c1*G1 + c2*G2", "0" for the empty combination
  std::string str() const;
};

struct ExpandOptions {
  Mode mode = Mode::Exact;
  const MatrixDiffOp* H = nullptr;  // required for OnShell
  std::vector<Expr> dictionary;     // parameter monomials; {1} when empty
  uint64_t seed = kDefaultSeed;
  int trials = kDefaultTrials;
};

// Fits A = sum c_k G_k with coefficients constant in the coordinates. Coefficients are rational
// (complex) combinations of dictionary monomials; the fit is accepted only if the oracle confirms it.
class Expander {
 public:
  Expander(std::vector<GradedGenerator> basis, ExpandOptions opt);
  BasisExpansion expand(const MatrixDiffOp& a) const;
  const std::vector<GradedGenerator>& basis() const { return basis_; }

 private:
  struct Key {
    int r, c;
    MultiIndex J;
    bool operator<(const Key& o) const;
  };
  // Entries of `a` at the rows of one sample; false when `a` has a nonzero entry outside keys_.
  bool values(const MatrixDiffOp& a, size_t sample, std::vector<cplx>& out) const;
  Point extend(const Point& base, const std::vector<AtomP>& extra, size_t sample) const;

  std::vector<GradedGenerator> basis_;
  std::vector<MatrixDiffOp> reduced_;
  ExpandOptions opt_;
  std::vector<Key> keys_;
  std::vector<std::vector<Point>> coord_points_;  // [sample][row]
  std::vector<AtomP> params_;
  std::vector<std::vector<std::vector<cplx>>> cols_;  // [sample][basis][row]
  std::vector<size_t> independent_;
  std::vector<std::vector<cplx>> dict_values_;   // [sample][dictionary entry]
};

BasisExpansion expand_in_basis(const MatrixDiffOp& a, const std::vector<GradedGenerator>& basis,
                               const ExpandOptions& opt = {});

std::string combination_str(const std::vector<std::pair<std::string, Expr>>& terms);

// ---------------------------------------------------------------- tables

enum class CellStatus { Match, Mismatch, NotInSpan, Error };
std::string status_name(CellStatus s);

struct CellReport {
  std::string row, col;
  std::string kind;  // commutator | anticommutator
  CellStatus status = CellStatus::Match;
  bool suspect = false;
  std::string expected, computed;
  std::optional<BasisExpansion> expansion;
  std::string witness;
  // suspect cell whose computed value is minus the printed mirror cell (or its symmetric partner)
  bool adjudicated = false;
};

struct TableReport {
  std::string model, table;
  std::vector<CellReport> cells;
  int matches() const;
  int mismatches() const;
  // every non-suspect cell matches and every failing suspect cell is adjudicated
  bool passed() const;
  std::string to_json() const;
  std::string to_text() const;
};

TableReport verify_table(const ModelSpec& m, const StructureTable& t, uint64_t seed = kDefaultSeed,
                         int trials = kDefaultTrials);
TableReport verify_table(const ModelSpec& m, const std::string& table, uint64_t seed = kDefaultSeed,
                         int trials = kDefaultTrials);

// ---------------------------------------------------------------- closure

struct PairReport {
  std::string a, b, kind;
  BasisExpansion expansion;
};

struct JacobiReport {
  std::string a, b, c;
  bool holds = true;
  std::string witness;
};

struct ProbeReport {
  std::string expr, expect;
  BasisExpansion expansion;
  bool pass() const;
};

struct ClosureReport {
  std::string model, name;
  bool graded = true;
  std::vector<PairReport> pairs;
  std::vector<JacobiReport> jacobi;
  std::vector<ProbeReport> probes;
  std::string error;  // dimension problems

  bool closed() const;
  bool jacobi_holds() const;
  bool probes_pass() const;
  std::string to_json() const;
  std::string to_text() const;
};

// Brackets of all pairs (odd elements also with themselves when graded), super-Jacobi on triples,
// then the probes.
ClosureReport closure_check(const ModelSpec& m, const ClosureSpec& c, uint64_t seed = kDefaultSeed,
                            int trials = kDefaultTrials, bool jacobi = true);
ClosureReport closure_check(const std::vector<GradedGenerator>& basis, bool graded, const ExpandOptions& opt,
                            bool jacobi = true);

// ---------------------------------------------------------------- relations

struct RelationReport {
  std::string name, lhs, rhs, mode, substitution;
  bool expect_equal = true;
  bool equal = false;
  std::string witness;
  bool pass() const { return equal == expect_equal; }
};

RelationReport check_relation(const ModelSpec& m, const Relation& r, uint64_t seed = kDefaultSeed,
                              int trials = kDefaultTrials);
// All relations of the model: supercharge identities, nilpotency, commutation with H.
std::vector<RelationReport> supercharge_suite(const ModelSpec& m, uint64_t seed = kDefaultSeed,
                                              int trials = kDefaultTrials);
std::string relations_json(const std::string& model, const std::vector<RelationReport>& rs);

// Options for a model: dictionary from the model, H from the (substituted) Hamiltonian.
ExpandOptions model_expand_options(const ModelSpec& m, Mode mode, const Bindings& subst, const MatrixDiffOp* H,
                                   uint64_t seed, int trials);

}  // namespace pk
