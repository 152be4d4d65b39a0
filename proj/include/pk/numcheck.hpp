#pragma once

#include "pk/models.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pk {

using Coords = std::array<double, 3>;  // (t, x, y); y unused by 1+1 models
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// One-parameter group acting as Psi~(p~) = multiplier(p~, lambda) Psi(inverse(p~, lambda)).
struct FiniteTransformation {
  std::string name;
  std::string generator;  // model generator whose flow this is
  std::string note;       // branch and window choices
  bool printed = false;   // literal printed form kept for comparison; not a listed transformation
  int dim = 2;
  double window = 0.5;    // |lambda| bound
  std::function<Coords(const Coords&, double)> forward, inverse;
  std::function<CMatrix(const Coords&, double)> multiplier;
  // Points (image or preimage) where the maps and the multiplier are regular.
  std::function<bool(const Coords&)> regular = [](const Coords&) { return true; };
};

// Numeric parameter values used by the closures of a model's transformations.
Point model_parameters(const ModelSpec& m, uint64_t seed);
std::vector<FiniteTransformation> finite_transformations(const ModelSpec& m, const Point& params);

// Solution components as numeric functions of (t, x, y).
class NumericSolution {
 public:
  NumericSolution(const ModelSpec& m, std::vector<Expr> sol, const Point& params);
  CVector operator()(const Coords& p) const;
  int dim() const { return static_cast<int>(sol_.size()); }

 private:
  std::vector<Expr> sol_;
  Point params_;
  std::vector<AtomP> coords_;
};

struct NumResult {
  double value = 0;  // max deviation or residual
  int points = 0;
  std::optional<Coords> worst;
  std::string str() const;
};

// (i dt - H) applied to G(sol), max |.| over random points.
NumResult generator_residual(const ModelSpec& m, const GradedGenerator& G, const std::vector<Expr>& sol,
                             uint64_t seed = kDefaultSeed, int points = 50);

struct FiniteOptions {
  uint64_t seed = kDefaultSeed;
  int points = 100;
  double h = 1e-3;
  double box = 2.0;  // spatial sampling half-width
};

// PDE residual of the transformed solution by finite differences, relative to max |Psi~|.
NumResult finite_residual(const ModelSpec& m, const FiniteTransformation& T, double lambda,
                          const std::vector<Expr>& sol, const Point& params, const FiniteOptions& opt = {});

// |T(l1) T(l2) - T(l1 + l2)| on coordinates and multiplier entries.
NumResult group_law(const FiniteTransformation& T, double l1, double l2, uint64_t seed = kDefaultSeed,
                    int points = 50);

// Point-symmetry vector field of a first-order generator X = xi.d - M, with Phi = M u.
JetVectorField vector_field(const ModelSpec& m, const GradedGenerator& G);

// dT/dlambda at 0 against xi and Phi of v.
NumResult consistency_vector_field(const FiniteTransformation& T, const JetVectorField& v, const Point& params,
                                   uint64_t seed = kDefaultSeed, int points = 20);

struct FiniteRow {
  std::string model, transformation, generator;
  bool printed = false;
  double lambda = 0;
  std::vector<double> floor, residual;  // per solution
  double group = 0, consistency = 0;
  bool pass(double tol_residual, double tol_group, double tol_consistency) const;
};

// Every transformation of the model on the stored solutions (levels 0 and 1).
std::vector<FiniteRow> finite_suite(const ModelSpec& m, double lambda = 0.3, uint64_t seed = kDefaultSeed);
std::string finite_json(const std::vector<FiniteRow>& rows);

}  // namespace pk
