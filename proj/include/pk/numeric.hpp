#pragma once

#include "pk/expr.hpp"

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

namespace pk {

using cplx = std::complex<double>;
using Point = std::unordered_map<AtomP, cplx>;

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when an evaluation hits a near-singular point (tan pole, division by ~0).
struct SingularPoint : EvalError {
  using EvalError::EvalError;
};

// Evaluates with principal branches for sqrt and arctan. Fixed parameters (pi) need no binding.
cplx eval_numeric(const Expr& e, const Point& p);

// Evaluator that caches function-atom values for one point and tracks the largest
// intermediate magnitude seen.
class Evaluator {
 public:
  explicit Evaluator(const Point& p) : p_(p) {}
  cplx eval(const Expr& e);
  double max_magnitude() const { return maxmag_; }

 private:
  cplx atom(AtomP a);
  const Point& p_;
  std::unordered_map<AtomP, cplx> cache_;
  double maxmag_ = 0;
};

// Random points over the free symbols of a set of expressions.
//   Real parameters in [0.5, 2]; complex parameters with both parts in [0.5, 2] and the
//   partner set to the conjugate; coordinates in [-2, 2]; jets uniform in the disk of radius 2.
class Sampler {
 public:
  explicit Sampler(uint64_t seed) : rng_(seed) {}
  Point draw(const std::vector<AtomP>& symbols);
  std::mt19937_64& rng() { return rng_; }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

 private:
  std::mt19937_64 rng_;
};

std::vector<AtomP> sample_symbols(const std::vector<Expr>& es);

struct Witness {
  std::vector<std::pair<std::string, cplx>> point;
  cplx value;
  std::string str() const;
};

struct ZeroResult {
  bool zero = true;
  std::optional<Witness> witness;
  explicit operator bool() const { return zero; }
};

constexpr uint64_t kDefaultSeed = 42;
constexpr int kDefaultTrials = 20;

ZeroResult is_zero(const Expr& e, uint64_t seed = kDefaultSeed, int trials = kDefaultTrials);

// Extra bindings applied after sampling (for instance a parameter pinned to a value).
ZeroResult is_zero(const Expr& e, uint64_t seed, int trials, const Point& fixed);

}  // namespace pk
