#pragma once

#include "pk/coeff.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pk {

// Derivative orders in (t, x, y).
struct MultiIndex {
  std::array<int, 3> n{0, 0, 0};

  MultiIndex() = default;
  MultiIndex(int t, int x, int y) : n{t, x, y} {}
  static MultiIndex unit(int k) {
    MultiIndex m;
    m.n[k] = 1;
    return m;
  }

  int order() const { return n[0] + n[1] + n[2]; }
  bool is_zero() const { return order() == 0; }
  int operator[](int k) const { return n[k]; }
  MultiIndex operator+(const MultiIndex& o) const { return {n[0] + o.n[0], n[1] + o.n[1], n[2] + o.n[2]}; }
  MultiIndex operator-(const MultiIndex& o) const { return {n[0] - o.n[0], n[1] - o.n[1], n[2] - o.n[2]}; }
  bool leq(const MultiIndex& o) const { return n[0] <= o.n[0] && n[1] <= o.n[1] && n[2] <= o.n[2]; }
  auto operator<=>(const MultiIndex&) const = default;

  // "tx", "xx", "" for the zero index.
  std::string letters() const;
};

enum class AtomKind : uint8_t { Param = 0, Coord = 1, Jet = 2, Unknown = 3, Func = 4, Inverse = 5 };

// Sampling class of a parameter.
//   Real:    drawn from [0.5, 2]
//   Complex: real and imaginary part drawn from [0.5, 2]; the partner gets the conjugate
//   Fixed:   constant with a known value (pi)
enum class ParamDomain : uint8_t { Real, Complex, Fixed };

struct Atom;
using AtomP = const Atom*;
using Factor = std::pair<AtomP, int>;
using Monomial = std::vector<Factor>;

struct Term;

class Expr {
 public:
  Expr();
  Expr(long n);
  Expr(const Coeff& c);
  static Expr atom(AtomP a, int e = 1);
  static Expr from_terms(std::vector<Term> terms);  // canonicalizes
  static Expr imag_unit() { return Expr(Coeff::imag_unit()); }
  static Expr ratio(long p, long q) { return Expr(Coeff::ratio(p, q)); }

  const std::vector<Term>& terms() const { return *d_; }
  size_t size() const;
  bool is_zero() const { return d_->empty(); }
  std::optional<Coeff> constant() const;  // set iff the expression is a number
  std::optional<AtomP> as_symbol() const;  // set iff the expression is a bare atom

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  Expr operator-() const;
  Expr& operator+=(const Expr& o) { return *this = *this + o; }
  Expr& operator-=(const Expr& o) { return *this = *this - o; }
  Expr& operator*=(const Expr& o) { return *this = *this * o; }

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  std::string str() const;
  size_t hash() const;

 private:
  explicit Expr(std::shared_ptr<const std::vector<Term>> d) : d_(std::move(d)) {}
  std::shared_ptr<const std::vector<Term>> d_;
};

struct Term {
  Coeff c;
  Monomial m;
};

// Interned, immutable symbol or function node; compared by pointer for identity.
struct Atom {
  AtomKind kind;
  std::string name;
  int index = 0;                // Coord: 0,1,2 for t,x,y. Jet: dependent index (1-based)
  bool conj = false;            // Jet: conjugate flag
  MultiIndex J;                 // Jet derivative index
  ParamDomain domain = ParamDomain::Real;
  double value = 0;             // Fixed parameter value
  std::string conj_name;        // Param / Unknown conjugate partner, empty if self-conjugate
  std::vector<AtomP> args;      // Unknown: argument symbols
  std::vector<int> deriv;       // Unknown: derivative count per argument
  Expr arg;                     // Func argument, Inverse base
  std::vector<AtomP> free;      // symbols (Param/Coord/Jet) and Unknown atoms occurring, sorted by address
  bool has_unknown = false;
  size_t hash = 0;

  bool depends_on(AtomP s) const;
  std::string str() const;
};

// Atom constructors (interned).
AtomP param(const std::string& name, ParamDomain d = ParamDomain::Real, const std::string& conj_name = "",
            double value = 0);
AtomP find_param(const std::string& name);  // nullptr if never declared
AtomP coord(int k);
AtomP coord(const std::string& name);  // "t", "x", "y"
AtomP jet(int alpha, bool conj, const MultiIndex& J = {});
AtomP unknown(const std::string& name, const std::vector<AtomP>& args, const std::vector<int>& deriv,
              const std::string& conj_name = "");

// Total order on atoms: parameters < coordinates < jets < unknowns < functions < inverses.
int compare(AtomP a, AtomP b);
int compare(const Monomial& a, const Monomial& b);
int compare(const Expr& a, const Expr& b);

Expr sym(AtomP a);
Expr pow(const Expr& e, int n);
Expr func(const std::string& name, const Expr& arg);  // sin cos exp sqrt tan arctan
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr sqrt(const Expr& a);
Expr tan(const Expr& a);
Expr arctan(const Expr& a);

Expr differentiate(const Expr& e, AtomP v);
Expr differentiate(const Expr& e, AtomP v, int times);

using Bindings = std::map<AtomP, Expr>;
// Simultaneous substitution of symbols.
Expr substitute(const Expr& e, const Bindings& b);

// Replacement of an unknown function by a body written over formal argument symbols.
struct FunctionDef {
  std::vector<AtomP> params;
  Expr body;
};
using FunctionBindings = std::map<std::string, FunctionDef>;
Expr substitute_functions(const Expr& e, const FunctionBindings& b);

Expr conj(const Expr& e);

// Free symbols (Param, Coord, Jet) and Unknown atoms, in atom order.
std::vector<AtomP> free_atoms(const Expr& e);
bool depends_on(const Expr& e, AtomP s);
bool has_unknown(const Expr& e);

// Groups terms by the sub-monomial made of atoms selected by `pick`.
std::vector<std::pair<Monomial, Expr>> collect(const Expr& e, const std::function<bool(AtomP)>& pick);

Expr monomial_expr(const Monomial& m);
std::string monomial_str(const Monomial& m);

// Scales the expression so that its first term has coefficient 1; zero stays zero.
Expr make_monic(const Expr& e);

}  // namespace pk

template <>
struct std::hash<pk::Expr> {
  size_t operator()(const pk::Expr& e) const { return e.hash(); }
};
