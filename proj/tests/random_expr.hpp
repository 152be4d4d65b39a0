#pragma once

#include "pk/expr.hpp"
#include "pk/parse.hpp"
#include "pk/prolong.hpp"

#include <random>

namespace pktest {

// Random expressions over w, M, kappa, t, x, u1, cu1, u2_x with elementary functions.
struct RandomExpr {
  std::mt19937_64 rng;
  explicit RandomExpr(uint64_t seed) : rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  pk::Expr leaf() {
    static const char* names[] = {"w", "M", "kappa", "t", "x", "u1", "cu1", "u2_x"};
    switch (pick(3)) {
      case 0: {
        long p = pick(9) - 4, q = pick(4) + 1;
        if (p == 0) p = 1;
        return pk::Expr::ratio(p, q);
      }
      case 1:
        return pk::Expr::imag_unit() * pk::Expr(pick(3) + 1);
      default:
        return pk::parse(names[pick(8)]);
    }
  }

  pk::Expr polynomial(int depth) {
    if (depth <= 0) return leaf();
    switch (pick(4)) {
      case 0: return polynomial(depth - 1) + polynomial(depth - 1);
      case 1: return polynomial(depth - 1) * polynomial(depth - 1);
      case 2: return pk::pow(polynomial(depth - 1), pick(3));
      default: return leaf();
    }
  }

  pk::Expr any(int depth) {
    if (depth <= 0) return leaf();
    switch (pick(7)) {
      case 0: return any(depth - 1) + any(depth - 1);
      case 1: return any(depth - 1) * any(depth - 1);
      case 2: return pk::pow(any(depth - 1), pick(3));
      case 3: {
        static const char* fs[] = {"sin", "cos", "exp", "sqrt"};
        return pk::func(fs[pick(4)], polynomial(1));
      }
      case 4: return pk::pow(leaf() + pk::Expr(5), -1);
      case 5: return any(depth - 1) - any(depth - 1);
      default: return leaf();
    }
  }
};

// Polynomial in t, x, u1, u2 with small rational coefficients.
inline pk::Expr random_poly(RandomExpr& g) {
  static const char* vars[] = {"t", "x", "u1", "u2"};
  pk::Expr e;
  int n = g.pick(3) + 1;
  for (int k = 0; k < n; ++k) {
    pk::Expr m = pk::Expr::ratio(g.pick(7) - 3, g.pick(3) + 1);
    int deg = g.pick(3);
    for (int d = 0; d < deg; ++d) m *= pk::parse(vars[g.pick(4)]);
    e += m;
  }
  return e;
}

// Field on (t, x; u1, u2) with polynomial components.
inline pk::JetVectorField random_field(RandomExpr& g) {
  return pk::JetVectorField({pk::coord(0), pk::coord(1)}, {random_poly(g), random_poly(g)},
                            {{{1, false}, random_poly(g)}, {{2, false}, random_poly(g)}});
}

}  // namespace pktest
