#include "pk/coeff.hpp"

#include <cmath>
#include <stdexcept>

namespace pk {

Coeff operator/(const Coeff& a, const Coeff& b) {
  if (b.is_zero()) throw std::domain_error("division by zero coefficient");
  if (b.is_real()) return Coeff(a.re / b.re, a.im / b.re);
  mpq_class n = b.re * b.re + b.im * b.im;
  Coeff num = a * b.conj();
  return Coeff(num.re / n, num.im / n);
}

int Coeff::compare(const Coeff& o) const {
  int c = cmp(re, o.re);
  if (c != 0) return c < 0 ? -1 : 1;
  c = cmp(im, o.im);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

static std::string imag_str(const mpq_class& q) {
  if (q == 1) return "i";
  if (q == -1) return "-i";
  return q.get_str() + "*i";
}

std::string Coeff::str() const {
  if (sgn(im) == 0) return re.get_str();
  if (sgn(re) == 0) return imag_str(im);
  std::string s = "(" + re.get_str();
  if (sgn(im) > 0)
    s += " + " + imag_str(im);
  else
    s += " - " + imag_str(-im);
  return s + ")";
}

static bool rationalize_real(double v, mpq_class& out, long max_den, double tol) {
  // Continued fraction expansion, stop at the first convergent within tol.
  double x = v;
  long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  for (int it = 0; it < 40; ++it) {
    double fl = std::floor(x);
    if (std::abs(fl) > 1e12) return false;
    long a = static_cast<long>(fl);
    long h2 = a * h1 + h0, k2 = a * k1 + k0;
    if (k2 > max_den) return false;
    if (std::abs(static_cast<double>(h2) / static_cast<double>(k2) - v) <= tol * (1 + std::abs(v))) {
      out = mpq_class(h2, k2);
      out.canonicalize();
      return true;
    }
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    double frac = x - fl;
    if (frac < 1e-15) return false;
    x = 1.0 / frac;
  }
  return false;
}

bool rationalize(std::complex<double> z, Coeff& out, long max_den, double tol) {
  double scale = tol * (1 + std::abs(z));
  mpq_class re = 0, im = 0;
  if (std::abs(z.real()) > scale && !rationalize_real(z.real(), re, max_den, tol)) return false;
  if (std::abs(z.imag()) > scale && !rationalize_real(z.imag(), im, max_den, tol)) return false;
  out = Coeff(re, im);
  return true;
}

}  // namespace pk
