#pragma once

#include <gmpxx.h>

#include <complex>
#include <string>

namespace pk {

// Gaussian rational re + im*i with arbitrary precision parts.
struct Coeff {
  mpq_class re{0};
  mpq_class im{0};

  Coeff() = default;
  Coeff(long n) : re(n) {}
  Coeff(mpq_class r, mpq_class i = 0) : re(std::move(r)), im(std::move(i)) {}

  static Coeff imag_unit() { return Coeff(0, 1); }
  static Coeff ratio(long p, long q) {
    mpq_class r(p, q);
    r.canonicalize();
    return Coeff(r);
  }

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  bool is_one() const { return re == 1 && sgn(im) == 0; }
  bool is_real() const { return sgn(im) == 0; }

  Coeff conj() const { return Coeff(re, -im); }
  Coeff operator-() const { return Coeff(-re, -im); }

  std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }

  friend Coeff operator+(const Coeff& a, const Coeff& b) { return Coeff(a.re + b.re, a.im + b.im); }
  friend Coeff operator-(const Coeff& a, const Coeff& b) { return Coeff(a.re - b.re, a.im - b.im); }
  friend Coeff operator*(const Coeff& a, const Coeff& b) {
    return Coeff(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
  }
  friend Coeff operator/(const Coeff& a, const Coeff& b);
  friend bool operator==(const Coeff& a, const Coeff& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const Coeff& a, const Coeff& b) { return !(a == b); }

  Coeff& operator+=(const Coeff& o) {
    re += o.re;
    im += o.im;
    return *this;
  }

  // -1, 0, 1 ordering: real part first, then imaginary part.
  int compare(const Coeff& o) const;

  // Parseable text: "3/2", "-i", "1/2*i", "(1 - 2*i)".
  std::string str() const;
};

// Best Gaussian-rational approximation with denominators up to max_den, if within tol.
bool rationalize(std::complex<double> z, Coeff& out, long max_den = 720, double tol = 1e-7);

}  // namespace pk
